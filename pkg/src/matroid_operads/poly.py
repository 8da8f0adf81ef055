"""Sparse commutative polynomials with exact rational coefficients.

A monomial is a tuple of ``(variable, exponent)`` pairs sorted by variable;
a polynomial is a dict monomial -> Fraction.  Variables in one polynomial
must be mutually comparable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, Iterable, Tuple

Monomial = Tuple[Tuple[Hashable, int], ...]
Poly = Dict[Monomial, Fraction]

ONE_MONO: Monomial = ()


def mono(*pairs) -> Monomial:
    acc: Dict[Hashable, int] = {}
    for v, e in pairs:
        if e:
            acc[v] = acc.get(v, 0) + e
    return tuple(sorted(acc.items()))


def mono_from_dict(d: Dict[Hashable, int]) -> Monomial:
    return tuple(sorted((v, e) for v, e in d.items() if e))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_support(m: Monomial) -> Tuple[Hashable, ...]:
    return tuple(v for v, _ in m)


def var(v) -> Poly:
    return {((v, 1),): Fraction(1)}


def const(c) -> Poly:
    c = Fraction(c)
    return {ONE_MONO: c} if c else {}


def add(p: Poly, q: Poly, scale=1) -> Poly:
    out = dict(p)
    for m, c in q.items():
        nc = out.get(m, 0) + scale * c
        if nc:
            out[m] = Fraction(nc)
        else:
            out.pop(m, None)
    return out


def scale(p: Poly, s) -> Poly:
    if not s:
        return {}
    return {m: c * s for m, c in p.items()}


def mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = mono_mul(m1, m2)
            nc = out.get(m, 0) + c1 * c2
            if nc:
                out[m] = nc
            else:
                out.pop(m, None)
    return out


def power(p: Poly, n: int) -> Poly:
    out = const(1)
    for _ in range(n):
        out = mul(out, p)
    return out


def product(ps: Iterable[Poly]) -> Poly:
    out = const(1)
    for p in ps:
        out = mul(out, p)
    return out


def linear(terms: Dict[Hashable, Fraction]) -> Poly:
    """Linear form ``sum c_v v``."""
    return {((v, 1),): Fraction(c) for v, c in terms.items() if c}


def substitute(p: Poly, images: Dict[Hashable, Poly]) -> Poly:
    """Replace each variable ``v`` by ``images[v]`` (variables missing from ``images`` stay)."""
    out: Poly = {}
    cache: Dict[Tuple[Hashable, int], Poly] = {}
    for m, c in p.items():
        term = const(c)
        for v, e in m:
            key = (v, e)
            if key not in cache:
                cache[key] = power(images[v], e) if v in images else {((v, e),): Fraction(1)}
            term = mul(term, cache[key])
        out = add(out, term)
    return out


def homogeneous_degree(p: Poly) -> int:
    degs = {mono_degree(m) for m in p}
    if len(degs) > 1:
        raise ValueError("polynomial is not homogeneous")
    return degs.pop() if degs else 0
