"""Feichtner-Yuzvinsky rings of built lattices.

Elements are stored in the affine x-presentation on the normal monomial
basis (nested support, exponent of x_G below the rank of its local
interval).  Products are reduced by exact row reduction of each graded
piece of the ideal; the pivot columns are forced onto non-normal monomials,
so the reduced form of anything is a combination of normal monomials.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import poly as P
from .building import BuildingSet, enumerate_nested_sets, is_nested
from .lattice import Lattice
from .linalg import Echelon, dense_rank

AFFINE = "affine"
PROJECTIVE = "projective"
WONDERFUL = "wonderful"
PRESENTATIONS = (AFFINE, PROJECTIVE, WONDERFUL)


class FYError(ValueError):
    pass


def structure_key(B: BuildingSet):
    """Cache key ignoring atom labels, so equal intervals share one algebra."""
    L = B.lattice
    return (L.n_atoms, tuple(L.masks), B.members)


def compositions(total: int, parts: int, bounds=None):
    """Tuples of ``parts`` positive integers summing to ``total`` (each < bound if given)."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    hi = total - (parts - 1)
    if bounds is not None:
        hi = min(hi, bounds[0] - 1)
    for first in range(1, hi + 1):
        rest_bounds = bounds[1:] if bounds is not None else None
        for rest in compositions(total - first, parts - 1, rest_bounds):
            yield (first,) + rest


class FYAlgebra:
    """FY ring of a built lattice, graded by polynomial degree.

    Reducible building sets are accepted; their ring is the tensor product of
    the rings of the factors of the top, and the operadic parts of the code
    only ever use irreducible ones.
    """

    def __init__(self, B: BuildingSet):
        self.building = B
        self.lattice: Lattice = B.lattice
        L = self.lattice
        self.rank = L.rk
        self.top = L.top
        self.irreducible = B.irreducible
        self.factors = B.factors(L.top) if self.rank else ()
        self.top_degree = self.rank - len(self.factors)
        self.nested = enumerate_nested_sets(B)
        self._nested_supports = {ns.members for ns in self.nested}
        self._upper = {g: [h for h in B.members if L.leq(g, h)] for g in B.members}
        self.atoms = [a for a in L.atom_ids]
        self.basis: List[List[P.Monomial]] = [[] for _ in range(max(self.rank, 1))]
        for ns in self.nested:
            S = sorted(ns.members)
            bounds = [self._local_rank(ns.members, g) for g in S]
            if any(b < 2 for b in bounds):
                continue
            for d in range(len(S), self.rank):
                for exps in compositions(d, len(S), bounds):
                    self.basis[d].append(tuple(zip(S, exps)))
        self.basis[0] = [P.ONE_MONO]
        for d in range(len(self.basis)):
            self.basis[d].sort()
        if any(self.basis[self.top_degree + 1:]):
            raise AssertionError("normal monomials above the top degree")
        del self.basis[self.top_degree + 1:]
        self.index = [{m: i for i, m in enumerate(b)} for b in self.basis]
        self.flat_basis = [m for b in self.basis for m in b]
        self.flat_index = {m: i for i, m in enumerate(self.flat_basis)}
        self.flat_degrees = [d for d, b in enumerate(self.basis) for _ in b]
        self._normal = set(itertools.chain.from_iterable(self.basis))
        self._echelons: Dict[int, Echelon] = {}
        self._reduce_cache: Dict[P.Monomial, Dict[P.Monomial, Fraction]] = {}
        for d in range(1, self.rank):
            self._build_degree(d)

    # -- basis bookkeeping ----------------------------------------------
    def _local_rank(self, members, g) -> int:
        L = self.lattice
        tau = L.join_all(h for h in members if L.lt(h, g))
        return L.rank[g] - L.rank[tau]

    def is_normal(self, m: P.Monomial) -> bool:
        supp = frozenset(P.mono_support(m))
        if supp not in self._nested_supports:
            return False
        return all(e < self._local_rank(supp, g) for g, e in m)

    @property
    def hilbert(self) -> List[int]:
        return [len(b) for b in self.basis]

    @property
    def dim(self) -> int:
        return sum(self.hilbert)

    def all_basis(self) -> List[Tuple[int, P.Monomial]]:
        return [(d, m) for d, b in enumerate(self.basis) for m in b]

    def top_monomial(self) -> P.Monomial:
        L = self.lattice
        return P.mono(*((f, L.rank[f] - 1) for f in self.factors))

    # -- ideal -------------------------------------------------------------
    def _nested_monomials(self, d: int) -> List[P.Monomial]:
        out = []
        for ns in self.nested:
            S = sorted(ns.members)
            if not S or len(S) > d:
                if d == 0 and not S:
                    out.append(P.ONE_MONO)
                continue
            for exps in compositions(d, len(S)):
                out.append(tuple(zip(S, exps)))
        return out

    def _build_degree(self, d: int) -> None:
        normal = self._normal
        ech = Echelon(priority=lambda m: 1 if m in normal else 0)
        for m in self._nested_monomials(d - 1):
            supp = set(P.mono_support(m))
            for h in self.atoms:
                row = {}
                for g in self._upper[h]:
                    if g in supp or frozenset(supp | {g}) in self._nested_supports:
                        row[P.mono_mul(m, ((g, 1),))] = Fraction(1)
                if row:
                    ech.add(row)
        nonnormal = {m for m in self._nested_monomials(d) if m not in normal}
        if set(ech.pivots) != nonnormal:
            raise AssertionError(f"normal monomials do not index the quotient in degree {d}")
        self._echelons[d] = ech

    # -- reduction ---------------------------------------------------------
    def reduce_monomial(self, m: P.Monomial) -> Dict[P.Monomial, Fraction]:
        got = self._reduce_cache.get(m)
        if got is not None:
            return got
        d = P.mono_degree(m)
        for g, _ in m:
            if g not in self.building.member_set:
                raise FYError(f"unknown generator {g}")
        if d >= self.rank or frozenset(P.mono_support(m)) not in self._nested_supports:
            out = {}
        elif d == 0:
            out = {P.ONE_MONO: Fraction(1)}
        else:
            out = self._echelons[d].reduce({m: Fraction(1)})
        self._reduce_cache[m] = out
        return out

    def reduce(self, p: P.Poly, presentation: str = AFFINE) -> Dict[P.Monomial, Fraction]:
        """Normal form of a polynomial given in any presentation."""
        if presentation != AFFINE:
            p = self.change_of_variable(p, presentation, AFFINE)
        out: Dict[P.Monomial, Fraction] = {}
        for m, c in p.items():
            for n, c2 in self.reduce_monomial(m).items():
                v = out.get(n, 0) + c * c2
                if v:
                    out[n] = v
                else:
                    out.pop(n, None)
        return out

    def multiply(self, a: Dict, b: Dict) -> Dict[P.Monomial, Fraction]:
        return self.reduce(P.mul(a, b))

    def coordinates(self, v: Dict[P.Monomial, Fraction], d: int) -> List[Fraction]:
        vec = [Fraction(0)] * len(self.basis[d])
        for m, c in v.items():
            vec[self.index[d][m]] = c
        return vec

    def top_coefficient(self, v: Dict[P.Monomial, Fraction]) -> Fraction:
        return v.get(self.top_monomial(), Fraction(0))

    def degree_map(self, v: Dict[P.Monomial, Fraction]) -> Fraction:
        """Fundamental class: value 1 on the product of (-x_F)^(rk F - 1) over the factors F of the top."""
        c = self.top_coefficient(v)
        return -c if self.top_degree % 2 else c

    # -- presentations -----------------------------------------------------
    def h(self, g: int) -> P.Poly:
        """h_G = sum of x_G' over members G' >= G."""
        return P.linear({k: 1 for k in self._upper[g]})

    def x_in_h(self, g: int) -> P.Poly:
        """x_G in the h variables by Moebius inversion on the building set."""
        L = self.lattice
        mu = {g: 1}
        for k in sorted(self._upper[g], key=lambda k: L.rank[k]):
            if k == g:
                continue
            mu[k] = -sum(c for j, c in mu.items() if L.leq(j, k) and j != k)
        return P.linear(mu)

    def projective_top(self, atom: Optional[int] = None) -> P.Poly:
        """x_top written without x_top through the relation at ``atom``."""
        h = self.atoms[0] if atom is None else atom
        return P.linear({g: -1 for g in self._upper[h] if g != self.top})

    def change_of_variable(self, p: P.Poly, src: str, dst: str) -> P.Poly:
        if src not in PRESENTATIONS or dst not in PRESENTATIONS:
            raise FYError("unknown presentation")
        if src == dst:
            return dict(p)
        members = self.building.members
        if src == WONDERFUL:
            p = P.substitute(p, {g: self.h(g) for g in members})
        elif src == PROJECTIVE:
            if any(v == self.top for m in p for v, _ in m):
                raise FYError("the projective presentation has no top generator")
        # p is now affine
        if dst == WONDERFUL:
            return P.substitute(p, {g: self.x_in_h(g) for g in members})
        if dst == PROJECTIVE:
            return P.substitute(p, {self.top: self.projective_top()})
        return p

    def ideal_generators(self, presentation: str = AFFINE, max_nonnested: Optional[int] = None) -> List[P.Poly]:
        """Defining relations (linear ones and minimal non-nested monomials) in a presentation."""
        L = self.lattice
        B = self.building
        gens: List[P.Poly] = []
        if presentation == AFFINE:
            for h in self.atoms:
                gens.append(P.linear({g: 1 for g in self._upper[h]}))
        elif presentation == PROJECTIVE:
            h1 = self.atoms[0]
            for h in self.atoms[1:]:
                a = P.linear({g: 1 for g in self._upper[h1] if g != self.top})
                gens.append(P.add(a, P.linear({g: 1 for g in self._upper[h] if g != self.top}), -1))
        elif presentation == WONDERFUL:
            for h in self.atoms:
                gens.append(P.var(h))
            for g in B.members:
                below = [k for k in B.members if L.lt(k, g)]
                for r in range(2, len(below) + 1):
                    for A in itertools.combinations(below, r):
                        if any(L.leq(a, b) for a in A for b in A if a != b):
                            continue
                        if L.join_all(A) != g:
                            continue
                        gens.append(P.product(P.add(P.var(g), P.var(a), -1) for a in A))
            return gens
        else:
            raise FYError("unknown presentation")
        members = [g for g in B.members if presentation == AFFINE or g != self.top]
        bound = max_nonnested or len(members)
        for r in range(2, bound + 1):
            for X in itertools.combinations(members, r):
                if not is_nested(B, X)[0] and all(is_nested(B, Y)[0] for Y in itertools.combinations(X, r - 1)):
                    gens.append({tuple((g, 1) for g in X): Fraction(1)})
        return gens

    # -- Poincare duality --------------------------------------------------
    def pairing_matrix(self, k: int) -> List[List[Fraction]]:
        rows = self.basis[k]
        cols = self.basis[self.top_degree - k]
        return [[self.top_coefficient(self.reduce({P.mono_mul(a, b): Fraction(1)})) for b in cols]
                for a in rows]

    def pd_pairing(self) -> dict:
        mats = {}
        ok = len(self.basis[self.top_degree]) == 1
        for k in range(self.top_degree + 1):
            m = self.pairing_matrix(k)
            n = len(self.basis[k])
            square = n == len(self.basis[self.top_degree - k])
            nondeg = square and dense_rank(m) == n
            ok = ok and nondeg
            mats[k] = m
        return {"matrices": mats, "nondegenerate": ok}

    def element(self, coeffs: Dict[P.Monomial, Fraction]) -> "FYElement":
        return FYElement(self, self.reduce(coeffs))

    def to_json(self, basis: bool = False) -> dict:
        out = {"hilbert": self.hilbert, "dim": self.dim}
        if basis:
            out["basis"] = [[[[g, e] for g, e in m] for m in b] for b in self.basis]
        return out


class FYElement:
    """Exact element of an FY ring in its normal basis."""

    def __init__(self, algebra: FYAlgebra, coeffs: Dict[P.Monomial, Fraction]):
        self.algebra = algebra
        self.coeffs = {m: Fraction(c) for m, c in coeffs.items() if c}

    def __add__(self, other):
        return FYElement(self.algebra, P.add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return FYElement(self.algebra, P.add(self.coeffs, other.coeffs, -1))

    def __mul__(self, other):
        if isinstance(other, FYElement):
            return FYElement(self.algebra, self.algebra.multiply(self.coeffs, other.coeffs))
        return FYElement(self.algebra, P.scale(self.coeffs, Fraction(other)))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, FYElement) and self.coeffs == other.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        return f"FYElement({self.coeffs})"


_CACHE: Dict[tuple, FYAlgebra] = {}


def fy_algebra(B: BuildingSet) -> FYAlgebra:
    key = structure_key(B)
    alg = _CACHE.get(key)
    if alg is None:
        alg = FYAlgebra(B)
        _CACHE[key] = alg
    return alg


def fy_normal_basis(B: BuildingSet) -> List[List[P.Monomial]]:
    return fy_algebra(B).basis


def oracle_hilbert(B: BuildingSet, max_degree: Optional[int] = None) -> List[int]:
    """Graded dimensions of Q[x_G]/I by brute force.

    Every monomial of each degree is listed; those with non-nested support
    are killed by the monomial relations, and the linear relations times all
    monomials of one degree lower are row-reduced over the rationals.  No
    nested-set enumeration or normal-basis theory is used.
    """
    L = B.lattice
    members = list(B.members)
    upper = {h: [g for g in members if L.leq(h, g)] for h in L.atom_ids}
    top = max_degree if max_degree is not None else L.rk
    nested_cache: Dict[frozenset, bool] = {}

    def alive(m):
        s = frozenset(v for v, _ in m)
        r = nested_cache.get(s)
        if r is None:
            r = is_nested(B, s)[0]
            nested_cache[s] = r
        return r

    def monomials(d):
        for combo in itertools.combinations_with_replacement(members, d):
            yield P.mono(*((g, 1) for g in combo))

    dims = []
    for d in range(top + 1):
        live = [m for m in monomials(d) if alive(m)]
        if d == 0:
            dims.append(1)
            continue
        ech = Echelon()
        for m in monomials(d - 1):
            for h, ups in upper.items():
                row = {}
                for g in ups:
                    n = P.mono_mul(m, ((g, 1),))
                    if alive(n):
                        row[n] = Fraction(1)
                if row:
                    ech.add(row)
        dims.append(len(live) - ech.rank)
    return dims
