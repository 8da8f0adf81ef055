"""Combinatorial Leray models of built lattices and their homology.

The model is the graded-commutative algebra on odd ``e_G`` and even ``x_G``
(one of each per member of the building set) modulo

* the monomials ``e_S x_T`` whose combined support is not nested,
* the linear forms ``sum_{G >= H} x_G`` for every atom ``H``,
* ``e_top`` (projective variant only; the affine variant keeps it),

with ``d(e_G) = x_G``.  Internally a basis element of bidegree ``(a, q)``
has ``x``-degree ``a`` and ``e``-degree ``q``, so ``d`` maps ``(a, q)`` to
``(a + 1, q - 1)``.  Reports use the cohomological bidegree ``(2a, q)``
(``x`` has weight 2), where ``d`` has bidegree ``(2, -1)``.  In the projective variant there is simply no ``e_top``
generator, which keeps ``d`` well defined.

Two independent descriptions are built: the quotient algebra (row
reduction of the ideal, used as the oracle) and the nested-set
decomposition ``sum over S of (tensor of local FY rings)``, lifted into the
quotient through preimages under the FY cooperad maps.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from . import poly as P
from .building import (BuildingSet, NestedSet, comp, decompose_nested, enumerate_nested_sets,
                       local_intervals)
from .fy import FYAlgebra, compositions, fy_algebra, structure_key
from .linalg import Echelon, kernel, vec_add
from .operad import Built, FYNestedMap, os_algebra
from .os_algebra import delta_monomial, sort_sign

PROJECTIVE = "projective"
AFFINE = "affine"
VARIANTS = (PROJECTIVE, AFFINE)
MAX_LIVE = 200000

ESet = Tuple[int, ...]
Term = Tuple[ESet, P.Monomial]
Vec = Dict[Term, Fraction]


class LerayError(ValueError):
    pass


def _add(target: Vec, other: Vec, scale=1) -> Vec:
    return vec_add(target, other, Fraction(scale))


class LerayModel:
    def __init__(self, B: BuildingSet, variant: str = PROJECTIVE):
        if variant not in VARIANTS:
            raise LerayError(f"unknown variant {variant!r}")
        if not B.irreducible:
            raise LerayError("Leray models are built for irreducible building sets")
        self.building = B
        self.variant = variant
        L = self.lattice = B.lattice
        self.rank = L.rk
        self.top = L.top
        self.e_gens = [g for g in B.members if variant == AFFINE or g != L.top]
        self._upper = {h: [g for g in B.members if L.leq(h, g)] for h in L.atom_ids}
        self.nested = [S.members for S in enumerate_nested_sets(B)]
        self._nested = set(self.nested)
        # live monomials (nested combined support), per bidegree
        self.live: Dict[Tuple[int, int], List[Term]] = {}
        for U in self.nested:
            us = sorted(U)
            for q in range(len(us) + 1):
                for e in itertools.combinations(us, q):
                    if any(g not in self.e_gens for g in e):
                        continue
                    rest = [g for g in us if g not in e]
                    # x-support must cover U \ e and may use members of e
                    for extra in _subsets(list(e)):
                        X = sorted(rest + list(extra))
                        if not X:
                            self.live.setdefault((0, q), []).append((e, P.ONE_MONO))
                            continue
                        for a in range(len(X), self.rank + 1):
                            for exps in compositions(a, len(X)):
                                self.live.setdefault((a, q), []).append((e, tuple(zip(X, exps))))
        if sum(len(v) for v in self.live.values()) > MAX_LIVE:
            raise LerayError(f"more than {MAX_LIVE} live monomials")
        for k in self.live:
            self.live[k].sort()
        self._ech: Dict[Tuple[int, int], Echelon] = {}
        self.basis: Dict[Tuple[int, int], List[Term]] = {}
        self.index: Dict[Tuple[int, int], Dict[Term, int]] = {}
        for (a, q) in sorted(self.live):
            self._build(a, q)
        for (a, q), b in self.basis.items():
            if a >= self.rank and b:
                raise AssertionError("quotient does not vanish in x-degree rk")
        self._d: Dict[Tuple[int, int], List[Vec]] = {}

    # -- quotient ------------------------------------------------------------
    def is_live(self, e: ESet, x: P.Monomial) -> bool:
        return frozenset(e) | frozenset(P.mono_support(x)) in self._nested

    def _build(self, a: int, q: int) -> None:
        ech = Echelon()
        if a > 0:
            for e, x in self.live.get((a - 1, q), []):
                for h, ups in self._upper.items():
                    row: Vec = {}
                    for g in ups:
                        y = P.mono_mul(x, ((g, 1),))
                        if self.is_live(e, y):
                            row[(e, y)] = Fraction(1)
                    if row:
                        ech.add(row)
        self._ech[(a, q)] = ech
        self.basis[(a, q)] = [t for t in self.live[(a, q)] if t not in ech.rows]
        self.index[(a, q)] = {t: i for i, t in enumerate(self.basis[(a, q)])}

    def bidegrees(self) -> List[Tuple[int, int]]:
        return sorted(k for k, b in self.basis.items() if b)

    def dims(self) -> Dict[Tuple[int, int], int]:
        return {k: len(b) for k, b in sorted(self.basis.items()) if b}

    def dims_by_e_degree(self) -> List[int]:
        out: Dict[int, int] = {}
        for (a, q), b in self.basis.items():
            out[q] = out.get(q, 0) + len(b)
        return [out.get(q, 0) for q in range(max(out) + 1)] if out else []

    def reduce(self, v: Vec) -> Vec:
        """Normal form: drop dead monomials, then reduce per bidegree."""
        out: Vec = {}
        groups: Dict[Tuple[int, int], Vec] = {}
        for (e, x), c in v.items():
            if not c:
                continue
            if any(g not in self.e_gens for g in e):
                continue
            if not self.is_live(e, x):
                continue
            key = (P.mono_degree(x), len(e))
            if key not in self._ech:
                # above the computed range everything vanishes
                if key[0] >= self.rank:
                    continue
                raise LerayError(f"bidegree {key} is outside the model")
            _add(groups.setdefault(key, {}), {(e, x): c})
        for key, w in groups.items():
            _add(out, self._ech[key].reduce(w))
        return out

    def multiply(self, u: Vec, v: Vec) -> Vec:
        out: Vec = {}
        for (e1, x1), c1 in u.items():
            for (e2, x2), c2 in v.items():
                s, e = sort_sign(e1 + e2)
                if not s:
                    continue
                _add(out, {(e, P.mono_mul(x1, x2)): c1 * c2 * s})
        return self.reduce(out)

    def coordinates(self, v: Vec, key: Tuple[int, int]) -> Dict[int, Fraction]:
        idx = self.index.get(key, {})
        out = {}
        for t, c in v.items():
            if t not in idx:
                raise LerayError("vector is not reduced or has the wrong bidegree")
            out[idx[t]] = c
        return out

    # -- differential --------------------------------------------------------
    def d_term(self, e: ESet, x: P.Monomial) -> Vec:
        """d(e_{G1} .. e_{Gq} x) = sum_i (-1)^(i-1) e_{..Gi^..} x_{Gi} x."""
        out: Vec = {}
        for i, g in enumerate(e):
            _add(out, {(e[:i] + e[i + 1:], P.mono_mul(x, ((g, 1),))): Fraction(-1 if i % 2 else 1)})
        return out

    def d(self, v: Vec) -> Vec:
        out: Vec = {}
        for (e, x), c in v.items():
            _add(out, self.d_term(e, x), c)
        return self.reduce(out)

    def differential(self, a: int, q: int) -> List[Vec]:
        """Images of the basis of bidegree ``(a, q)``, reduced in ``(a + 1, q - 1)``."""
        key = (a, q)
        if key not in self._d:
            self._d[key] = [self.d({t: Fraction(1)}) for t in self.basis.get(key, [])]
        return self._d[key]

    def d_squared_failures(self) -> List[Tuple[int, int]]:
        bad = []
        for (a, q) in self.bidegrees():
            for img in self.differential(a, q):
                if self.d(img):
                    bad.append((a, q))
                    break
        return bad

    def d_rank(self, a: int, q: int) -> int:
        ech = Echelon()
        ech.extend(v for v in self.differential(a, q) if v)
        return ech.rank

    def homology_bigraded(self) -> Dict[Tuple[int, int], int]:
        out = {}
        for (a, q) in self.bidegrees():
            n = len(self.basis[(a, q)])
            ker = n - self.d_rank(a, q)
            im = self.d_rank(a - 1, q + 1) if a > 0 else 0
            h = ker - im
            if h:
                out[(a, q)] = h
        return out

    def homology(self) -> List[int]:
        """Total homology per weight ``a + q`` (preserved by d)."""
        hb = self.homology_bigraded()
        out: Dict[int, int] = {}
        for (a, q), h in hb.items():
            out[a + q] = out.get(a + q, 0) + h
        return [out.get(w, 0) for w in range(max(out) + 1)] if out else []

    # -- comparison with OS ----------------------------------------------------
    def e_of_atom(self, atom_index: int) -> Vec:
        h = self.lattice.atom_ids[atom_index]
        return {((g,), P.ONE_MONO): Fraction(1) for g in self._upper[h] if g in self.e_gens}

    def iota_monomial(self, m: Sequence[int]) -> Vec:
        out: Vec = {((), P.ONE_MONO): Fraction(1)}
        for a in m:
            out = self.multiply(out, self.e_of_atom(a))
        return out

    def iota(self, v: Dict[Tuple[int, ...], Fraction]) -> Vec:
        out: Vec = {}
        for m, c in v.items():
            _add(out, self.iota_monomial(m), c)
        return out

    def os_comparison(self) -> dict:
        """Check that e_H -> sum_{G >= H} e_G induces an isomorphism on homology.

        The source is the reduced OS algebra (projective) or OS (affine).
        Nothing maps into the row ``a = 0``, so homology there is the kernel
        of ``d``; the map is an isomorphism on homology when its image has
        full rank and fills that kernel, and all other homology vanishes.
        """
        OS = os_algebra(self.lattice)
        relations_ok = True
        for c in OS.circuits:
            if self.iota(delta_monomial(c)):
                relations_ok = False
        if self.variant == PROJECTIVE:
            levels = [lvl.basis for lvl in OS.projective.levels]
        else:
            levels = [[{m: Fraction(1)} for m in b] for b in OS.basis]
        source_dims = [len(b) for b in levels]
        while len(source_dims) > 1 and source_dims[-1] == 0:
            source_dims.pop()
        cycles_ok = True
        full_rank = True
        for k, vecs in enumerate(levels):
            imgs = [self.iota(v) for v in vecs]
            if any(self.d(w) for w in imgs):
                cycles_ok = False
            ech = Echelon()
            ech.extend(w for w in imgs if w)
            if ech.rank != len(vecs):
                full_rank = False
        hb = self.homology_bigraded()
        off_row = {k: v for k, v in hb.items() if k[0] != 0}
        row = [hb.get((0, k), 0) for k in range(len(source_dims))]
        hom = self.homology()
        return {
            "source_dims": source_dims,
            "homology": hom,
            "relations_vanish": relations_ok,
            "lands_in_cycles": cycles_ok,
            "injective": full_rank,
            "concentrated": not off_row,
            "verdict": relations_ok and cycles_ok and full_rank and not off_row
                       and row == source_dims and hom == source_dims,
        }

    # -- decomposition -------------------------------------------------------
    def decomposition_index(self) -> List[FrozenSet[int]]:
        """e-supports: nested sets avoiding the top (projective) or any nested set (affine)."""
        return [S for S in self.nested if self.variant == AFFINE or self.top not in S]

    def completed(self, S: FrozenSet[int]) -> NestedSet:
        return NestedSet(self.building, S | {self.top}, validate=False)

    def local_algebras(self, S: FrozenSet[int]) -> List[Tuple[int, FYAlgebra]]:
        N = self.completed(S)
        return [(g, fy_algebra(li.building)) for g, li in sorted(local_intervals(N).items())]

    def decomposition_dims(self) -> Dict[Tuple[int, int], int]:
        """Bigraded dimensions predicted by the tensor products of local FY rings."""
        out: Dict[Tuple[int, int], int] = {}
        for S in self.decomposition_index():
            hil = [1]
            for _, A in self.local_algebras(S):
                hil = _convolve(hil, A.hilbert)
            for a, n in enumerate(hil):
                if n:
                    out[(a, len(S))] = out.get((a, len(S)), 0) + n
        return dict(sorted(out.items()))

    def lift(self, S: FrozenSet[int], parts: Dict[Tuple[P.Monomial, ...], Fraction]) -> Vec:
        """Element of the decomposition at ``S`` (local monomials, ordered by
        member id of the completed nested set) to the quotient.

        Each local ``x`` is written in local ``h`` variables, ``h_K`` goes
        to ``h_{Comp(K)}`` (a preimage under the FY cooperad map) and the
        product is multiplied by ``e_S``.
        """
        N = self.completed(S)
        lis = sorted(local_intervals(N).items())
        e = tuple(sorted(S))
        out: Vec = {}
        for key, coef in parts.items():
            poly = P.const(coef)
            for (g, li), mono in zip(lis, key):
                A = fy_algebra(li.building)
                images = {}
                for k, _ in mono:
                    loc = A.x_in_h(k)
                    lifted: P.Poly = {}
                    for m, c in loc.items():
                        (kk, _), = m
                        F = comp(self.building, li.lo, li.to_parent(kk))
                        lifted = P.add(lifted, self._h(F), c)
                    images[k] = lifted
                poly = P.mul(poly, P.substitute({mono: Fraction(1)}, images))
            for x, c in poly.items():
                _add(out, {(e, x): c})
        return self.reduce(out)

    def _h(self, F: int) -> P.Poly:
        L = self.lattice
        return P.linear({g: 1 for g in self.building.members if L.leq(F, g)})

    def decomposition_rank(self) -> Dict[Tuple[int, int], int]:
        """Rank of the lifted decomposition basis per bidegree."""
        echs: Dict[Tuple[int, int], Echelon] = {}
        for S in self.decomposition_index():
            algs = self.local_algebras(S)
            for key in itertools.product(*[A.flat_basis for _, A in algs]):
                a = sum(P.mono_degree(m) for m in key)
                v = self.lift(S, {key: Fraction(1)})
                echs.setdefault((a, len(S)), Echelon()).add(v)
        return {k: e.rank for k, e in sorted(echs.items()) if e.rank}

    def lift_well_defined(self) -> List[FrozenSet[int]]:
        """Nested sets where ``e_S`` does not kill the kernel of the FY cooperad map."""
        bad = []
        root = Built.root(self.building)
        src = fy_algebra(self.building)
        for S in self.decomposition_index():
            N = self.completed(S)
            if len(N) == 1:
                continue
            fmap = FYNestedMap(N, root)
            e = tuple(sorted(S))
            for kv in kernel(fmap.map.cols):
                v: Vec = {}
                for j, c in kv.items():
                    _add(v, {(e, src.flat_basis[j]): c})
                if self.reduce(v):
                    bad.append(S)
                    break
        return bad

    # -- operadic product ----------------------------------------------------
    def push(self, S: FrozenSet[int], parts, T: FrozenSet[int]):
        """Apply the FY cooperad map of ``T`` (a superset of ``S``) factorwise.

        Each local piece of ``T`` inside the local interval of ``S`` at ``G``
        is a nested set there; the local FY map sends the factor at ``G``
        into the local rings of ``T``.
        """
        NS = self.completed(S)
        NT = self.completed(T)
        lis_s = sorted(local_intervals(NS).items())
        order_t = sorted(NT.members)
        pieces = decompose_nested(NT, NS.members)
        root = Built.root(self.building)
        maps = []
        for g, li in lis_s:
            loc = Built(li.building, [li.to_parent(i) for i in range(li.lattice.size)])
            fm = FYNestedMap(pieces[g], loc)
            targets = [comp(self.building, li.lo, li.to_parent(k)) for k in fm.order]
            maps.append((fm, targets))
        lis_t = dict(local_intervals(NT))
        for fm, targets in maps:
            for b, t in zip(fm.locals, targets):
                if structure_key(b.building) != structure_key(lis_t[t].building):
                    raise AssertionError("nested local intervals do not match")
        out: Dict[Tuple[P.Monomial, ...], Fraction] = {}
        for key, coef in parts.items():
            acc = {(): Fraction(coef)}
            tgt_acc: List[int] = []
            for (fm, targets), mono in zip(maps, key):
                img = fm.apply_affine({mono: Fraction(1)})
                nxt = {}
                for j, c in img.items():
                    idx = fm.dst.split(j)
                    monos = tuple(a.flat_basis[i] for a, i in zip(fm.algs, idx))
                    for k0, c0 in acc.items():
                        nxt[k0 + monos] = nxt.get(k0 + monos, 0) + c0 * c
                acc = nxt
                tgt_acc.extend(targets)
            perm = sorted(range(len(tgt_acc)), key=tgt_acc.__getitem__)
            if [tgt_acc[i] for i in perm] != order_t:
                raise AssertionError("pushed factors do not cover the target nested set")
            for k0, c0 in acc.items():
                if c0:
                    k1 = tuple(k0[i] for i in perm)
                    out[k1] = out.get(k1, 0) + c0
        return {k: c for k, c in out.items() if c}

    def bar_product(self, S: FrozenSet[int], alpha, S2: FrozenSet[int], beta):
        """Product of decomposition elements computed with FY cooperad maps.

        Zero unless the completed nested sets meet only in the top and their
        union is nested; otherwise both are pushed to the union and
        multiplied factorwise.  Returns ``(union, parts)`` or ``None``.
        """
        if S & S2:
            return None
        U = S | S2
        if U not in self._nested or (self.variant == PROJECTIVE and self.top in U):
            return None
        a = self.push(S, alpha, U)
        b = self.push(S2, beta, U)
        algs = [A for _, A in self.local_algebras(U)]
        out: Dict[Tuple[P.Monomial, ...], Fraction] = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                terms = [{(): Fraction(1)}]
                for A, ma, mb in zip(algs, ka, kb):
                    red = A.reduce_monomial(P.mono_mul(ma, mb))
                    terms.append(red)
                acc = {(): ca * cb}
                for red in terms[1:]:
                    nxt = {}
                    for k0, c0 in acc.items():
                        for m, c in red.items():
                            nxt[k0 + (m,)] = nxt.get(k0 + (m,), 0) + c0 * c
                    acc = nxt
                for k, c in acc.items():
                    out[k] = out.get(k, 0) + c
        return U, {k: c for k, c in out.items() if c}

    def check_bar_product(self, limit: Optional[int] = None) -> dict:
        """Compare the operadic product with multiplication in the quotient.

        The quotient product of lifts equals the lift of the operadic
        product times the sign of merging the two sorted e-words.
        """
        checked = 0
        failures = []
        index = self.decomposition_index()
        basis = {S: list(itertools.product(*[A.flat_basis for _, A in self.local_algebras(S)]))
                 for S in index}
        for S, S2 in itertools.product(index, repeat=2):
            for ka in basis[S]:
                for kb in basis[S2]:
                    lhs = self.multiply(self.lift(S, {ka: Fraction(1)}), self.lift(S2, {kb: Fraction(1)}))
                    res = self.bar_product(S, {ka: Fraction(1)}, S2, {kb: Fraction(1)})
                    if res is None:
                        rhs: Vec = {}
                    else:
                        U, parts = res
                        s, _ = sort_sign(tuple(sorted(S)) + tuple(sorted(S2)))
                        rhs = {k: c * s for k, c in self.lift(U, parts).items()}
                    checked += 1
                    diff = dict(lhs)
                    _add(diff, rhs, -1)
                    if diff:
                        failures.append((sorted(S), sorted(S2)))
                    if limit is not None and checked >= limit:
                        return {"checked": checked, "failures": failures, "pass": not failures}
        return {"checked": checked, "failures": failures, "pass": not failures}

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "bigraded_dims": [[2 * a, q, n] for (a, q), n in self.dims().items()],
            "dims_by_e_degree": self.dims_by_e_degree(),
        }


def _subsets(xs):
    for r in range(len(xs) + 1):
        yield from itertools.combinations(xs, r)


def _convolve(a: List[int], b: List[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


_CACHE: Dict[tuple, LerayModel] = {}


def build_leray(B: BuildingSet, variant: str = PROJECTIVE) -> LerayModel:
    key = (structure_key(B), variant)
    m = _CACHE.get(key)
    if m is None:
        m = LerayModel(B, variant)
        _CACHE[key] = m
    return m


def koszul_report(B: BuildingSet, variant: str = PROJECTIVE) -> dict:
    M = build_leray(B, variant)
    comp_ = M.os_comparison()
    return {
        "variant": variant,
        "bigraded_dims": [[2 * a, q, n] for (a, q), n in M.dims().items()],
        "homology_bigraded": [[2 * a, q, n] for (a, q), n in M.homology_bigraded().items()],
        "decomposition_agrees": M.decomposition_dims() == M.dims(),
        "d_squared_zero": not M.d_squared_failures(),
        "homology": comp_["homology"],
        "os_dims": comp_["source_dims"],
        "concentrated": comp_["concentrated"],
        "koszul": comp_["verdict"] and not M.d_squared_failures(),
    }
