"""Structure maps of the FY cooperad, the FY^PD operad, the OS cooperad and
the odd cooperad on projective OS algebras, with a checker for the
relations presenting the nested-set category.

Every map is materialized as a sparse matrix between tensor products of
algebras, in their fixed normal bases.  Intervals are tracked through
:class:`Built`, which remembers how local element ids sit in the root
lattice so that identifications between isomorphic intervals can be built.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import poly as P
from .building import (BuildingSet, NestedSet, comp, compose_nested, enumerate_nested_sets,
                       induced_building_set, local_intervals)
from .fy import FYAlgebra, fy_algebra, structure_key
from .lattice import Lattice, automorphisms
from .os_algebra import OSAlgebra, OSVector, delta_vector, sort_sign, vadd
from .tensor import Map, Space, Tensor, identity, kron_vectors, permutation

FY, FYPD, OS, OSBAR = "fy", "fypd", "os", "osbar"
KINDS = (FY, FYPD, OS, OSBAR)


class OperadError(ValueError):
    pass


# -- built lattices tracked inside a root lattice -----------------------------

class Built:
    """A built lattice that is an interval of a root lattice."""

    def __init__(self, building: BuildingSet, to_root: Sequence[int]):
        self.building = building
        self.to_root = list(to_root)
        self.from_root = {r: i for i, r in enumerate(self.to_root)}

    @classmethod
    def root(cls, B: BuildingSet) -> "Built":
        return cls(B, range(B.lattice.size))

    @property
    def lattice(self) -> Lattice:
        return self.building.lattice

    def sub(self, lo: int, hi: int) -> "Built":
        """Interval ``[lo, hi]`` (local ids) with the induced building set."""
        iv, Bi = induced_building_set(self.building, lo, hi)
        return Built(Bi, [self.to_root[iv.to_parent(i)] for i in range(iv.lattice.size)])

    def upper(self, g: int) -> "Built":
        return self.sub(g, self.lattice.top)

    def lower(self, g: int) -> "Built":
        return self.sub(self.lattice.bottom, g)


# -- spaces ---------------------------------------------------------------

_OS_CACHE: Dict[tuple, OSAlgebra] = {}


def os_algebra(L: Lattice) -> OSAlgebra:
    key = (L.n_atoms, tuple(L.masks))
    alg = _OS_CACHE.get(key)
    if alg is None:
        alg = OSAlgebra(L)
        _OS_CACHE[key] = alg
    return alg


def fy_space(B: BuildingSet) -> Space:
    A = fy_algebra(B)
    return Space(("fy",) + structure_key(B), A.flat_degrees, signed=False)


class OSSpaces:
    """Flat bases of OS(L) and of its projective part."""

    def __init__(self, L: Lattice):
        self.algebra = os_algebra(L)
        A = self.algebra
        key = (L.n_atoms, tuple(L.masks))
        self.flat = [m for b in A.basis for m in b]
        self.flat_index = {m: i for i, m in enumerate(self.flat)}
        self.os = Space(("os",) + key, [len(m) for m in self.flat], signed=True)
        proj = A.projective
        self.bar_vectors: List[OSVector] = []
        self.bar_pivots: List[Tuple[int, ...]] = []
        degs = []
        for k, sub in enumerate(proj.levels):
            for p, v in zip(sub.pivots, sub.basis):
                self.bar_vectors.append(v)
                self.bar_pivots.append(p)
                degs.append(k)
        self.bar = Space(("osbar",) + key, degs, signed=True)

    def os_column(self, v: OSVector) -> Dict[int, Fraction]:
        return {self.flat_index[m]: c for m, c in v.items() if c}


_OSS_CACHE: Dict[tuple, OSSpaces] = {}


def os_spaces(L: Lattice) -> OSSpaces:
    key = (L.n_atoms, tuple(L.masks))
    s = _OSS_CACHE.get(key)
    if s is None:
        s = OSSpaces(L)
        _OSS_CACHE[key] = s
    return s


def bar_coordinates(spaces: Sequence[OSSpaces], w: Dict[Tuple[int, ...], Fraction], T: Tensor) -> Dict[int, Fraction]:
    """Coordinates in the tensor product of projective bases of a vector given
    on tensor products of nbc monomials (keys: tuples of OS flat indices).

    Raises :class:`OperadError` if the vector is not in the subspace.
    """
    piv_index = [{s.flat_index[p]: i for i, p in enumerate(s.bar_pivots)} for s in spaces]
    coords: Dict[int, Fraction] = {}
    for key, c in w.items():
        if all(k in pi for k, pi in zip(key, piv_index)):
            coords[T.join([pi[k] for k, pi in zip(key, piv_index)])] = c
    # reconstruct and compare
    rebuilt: Dict[Tuple[int, ...], Fraction] = {}
    for j, c in coords.items():
        idx = T.split(j)
        parts = [s.os_column(s.bar_vectors[i]) for s, i in zip(spaces, idx)]
        acc = {(): c}
        for p in parts:
            acc = {k + (i,): x * y for k, x in acc.items() for i, y in p.items()}
        for k, x in acc.items():
            nv = rebuilt.get(k, 0) + x
            if nv:
                rebuilt[k] = nv
            else:
                rebuilt.pop(k, None)
    if rebuilt != {k: v for k, v in w.items() if v}:
        raise OperadError("image is not in the tensor product of projective subalgebras")
    return coords


# -- FY cooperad ----------------------------------------------------------

def _split_reduce(p: P.Poly, algs: Sequence[FYAlgebra], T: Tensor) -> Dict[int, Fraction]:
    """Reduce a polynomial in variables (component, local id) into ``T``."""
    out: Dict[int, Fraction] = {}
    n = len(algs)
    for m, c in p.items():
        parts: List[List[Tuple[int, int]]] = [[] for _ in range(n)]
        for (comp_i, g), e in m:
            parts[comp_i].append((g, e))
        vecs = []
        for a, part in zip(algs, parts):
            red = a.reduce_monomial(tuple(part))
            if not red:
                break
            vecs.append({a.flat_index[k]: v for k, v in red.items()})
        else:
            for j, x in kron_vectors(vecs, T).items():
                nv = out.get(j, 0) + c * x
                if nv:
                    out[j] = nv
                else:
                    out.pop(j, None)
    return out


class FYNestedMap:
    """FY(S): FY(L) -> tensor over S of FY(local interval).

    In the wonderful presentation h_K goes to h_{tau(G') v K} in the factor of
    G' = min S_{>=K}.
    """

    def __init__(self, S: NestedSet, root: Optional[Built] = None):
        B = S.building
        L = B.lattice
        self.source = fy_algebra(B)
        self.order = S.ordered()
        lis = local_intervals(S)
        root = root or Built.root(B)
        self.locals = []
        for g in self.order:
            li = lis[g]
            self.locals.append(Built(li.building, [root.to_root[li.to_parent(i)] for i in range(li.lattice.size)]))
        self.algs = [fy_algebra(b.building) for b in self.locals]
        self.src = Tensor([fy_space(B)])
        self.dst = Tensor([fy_space(b.building) for b in self.locals])
        pos = {g: i for i, g in enumerate(self.order)}
        self.h_image: Dict[int, P.Poly] = {}
        for k in B.members:
            gp = S.min_above(k, strict=False)
            li = lis[gp]
            c = pos[gp]
            loc = li.from_parent(L.join(li.lo, k))
            self.h_image[k] = P.linear({(c, u): 1 for u in self.algs[c]._upper[loc]})
        self.x_image: Dict[int, P.Poly] = {}
        for k in B.members:
            acc: P.Poly = {}
            for m, coef in self.source.x_in_h(k).items():
                acc = P.add(acc, self.h_image[m[0][0]], coef)
            self.x_image[k] = acc
        self._pow: Dict[Tuple[int, int], P.Poly] = {}
        self.map = Map(self.src, self.dst, [self.apply_affine({m: Fraction(1)})
                                            for m in self.source.flat_basis])

    def _power(self, k, e):
        key = (k, e)
        if key not in self._pow:
            self._pow[key] = P.power(self.x_image[k], e)
        return self._pow[key]

    def apply_affine(self, p: P.Poly) -> Dict[int, Fraction]:
        total: P.Poly = {}
        for m, c in p.items():
            term = P.const(c)
            for k, e in m:
                term = P.mul(term, self._power(k, e))
            total = P.add(total, term)
        return _split_reduce(total, self.algs, self.dst)

    def apply_wonderful(self, p: P.Poly) -> Dict[int, Fraction]:
        return _split_reduce(P.substitute(p, self.h_image), self.algs, self.dst)


def fy_nested_map(S: NestedSet, root: Optional[Built] = None) -> FYNestedMap:
    return FYNestedMap(S, root)


def _check_generator(B: BuildingSet, g: int) -> None:
    if g not in B.member_set or g == B.lattice.top:
        raise OperadError("the generator must be a non-top member of the building set")


def fy_cooperad(R: Built, g: int) -> FYNestedMap:
    """FY({g}): FY(L) -> FY([g, top]) (x) FY([0, g])."""
    B = R.building
    _check_generator(B, g)
    top = B.lattice.top
    return FYNestedMap(NestedSet(B, {g, top}, order=(top, g), validate=False), R)


def fy_cooperad_direct(R: Built, g: int) -> Map:
    """Single-step formula: h_K -> 1 (x) h_K if K <= g, else h_{g v K} (x) 1."""
    B = R.building
    _check_generator(B, g)
    L = B.lattice
    up, lo = R.upper(g), R.lower(g)
    ua, la = fy_algebra(up.building), fy_algebra(lo.building)
    T = Tensor([fy_space(up.building), fy_space(lo.building)])
    img = {}
    for k in B.members:
        if L.leq(k, g):
            loc = lo.from_root[R.to_root[k]]
            img[k] = P.linear({(1, u): 1 for u in la._upper[loc]})
        else:
            loc = up.from_root[R.to_root[L.join(g, k)]]
            img[k] = P.linear({(0, u): 1 for u in ua._upper[loc]})
    A = fy_algebra(B)
    cols = []
    for m in A.flat_basis:
        p = A.change_of_variable({m: Fraction(1)}, "affine", "wonderful")
        cols.append(_split_reduce(P.substitute(p, img), [ua, la], T))
    return Map(Tensor([fy_space(B)]), T, cols)


# -- FY^PD operad -----------------------------------------------------------

class FYPDMap:
    """FY^PD({g}): FY([g, top]) (x) FY([0, g]) -> FY(L), raising degree by one.

    x^a (x) x^b goes to x_g * prod x_{Comp_g(K)}^a * prod x^b; a bottom factor
    involving the local top is first rewritten through the linear relation
    at the chosen atom of [0, g].
    """

    def __init__(self, R: Built, g: int, atom: Optional[int] = None):
        B = R.building
        _check_generator(B, g)
        L = B.lattice
        self.target = fy_algebra(B)
        self.g = g
        self.up, self.lo = R.upper(g), R.lower(g)
        self.ua, self.la = fy_algebra(self.up.building), fy_algebra(self.lo.building)
        # local id -> id in L
        up_iv_parent = {i: R.from_root[r] for i, r in enumerate(self.up.to_root)}
        lo_iv_parent = {i: R.from_root[r] for i, r in enumerate(self.lo.to_root)}
        self.comp_top = {k: comp(B, g, up_iv_parent[k]) for k in self.up.building.members}
        self.lo_parent = lo_iv_parent
        lo_top = self.lo.lattice.top
        h = self.lo.lattice.atom_ids[0] if atom is None else self.lo.lattice.atom_ids[atom]
        self.rewrite = P.linear({k: -1 for k in self.la._upper[h] if k != lo_top})
        self.lo_top = lo_top
        self.src = Tensor([fy_space(self.up.building), fy_space(self.lo.building)])
        self.dst = Tensor([fy_space(B)])
        cols = []
        for mt in self.ua.flat_basis:
            for mb in self.la.flat_basis:
                cols.append(self.apply(mt, mb))
        self.map = Map(self.src, self.dst, cols)

    def apply(self, mt: P.Monomial, mb: P.Monomial) -> Dict[int, Fraction]:
        """Formula on arbitrary monomials (not necessarily normal)."""
        top_part = P.mono(*((self.comp_top[k], e) for k, e in mt))
        bot = {mb: Fraction(1)}
        if any(k == self.lo_top for k, _ in mb):
            bot = P.substitute(bot, {self.lo_top: self.rewrite})
        p: P.Poly = {}
        for m, c in bot.items():
            mm = P.mono_mul(P.mono_mul(top_part, P.mono(*((self.lo_parent[k], e) for k, e in m))), ((self.g, 1),))
            p = P.add(p, {mm: c})
        red = self.target.reduce(p)
        return {self.target.flat_index[m]: c for m, c in red.items()}


def fypd_operad(R: Built, g: int, atom: Optional[int] = None) -> FYPDMap:
    return FYPDMap(R, g, atom)


# -- OS cooperads -----------------------------------------------------------

class OSCooperadMap:
    """OS({g}): e_H -> 1 (x) e_H if H <= g, else e_{g v H} (x) 1 (algebra map)."""

    def __init__(self, R: Built, g: int):
        B = R.building
        _check_generator(B, g)
        L = B.lattice
        self.up, self.lo = R.upper(g), R.lower(g)
        self.src_sp = os_spaces(L)
        self.up_sp, self.lo_sp = os_spaces(self.up.lattice), os_spaces(self.lo.lattice)
        # for each atom index of L: (side, atom index in that interval)
        self.atom_image = []
        for a in range(L.n_atoms):
            h = L.atom_ids[a]
            if L.leq(h, g):
                loc = self.lo.from_root[R.to_root[h]]
                self.atom_image.append((1, self.lo.lattice.atom_ids.index(loc)))
            else:
                loc = self.up.from_root[R.to_root[L.join(g, h)]]
                self.atom_image.append((0, self.up.lattice.atom_ids.index(loc)))
        self.src = Tensor([self.src_sp.os])
        self.dst = Tensor([self.up_sp.os, self.lo_sp.os])
        self.map = Map(self.src, self.dst, [self.apply_monomial(m) for m in self.src_sp.flat])

    def apply_monomial_raw(self, m: Sequence[int]) -> Dict[Tuple[int, int], Fraction]:
        """Image of an exterior monomial, keyed by (up flat index, low flat index)."""
        top_seq, bot_seq = [], []
        sign = 1
        for a in m:
            side, loc = self.atom_image[a]
            if side == 0:
                if len(bot_seq) % 2:
                    sign = -sign
                top_seq.append(loc)
            else:
                bot_seq.append(loc)
        ut = self.up_sp.algebra.reduce_monomial(top_seq)
        lb = self.lo_sp.algebra.reduce_monomial(bot_seq)
        out = {}
        for mt, ct in ut.items():
            for mb, cb in lb.items():
                out[(self.up_sp.flat_index[mt], self.lo_sp.flat_index[mb])] = sign * ct * cb
        return out

    def apply_monomial(self, m: Sequence[int]) -> Dict[int, Fraction]:
        return {self.dst.join(k): c for k, c in self.apply_monomial_raw(m).items() if c}

    def apply_vector(self, v: OSVector) -> Dict[Tuple[int, int], Fraction]:
        out: Dict[Tuple[int, int], Fraction] = {}
        for m, c in v.items():
            for k, x in self.apply_monomial_raw(m).items():
                nv = out.get(k, 0) + c * x
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return out


class OSBarOddMap:
    """Odd map on projective OS algebras: (delta (x) Id) after the OS cooperad map."""

    def __init__(self, R: Built, g: int):
        self.os_map = OSCooperadMap(R, g)
        sp = self.os_map.src_sp
        up_sp, lo_sp = self.os_map.up_sp, self.os_map.lo_sp
        self.src = Tensor([sp.bar])
        self.dst = Tensor([up_sp.bar, lo_sp.bar])
        up_alg = up_sp.algebra
        cols = []
        for v in sp.bar_vectors:
            w = self.os_map.apply_vector(v)
            dw: Dict[Tuple[int, int], Fraction] = {}
            for (it, ib), c in w.items():
                for m, x in up_alg.delta({up_sp.flat[it]: Fraction(1)}).items():
                    key = (up_sp.flat_index[m], ib)
                    nv = dw.get(key, 0) + c * x
                    if nv:
                        dw[key] = nv
                    else:
                        dw.pop(key, None)
            cols.append(bar_coordinates([up_sp, lo_sp], dw, self.dst))
        self.map = Map(self.src, self.dst, cols, parity=1)


# -- isomorphisms -------------------------------------------------------------

def fy_iso(Bs: BuildingSet, Bd: BuildingSet, emap: Sequence[int]) -> Map:
    """FY(Bs) -> FY(Bd), x_K -> x_{emap[K]}."""
    As, Ad = fy_algebra(Bs), fy_algebra(Bd)
    cols = []
    for m in As.flat_basis:
        red = Ad.reduce({P.mono(*((emap[k], e) for k, e in m)): Fraction(1)})
        cols.append({Ad.flat_index[n]: c for n, c in red.items()})
    return Map(Tensor([fy_space(Bs)]), Tensor([fy_space(Bd)]), cols)


def _os_atom_map(Ls: Lattice, Ld: Lattice, emap: Sequence[int]) -> List[int]:
    return [Ld.atom_ids.index(emap[Ls.atom_ids[a]]) for a in range(Ls.n_atoms)]


def os_iso(Ls: Lattice, Ld: Lattice, emap: Sequence[int]) -> Map:
    ss, sd = os_spaces(Ls), os_spaces(Ld)
    amap = _os_atom_map(Ls, Ld, emap)
    cols = []
    for m in ss.flat:
        red = sd.algebra.reduce_monomial([amap[a] for a in m])
        cols.append(sd.os_column(red))
    return Map(Tensor([ss.os]), Tensor([sd.os]), cols)


def osbar_iso(Ls: Lattice, Ld: Lattice, emap: Sequence[int]) -> Map:
    ss, sd = os_spaces(Ls), os_spaces(Ld)
    amap = _os_atom_map(Ls, Ld, emap)
    T = Tensor([sd.bar])
    cols = []
    for v in ss.bar_vectors:
        w: OSVector = {}
        for m, c in v.items():
            vadd(w, sd.algebra.reduce_monomial([amap[a] for a in m]), c)
        cols.append(bar_coordinates([sd], {(sd.flat_index[m],): c for m, c in w.items()}, T))
    return Map(Tensor([ss.bar]), T, cols)


# -- uniform access by kind -------------------------------------------------

def generator_map(kind: str, R: Built, g: int) -> Map:
    if kind == FY:
        return fy_cooperad(R, g).map
    if kind == FYPD:
        return fypd_operad(R, g).map
    if kind == OS:
        return OSCooperadMap(R, g).map
    if kind == OSBAR:
        return OSBarOddMap(R, g).map
    raise OperadError(f"unknown kind {kind}")


def iso_map(kind: str, Xs: Built, Xd: Built, emap: Sequence[int]) -> Map:
    """Map induced by a built-lattice isomorphism Xs -> Xd (element map on local ids)."""
    if kind in (FY, FYPD):
        return fy_iso(Xs.building, Xd.building, emap)
    if kind == OS:
        return os_iso(Xs.lattice, Xd.lattice, emap)
    if kind == OSBAR:
        return osbar_iso(Xs.lattice, Xd.lattice, emap)
    raise OperadError(f"unknown kind {kind}")


def identity_of(kind: str, X: Built) -> Map:
    if kind in (FY, FYPD):
        return identity(Tensor([fy_space(X.building)]))
    sp = os_spaces(X.lattice)
    return identity(Tensor([sp.os if kind == OS else sp.bar]))


def _transport(X: Built, Y: Built, f: Callable[[int], int]) -> List[int]:
    """Element map X -> Y from a map on root ids."""
    return [Y.from_root[f(r)] for r in X.to_root]


# -- presentation relations ---------------------------------------------------

def _pairs(B: BuildingSet):
    L = B.lattice
    gens = [g for g in B.members if g != L.top]
    for g1, g2 in itertools.combinations(gens, 2):
        if L.lt(g1, g2):
            yield "chain", g1, g2
        elif L.lt(g2, g1):
            yield "chain", g2, g1
        elif L.join(g1, g2) not in B.member_set:
            yield "antichain", g1, g2


def chain_sides(kind: str, R: Built, g1: int, g2: int) -> Tuple[Map, Map]:
    """Both sides of the chain relation for g1 < g2 (root-local ids of R)."""
    M = R.upper(g1)
    N = R.lower(g2)
    top_id = identity_of
    if kind == FYPD:
        left = generator_map(kind, R, g1) @ generator_map(kind, M, M.from_root[R.to_root[g2]]).tensor(
            top_id(kind, R.lower(g1)))
        right = generator_map(kind, R, g2) @ top_id(kind, R.upper(g2)).tensor(
            generator_map(kind, N, N.from_root[R.to_root[g1]]))
    else:
        left = generator_map(kind, M, M.from_root[R.to_root[g2]]).tensor(top_id(kind, R.lower(g1))) @ \
            generator_map(kind, R, g1)
        right = top_id(kind, R.upper(g2)).tensor(generator_map(kind, N, N.from_root[R.to_root[g1]])) @ \
            generator_map(kind, R, g2)
    return left, right


def antichain_sides(kind: str, R: Built, g1: int, g2: int) -> Tuple[Map, Map]:
    """Both sides of the antichain relation for nested incomparable g1, g2.

    The middle factor [g_i, g1 v g2] is identified with [0, g_j] through the
    join with g_i; the right side is precomposed/postcomposed with the swap
    of the last two factors.
    """
    L = R.lattice
    if R.to_root != list(range(L.size)):
        raise OperadError("relations are checked on a root lattice")
    J = L.join(g1, g2)
    rJ = R.to_root[J]
    sides = []
    for a, b in ((g1, g2), (g2, g1)):
        Ma = R.upper(a)
        Xa = Ma.lower(Ma.from_root[rJ])      # [a, J]
        Yb = R.lower(b)                     # [0, b]
        ra, rb = R.to_root[a], R.to_root[b]
        RL = L
        up_j = Ma.upper(Ma.from_root[rJ])
        phi = _transport(Yb, Xa, lambda r: RL.join(r, ra))   # [0,b] -> [a,J]
        phi_inv = _transport(Xa, Yb, lambda r: RL.meet(r, rb))  # [a,J] -> [0,b]
        lower_a = R.lower(a)
        gJ = generator_map(kind, Ma, Ma.from_root[rJ])
        ga = generator_map(kind, R, a)
        if kind == FYPD:
            t = iso_map(kind, Yb, Xa, phi)
            side = ga @ gJ.tensor(identity_of(kind, lower_a)) @ \
                identity_of(kind, up_j).tensor(t).tensor(identity_of(kind, lower_a))
        else:
            t = iso_map(kind, Xa, Yb, phi_inv)
            side = identity_of(kind, up_j).tensor(t).tensor(identity_of(kind, lower_a)) @ \
                gJ.tensor(identity_of(kind, lower_a)) @ ga
        sides.append(side)
    left, right = sides
    if kind == FYPD:
        sigma = permutation(left.src, (0, 2, 1))
        right = right @ sigma
    else:
        sigma = permutation(right.dst, (0, 2, 1))
        right = sigma @ right
    return left, right


def iso_sides(kind: str, R: Built, f: Sequence[int], g: int) -> Tuple[Map, Map]:
    """Both sides of the equivariance relation for an automorphism ``f`` of R."""
    fg = f[g]
    Af = iso_map(kind, R, R, f)
    Ug, Ufg = R.upper(g), R.upper(fg)
    Lg, Lfg = R.lower(g), R.lower(fg)
    fu = iso_map(kind, Ug, Ufg, _transport(Ug, Ufg, lambda r: f[r]))
    fl = iso_map(kind, Lg, Lfg, _transport(Lg, Lfg, lambda r: f[r]))
    if kind == FYPD:
        left = generator_map(kind, R, fg) @ fu.tensor(fl)
        right = Af @ generator_map(kind, R, g)
    else:
        left = generator_map(kind, R, fg) @ Af
        right = fu.tensor(fl) @ generator_map(kind, R, g)
    return left, right


def expected_sign(kind: str, relation: str) -> int:
    """Sign relating the two sides: the odd cooperad flips chain and antichain relations."""
    if kind == OSBAR and relation in ("chain", "antichain"):
        return -1
    return 1


def check_presentation_relations(kind: str, B: BuildingSet, with_automorphisms: bool = True,
                                 max_automorphisms: Optional[int] = None) -> dict:
    """Verify chain, antichain and isomorphism relations for one kind of map."""
    if kind not in KINDS:
        raise OperadError(f"unknown kind {kind}")
    if not B.irreducible:
        raise OperadError("relations are checked on irreducible built lattices")
    R = Built.root(B)
    counts = {"chain": 0, "antichain": 0, "isomorphism": 0}
    failures = []
    for rel, g1, g2 in _pairs(B):
        if rel == "chain":
            left, right = chain_sides(kind, R, g1, g2)
        else:
            left, right = antichain_sides(kind, R, g1, g2)
        counts[rel] += 1
        if left != right.scaled(expected_sign(kind, rel)):
            failures.append({"relation": rel, "elements": [g1, g2],
                             "mismatches": len(left.difference(right.scaled(expected_sign(kind, rel))))})
    autos = []
    if with_automorphisms:
        autos = automorphisms(B.lattice, preserve=B.member_set)
        if max_automorphisms is not None:
            autos = autos[:max_automorphisms]
    for f in autos:
        for g in B.members:
            if g == B.lattice.top:
                continue
            left, right = iso_sides(kind, R, f, g)
            counts["isomorphism"] += 1
            if left != right:
                failures.append({"relation": "isomorphism", "elements": [g], "automorphism": list(f),
                                 "mismatches": len(left.difference(right))})
    return {"kind": kind, "checked": counts, "automorphisms": len(autos),
            "failures": failures, "pass": not failures}


# -- well-definedness ---------------------------------------------------------

def fy_well_defined(B: BuildingSet) -> List[dict]:
    """Every ideal generator (affine and wonderful presentations) maps to zero."""
    R = Built.root(B)
    A = fy_algebra(B)
    bad = []
    gens_aff = A.ideal_generators("affine")
    gens_w = A.ideal_generators("wonderful")
    for g in B.members:
        if g == B.lattice.top:
            continue
        fm = fy_cooperad(R, g)
        for p in gens_aff:
            if fm.apply_affine(p):
                bad.append({"map": g, "presentation": "affine", "generator": repr(p)})
        for p in gens_w:
            if fm.apply_wonderful(p):
                bad.append({"map": g, "presentation": "wonderful", "generator": repr(p)})
    return bad


def _nested_monomials_upto(A: FYAlgebra, deg: int) -> List[P.Monomial]:
    out = []
    for d in range(deg + 1):
        out.extend(A._nested_monomials(d))
    return out


def fypd_well_defined(B: BuildingSet, max_degree: Optional[int] = None) -> List[dict]:
    """The monomial formula factors through both quotients, independently of the atom chosen."""
    R = Built.root(B)
    bad = []
    for g in B.members:
        if g == B.lattice.top:
            continue
        base = FYPDMap(R, g)
        others = [FYPDMap(R, g, atom=i) for i in range(1, base.lo.lattice.n_atoms)]
        for o in others:
            if o.map != base.map:
                bad.append({"map": g, "issue": "depends on the atom used to rewrite the local top"})
        ua, la = base.ua, base.la
        dt = ua.rank if max_degree is None else min(ua.rank, max_degree)
        db = la.rank if max_degree is None else min(la.rank, max_degree)
        for mt in _nested_monomials_upto(ua, dt):
            rt = ua.reduce_monomial(mt)
            for mb in _nested_monomials_upto(la, db):
                rb = la.reduce_monomial(mb)
                direct = base.apply(mt, mb)
                via: Dict[int, Fraction] = {}
                for nt, ct in rt.items():
                    for nb, cb in rb.items():
                        for j, x in base.apply(nt, nb).items():
                            nv = via.get(j, 0) + ct * cb * x
                            if nv:
                                via[j] = nv
                            else:
                                via.pop(j, None)
                if direct != via:
                    bad.append({"map": g, "monomials": [repr(mt), repr(mb)]})
    return bad


def os_well_defined(B: BuildingSet) -> List[dict]:
    """Each circuit relation delta(e_C) (times any monomial) maps to zero."""
    R = Built.root(B)
    L = B.lattice
    A = os_algebra(L)
    bad = []
    for g in B.members:
        if g == L.top:
            continue
        om = OSCooperadMap(R, g)
        for c in A.circuits:
            rel = delta_vector({c: Fraction(1)})
            for extra in range(L.n_atoms):
                v: OSVector = {}
                for m, x in rel.items():
                    s, w = sort_sign(m + (extra,))
                    if s:
                        vadd(v, {w: x * s})
                for vv in (rel, v):
                    if om.apply_vector(vv):
                        bad.append({"map": g, "circuit": list(c)})
    return bad


# -- PD conjugation and the functionals Psi_S --------------------------------

def pd_conjugation(B: BuildingSet, g: int) -> dict:
    """Compare <FY^PD(u), a> with <u, FY(a)> over all basis pairs.

    Pairings use the signed fundamental class of each factor (see
    ``FYAlgebra.degree_map``); the pairing on a tensor product is the product
    of the factor pairings.
    """
    R = Built.root(B)
    A = fy_algebra(B)
    pd = FYPDMap(R, g)
    co = fy_cooperad(R, g).map
    ua, la = pd.ua, pd.la
    T = pd.src
    mism = 0
    checked = 0
    for j in range(T.dim):
        it, ib = T.split(j)
        u_img = pd.map.cols[j]
        u_vec = {A.flat_basis[i]: c for i, c in u_img.items()}
        for ia, a in enumerate(A.flat_basis):
            lhs = A.degree_map(A.multiply(u_vec, {a: Fraction(1)}))
            rhs = Fraction(0)
            for k, c in co.cols[ia].items():
                kt, kb = co.dst.split(k)
                pt = ua.degree_map(ua.multiply({ua.flat_basis[it]: 1}, {ua.flat_basis[kt]: 1}))
                pb = la.degree_map(la.multiply({la.flat_basis[ib]: 1}, {la.flat_basis[kb]: 1}))
                rhs += c * pt * pb
            checked += 1
            if lhs != rhs:
                mism += 1
    return {"generator": g, "checked": checked, "mismatches": mism, "pass": mism == 0}


def psi_evaluation(S: NestedSet) -> List[Fraction]:
    """Row vector alpha -> Psi_S(FY(S)(alpha)) on the basis of FY(L).

    Psi_S evaluates each tensor factor with its fundamental class.
    """
    fm = FYNestedMap(S)
    tops = [a.flat_index[a.top_monomial()] for a in fm.algs]
    j = fm.dst.join(tops)
    sign = 1
    for a in fm.algs:
        if a.top_degree % 2:
            sign = -sign
    return [sign * col.get(j, Fraction(0)) for col in fm.map.cols]


def psi_pairing_rank(B: BuildingSet) -> Tuple[int, int]:
    """(rank of the Psi_S evaluation matrix over all irreducible S, dim FY)."""
    from .linalg import rank
    rows = []
    for S in enumerate_nested_sets(B, irreducible_only=True):
        rows.append({i: c for i, c in enumerate(psi_evaluation(S)) if c})
    return rank(rows), fy_algebra(B).dim


def psi_via_product(S: NestedSet) -> List[Fraction]:
    """alpha -> fundamental class of alpha * prod_{G in S, G != top} x_G."""
    A = fy_algebra(S.building)
    top = S.lattice.top
    xs = P.mono(*((g, 1) for g in S.members if g != top))
    return [A.degree_map(A.reduce({P.mono_mul(m, xs): Fraction(1)})) for m in A.flat_basis]


def quadratic_relation_elements(B: BuildingSet) -> List[Dict[int, int]]:
    """For atoms H1 < H2: sum over top > G >= H1 of Psi_{G} minus the same for H2.

    Elements are dicts G -> coefficient, G standing for the nested set {G, top}.
    """
    L = B.lattice
    atoms = L.atom_ids
    out = []
    for i, j in itertools.combinations(range(len(atoms)), 2):
        e: Dict[int, int] = {}
        for g in B.members:
            if g == L.top:
                continue
            c = (1 if L.leq(atoms[i], g) else 0) - (1 if L.leq(atoms[j], g) else 0)
            if c:
                e[g] = e.get(g, 0) + c
        out.append({g: c for g, c in e.items() if c})
    return out


def relation_functional_values(B: BuildingSet) -> List[List[Fraction]]:
    """Each quadratic relation element evaluated against the basis of FY."""
    top = B.lattice.top
    evals = {}
    out = []
    for rel in quadratic_relation_elements(B):
        acc = [Fraction(0)] * fy_algebra(B).dim
        for g, c in rel.items():
            if g not in evals:
                evals[g] = psi_evaluation(NestedSet(B, {g, top}, validate=False))
            acc = [a + c * x for a, x in zip(acc, evals[g])]
        out.append(acc)
    return out
