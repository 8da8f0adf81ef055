"""Directed built lattices, the order on monomials of the free shuffle operad,
EL-labelings, clusters and frames, and the quadratic Groebner basis of the
dual FY operad.

Elements of a directed lattice are compared through their words: the atoms
below an element listed in increasing direction order.  A monomial of the
free shuffle operad on the one-dimensional generators is an irreducible
nested set (optionally with one label per member, for generators spaces of
larger dimension).
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .building import (BuildingError, BuildingSet, LocalInterval, NestedSet, comp,
                       compose_nested, decompose_nested, enumerate_nested_sets,
                       induced_building_set)
from .fy import fy_algebra
from .lattice import Interval, Lattice

_END = float("inf")


class ShuffleError(ValueError):
    pass


class DirectedBuiltLattice:
    """A built lattice with a linear order on its atoms.

    ``atom_order`` lists atom indices from smallest to largest.
    """

    def __init__(self, building: BuildingSet, atom_order: Optional[Sequence[int]] = None):
        self.building = building
        self.lattice: Lattice = building.lattice
        n = self.lattice.n_atoms
        order = tuple(range(n)) if atom_order is None else tuple(atom_order)
        if sorted(order) != list(range(n)):
            raise ShuffleError(f"atom order must be a permutation of range({n})")
        self.atom_order = order
        self.pos = {a: i for i, a in enumerate(order)}
        self._words: Dict[int, Tuple[int, ...]] = {}
        self._induced: Dict[Tuple[int, int], Tuple[Interval, "DirectedBuiltLattice"]] = {}
        self._leading: Optional[FrozenSet[int]] = None

    @property
    def irreducible(self) -> bool:
        return self.building.irreducible

    def __repr__(self):
        return f"DirectedBuiltLattice({self.building!r}, order={self.atom_order})"

    # -- the order on elements -------------------------------------------
    def word(self, g: int) -> Tuple[int, ...]:
        w = self._words.get(g)
        if w is None:
            w = tuple(sorted(self.pos[a] for a in self.lattice.atoms_below(g)))
            self._words[g] = w
        return w

    def key(self, g: int) -> Tuple[float, ...]:
        # an end marker above every letter makes a word smaller than its prefixes
        return self.word(g) + (_END,)

    def element_compare(self, g1: int, g2: int) -> int:
        k1, k2 = self.key(g1), self.key(g2)
        return (k1 > k2) - (k1 < k2)

    def atom_element(self, rank_in_order: int) -> int:
        return self.lattice.atom_ids[self.atom_order[rank_in_order]]

    # -- induced structures ----------------------------------------------
    def induced(self, lo: int, hi: int) -> Tuple[Interval, "DirectedBuiltLattice"]:
        """``[lo, hi]`` with the induced building set and atom order."""
        got = self._induced.get((lo, hi))
        if got is None:
            iv, B = induced_building_set(self.building, lo, hi)
            got = (iv, DirectedBuiltLattice(B, induced_order(self, iv)))
            self._induced[(lo, hi)] = got
        return got

    def local(self, li: LocalInterval) -> "DirectedBuiltLattice":
        """Directed structure on a local interval, sharing its building set."""
        return DirectedBuiltLattice(li.building, induced_order(self, li.interval))

    def leading_atoms(self) -> FrozenSet[int]:
        """Atoms H (element ids) with Psi_{H} a leading term of a quadratic relation."""
        if self._leading is None:
            self._leading = frozenset(leading_terms(self))
        return self._leading


def induced_order(D: DirectedBuiltLattice, iv: Interval) -> List[int]:
    """Order of the interval atoms by the smallest parent atom generating each."""
    P = D.lattice
    first = []
    for k in range(iv.lattice.n_atoms):
        cover = iv.lattice.atom_labels[k]
        gens = [D.pos[a] for a in range(P.n_atoms)
                if P.join(iv.lo, P.atom_ids[a]) == cover]
        first.append(min(gens))
    return sorted(range(iv.lattice.n_atoms), key=first.__getitem__)


# -- monomials ---------------------------------------------------------------

@dataclass(frozen=True)
class ShuffleMonomial:
    """An irreducible nested set with one generator label per member.

    For the dual FY operad every local generator space is one-dimensional
    and all labels are 0.
    """

    members: FrozenSet[int]
    labels: Tuple[Tuple[int, int], ...] = field(default=())

    def label(self, g: int) -> int:
        return dict(self.labels).get(g, 0)

    @classmethod
    def of(cls, S: Iterable[int], labels: Optional[Dict[int, int]] = None) -> "ShuffleMonomial":
        labels = labels or {}
        return cls(frozenset(S), tuple(sorted((g, c) for g, c in labels.items() if c)))


def _minimal(L: Lattice, S: FrozenSet[int]) -> List[int]:
    return [g for g in S if not any(h != g and L.leq(h, g) for h in S)]


def _as_monomial(m) -> ShuffleMonomial:
    if isinstance(m, ShuffleMonomial):
        return m
    if isinstance(m, NestedSet):
        return ShuffleMonomial.of(m.members)
    return ShuffleMonomial.of(m)


def upper_monomial(D: DirectedBuiltLattice, m: ShuffleMonomial, g: int):
    """``g v m`` in the interval ``[g, top]``, as interval ids."""
    L = D.lattice
    iv, Du = D.induced(g, L.top)
    labels = {}
    mem = []
    for x in m.members:
        if x == g:
            continue
        k = iv.from_parent(L.join(g, x))
        mem.append(k)
        labels[k] = m.label(x)
    return Du, ShuffleMonomial.of(mem, labels)


LITERAL = "literal"
MM_FIRST = "mm-first"
RULES = (MM_FIRST, LITERAL)


def monomial_compare(D: DirectedBuiltLattice, m1, m2, rule: str = LITERAL) -> int:
    """-1, 0 or 1 as ``m1`` is smaller, equal or larger than ``m2``.

    ``LITERAL`` descends into ``[G, top]`` as soon as the two monomials share
    any minimal member ``G`` with equal labels, and otherwise compares the
    smallest minimal members.  It is compatible with composition but not
    transitive once monomials have three members.  ``MM_FIRST`` compares
    the smallest minimal members first and descends only when they
    coincide; it is lexicographic, hence a total order, but composition
    does not always preserve it.  Both agree on two-member monomials, which
    is all the leading terms of the quadratic relations need.
    """
    if rule not in RULES:
        raise ShuffleError(f"unknown comparison rule {rule!r}")
    m1, m2 = _as_monomial(m1), _as_monomial(m2)
    L = D.lattice
    for m in (m1, m2):
        if L.top not in m.members:
            raise ShuffleError("monomials are irreducible nested sets")
        if not m.members <= D.building.member_set:
            raise ShuffleError("monomial does not live in this arity")
    if m1 == m2:
        return 0
    min1, min2 = _minimal(L, m1.members), _minimal(L, m2.members)
    mm1 = min(min1, key=D.key)
    mm2 = min(min2, key=D.key)
    if rule == LITERAL:
        common = sorted(g for g in set(min1) & set(min2)
                        if g != L.top and m1.label(g) == m2.label(g))
        g = common[0] if common else None
    else:
        g = mm1 if mm1 == mm2 != L.top and m1.label(mm1) == m2.label(mm2) else None
    if g is not None:
        Du, u1 = upper_monomial(D, m1, g)
        _, u2 = upper_monomial(D, m2, g)
        return monomial_compare(Du, u1, u2, rule)
    c = D.element_compare(mm1, mm2)
    if c:
        return c
    a, b = m1.label(mm1), m2.label(mm2)
    return (a > b) - (a < b)


def sort_monomials(D: DirectedBuiltLattice, ms: Iterable, rule: str = MM_FIRST) -> List[ShuffleMonomial]:
    return sorted((_as_monomial(m) for m in ms),
                  key=functools.cmp_to_key(lambda a, b: monomial_compare(D, a, b, rule)))


# -- divisibility and leading terms ------------------------------------------

def divides(D: DirectedBuiltLattice, lo: int, hi: int, m1, m2) -> bool:
    """Whether ``m1`` (a monomial of the arity ``[lo, hi]``, interval ids)
    divides ``m2`` (a monomial of ``D``).

    The nested set along which ``m2`` would split is forced: it is ``m2``
    minus the lifts of the non-top members of ``m1``.
    """
    m1, m2 = _as_monomial(m1), _as_monomial(m2)
    B = D.building
    L = D.lattice
    if hi not in m2.members:
        return False
    iv, Bl = induced_building_set(B, lo, hi)
    ltop = iv.lattice.top
    if ltop not in m1.members:
        raise ShuffleError("divisor must be an irreducible monomial")
    try:
        lifted = {comp(B, lo, iv.to_parent(k)) for k in m1.members if k != ltop}
    except BuildingError:
        return False
    if not lifted <= m2.members or hi in lifted:
        return False
    frame = m2.members - lifted
    F = NestedSet(B, frame, validate=False)
    if F.tau(hi) != lo:
        return False
    locals_ = decompose_nested(NestedSet(B, m2.members, validate=False), frame)
    for g, loc in locals_.items():
        want = m1.members if g == hi else {loc.lattice.top}
        if loc.members != want:
            return False
    for x in lifted:
        if m1.label(iv.from_parent(L.join(lo, x))) != m2.label(x):
            return False
    return m1.label(ltop) == m2.label(hi)


def quadratic_relations(D: DirectedBuiltLattice) -> List[Dict[int, int]]:
    """For atoms H1 before H2: sum of Psi_{G} over G >= H1 minus the same for H2.

    Terms are dicts ``G -> coefficient`` with ``G`` standing for the
    monomial ``{G, top}``; the top itself cancels and is left out.
    """
    L = D.lattice
    out = []
    for i, j in itertools.combinations(range(L.n_atoms), 2):
        h1, h2 = D.atom_element(i), D.atom_element(j)
        e: Dict[int, int] = {}
        for g in D.building.members:
            if g == L.top:
                continue
            c = (1 if L.leq(h1, g) else 0) - (1 if L.leq(h2, g) else 0)
            if c:
                e[g] = c
        out.append(e)
    return out


def leading_term(D: DirectedBuiltLattice, rel: Dict[int, int], rule: str = LITERAL) -> int:
    top = D.lattice.top
    best = None
    for g in rel:
        if best is None or monomial_compare(D, {g, top}, {best, top}, rule) > 0:
            best = g
    if best is None:
        raise ShuffleError("zero relation has no leading term")
    return best


def leading_terms(D: DirectedBuiltLattice, rule: str = LITERAL) -> List[int]:
    return sorted({leading_term(D, r, rule) for r in quadratic_relations(D)})


def is_normal(D: DirectedBuiltLattice, m) -> bool:
    """Not divisible by any leading term of the quadratic relations.

    A leading term ``{K, top}`` of arity ``[lo, G']`` divides ``m`` exactly
    when some member ``F`` disappears from ``m`` along the frame
    ``m - {F}``, with local set ``{K, G'}``.
    """
    m = _as_monomial(m)
    L = D.lattice
    B = D.building
    S = NestedSet(B, m.members, validate=False)
    for f in m.members:
        if f == L.top:
            continue
        frame = m.members - {f}
        F = NestedSet(B, frame, validate=False)
        g = F.min_above(f)
        lo = F.tau(g)
        k = L.join(lo, f)
        if L.rank[k] != L.rank[lo] + 1:
            continue
        iv, Dl = D.induced(lo, g)
        if iv.from_parent(k) in Dl.leading_atoms():
            return False
    return True


def normal_monomials_by_division(D: DirectedBuiltLattice) -> List[FrozenSet[int]]:
    if not D.irreducible:
        raise ShuffleError("arity must be irreducible")
    return [S.members for S in enumerate_nested_sets(D.building, irreducible_only=True)
            if is_normal(D, S.members)]


# -- EL-labelings ------------------------------------------------------------

@dataclass
class ELLabeling:
    labels: Dict[Tuple[int, int], int]

    def __getitem__(self, cover):
        return self.labels[cover]

    def chain_labels(self, chain: Sequence[int]) -> Tuple[int, ...]:
        return tuple(self.labels[(a, b)] for a, b in zip(chain, chain[1:]))


def el_labeling(D: DirectedBuiltLattice) -> ELLabeling:
    """lambda(X < Y) = smallest i (1-based, in direction order) with X v H_i = Y."""
    L = D.lattice
    labels = {}
    for x in L.elements():
        for y in L.upper_covers(x):
            labels[(x, y)] = next(i + 1 for i in range(L.n_atoms)
                                  if L.join(x, D.atom_element(i)) == y)
    return ELLabeling(labels)


def maximal_chains(L: Lattice, x: int, y: int) -> List[Tuple[int, ...]]:
    if not L.leq(x, y):
        raise ShuffleError("chain endpoints are not ordered")
    if x == y:
        return [(x,)]
    out = []
    for z in L.upper_covers(x):
        if L.leq(z, y):
            out.extend((x,) + c for c in maximal_chains(L, z, y))
    return out


def increasing_chain(D: DirectedBuiltLattice, x: int, y: int, k: Optional[int] = None) -> Tuple[int, ...]:
    """The increasing maximal chain from ``x`` to ``y``, truncated at height ``k``.

    Built greedily: each step joins the first atom (in direction order)
    below ``y`` and not below the current element.
    """
    L = D.lattice
    if not L.leq(x, y):
        raise ShuffleError("chain endpoints are not ordered")
    chain = [x]
    cur = x
    while cur != y:
        for i in range(L.n_atoms):
            h = D.atom_element(i)
            if L.leq(h, y) and not L.leq(h, cur):
                cur = L.join(cur, h)
                break
        chain.append(cur)
    if k is not None:
        if not 0 <= k <= len(chain) - 1:
            raise ShuffleError("truncation height out of range")
        chain = chain[:k + 1]
    return tuple(chain)


def check_el(D: DirectedBuiltLattice, lab: Optional[ELLabeling] = None) -> List[Tuple[int, int, str]]:
    """Comparable pairs where the EL property fails, with the reason."""
    L = D.lattice
    lab = lab or el_labeling(D)
    bad = []
    for x in L.elements():
        for y in L.upper_set(x):
            if y == x:
                continue
            chains = maximal_chains(L, x, y)
            words = [lab.chain_labels(c) for c in chains]
            inc = [c for c, w in zip(chains, words) if all(a < b for a, b in zip(w, w[1:]))]
            if len(inc) != 1:
                bad.append((x, y, f"{len(inc)} increasing chains"))
                continue
            if lab.chain_labels(inc[0]) != min(words):
                bad.append((x, y, "increasing chain is not lexicographically least"))
            elif inc[0] != increasing_chain(D, x, y):
                bad.append((x, y, "greedy chain differs"))
    return bad


# -- clusters and frames -----------------------------------------------------

def cluster_from_chain(D: DirectedBuiltLattice, chain: Sequence[int]) -> NestedSet:
    """{X1} o {X2} o ... o {Xn}, each singleton composed into the top slot."""
    L = D.lattice
    B = D.building
    if not chain or chain[0] != L.bottom:
        raise ShuffleError("chain must start at the bottom")
    S = NestedSet(B, {L.top}, validate=False)
    for prev, x in zip(chain, chain[1:]):
        if L.rank[x] != L.rank[prev] + 1 or not L.leq(prev, x):
            raise ShuffleError("chain steps must be covers")
        if x == L.top:
            break
        li = LocalInterval(S, L.top)
        if li.lo != prev:
            raise ShuffleError("chain does not match the current top interval")
        loc = NestedSet(li.building, {li.from_parent(x), li.lattice.top}, validate=False)
        S = compose_nested(S, {L.top: loc})
    return NestedSet(B, S.members, validate=False)


def local_ranks(S: NestedSet) -> Dict[int, int]:
    L = S.lattice
    return {g: L.rank[g] - L.rank[S.tau(g)] for g in S.members}


def is_cluster(S: NestedSet, proper: bool = False) -> bool:
    L = S.lattice
    r = local_ranks(S)
    if not all(v == 1 for g, v in r.items() if g != L.top):
        return False
    return r[L.top] > 1 if proper else True


def frame(S: NestedSet) -> Tuple[NestedSet, Dict[int, NestedSet]]:
    """Members with local rank above 1, plus the top, and the local clusters."""
    L = S.lattice
    if not S.irreducible:
        raise ShuffleError("frames are defined for irreducible nested sets")
    r = local_ranks(S)
    fr = {g for g, v in r.items() if v > 1} | {L.top}
    return NestedSet(S.building, fr, validate=False), decompose_nested(S, fr)


def enumerate_frames(B: BuildingSet) -> List[NestedSet]:
    L = B.lattice
    out = []
    for S in enumerate_nested_sets(B, irreducible_only=True):
        r = local_ranks(S)
        if all(v > 1 for g, v in r.items() if g != L.top):
            out.append(S)
    return out


def normal_monomials_by_frames(D: DirectedBuiltLattice) -> List[FrozenSet[int]]:
    """Frames composed with truncated increasing-chain clusters.

    Below the top the truncation height is at most ``rk - 2`` of the local
    interval, at the top it is at most ``rk - 1``.
    """
    out = []
    for S in enumerate_frames(D.building):
        lis = {g: LocalInterval(S, g) for g in S.ordered()}
        options = []
        for g in S.ordered():
            li = lis[g]
            Dl = D.local(li)
            Ll = li.lattice
            kmax = li.rank - 1 if g == D.lattice.top else li.rank - 2
            opts = []
            for k in range(kmax + 1):
                chain = increasing_chain(Dl, Ll.bottom, Ll.top, k)
                opts.append(cluster_from_chain(Dl, chain))
            options.append(opts)
        for choice in itertools.product(*options):
            locals_ = dict(zip(S.ordered(), choice))
            out.append(compose_nested(S, locals_, lis).members)
    return out


# -- verdicts ----------------------------------------------------------------

def verify_quadratic_gb(building: BuildingSet, atom_order: Optional[Sequence[int]] = None) -> dict:
    """Count normal monomials two ways and compare with dim FY.

    A reducible building set is the product of its factors, so counts
    multiply; the factors inherit the induced atom order.
    """
    D = DirectedBuiltLattice(building, atom_order)
    L = D.lattice
    if building.irreducible:
        arities = [D]
    else:
        arities = [D.induced(L.bottom, f)[1] for f in building.factors(L.top)]
    by_div = 1
    by_frames = 1
    same = True
    parts = []
    for Dp in arities:
        a = normal_monomials_by_division(Dp)
        b = normal_monomials_by_frames(Dp)
        same = same and set(a) == set(b) and len(b) == len(set(b))
        by_div *= len(a)
        by_frames *= len(b)
        parts.append({"division": len(a), "frames": len(b)})
    fy = fy_algebra(building).dim
    return {"normal_monomials": by_div, "frame_monomials": by_frames,
            "characterizations_agree": same, "fy_dim": fy, "factors": parts,
            "atom_order": list(D.atom_order),
            "verdict": same and by_div == by_frames == fy}


def atom_orders(n: int, count: int = 3, seed: int = 0) -> List[Tuple[int, ...]]:
    """Identity, reversed, then seeded shuffles; distinct whenever possible."""
    out = [tuple(range(n))]
    if n > 1:
        out.append(tuple(reversed(range(n))))
    rng = random.Random(seed)
    tries = 0
    total = 1
    for i in range(2, n + 1):
        total *= i
    while len(out) < min(count, total) and tries < 1000:
        p = list(range(n))
        rng.shuffle(p)
        if tuple(p) not in out:
            out.append(tuple(p))
        tries += 1
    return out


# -- admissibility -----------------------------------------------------------

def check_admissibility(D: DirectedBuiltLattice, max_size: int = 3,
                        max_local: Optional[int] = None, rule: str = LITERAL) -> dict:
    """Composition with fixed generators preserves the strict order.

    For each irreducible nested set ``S`` with at most ``max_size`` members,
    each slot ``G0`` and each pair of same-size local monomials ``m1 < m2``,
    the composites must compare the same way.
    """
    B = D.building
    checked = 0
    failures = []
    for S in enumerate_nested_sets(B, irreducible_only=True, max_size=max_size):
        lis = {g: LocalInterval(S, g) for g in S.ordered()}
        for g0 in S.ordered():
            li = lis[g0]
            Dl = D.local(li)
            by_size: Dict[int, List[NestedSet]] = {}
            for m in enumerate_nested_sets(li.building, irreducible_only=True, max_size=max_local):
                by_size.setdefault(len(m), []).append(m)
            for ms in by_size.values():
                images = {m.members: compose_nested(S, {g0: m}, lis).members for m in ms}
                for m1, m2 in itertools.combinations(ms, 2):
                    c = monomial_compare(Dl, m1, m2, rule)
                    if c == 0:
                        failures.append((S.sorted_ids(), g0, "distinct monomials compare equal"))
                        continue
                    checked += 1
                    if monomial_compare(D, images[m1.members], images[m2.members], rule) != c:
                        failures.append((S.sorted_ids(), g0, sorted(m1.members), sorted(m2.members)))
    return {"checked": checked, "failures": failures, "pass": not failures}


def check_total_order(D: DirectedBuiltLattice, max_size: Optional[int] = None,
                      rule: str = MM_FIRST, sizes: Optional[Iterable[int]] = None) -> List[tuple]:
    """Antisymmetry and transitivity failures among same-size monomials of one arity."""
    by_size: Dict[int, List[FrozenSet[int]]] = {}
    for S in enumerate_nested_sets(D.building, irreducible_only=True, max_size=max_size):
        by_size.setdefault(len(S), []).append(S.members)
    wanted = set(by_size) if sizes is None else set(sizes)
    bad = []
    for size, ms in sorted(by_size.items()):
        if size not in wanted:
            continue
        cmp = {(a, b): monomial_compare(D, a, b, rule) for a in ms for b in ms}
        for a in ms:
            for b in ms:
                if cmp[(a, b)] != -cmp[(b, a)] or (cmp[(a, b)] == 0) != (a == b):
                    bad.append(("antisymmetry", sorted(a), sorted(b)))
        for a, b, c in itertools.permutations(ms, 3):
            if cmp[(a, b)] < 0 and cmp[(b, c)] < 0 and cmp[(a, c)] >= 0:
                bad.append(("transitivity", sorted(a), sorted(b), sorted(c)))
    return bad
