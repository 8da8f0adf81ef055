"""Building sets, nested sets, Comp and composition of nested sets."""

from __future__ import annotations

import itertools
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .lattice import GraphInput, Interval, Lattice, LatticeError, bits, interval


class BuildingError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# -- building sets -----------------------------------------------------------

def _maximal_below(L: Lattice, members: Iterable[int], x: int) -> List[int]:
    below = [g for g in members if L.leq(g, x)]
    return [g for g in below if not any(h != g and L.leq(g, h) for h in below)]


def _join_is_bijection(L: Lattice, tops: Sequence[int], x: int) -> bool:
    lowers = [L.interval_elements(L.bottom, g) for g in tops]
    target = L.interval_elements(L.bottom, x)
    total = 1
    for lw in lowers:
        total *= len(lw)
    if total != len(target):
        return False
    seen = set()
    for tup in itertools.product(*lowers):
        j = L.join_all(tup)
        if j in seen or not L.leq(j, x):
            return False
        seen.add(j)
    return True


def is_building_set(L: Lattice, members: Iterable[int]) -> Tuple[bool, Optional[int]]:
    """Check the product-decomposition condition at every element.

    Returns ``(True, None)`` or ``(False, X)`` with ``X`` the first failing
    element id.  Cheap rank checks run before the exhaustive bijection test.
    """
    members = sorted(set(members))
    if L.bottom in members:
        raise BuildingError("the bottom element cannot belong to a building set")
    for x in range(1, L.size):
        fac = _maximal_below(L, members, x)
        if not fac or L.join_all(fac) != x or sum(L.rank[g] for g in fac) != L.rank[x]:
            return False, x
        if len(fac) > 1 and not _join_is_bijection(L, fac, x):
            return False, x
    return True, None


class BuildingSet:
    """A validated building set of ``lattice``; factors are cached per element."""

    def __init__(self, lattice: Lattice, members: Iterable[int], validate: bool = True):
        self.lattice = lattice
        self.members: Tuple[int, ...] = tuple(sorted(set(members)))
        self.member_set = frozenset(self.members)
        if validate:
            ok, witness = is_building_set(lattice, self.members)
            if not ok:
                raise BuildingError("not a building set", witness)
        self.irreducible = lattice.top in self.member_set
        self._factors: Dict[int, Tuple[int, ...]] = {}

    def __contains__(self, x: int) -> bool:
        return x in self.member_set

    def __eq__(self, other):
        return (isinstance(other, BuildingSet) and self.lattice == other.lattice
                and self.members == other.members)

    def __hash__(self):
        return hash((self.lattice, self.members))

    def __repr__(self):
        return f"BuildingSet({len(self.members)} members of {self.lattice!r})"

    def factors(self, x: int) -> Tuple[int, ...]:
        if x == self.lattice.bottom:
            raise BuildingError("the bottom element has no factors")
        f = self._factors.get(x)
        if f is None:
            f = tuple(_maximal_below(self.lattice, self.members, x))
            self._factors[x] = f
        return f

    def to_json(self) -> dict:
        return {"members": list(self.members),
                "supports": [self.lattice.flats()[g] for g in self.members],
                "irreducible": self.irreducible}


def factors(B: BuildingSet, x: int) -> Tuple[int, ...]:
    return B.factors(x)


def is_connected_element(L: Lattice, x: int) -> bool:
    """True iff ``[0, x]`` is not a product: no bipartition of its atoms is rank-additive."""
    atoms = L.atoms_below(x)
    if len(atoms) <= 1:
        return True
    first, rest = atoms[0], atoms[1:]
    r = L.rank[x]
    for k in range(0, len(rest)):
        for part in itertools.combinations(rest, k):
            a = L.closure((first,) + part)
            b = L.closure([h for h in rest if h not in part])
            if L.rank[a] + L.rank[b] == r:
                return False
    return True


def minimal_building_set(L: Lattice) -> BuildingSet:
    members = [x for x in range(1, L.size) if is_connected_element(L, x)]
    return BuildingSet(L, members, validate=False)


def maximal_building_set(L: Lattice) -> BuildingSet:
    return BuildingSet(L, range(1, L.size), validate=False)


def tubes(g: GraphInput) -> List[frozenset]:
    """Vertex subsets inducing a connected subgraph."""
    adj = g.neighbours()
    out = []
    for k in range(1, len(g.vertices) + 1):
        for sub in itertools.combinations(g.vertices, k):
            s = set(sub)
            seen = {sub[0]}
            stack = [sub[0]]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w in s and w not in seen:
                        seen.add(w)
                        stack.append(w)
            if seen == s:
                out.append(frozenset(sub))
    return out


def tubes_building_set(g: GraphInput) -> BuildingSet:
    """Tubes of ``g`` as a building set of the boolean lattice on its vertices."""
    n = len(g.vertices)
    L = Lattice(list(g.vertices), range(1 << n))
    pos = {v: i for i, v in enumerate(g.vertices)}
    members = []
    for t in tubes(g):
        m = 0
        for v in t:
            m |= 1 << pos[v]
        members.append(L.index[m])
    return BuildingSet(L, members, validate=False)


def induced_building_set(B: BuildingSet, lo: int, hi: int) -> Tuple[Interval, BuildingSet]:
    """``(lo v G) n (lo, hi]`` as a building set of the interval ``[lo, hi]``."""
    L = B.lattice
    if not L.lt(lo, hi):
        raise BuildingError("induced building set needs lo < hi", (lo, hi))
    iv = interval(L, lo, hi)
    members = set()
    for g in B.members:
        k = L.join(lo, g)
        if k != lo and L.leq(k, hi):
            members.add(iv.from_parent(k))
    return iv, BuildingSet(iv.lattice, members, validate=False)


# -- nested sets -------------------------------------------------------------

def _antichains(L: Lattice, elems: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """Non-empty antichains of ``elems``, by extending pairwise-incomparable cliques."""
    elems = list(elems)

    def rec(start, chosen):
        for i in range(start, len(elems)):
            e = elems[i]
            if all(not L.leq(e, c) and not L.leq(c, e) for c in chosen):
                nxt = chosen + (e,)
                yield nxt
                yield from rec(i + 1, nxt)

    yield from rec(0, ())


def nested_failure(B: BuildingSet, S: Iterable[int]) -> Optional[Tuple[int, ...]]:
    """An antichain of size >= 2 in ``S`` whose join lies in ``B``, if any."""
    L = B.lattice
    S = sorted(set(S))
    for a in _antichains(L, S):
        if len(a) >= 2 and L.join_all(a) in B.member_set:
            return a
    return None


def is_nested(B: BuildingSet, S: Iterable[int]) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    S = list(S)
    for g in S:
        if g not in B.member_set:
            raise BuildingError("nested set members must lie in the building set", g)
    w = nested_failure(B, S)
    return w is None, w


class NestedSet:
    """A nested set; ``order`` is an optional linear order ignored by equality."""

    def __init__(self, building: BuildingSet, members: Iterable[int],
                 order: Optional[Sequence[int]] = None, validate: bool = True):
        self.building = building
        self.members = frozenset(members)
        if order is not None:
            order = tuple(order)
            if set(order) != self.members or len(order) != len(self.members):
                raise BuildingError("order must list each member once", order)
        self.order = order
        if validate:
            ok, w = is_nested(building, self.members)
            if not ok:
                raise BuildingError("not a nested set", w)

    @property
    def lattice(self) -> Lattice:
        return self.building.lattice

    @property
    def irreducible(self) -> bool:
        return self.lattice.top in self.members

    def ordered(self) -> Tuple[int, ...]:
        return self.order if self.order is not None else tuple(sorted(self.members))

    def sorted_ids(self) -> Tuple[int, ...]:
        return tuple(sorted(self.members))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.ordered())

    def __contains__(self, x):
        return x in self.members

    def __eq__(self, other):
        return isinstance(other, NestedSet) and self.members == other.members

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return f"NestedSet({sorted(self.members)})"

    def tau(self, g: int) -> int:
        L = self.lattice
        return L.join_all(h for h in self.members if L.lt(h, g))

    def min_above(self, x: int, strict: bool = True) -> Optional[int]:
        """Unique minimal member strictly above (or at least) ``x``."""
        L = self.lattice
        ups = [g for g in self.members if (L.lt(x, g) if strict else L.leq(x, g))]
        if not ups:
            return None
        m = [g for g in ups if not any(h != g and L.leq(h, g) for h in ups)]
        assert len(m) == 1, "forest property violated"
        return m[0]

    def to_json(self) -> dict:
        return {"members": list(self.ordered()),
                "supports": [self.lattice.flats()[g] for g in self.ordered()]}


def enumerate_nested_sets(B: BuildingSet, irreducible_only: bool = False,
                          max_size: Optional[int] = None) -> List[NestedSet]:
    """All nested sets, sorted by (size, sorted ids).

    Nested sets are built by adding members in increasing id order; a new
    member only needs checking against antichains that contain it.
    """
    L = B.lattice
    if irreducible_only and not B.irreducible:
        raise BuildingError("irreducible nested sets need the top in the building set")
    members = list(B.members)
    found: List[Tuple[int, ...]] = []

    def can_add(S, g):
        inc = [h for h in S if not L.leq(h, g) and not L.leq(g, h)]
        for a in _antichains(L, inc):
            if L.join_all(a + (g,)) in B.member_set:
                return False
        return True

    def rec(start, S):
        found.append(S)
        if max_size is not None and len(S) >= max_size:
            return
        for i in range(start, len(members)):
            g = members[i]
            if can_add(S, g):
                rec(i + 1, S + (g,))

    if irreducible_only:
        top = L.top
        rest = [g for g in members if g != top]
        members = rest

        def rec_top(start, S):
            found.append(S)
            if max_size is not None and len(S) >= max_size:
                return
            for i in range(start, len(members)):
                g = members[i]
                if can_add(S, g):
                    rec_top(i + 1, S + (g,))

        if max_size is None or max_size >= 1:
            rec_top(0, (top,))
    else:
        rec(0, ())
    found = sorted({tuple(sorted(s)) for s in found}, key=lambda s: (len(s), s))
    return [NestedSet(B, s, validate=False) for s in found]


# -- Comp and composition ----------------------------------------------------

def comp(B: BuildingSet, g0: int, k: int) -> int:
    """Largest member ``F`` of ``B`` with ``F v g0 == k``."""
    L = B.lattice
    cands = [f for f in B.members if L.join(f, g0) == k]
    if not cands:
        raise BuildingError("element is not in the induced building set", k)
    top = [f for f in cands if all(L.leq(h, f) for h in cands)]
    if len(top) != 1:
        raise BuildingError("no unique maximal preimage", k)
    return top[0]


class LocalInterval:
    """Local interval ``[tau_S(g), g]`` of a nested set with its induced building set."""

    def __init__(self, S: NestedSet, g: int):
        self.top_elem = g
        self.lo = S.tau(g)
        self.interval, self.building = induced_building_set(S.building, self.lo, g)

    @property
    def lattice(self) -> Lattice:
        return self.interval.lattice

    @property
    def rank(self) -> int:
        return self.lattice.rk

    def to_parent(self, i: int) -> int:
        return self.interval.to_parent(i)

    def from_parent(self, x: int) -> int:
        return self.interval.from_parent(x)


def local_intervals(S: NestedSet) -> Dict[int, LocalInterval]:
    if not S.irreducible:
        raise BuildingError("local intervals need an irreducible nested set")
    return {g: LocalInterval(S, g) for g in S.ordered()}


def compose_nested(S: NestedSet, locals_: Dict[int, NestedSet],
                   intervals: Optional[Dict[int, LocalInterval]] = None) -> NestedSet:
    """``S o (S_G)``: add ``Comp_{tau_S(G)}(K)`` for every ``K`` in every local set.

    ``locals_[G]`` is a nested set of the induced building set on the local
    interval of ``G`` (interval ids).  Missing entries mean the trivial local
    set.  The linear order concatenates the local orders along ``S``.
    """
    B = S.building
    intervals = intervals or local_intervals(S)
    out = []
    for g in S.ordered():
        li = intervals[g]
        loc = locals_.get(g)
        if loc is None:
            out.append(g)
            continue
        if not loc.irreducible:
            raise BuildingError("local nested sets must be irreducible", g)
        if loc.building.lattice != li.lattice:
            raise BuildingError("local nested set lives on the wrong interval", g)
        for k in loc.ordered():
            out.append(comp(B, li.lo, li.to_parent(k)))
    if len(set(out)) != len(out):
        raise BuildingError("composition produced repeated members", out)
    return NestedSet(B, out, order=out, validate=False)


def decompose_nested(S: NestedSet, frame: Iterable[int]) -> Dict[int, NestedSet]:
    """Split ``S`` along a sub-nested-set ``frame`` containing the top.

    The local set at ``G'`` is ``(S v tau(G')) n (tau(G'), G']`` in interval ids.
    """
    L = S.lattice
    frame = frozenset(frame)
    if L.top not in frame:
        raise BuildingError("frame must contain the top")
    if not frame <= S.members:
        raise BuildingError("frame must be a subset of the nested set")
    F = NestedSet(S.building, frame, validate=False)
    out = {}
    for g, li in local_intervals(F).items():
        ms = []
        for x in S.members:
            k = L.join(x, li.lo)
            if L.lt(li.lo, k) and L.leq(k, g):
                ms.append(li.from_parent(k))
        out[g] = NestedSet(li.building, ms, validate=False)
    return out


def singleton(B: BuildingSet, g: int) -> NestedSet:
    """The nested set ``{g, top}`` (or ``{top}`` when ``g`` is the top)."""
    return NestedSet(B, {g, B.lattice.top}, validate=False)


def _frames_of(S: NestedSet) -> List[frozenset]:
    top = S.lattice.top
    rest = sorted(S.members - {top})
    return [frozenset(c) | {top} for r in range(len(rest) + 1) for c in itertools.combinations(rest, r)]


def check_operad_laws(B: BuildingSet, max_size: int = 3) -> dict:
    """Round trip and associativity of nested-set composition.

    For every irreducible nested set ``S`` with ``|S| <= max_size`` and every
    frame ``F`` inside it, composing the pieces of ``S`` back into ``F``
    recovers ``S``.  For every chain of frames ``F <= T <= S`` both
    bracketings of the triple composition recover ``S``.
    """
    round_trips = 0
    triples = 0
    failures = []
    for S in enumerate_nested_sets(B, irreducible_only=True, max_size=max_size):
        for F in _frames_of(S):
            round_trips += 1
            if compose_nested(NestedSet(B, F, validate=False), decompose_nested(S, F)) != S:
                failures.append({"law": "round-trip", "nested": sorted(S.members), "frame": sorted(F)})
        for T in _frames_of(S):
            Tn = NestedSet(B, T, validate=False)
            outer = decompose_nested(S, T)
            for F in _frames_of(Tn):
                triples += 1
                Fn = NestedSet(B, F, validate=False)
                mid = decompose_nested(Tn, F)
                # (F o mid) o outer
                left = compose_nested(compose_nested(Fn, mid), outer)
                # F o (mid o outer-restricted)
                big = decompose_nested(S, F)
                inner = {g: compose_nested(mid[g], decompose_nested(big[g], mid[g].members))
                         for g in mid}
                right = compose_nested(Fn, inner)
                if left != S or right != S:
                    failures.append({"law": "associativity", "nested": sorted(S.members),
                                     "frames": [sorted(F), sorted(T)]})
    return {"round_trips": round_trips, "triples": triples, "failures": failures, "pass": not failures}
