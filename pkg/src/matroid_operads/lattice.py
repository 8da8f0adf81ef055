"""Geometric lattices stored as flats over a fixed atom set.

An element is identified by its atom support, kept as a bitmask.  Element
ids are assigned by ``(rank, sorted support)`` so that the same lattice always
serializes the same way.  Id 0 is the bottom, the last id is the top.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

DEFAULT_MAX_ELEMENTS = 1 << 16
MAX_BOOLEAN = 8
MAX_PARTITION = 6
MAX_GRAPH_EDGES = 16


class LatticeError(ValueError):
    """Raised when input does not describe a (geometric) lattice.

    ``kind`` is one of ``"size"``, ``"input"``, ``"not-a-lattice"``,
    ``"jordan-holder"``, ``"submodularity"``, ``"atomicity"``.
    """

    def __init__(self, kind: str, message: str, witness=None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.witness = witness

    def to_json(self):
        return {"error": self.kind, "message": str(self), "witness": _jsonable(self.witness)}


def _jsonable(x):
    if isinstance(x, (frozenset, set, tuple, list)):
        return [_jsonable(y) for y in (sorted(x, key=repr) if isinstance(x, (set, frozenset)) else x)]
    return x


def bits(mask: int) -> List[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class Lattice:
    """A geometric lattice on atoms ``0..n-1`` given by its flats.

    Construct through :func:`build_from_flats` or the family builders; the
    constructor itself assumes ``masks`` are valid flats and only computes
    derived tables.
    """

    def __init__(self, atom_labels: Sequence[Hashable], masks: Iterable[int],
                 max_elements: int = DEFAULT_MAX_ELEMENTS):
        self.atom_labels: Tuple[Hashable, ...] = tuple(atom_labels)
        self.n_atoms = len(self.atom_labels)
        masks = set(masks)
        if len(masks) > max_elements:
            raise LatticeError("size", f"{len(masks)} elements exceeds bound {max_elements}")
        ranks = _ranks_from_masks(masks)
        order = sorted(masks, key=lambda m: (ranks[m], bits(m)))
        self.masks: List[int] = order
        self.index: Dict[int, int] = {m: i for i, m in enumerate(order)}
        self.rank: List[int] = [ranks[m] for m in order]
        self.size = len(order)
        self.bottom = 0
        self.top = self.size - 1
        self.atom_ids: List[int] = [self.index.get(1 << a, -1) for a in range(self.n_atoms)]
        self._join = self._build_join_table()
        self._upper = None
        self._lower_covers = None

    # -- construction helpers -------------------------------------------
    def _closure_of_mask(self, mask: int) -> int:
        i = self.index.get(mask)
        if i is not None:
            return i
        for j, m in enumerate(self.masks):
            if m & mask == mask:
                return j
        raise LatticeError("not-a-lattice", "no flat contains the given atoms", bits(mask))

    def _build_join_table(self) -> List[List[int]]:
        n = self.size
        table = [[0] * n for _ in range(n)]
        for i in range(n):
            mi = self.masks[i]
            row = table[i]
            row[i] = i
            for j in range(i + 1, n):
                k = self._closure_of_mask(mi | self.masks[j])
                row[j] = k
                table[j][i] = k
        return table

    # -- queries ----------------------------------------------------------
    @property
    def rk(self) -> int:
        return self.rank[self.top]

    def join(self, x: int, y: int) -> int:
        return self._join[x][y]

    def join_all(self, xs: Iterable[int]) -> int:
        out = self.bottom
        for x in xs:
            out = self._join[out][x]
        return out

    def meet(self, x: int, y: int) -> int:
        return self.index[self.masks[x] & self.masks[y]]

    def leq(self, x: int, y: int) -> bool:
        mx = self.masks[x]
        return mx & self.masks[y] == mx

    def lt(self, x: int, y: int) -> bool:
        return x != y and self.leq(x, y)

    def closure(self, atoms: Iterable[int]) -> int:
        mask = 0
        for a in atoms:
            mask |= 1 << a
        return self._closure_of_mask(mask)

    def atoms_below(self, x: int) -> List[int]:
        """Atom indices (positions in ``atom_labels``) below ``x``."""
        return bits(self.masks[x])

    def support(self, x: int) -> frozenset:
        return frozenset(self.atom_labels[a] for a in bits(self.masks[x]))

    def elements(self) -> range:
        return range(self.size)

    def upper_set(self, x: int) -> List[int]:
        return [y for y in range(self.size) if self.leq(x, y)]

    def lower_covers(self, x: int) -> List[int]:
        if self._lower_covers is None:
            self._lower_covers = [
                [y for y in range(self.size)
                 if self.rank[y] == self.rank[z] - 1 and self.leq(y, z)]
                for z in range(self.size)
            ]
        return self._lower_covers[x]

    def upper_covers(self, x: int) -> List[int]:
        r = self.rank[x] + 1
        return [y for y in range(self.size) if self.rank[y] == r and self.leq(x, y)]

    def covers_between(self, x: int, y: int) -> List[int]:
        """Elements covering ``x`` and below ``y``."""
        return [z for z in self.upper_covers(x) if self.leq(z, y)]

    def interval_elements(self, x: int, y: int) -> List[int]:
        return [z for z in range(self.size) if self.leq(x, z) and self.leq(z, y)]

    def __eq__(self, other):
        return (isinstance(other, Lattice) and self.atom_labels == other.atom_labels
                and self.masks == other.masks)

    def __hash__(self):
        return hash((self.atom_labels, tuple(self.masks)))

    def __repr__(self):
        return f"Lattice(atoms={self.n_atoms}, elements={self.size}, rank={self.rk})"

    def flats(self) -> List[List[Hashable]]:
        return [[self.atom_labels[a] for a in bits(m)] for m in self.masks]

    def to_json(self) -> dict:
        return {
            "atoms": list(self.atom_labels),
            "flats": self.flats(),
            "rank": list(self.rank),
        }

    def with_atom_order(self, order: Sequence[int]) -> "Lattice":
        """Same lattice with atoms renumbered so that ``order[i]`` becomes atom ``i``."""
        pos = {a: i for i, a in enumerate(order)}
        masks = []
        for m in self.masks:
            nm = 0
            for a in bits(m):
                nm |= 1 << pos[a]
            masks.append(nm)
        return Lattice([self.atom_labels[a] for a in order], masks)

    # -- axiom check ------------------------------------------------------
    def check_axioms(self) -> Optional[LatticeError]:
        """Exhaustive geometric-lattice check; returns the first violation or ``None``."""
        return _check_axioms(self)


def _ranks_from_masks(masks) -> Dict[int, int]:
    """Length of the longest chain from the bottom, by inclusion."""
    ordered = sorted(masks, key=popcount)
    rank = {}
    for m in ordered:
        best = 0
        for p in ordered:
            if popcount(p) >= popcount(m):
                break
            if p & m == p and p != m:
                best = max(best, rank[p] + 1)
        rank[m] = best
    return rank


def _check_axioms(L: Lattice) -> Optional[LatticeError]:
    n = L.size
    # Jordan-Holder: every cover raises the longest-chain rank by exactly one.
    for z in range(n):
        for y in range(n):
            if y != z and L.leq(y, z) and L.rank[y] != L.rank[z] - 1:
                between = any(
                    w not in (y, z) and L.leq(y, w) and L.leq(w, z) for w in range(n)
                )
                if not between:
                    return LatticeError(
                        "jordan-holder", "a covering relation skips a rank",
                        (L.flats()[y], L.flats()[z]))
    # atomicity: each element is the join of the atoms it contains
    atom_elems = [i for i in range(n) if L.rank[i] == 1]
    for a in atom_elems:
        if popcount(L.masks[a]) != 1:
            return LatticeError("atomicity", "an atom of the lattice is not a single ground element",
                                L.flats()[a])
    for x in range(n):
        j = L.join_all(a for a in atom_elems if L.leq(a, x))
        if j != x:
            return LatticeError("atomicity", "element is not the join of the atoms below it",
                                L.flats()[x])
    for x in range(n):
        for y in range(x + 1, n):
            if L.rank[L.join(x, y)] + L.rank[L.meet(x, y)] > L.rank[x] + L.rank[y]:
                return LatticeError("submodularity", "rank is not sub-modular",
                                    (L.flats()[x], L.flats()[y]))
    return None


def build_from_flats(flats: Iterable[Iterable[Hashable]], atoms: Optional[Sequence[Hashable]] = None,
                     max_elements: int = DEFAULT_MAX_ELEMENTS) -> Lattice:
    """Validate a family of flats and return the lattice.

    Raises :class:`LatticeError` naming the first violated axiom.
    """
    flats = [frozenset(f) for f in flats]
    ground = set().union(*flats) if flats else set()
    if atoms is None:
        atoms = sorted(ground, key=lambda a: (str(type(a)), a))
    atoms = list(atoms)
    if not ground <= set(atoms):
        raise LatticeError("input", "flats mention unknown atoms", sorted(ground - set(atoms), key=repr))
    if len(flats) > max_elements:
        raise LatticeError("size", f"{len(flats)} elements exceeds bound {max_elements}")
    pos = {a: i for i, a in enumerate(atoms)}
    masks = set()
    for f in flats:
        m = 0
        for a in f:
            m |= 1 << pos[a]
        masks.add(m)
    full = (1 << len(atoms)) - 1
    if 0 not in masks:
        raise LatticeError("not-a-lattice", "the empty flat (bottom) is missing")
    if full not in masks:
        raise LatticeError("not-a-lattice", "the full atom set (top) is missing")
    for m1 in masks:
        for m2 in masks:
            if m1 & m2 not in masks:
                raise LatticeError("not-a-lattice", "flats are not closed under intersection",
                                   (sorted(atoms[a] for a in bits(m1)), sorted(atoms[a] for a in bits(m2))))
    L = Lattice(atoms, masks, max_elements=max_elements)
    err = L.check_axioms()
    if err is not None:
        raise err
    return L


# -- families ----------------------------------------------------------------

def build_boolean(n: int, bound: int = MAX_BOOLEAN) -> Lattice:
    if not 1 <= n <= bound:
        raise LatticeError("size", f"boolean lattice size {n} outside [1, {bound}]")
    return Lattice(list(range(1, n + 1)), range(1 << n))


def set_partitions(items: Sequence) -> List[List[Tuple]]:
    items = list(items)
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for p in set_partitions(rest):
        out.append([(first,)] + p)
        for i in range(len(p)):
            out.append(p[:i] + [(first,) + p[i]] + p[i + 1:])
    return out


def build_partition(n: int, bound: int = MAX_PARTITION) -> Lattice:
    """Partition lattice of {1..n}; atom ``(i, j)`` merges i and j."""
    if not 2 <= n <= bound:
        raise LatticeError("size", f"partition lattice size {n} outside [2, {bound}]")
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    pos = {p: i for i, p in enumerate(pairs)}
    masks = set()
    for part in set_partitions(range(1, n + 1)):
        m = 0
        for block in part:
            for p in itertools.combinations(sorted(block), 2):
                m |= 1 << pos[p]
        masks.add(m)
    return Lattice(pairs, masks)


def partition_of(L: Lattice, x: int, n: int) -> List[Tuple[int, ...]]:
    """Blocks of the partition represented by ``x`` in ``build_partition(n)``."""
    parent = {i: i for i in range(1, n + 1)}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in L.atoms_below(x):
        i, j = L.atom_labels[a]
        parent[find(i)] = find(j)
    blocks: Dict[int, List[int]] = {}
    for i in range(1, n + 1):
        blocks.setdefault(find(i), []).append(i)
    return sorted(tuple(b) for b in blocks.values())


@dataclass
class GraphInput:
    vertices: List[Hashable]
    edges: List[Tuple[Hashable, Hashable]]
    labels: Optional[List[Hashable]] = None

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise LatticeError("input", "repeated vertex")
        seen = set()
        for u, v in self.edges:
            if u not in vs or v not in vs:
                raise LatticeError("input", "edge endpoint is not a vertex", (u, v))
            if u == v:
                raise LatticeError("input", "self-loop (the matroid would have a loop)", (u, v))
            key = frozenset((u, v))
            if key in seen:
                raise LatticeError("input", "parallel edge (the matroid would not be simple)", (u, v))
            seen.add(key)
        if self.labels is None:
            self.labels = [f"{u}-{v}" for u, v in self.edges]
        elif len(self.labels) != len(self.edges):
            raise LatticeError("input", "one label per edge required")

    @classmethod
    def from_json(cls, data: dict) -> "GraphInput":
        return cls(list(data["vertices"]), [tuple(e) for e in data["edges"]], data.get("labels"))

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges],
                "labels": list(self.labels)}

    def neighbours(self) -> Dict[Hashable, set]:
        adj = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def path_graph(n: int) -> GraphInput:
    vs = list(range(1, n + 1))
    return GraphInput(vs, [(i, i + 1) for i in range(1, n)])


def cycle_graph(n: int) -> GraphInput:
    vs = list(range(1, n + 1))
    return GraphInput(vs, [(i, i + 1) for i in range(1, n)] + [(n, 1)])


def complete_graph(n: int) -> GraphInput:
    vs = list(range(1, n + 1))
    return GraphInput(vs, list(itertools.combinations(vs, 2)))


def _edge_closure(g: GraphInput, emask: int) -> int:
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i in bits(emask):
        u, v = g.edges[i]
        parent[find(u)] = find(v)
    out = 0
    for i, (u, v) in enumerate(g.edges):
        if find(u) == find(v):
            out |= 1 << i
    return out


def build_graphic(g: GraphInput, bound: int = MAX_GRAPH_EDGES) -> Lattice:
    """Lattice of flats of the cycle matroid of ``g``."""
    if not g.edges:
        raise LatticeError("input", "graph has no edges")
    if len(g.edges) > bound:
        raise LatticeError("size", f"{len(g.edges)} edges exceeds bound {bound}")
    masks = {_edge_closure(g, m) for m in range(1 << len(g.edges))}
    return Lattice(list(g.labels), masks)


def one_point() -> Lattice:
    return Lattice([], [0])


# -- derived lattices --------------------------------------------------------

@dataclass
class Interval:
    """``[lo, hi]`` of a parent lattice as a lattice of its own.

    Atoms of the interval are the covers of ``lo`` below ``hi``, ordered by the
    smallest parent atom generating them (so directed structures restrict).
    """

    parent: Lattice
    lo: int
    hi: int
    lattice: Lattice = field(init=False)
    embed: List[int] = field(init=False)  # interval id -> parent id
    pull: Dict[int, int] = field(init=False)  # parent id -> interval id

    def __post_init__(self):
        P = self.parent
        if not P.leq(self.lo, self.hi):
            raise LatticeError("input", "interval endpoints are not ordered", (self.lo, self.hi))
        covers = P.covers_between(self.lo, self.hi)
        lo_mask = P.masks[self.lo]

        def min_atom(k):
            return min(bits(P.masks[k] & ~lo_mask))

        covers.sort(key=min_atom)
        cover_pos = {k: i for i, k in enumerate(covers)}
        elems = P.interval_elements(self.lo, self.hi)
        mask_of = {}
        for z in elems:
            m = 0
            for k in covers:
                if P.leq(k, z):
                    m |= 1 << cover_pos[k]
            mask_of[z] = m
        # interval atoms are labelled by their parent element id
        self.lattice = Lattice(list(covers), mask_of.values())
        by_mask = {m: z for z, m in mask_of.items()}
        self.embed = [by_mask[m] for m in self.lattice.masks]
        self.pull = {z: i for i, z in enumerate(self.embed)}
        # parent atom generating each interval atom, used by directed structures
        self.atom_generators = [min_atom(k) for k in covers]

    def to_parent(self, i: int) -> int:
        return self.embed[i]

    def from_parent(self, z: int) -> int:
        return self.pull[z]


def interval(L: Lattice, x: int, y: int) -> Interval:
    return Interval(L, x, y)


@dataclass
class Product:
    lattice: Lattice
    pair_to_id: Dict[Tuple[int, int], int]
    id_to_pair: List[Tuple[int, int]]
    left: List[int]   # L1 id -> product id of (id, bottom)
    right: List[int]  # L2 id -> product id of (bottom, id)


def product(L1: Lattice, L2: Lattice, max_elements: int = DEFAULT_MAX_ELEMENTS) -> Product:
    n1 = L1.n_atoms
    if L1.size * L2.size > max_elements:
        raise LatticeError("size", f"product has {L1.size * L2.size} elements")
    labels = [("L", a) for a in L1.atom_labels] + [("R", b) for b in L2.atom_labels]
    masks = {}
    for i, m1 in enumerate(L1.masks):
        for j, m2 in enumerate(L2.masks):
            masks[m1 | (m2 << n1)] = (i, j)
    P = Lattice(labels, masks.keys(), max_elements=max_elements)
    id_to_pair = [masks[m] for m in P.masks]
    pair_to_id = {p: i for i, p in enumerate(id_to_pair)}
    left = [pair_to_id[(i, 0)] for i in range(L1.size)]
    right = [pair_to_id[(0, j)] for j in range(L2.size)]
    return Product(P, pair_to_id, id_to_pair, left, right)


# -- isomorphisms ------------------------------------------------------------

def find_isomorphisms(L1: Lattice, L2: Lattice, limit: Optional[int] = None,
                      preserve: Optional[Tuple[frozenset, frozenset]] = None) -> List[List[int]]:
    """All lattice isomorphisms ``L1 -> L2`` as element-id maps.

    An isomorphism of atomic lattices is fixed by its action on atoms, so the
    search backtracks over atom bijections, pruning whenever a flat spanned
    by already-mapped atoms lands outside the flats of ``L2``.  ``preserve``
    optionally restricts to maps sending the first id-set onto the second.
    """
    if L1.size != L2.size or L1.n_atoms != L2.n_atoms or sorted(L1.rank) != sorted(L2.rank):
        return []
    n = L1.n_atoms
    flats2 = set(L2.masks)
    # flats of L1 grouped by their highest atom, checked once that atom is mapped
    by_last: Dict[int, List[int]] = {}
    for m in L1.masks:
        if m:
            by_last.setdefault(max(bits(m)), []).append(m)
    profile1 = [_atom_profile(L1, a) for a in range(n)]
    profile2 = [_atom_profile(L2, a) for a in range(n)]
    results: List[List[int]] = []
    image = [-1] * n
    used = [False] * n

    def ok(a):
        for m in by_last.get(a, ()):
            t = 0
            for b in bits(m):
                t |= 1 << image[b]
            if t not in flats2:
                return False
        return True

    def rec(a):
        if limit is not None and len(results) >= limit:
            return
        if a == n:
            emap = []
            for m in L1.masks:
                t = 0
                for b in bits(m):
                    t |= 1 << image[b]
                emap.append(L2.index[t])
            if preserve is not None:
                src, dst = preserve
                if {emap[x] for x in src} != set(dst):
                    return
            results.append(emap)
            return
        for b in range(n):
            if not used[b] and profile1[a] == profile2[b]:
                image[a] = b
                used[b] = True
                if ok(a):
                    rec(a + 1)
                used[b] = False
        image[a] = -1

    rec(0)
    return results


def _atom_profile(L: Lattice, a: int) -> Tuple[int, ...]:
    counts = [0] * (L.rk + 1)
    bit = 1 << a
    for i, m in enumerate(L.masks):
        if m & bit:
            counts[L.rank[i]] += 1
    return tuple(counts)


def is_isomorphic(L1: Lattice, L2: Lattice) -> bool:
    return bool(find_isomorphisms(L1, L2, limit=1))


def automorphisms(L: Lattice, preserve: Optional[frozenset] = None) -> List[List[int]]:
    pres = None if preserve is None else (frozenset(preserve), frozenset(preserve))
    return find_isomorphisms(L, L, preserve=pres)
