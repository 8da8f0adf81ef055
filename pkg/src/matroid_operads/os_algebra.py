"""Orlik-Solomon algebras, the derivation delta and the projective subalgebra.

Monomials are strictly increasing tuples of atom indices.  The basis is the
set of no-broken-circuit monomials; reduction of other monomials goes
through a per-degree echelon form of the ideal whose pivots are forced onto
the broken-circuit monomials.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .lattice import Lattice
from .linalg import Echelon, kernel, rank as vec_rank

OSVector = Dict[Tuple[int, ...], Fraction]


def sort_sign(seq: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Sign of the permutation sorting ``seq`` and the sorted tuple; sign 0 on repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0, ()
    sign = 1
    # count inversions
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign, tuple(sorted(seq))


def wedge_monomials(a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    return sort_sign(a + b)


def vadd(target: OSVector, other: OSVector, scale=1) -> OSVector:
    for k, v in other.items():
        nv = target.get(k, 0) + scale * v
        if nv:
            target[k] = Fraction(nv)
        else:
            target.pop(k, None)
    return target


def delta_monomial(m: Tuple[int, ...]) -> OSVector:
    """delta(e_1 ... e_k) = sum_i (-1)^(i-1) e_1 .. e_i^ .. e_k."""
    out: OSVector = {}
    for i in range(len(m)):
        out[m[:i] + m[i + 1:]] = Fraction(-1 if i % 2 else 1)
    return out


def delta_vector(v: OSVector) -> OSVector:
    out: OSVector = {}
    for m, c in v.items():
        vadd(out, delta_monomial(m), c)
    return out


def circuits(L: Lattice) -> List[Tuple[int, ...]]:
    """Minimal dependent sets of atoms (atom indices, increasing)."""
    out = []
    n = L.n_atoms
    for k in range(2, min(n, L.rk + 1) + 1):
        for c in itertools.combinations(range(n), k):
            if L.rank[L.closure(c)] != k - 1:
                continue
            if all(L.rank[L.closure(c[:i] + c[i + 1:])] == k - 1 for i in range(k)):
                out.append(c)
    return out


def is_independent(L: Lattice, atoms: Sequence[int]) -> bool:
    return L.rank[L.closure(atoms)] == len(atoms)


class OSAlgebra:
    """OS(L) with basis of nbc monomials for the given atom order.

    ``atom_order`` ranks the atoms for the broken-circuit rule; monomials
    themselves always list atoms by index.
    """

    def __init__(self, L: Lattice, atom_order: Optional[Sequence[int]] = None):
        self.lattice = L
        n = L.n_atoms
        self.atom_order = tuple(range(n)) if atom_order is None else tuple(atom_order)
        if sorted(self.atom_order) != list(range(n)):
            raise ValueError("atom order must be a permutation of the atoms")
        pos = {a: i for i, a in enumerate(self.atom_order)}
        self.circuits = circuits(L)
        broken = [frozenset(c) - {min(c, key=pos.__getitem__)} for c in self.circuits]
        self.rank = L.rk
        self.basis: List[List[Tuple[int, ...]]] = []
        for k in range(self.rank + 1):
            level = []
            for s in itertools.combinations(range(n), k):
                if not is_independent(L, s):
                    continue
                fs = frozenset(s)
                if any(b <= fs for b in broken):
                    continue
                level.append(s)
            self.basis.append(level)
        self.index = [{m: i for i, m in enumerate(b)} for b in self.basis]
        self._nbc = set(itertools.chain.from_iterable(self.basis))
        self._echelons: Dict[int, Echelon] = {}
        self._cache: Dict[Tuple[int, ...], OSVector] = {}
        for k in range(1, n + 1):
            self._build_degree(k)
        self._projective = None

    def _ideal_rows(self, k: int) -> List[OSVector]:
        n = self.lattice.n_atoms
        rows = []
        for c in self.circuits:
            dc = delta_monomial(c)
            j = k - (len(c) - 1)
            if j < 0:
                continue
            for t in itertools.combinations(range(n), j):
                row: OSVector = {}
                for m, coef in dc.items():
                    s, w = wedge_monomials(m, t)
                    if s:
                        vadd(row, {w: coef * s})
                if row:
                    rows.append(row)
        return rows

    def _build_degree(self, k: int) -> None:
        nbc = self._nbc
        ech = Echelon(priority=lambda m: 1 if m in nbc else 0)
        ech.extend(self._ideal_rows(k))
        n = self.lattice.n_atoms
        non = {s for s in itertools.combinations(range(n), k) if s not in nbc}
        if set(ech.pivots) != non:
            raise AssertionError(f"nbc monomials do not index OS in degree {k}")
        self._echelons[k] = ech

    @property
    def hilbert(self) -> List[int]:
        return [len(b) for b in self.basis]

    @property
    def dim(self) -> int:
        return sum(self.hilbert)

    # -- arithmetic ---------------------------------------------------------
    def reduce_monomial(self, m: Sequence[int]) -> OSVector:
        for a in m:
            if not 0 <= a < self.lattice.n_atoms:
                raise ValueError(f"unknown atom {a}")
        s, w = sort_sign(m)
        if not s:
            return {}
        got = self._cache.get(w)
        if got is None:
            if len(w) == 0:
                got = {(): Fraction(1)}
            else:
                got = self._echelons[len(w)].reduce({w: Fraction(1)})
            self._cache[w] = got
        return {k: v * s for k, v in got.items()}

    def reduce(self, v: OSVector) -> OSVector:
        out: OSVector = {}
        for m, c in v.items():
            vadd(out, self.reduce_monomial(m), c)
        return out

    def multiply(self, a: OSVector, b: OSVector) -> OSVector:
        out: OSVector = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                s, w = wedge_monomials(m1, m2)
                if s:
                    vadd(out, self.reduce_monomial(w), c1 * c2 * s)
        return out

    def delta(self, v: OSVector) -> OSVector:
        return self.reduce(delta_vector(v))

    def coordinates(self, v: OSVector, k: int) -> List[Fraction]:
        vec = [Fraction(0)] * len(self.basis[k])
        for m, c in v.items():
            vec[self.index[k][m]] = c
        return vec

    def delta_matrix(self, k: int) -> List[OSVector]:
        """Images of the degree-k basis under delta (as sparse vectors)."""
        return [self.delta({m: Fraction(1)}) for m in self.basis[k]]

    # -- projective subalgebra ---------------------------------------------
    @property
    def projective(self) -> "Subspaces":
        if self._projective is None:
            levels = []
            for k in range(self.rank + 1):
                if k == 0:
                    levels.append(Subspace([{(): Fraction(1)}]))
                    continue
                imgs = self.delta_matrix(k)
                ker = kernel(imgs)
                vecs = []
                for kv in ker:
                    v: OSVector = {}
                    for j, c in kv.items():
                        vadd(v, {self.basis[k][j]: c})
                    vecs.append(v)
                levels.append(Subspace(vecs))
            self._projective = Subspaces(levels)
        return self._projective

    def projective_hilbert(self) -> List[int]:
        return [len(s.basis) for s in self.projective.levels]

    def image_of_delta(self, k: int) -> List[OSVector]:
        """Spanning set of delta(OS_{k+1}) inside OS_k."""
        if k + 1 >= len(self.basis):
            return []
        return [v for v in self.delta_matrix(k + 1) if v]


class Subspace:
    """Subspace in reduced echelon form; coordinates are read off the pivots."""

    def __init__(self, vectors: Iterable[OSVector]):
        ech = Echelon()
        ech.extend(vectors)
        self.pivots = sorted(ech.rows)
        self.basis = [ech.rows[p] for p in self.pivots]

    def __len__(self):
        return len(self.basis)

    def coordinates(self, v: OSVector, check: bool = True) -> List[Fraction]:
        coords = [v.get(p, Fraction(0)) for p in self.pivots]
        if check:
            rest = dict(v)
            for c, b in zip(coords, self.basis):
                vadd(rest, b, -c)
            if rest:
                raise ValueError("vector is not in the subspace")
        return coords

    def contains(self, v: OSVector) -> bool:
        try:
            self.coordinates(v)
            return True
        except ValueError:
            return False


class Subspaces:
    def __init__(self, levels: List[Subspace]):
        self.levels = levels


def os_oracle_hilbert(L: Lattice) -> List[int]:
    """Dimensions of the exterior algebra modulo the circuit ideal, by rank only."""
    n = L.n_atoms
    cs = circuits(L)
    dims = []
    for k in range(n + 1):
        rows = []
        for c in cs:
            dc = delta_monomial(c)
            j = k - (len(c) - 1)
            if j < 0:
                continue
            for t in itertools.combinations(range(n), j):
                row: OSVector = {}
                for m, coef in dc.items():
                    s, w = wedge_monomials(m, t)
                    if s:
                        vadd(row, {w: coef * s})
                if row:
                    rows.append(row)
        total = len(list(itertools.combinations(range(n), k)))
        dims.append(total - vec_rank(rows))
    while len(dims) > 1 and dims[-1] == 0:
        dims.pop()
    return dims
