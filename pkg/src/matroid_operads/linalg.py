"""Exact sparse linear algebra over the rationals.

Vectors are ``dict`` objects mapping a hashable column key to a non-zero
:class:`fractions.Fraction`.  Everything downstream (normal forms in graded
quotients, structure-map matrices, homology ranks) goes through the
:class:`Echelon` class below.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, List, Optional

Vector = Dict[Hashable, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def vec_add(target: Vector, other: Vector, scale=ONE) -> Vector:
    """In-place ``target += scale * other``; returns ``target``."""
    if not scale:
        return target
    for k, v in other.items():
        nv = target.get(k, ZERO) + scale * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)
    return target


def vec_scale(v: Vector, scale) -> Vector:
    if not scale:
        return {}
    return {k: c * scale for k, c in v.items()}


class Echelon:
    """Incrementally maintained reduced row echelon form.

    Every stored row has a pivot column that appears in no other stored row,
    so reducing a vector is a single pass over its support.  The pivot of a
    new row is the column with the smallest ``priority`` key; callers use
    this to force pivots onto columns they want eliminated.
    """

    def __init__(self, priority: Optional[Callable[[Hashable], object]] = None):
        self.priority = priority
        self.rows: Dict[Hashable, Vector] = {}
        # column -> set of pivots whose row has a non-zero entry there
        self._occurs: Dict[Hashable, set] = {}

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self):
        return self.rows.keys()

    def reduce(self, v: Vector) -> Vector:
        """Return the normal form of ``v`` (no pivot columns in its support)."""
        out = dict(v)
        for col in [c for c in out if c in self.rows]:
            coeff = out.get(col)
            if coeff:
                vec_add(out, self.rows[col], -coeff)
        return out

    def add(self, v: Vector) -> Optional[Hashable]:
        """Insert ``v``; return the new pivot or ``None`` if ``v`` was dependent."""
        r = self.reduce(v)
        if not r:
            return None
        if self.priority is None:
            pivot = min(r, key=_sort_key)
        else:
            pivot = min(r, key=lambda c: (self.priority(c), _sort_key(c)))
        inv = ONE / r[pivot]
        r = {k: c * inv for k, c in r.items()}
        # clear the new pivot from existing rows
        for p in list(self._occurs.get(pivot, ())):
            row = self.rows[p]
            coeff = row.get(pivot)
            if not coeff:
                continue
            before = set(row)
            vec_add(row, r, -coeff)
            after = set(row)
            for c in before - after:
                self._occurs[c].discard(p)
            for c in after - before:
                self._occurs.setdefault(c, set()).add(p)
        self.rows[pivot] = r
        for c in r:
            self._occurs.setdefault(c, set()).add(pivot)
        return pivot

    def extend(self, vectors: Iterable[Vector]) -> int:
        added = 0
        for v in vectors:
            if self.add(v) is not None:
                added += 1
        return added

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)


def _sort_key(c):
    return (type(c).__name__, c) if not isinstance(c, tuple) else ("tuple", c)


def rank(vectors: Iterable[Vector]) -> int:
    e = Echelon()
    e.extend(vectors)
    return e.rank


def kernel(columns: List[Vector], ncols: Optional[int] = None) -> List[Dict[int, Fraction]]:
    """Basis of ``{c : sum_j c_j columns[j] = 0}``.

    ``columns[j]`` is the image of the j-th source basis vector.  The result
    is a list of sparse vectors indexed by source position.
    """
    n = len(columns) if ncols is None else ncols
    # Row-reduce the augmented system [A^T | I]; rows whose A-part vanishes
    # give the kernel.  Column keys ('a', k) for the image, ('s', j) for source.
    ech = Echelon(priority=lambda c: 0 if c[0] == "a" else 1)
    basis = []
    for j in range(n):
        v = {("a", k): c for k, c in columns[j].items()}
        v[("s", j)] = ONE
        pivot = ech.add(v)
        assert pivot is not None
    for p, row in ech.rows.items():
        if p[0] == "s":
            basis.append({k[1]: c for k, c in row.items()})
    return basis


def solve_in_span(basis: List[Vector], target: Vector) -> Optional[Dict[int, Fraction]]:
    """Coefficients ``c`` with ``sum c_i basis[i] == target``, or ``None``."""
    ech = Echelon(priority=lambda c: 0 if c[0] == "a" else 1)
    for i, b in enumerate(basis):
        v = {("a", k): c for k, c in b.items()}
        v[("s", i)] = ONE
        ech.add(v)
    r = ech.reduce({("a", k): c for k, c in target.items()})
    if any(k[0] == "a" for k in r):
        return None
    # target - sum(...) = 0  =>  coefficients are minus the source part
    return {k[1]: -c for k, c in r.items()}


def dense(vectors: List[Vector], keys: List[Hashable]) -> List[List[Fraction]]:
    """Columns-as-vectors to a dense row-major matrix indexed by ``keys``."""
    index = {k: i for i, k in enumerate(keys)}
    m = [[ZERO] * len(vectors) for _ in keys]
    for j, v in enumerate(vectors):
        for k, c in v.items():
            m[index[k]][j] = c
    return m


def matmul(a: List[List[Fraction]], b: List[List[Fraction]]) -> List[List[Fraction]]:
    if not a:
        return []
    inner = len(b)
    ncols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [ZERO] * ncols
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(ncols):
                    if bk[j]:
                        acc[j] += x * bk[j]
        out.append(acc)
    return out


def dense_rank(m: List[List[Fraction]]) -> int:
    return rank({j: c for j, c in enumerate(row) if c} for row in m)


def kron(a: List[List[Fraction]], b: List[List[Fraction]]) -> List[List[Fraction]]:
    out = []
    for ra in a:
        for rb in b:
            out.append([x * y for x in ra for y in rb])
    return out


def transpose(m: List[List[Fraction]]) -> List[List[Fraction]]:
    return [list(r) for r in zip(*m)] if m else []


def identity(n: int) -> List[List[Fraction]]:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
