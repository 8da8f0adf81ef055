"""Finite-dimensional graded spaces, tensor products and sparse linear maps.

Maps are stored column-wise: ``cols[j]`` is the image of source basis
vector ``j`` as a dict target-index -> Fraction.  Spaces carrying odd
elements (``signed=True``) pick up Koszul signs when factors are swapped or
when an odd map moves past an element.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, List, Sequence, Tuple

Column = Dict[int, Fraction]


class Space:
    """A vector space with a fixed basis and a degree per basis vector."""

    def __init__(self, key: Hashable, degrees: Sequence[int], signed: bool = False, labels=None):
        self.key = key
        self.degrees = list(degrees)
        self.signed = signed
        self.labels = labels

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def __eq__(self, other):
        return isinstance(other, Space) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Space({self.key!r}, dim={self.dim})"


class Tensor:
    """Ordered tensor product of spaces; basis indexed in mixed radix."""

    def __init__(self, factors: Sequence[Space]):
        self.factors: Tuple[Space, ...] = tuple(factors)
        self.dims = [f.dim for f in self.factors]
        self.dim = 1
        for d in self.dims:
            self.dim *= d
        self._strides = []
        s = 1
        for d in reversed(self.dims):
            self._strides.append(s)
            s *= d
        self._strides.reverse()

    def __eq__(self, other):
        return isinstance(other, Tensor) and self.factors == other.factors

    def __repr__(self):
        return f"Tensor({list(self.factors)})"

    def join(self, idx: Sequence[int]) -> int:
        return sum(i * s for i, s in zip(idx, self._strides))

    def split(self, i: int) -> Tuple[int, ...]:
        out = []
        for s, d in zip(self._strides, self.dims):
            out.append((i // s) % d if d else 0)
        return tuple(out)

    def degree(self, i: int) -> int:
        return sum(f.degrees[k] for f, k in zip(self.factors, self.split(i)))

    def parity(self, i: int) -> int:
        return sum(f.degrees[k] for f, k in zip(self.factors, self.split(i)) if f.signed) % 2

    def __add__(self, other: "Tensor") -> "Tensor":
        return Tensor(self.factors + other.factors)


class MapError(ValueError):
    pass


class Map:
    """Linear map ``src -> dst``; ``parity`` is its degree mod 2 for Koszul signs."""

    def __init__(self, src: Tensor, dst: Tensor, cols: List[Column], parity: int = 0):
        if len(cols) != src.dim:
            raise MapError("one column per source basis vector required")
        self.src = src
        self.dst = dst
        self.cols = [{k: Fraction(v) for k, v in c.items() if v} for c in cols]
        self.parity = parity % 2

    def __call__(self, v: Column) -> Column:
        out: Column = {}
        for j, c in v.items():
            for i, x in self.cols[j].items():
                nv = out.get(i, 0) + c * x
                if nv:
                    out[i] = nv
                else:
                    out.pop(i, None)
        return out

    def compose(self, inner: "Map") -> "Map":
        """``self o inner``."""
        if inner.dst != self.src:
            raise MapError(f"cannot compose: {inner.dst} vs {self.src}")
        return Map(inner.src, self.dst, [self(c) for c in inner.cols], self.parity + inner.parity)

    def __matmul__(self, inner):
        return self.compose(inner)

    def tensor(self, other: "Map") -> "Map":
        """``self (x) other`` with the Koszul rule (f(x)g)(a(x)b) = (-1)^{|g||a|} f(a)(x)g(b)."""
        src = self.src + other.src
        dst = self.dst + other.dst
        nd2 = other.dst.dim
        cols = []
        for j in range(src.dim):
            idx = src.split(j)
            ja = self.src.join(idx[:len(self.src.factors)])
            jb = other.src.join(idx[len(self.src.factors):])
            sign = -1 if (other.parity and self.src.parity(ja)) else 1
            col: Column = {}
            for ia, xa in self.cols[ja].items():
                for ib, xb in other.cols[jb].items():
                    col[ia * nd2 + ib] = sign * xa * xb
            cols.append(col)
        return Map(src, dst, cols, self.parity + other.parity)

    def __neg__(self):
        return Map(self.src, self.dst, [{k: -v for k, v in c.items()} for c in self.cols], self.parity)

    def scaled(self, s) -> "Map":
        return Map(self.src, self.dst, [{k: v * s for k, v in c.items()} for c in self.cols], self.parity)

    def __eq__(self, other):
        return (isinstance(other, Map) and self.src == other.src and self.dst == other.dst
                and self.cols == other.cols)

    def is_zero(self) -> bool:
        return not any(self.cols)

    def difference(self, other: "Map") -> List[Tuple[int, int, Fraction]]:
        """Entries where the two maps disagree, as (row, col, self - other)."""
        if self.src != other.src or self.dst != other.dst:
            raise MapError("maps have different shapes")
        out = []
        for j, (a, b) in enumerate(zip(self.cols, other.cols)):
            for i in set(a) | set(b):
                d = a.get(i, 0) - b.get(i, 0)
                if d:
                    out.append((i, j, d))
        return out

    def rank(self) -> int:
        from .linalg import rank
        return rank(self.cols)

    def dense(self) -> List[List[Fraction]]:
        m = [[Fraction(0)] * self.src.dim for _ in range(self.dst.dim)]
        for j, c in enumerate(self.cols):
            for i, x in c.items():
                m[i][j] = x
        return m


def identity(T: Tensor) -> Map:
    return Map(T, T, [{j: Fraction(1)} for j in range(T.dim)])


def permutation(T: Tensor, perm: Sequence[int]) -> Map:
    """Map ``T -> T'`` where factor ``k`` of ``T'`` is factor ``perm[k]`` of ``T``.

    Swapping two signed elements of odd degree contributes a sign.
    """
    n = len(T.factors)
    if sorted(perm) != list(range(n)):
        raise MapError("not a permutation")
    dst = Tensor([T.factors[p] for p in perm])
    cols = []
    for j in range(T.dim):
        idx = T.split(j)
        pars = [T.factors[k].degrees[idx[k]] % 2 if T.factors[k].signed else 0 for k in range(n)]
        sign = 1
        # inversions of perm between odd elements
        for a in range(n):
            for b in range(a + 1, n):
                if perm[a] > perm[b] and pars[perm[a]] and pars[perm[b]]:
                    sign = -sign
        cols.append({dst.join([idx[p] for p in perm]): Fraction(sign)})
    return Map(T, dst, cols)


def kron_vectors(parts: Sequence[Dict[int, Fraction]], T: Tensor) -> Column:
    """Tensor product of per-factor coordinate vectors as a column of ``T``."""
    acc: Dict[Tuple[int, ...], Fraction] = {(): Fraction(1)}
    for p in parts:
        nxt = {}
        for k, c in acc.items():
            for i, x in p.items():
                nxt[k + (i,)] = c * x
        acc = nxt
    return {T.join(k): c for k, c in acc.items() if c}
