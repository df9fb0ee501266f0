"""Exact linear algebra over the rationals.

Matrices are stored sparsely as ``(row, col) -> Fraction`` maps.  Vectors
handed across the public API are plain tuples of :class:`Fraction`; the
elimination routines work on sparse ``{index: Fraction}`` rows internally.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

Vector = tuple  # tuple[Fraction, ...]
Sparse = dict  # dict[int, Fraction]


class ContainmentViolation(ValueError):
    """A boundary vector does not lie in the span of the cycle vectors."""


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def to_sparse(v: Iterable) -> Sparse:
    return {i: frac(x) for i, x in enumerate(v) if x != 0}


def to_dense(v: Mapping[int, Fraction], n: int) -> Vector:
    out = [Fraction(0)] * n
    for i, x in v.items():
        out[i] = x
    return tuple(out)


def axpy(target: Sparse, coef: Fraction, src: Mapping[int, Fraction]) -> None:
    """``target += coef * src`` in place, dropping cancelled entries."""
    if not coef:
        return
    for k, val in src.items():
        nv = target.get(k, 0) + coef * val
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class RationalMatrix:
    """Immutable sparse matrix with exact rational entries.

    Acts on column vectors: entry ``(r, c)`` is the coefficient of basis
    vector ``r`` of the target in the image of basis vector ``c``.
    """

    __slots__ = ("rows", "cols", "_entries", "_hash", "_colcache")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], object] = ()):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        clean = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for (r, c), x in items:
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
            x = frac(x)
            if x:
                clean[(r, c)] = x
        self._entries = clean
        self._hash = None
        self._colcache = None

    # construction helpers
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], cols: int | None = None) -> "RationalMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        ent = {}
        for r, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged matrix")
            for c, x in enumerate(row):
                if x != 0:
                    ent[(r, c)] = x
        return cls(rows, cols, ent)

    @classmethod
    def from_columns(cls, columns: Sequence[Mapping[int, Fraction]], rows: int) -> "RationalMatrix":
        ent = {}
        for c, col in enumerate(columns):
            for r, x in col.items():
                ent[(r, c)] = x
        return cls(rows, len(columns), ent)

    # access
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def entries(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._entries)

    def __getitem__(self, rc: tuple[int, int]) -> Fraction:
        r, c = rc
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(rc)
        return self._entries.get((r, c), Fraction(0))

    def nnz(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), x in self._entries.items():
            out[r][c] = x
        return out

    def row_dicts(self) -> list[Sparse]:
        out: list[Sparse] = [{} for _ in range(self.rows)]
        for (r, c), x in self._entries.items():
            out[r][c] = x
        return out

    def column_dicts(self) -> list[Sparse]:
        out: list[Sparse] = [{} for _ in range(self.cols)]
        for (r, c), x in self._entries.items():
            out[c][r] = x
        return out

    def column(self, c: int) -> Sparse:
        return {r: x for (r, cc), x in self._entries.items() if cc == c}

    # algebra
    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows, {(c, r): x for (r, c), x in self._entries.items()})

    def scale(self, a) -> "RationalMatrix":
        a = frac(a)
        return RationalMatrix(self.rows, self.cols, {k: a * x for k, x in self._entries.items()})

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        ent = dict(self._entries)
        for k, x in other._entries.items():
            ent[k] = ent.get(k, 0) + x
        return RationalMatrix(self.rows, self.cols, ent)

    def __neg__(self) -> "RationalMatrix":
        return self.scale(-1)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        by_row: dict[int, list[tuple[int, Fraction]]] = {}
        for (r, c), x in other._entries.items():
            by_row.setdefault(r, []).append((c, x))
        ent: dict[tuple[int, int], Fraction] = {}
        for (r, k), x in self._entries.items():
            for c, y in by_row.get(k, ()):
                key = (r, c)
                ent[key] = ent.get(key, 0) + x * y
        return RationalMatrix(self.rows, other.cols, ent)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        out = [Fraction(0)] * self.rows
        for (r, c), x in self._entries.items():
            if v[c]:
                out[r] += x * v[c]
        return tuple(out)

    def apply_sparse(self, v: Mapping[int, Fraction]) -> Sparse:
        cols = self._cols_cache()
        out: Sparse = {}
        for c, a in v.items():
            axpy(out, a, cols[c])
        return out

    def _cols_cache(self):
        if self._colcache is None:
            self._colcache = self.column_dicts()
        return self._colcache

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, frozenset(self._entries.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"RationalMatrix({self.rows}x{self.cols}, nnz={len(self._entries)})"


def block_matrix(blocks: Mapping[tuple[int, int], RationalMatrix], row_sizes: Sequence[int],
                 col_sizes: Sequence[int]) -> RationalMatrix:
    """Assemble a matrix from blocks keyed by (block_row, block_col)."""
    roff = [0]
    for s in row_sizes:
        roff.append(roff[-1] + s)
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    ent = {}
    for (bi, bj), m in blocks.items():
        if m.shape != (row_sizes[bi], col_sizes[bj]):
            raise ValueError(f"block ({bi},{bj}) has shape {m.shape}")
        for (r, c), x in m._entries.items():
            ent[(roff[bi] + r, coff[bj] + c)] = x
    return RationalMatrix(roff[-1], coff[-1], ent)


class Span:
    """Incrementally grown subspace of Q^dim kept in echelon form.

    With ``track=True`` every stored row remembers which combination of the
    inserted vectors produced it, so membership queries can also return
    coordinates with respect to the inserted (independent) vectors.
    Untracked spans eliminate fraction-free over the integers (rows are kept
    primitive), which is exact and much faster than Fraction arithmetic.
    """

    def __init__(self, dim: int, track: bool = False):
        self.dim = dim
        self.track = track
        self._piv: dict[int, dict] = {}
        self._how: dict[int, Sparse] = {}
        self._count = 0  # number of independent vectors inserted

    @property
    def rank(self) -> int:
        return len(self._piv)

    def _reduce(self, w: Sparse, how: Sparse | None = None) -> Sparse:
        piv = self._piv
        while True:
            cands = [c for c in w if c in piv]
            if not cands:
                return w
            c = min(cands)
            f = w[c]
            axpy(w, -f, piv[c])
            if how is not None:
                axpy(how, -f, self._how[c])

    @staticmethod
    def _integral(v: Mapping) -> dict:
        den = 1
        for x in v.values():
            if isinstance(x, Fraction) and x.denominator != 1:
                den = den * x.denominator // gcd(den, x.denominator)
        out = {}
        for k, x in v.items():
            if x:
                out[k] = int(x * den)
        return out

    def _reduce_int(self, w: dict) -> dict:
        piv = self._piv
        while True:
            cands = [c for c in w if c in piv]
            if not cands:
                break
            c = min(cands)
            row = piv[c]
            a, b = row[c], w[c]
            g = gcd(a, b)
            a, b = a // g, b // g
            if a != 1:
                for k in w:
                    w[k] *= a
            for k, x in row.items():
                y = w.get(k, 0) - b * x
                if y:
                    w[k] = y
                else:
                    w.pop(k, None)
        if w:
            g = 0
            for x in w.values():
                g = gcd(g, x)
                if g == 1:
                    break
            if g > 1:
                for k in w:
                    w[k] //= g
        return w

    def reduce(self, v) -> Sparse:
        """Residual of ``v`` modulo the span (up to a nonzero scalar when untracked)."""
        w = dict(v) if isinstance(v, Mapping) else to_sparse(v)
        if not self.track:
            return {k: Fraction(x) for k, x in self._reduce_int(self._integral(w)).items()}
        return self._reduce(w)

    def contains(self, v) -> bool:
        return not self.reduce(v)

    def add(self, v) -> bool:
        """Insert ``v``; return True if it enlarged the span."""
        w = dict(v) if isinstance(v, Mapping) else to_sparse(v)
        if not self.track:
            w = self._reduce_int(self._integral(w))
            if not w:
                return False
            p = min(w)
            if w[p] < 0:
                w = {k: -x for k, x in w.items()}
            self._piv[p] = w
            self._count += 1
            return True
        how: Sparse | None = {}
        w = self._reduce(w, how)
        if not w:
            return False
        p = min(w)
        inv = 1 / w[p]
        self._piv[p] = {k: x * inv for k, x in w.items()}
        how[self._count] = how.get(self._count, 0) + 1
        self._how[p] = {k: x * inv for k, x in how.items() if x}
        self._count += 1
        return True

    def coordinates(self, v) -> Sparse | None:
        """Coordinates of ``v`` in terms of the independent inserted vectors."""
        if not self.track:
            raise RuntimeError("span was built without tracking")
        w = dict(v) if isinstance(v, Mapping) else to_sparse(v)
        how: Sparse = {}
        w = self._reduce(w, how)
        if w:
            return None
        return {k: -x for k, x in how.items() if x}

    def basis(self) -> list[Sparse]:
        """Echelon basis, each row scaled to pivot 1."""
        out = []
        for p in sorted(self._piv):
            row = self._piv[p]
            lead = Fraction(row[p])
            out.append({k: Fraction(x) / lead for k, x in row.items()})
        return out

    def copy(self) -> "Span":
        s = Span(self.dim, self.track)
        s._piv = {k: dict(v) for k, v in self._piv.items()}
        s._how = {k: dict(v) for k, v in self._how.items()}
        s._count = self._count
        return s


def span_of(vectors: Iterable, dim: int) -> Span:
    s = Span(dim)
    for v in vectors:
        s.add(v)
    return s


def rank(m: RationalMatrix) -> int:
    s = Span(m.cols)
    for row in m.row_dicts():
        if row:
            s.add(row)
    return s.rank


def rref_rows(rows: Iterable[Mapping[int, Fraction]]) -> dict[int, Sparse]:
    """Fully reduced row echelon form as ``{pivot_col: row}``."""
    s = Span(0)
    for r in rows:
        if r:
            s.add(r)
    piv = dict(zip(sorted(s._piv), s.basis()))
    for p in sorted(piv, reverse=True):
        row = piv[p]
        for q in sorted(piv):
            if q >= p:
                break
            other = piv[q]
            f = other.get(p)
            if f:
                axpy(other, -f, row)
    return piv


def kernel_basis_sparse(m: RationalMatrix) -> list[Sparse]:
    piv = rref_rows(m.row_dicts())
    free = [c for c in range(m.cols) if c not in piv]
    out = []
    for f in free:
        v: Sparse = {f: Fraction(1)}
        for p, row in piv.items():
            x = row.get(f)
            if x:
                v[p] = -x
        out.append(v)
    return out


def kernel_basis(m: RationalMatrix) -> list[Vector]:
    """Basis of the null space; ``len == cols - rank(m)``."""
    return [to_dense(v, m.cols) for v in kernel_basis_sparse(m)]


def image_basis(m: RationalMatrix) -> list[Vector]:
    s = span_of((c for c in m.column_dicts() if c), m.rows)
    return [to_dense(v, m.rows) for v in s.basis()]


def solve(m: RationalMatrix, b: Sequence) -> Vector | None:
    """Some x with ``m x = b``, or None when b is outside the image."""
    s = Span(m.rows, track=True)
    used = []
    for c, col in enumerate(m.column_dicts()):
        if col and s.add(col):
            used.append(c)
    coords = s.coordinates(to_sparse(b))
    if coords is None:
        return None
    x = [Fraction(0)] * m.cols
    for k, val in coords.items():
        x[used[k]] = val
    return tuple(x)


@dataclass(frozen=True)
class SubquotientBasis:
    """Carrier of span(cycles) / span(boundaries) with chosen representatives."""

    ambient_dim: int
    cycle_basis: tuple
    boundary_basis: tuple
    representatives: tuple
    _span: Span = field(repr=False, compare=False, default=None)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def coordinates(self, v) -> tuple:
        """Class of cycle ``v`` expressed in the representatives.

        Raises ContainmentViolation when ``v`` is not in the cycle space.
        """
        coords = self._span.coordinates(v)
        if coords is None:
            raise ContainmentViolation("vector is not a cycle")
        nb = len(self.boundary_basis)
        out = [Fraction(0)] * self.dim
        for k, x in coords.items():
            if k >= nb:
                out[k - nb] = x
        return tuple(out)

    def is_boundary(self, v) -> bool:
        try:
            return not any(self.coordinates(v))
        except ContainmentViolation:
            return False


def subquotient(cycles: Sequence, boundaries: Sequence, ambient_dim: int | None = None) -> SubquotientBasis:
    """Complete a basis of span(boundaries) to a basis of span(cycles)."""
    if ambient_dim is None:
        sample = list(cycles) or list(boundaries)
        ambient_dim = len(sample[0]) if sample else 0
    zspan = Span(ambient_dim)
    zbasis = []
    for z in cycles:
        if zspan.add(to_sparse(z)):
            zbasis.append(tuple(frac(x) for x in z))
    tracked = Span(ambient_dim, track=True)
    bbasis = []
    for b in boundaries:
        sb = to_sparse(b)
        if not zspan.contains(sb):
            raise ContainmentViolation("boundary outside cycle span")
        if tracked.add(sb):
            bbasis.append(tuple(frac(x) for x in b))
    reps = []
    for z in zbasis:
        if tracked.add(to_sparse(z)):
            reps.append(z)
    return SubquotientBasis(ambient_dim, tuple(zbasis), tuple(bbasis), tuple(reps), tracked)
