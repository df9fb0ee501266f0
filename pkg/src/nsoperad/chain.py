"""Bounded non-negatively graded chain complexes over Q and chain maps."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exactla import (RationalMatrix, Span, SubquotientBasis, kernel_basis, rank,
                      subquotient, to_dense, to_sparse)


class InvalidParameter(ValueError):
    pass


class TruncationMismatch(ValueError):
    pass


class ChainComplexError(ValueError):
    pass


class FinChainComplex:
    """Complex with basis dimensions ``dims[k]`` for ``0 <= k <= max_degree``.

    ``differential(k)`` is the matrix of d_k : C_k -> C_{k-1}.
    """

    def __init__(self, dims: Sequence[int], differentials: Mapping[int, RationalMatrix] | None = None,
                 check: bool = True):
        self.dims = tuple(int(x) for x in dims)
        if not self.dims:
            self.dims = (0,)
        if any(x < 0 for x in self.dims):
            raise ChainComplexError("negative dimension")
        diffs = dict(differentials or {})
        self._d: dict[int, RationalMatrix] = {}
        for k in range(1, len(self.dims)):
            m = diffs.pop(k, None)
            if m is None:
                m = RationalMatrix.zeros(self.dims[k - 1], self.dims[k])
            if m.shape != (self.dims[k - 1], self.dims[k]):
                raise ChainComplexError(f"d_{k} has shape {m.shape}, expected {(self.dims[k-1], self.dims[k])}")
            self._d[k] = m
        leftovers = [k for k, m in diffs.items() if not m.is_zero()]
        if leftovers:
            raise ChainComplexError(f"differentials outside degree range: {sorted(leftovers)}")
        if check:
            for k in range(2, len(self.dims)):
                if not (self._d[k - 1] @ self._d[k]).is_zero():
                    raise ChainComplexError(f"d_{k-1} d_{k} != 0")

    @property
    def max_degree(self) -> int:
        return len(self.dims) - 1

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    def differential(self, k: int) -> RationalMatrix:
        if 1 <= k <= self.max_degree:
            return self._d[k]
        return RationalMatrix.zeros(self.dim(k - 1), self.dim(k))

    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero_differential(self) -> bool:
        return all(m.is_zero() for m in self._d.values())

    def truncate(self, max_degree: int) -> "FinChainComplex":
        dims = list(self.dims[: max_degree + 1]) + [0] * max(0, max_degree + 1 - len(self.dims))
        return FinChainComplex(dims, {k: self.differential(k) for k in range(1, max_degree + 1)}, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinChainComplex):
            return NotImplemented
        return self.dims == other.dims and self._d == other._d

    def __repr__(self) -> str:
        return f"FinChainComplex(dims={self.dims})"


def zero_complex(max_degree: int = 0) -> FinChainComplex:
    return FinChainComplex([0] * (max_degree + 1))


def disk_complex(p: int) -> FinChainComplex:
    """D^p: Q in degrees p and p-1 joined by the identity."""
    if p < 1:
        raise InvalidParameter("disk complex needs p >= 1")
    dims = [0] * (p + 1)
    dims[p - 1] = dims[p] = 1
    return FinChainComplex(dims, {p: RationalMatrix.identity(1)})


def sphere_complex(p: int) -> FinChainComplex:
    """S^p: Q concentrated in degree p."""
    if p < 0:
        raise InvalidParameter("sphere complex needs p >= 0")
    dims = [0] * (p + 1)
    dims[p] = 1
    return FinChainComplex(dims)


def direct_sum(a: FinChainComplex, b: FinChainComplex) -> FinChainComplex:
    top = max(a.max_degree, b.max_degree)
    dims = [a.dim(k) + b.dim(k) for k in range(top + 1)]
    diffs = {}
    for k in range(1, top + 1):
        da, db = a.differential(k), b.differential(k)
        ent = dict(da.entries())
        for (r, c), x in db.entries().items():
            ent[(a.dim(k - 1) + r, a.dim(k) + c)] = x
        diffs[k] = RationalMatrix(dims[k - 1], dims[k], ent)
    return FinChainComplex(dims, diffs)


def homology(c: FinChainComplex) -> list[SubquotientBasis]:
    """H_k = ker d_k / im d_{k+1} for every degree of the truncation."""
    out = []
    for k in range(c.max_degree + 1):
        n = c.dim(k)
        cycles = kernel_basis(c.differential(k)) if k > 0 else [
            tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        nxt = c.differential(k + 1)
        bounds = [to_dense(col, n) for col in nxt.column_dicts() if col]
        out.append(subquotient(cycles, bounds, n))
    return out


def homology_dims(c: FinChainComplex) -> tuple[int, ...]:
    out = []
    for k in range(c.max_degree + 1):
        z = c.dim(k) - rank(c.differential(k))
        b = rank(c.differential(k + 1))
        out.append(z - b)
    return tuple(out)


class ChainMap:
    """Degree-preserving map with components ``f_k : source_k -> target_k``."""

    def __init__(self, source: FinChainComplex, target: FinChainComplex,
                 components: Mapping[int, RationalMatrix] | None = None, check: bool = True):
        self.source = source
        self.target = target
        comps = dict(components or {})
        top = max(source.max_degree, target.max_degree)
        self._f: dict[int, RationalMatrix] = {}
        for k in range(top + 1):
            m = comps.get(k)
            if m is None:
                m = RationalMatrix.zeros(target.dim(k), source.dim(k))
            if m.shape != (target.dim(k), source.dim(k)):
                raise ChainComplexError(f"f_{k} has shape {m.shape}")
            self._f[k] = m
        if check:
            bad = self.chain_map_defects()
            if bad:
                raise ChainComplexError(f"not a chain map in degrees {bad}")

    @property
    def max_degree(self) -> int:
        return max(self.source.max_degree, self.target.max_degree)

    def component(self, k: int) -> RationalMatrix:
        if k in self._f:
            return self._f[k]
        return RationalMatrix.zeros(self.target.dim(k), self.source.dim(k))

    def chain_map_defects(self) -> list[int]:
        bad = []
        for k in range(1, self.max_degree + 1):
            lhs = self.component(k - 1) @ self.source.differential(k)
            rhs = self.target.differential(k) @ self.component(k)
            if lhs != rhs:
                bad.append(k)
        return bad

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self ∘ other``."""
        top = max(self.max_degree, other.max_degree)
        return ChainMap(other.source, self.target,
                        {k: self.component(k) @ other.component(k) for k in range(top + 1)}, check=False)

    def scale(self, a) -> "ChainMap":
        return ChainMap(self.source, self.target, {k: m.scale(a) for k, m in self._f.items()}, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        top = max(self.max_degree, other.max_degree)
        return all(self.component(k) == other.component(k) for k in range(top + 1))


def identity_map(c: FinChainComplex) -> ChainMap:
    return ChainMap(c, c, {k: RationalMatrix.identity(c.dim(k)) for k in range(c.max_degree + 1)}, check=False)


def sphere_inclusion(p: int) -> ChainMap:
    """i^p : S^{p-1} -> D^p, the identity in degree p-1."""
    s, d = sphere_complex(p - 1), disk_complex(p)
    return ChainMap(s, d, {p - 1: RationalMatrix.identity(1)})


def disk_unit(p: int) -> ChainMap:
    """j^p : 0 -> D^p."""
    return ChainMap(zero_complex(p), disk_complex(p))


@dataclass
class QuasiIsoCertificate:
    verdict: bool
    induced_ranks: tuple
    source_homology: tuple
    target_homology: tuple
    window: int
    failing_degrees: tuple = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.verdict


def induced_on_homology(f: ChainMap, k: int, hs: SubquotientBasis | None = None,
                        ht: SubquotientBasis | None = None) -> RationalMatrix:
    """Matrix of H_k(f) in the chosen representative bases."""
    if hs is None:
        hs = homology(f.source)[k] if k <= f.source.max_degree else subquotient([], [], 0)
    if ht is None:
        ht = homology(f.target)[k] if k <= f.target.max_degree else subquotient([], [], 0)
    cols = []
    fk = f.component(k)
    for rep in hs.representatives:
        cols.append(to_sparse(ht.coordinates(fk.apply(rep))))
    return RationalMatrix.from_columns(cols, ht.dim)


def is_quasi_iso(f: ChainMap, window: int | None = None) -> QuasiIsoCertificate:
    """Whether H_k(f) is bijective for every k up to the comparison window."""
    if window is None:
        if f.source.max_degree != f.target.max_degree:
            raise TruncationMismatch("complexes truncated at different degrees; pass window=")
        window = f.source.max_degree
    hs_all = homology(f.source)
    ht_all = homology(f.target)
    ranks, sdims, tdims, bad = [], [], [], []
    for k in range(window + 1):
        hs = hs_all[k] if k < len(hs_all) else subquotient([], [], 0)
        ht = ht_all[k] if k < len(ht_all) else subquotient([], [], 0)
        r = rank(induced_on_homology(f, k, hs, ht)) if hs.dim and ht.dim else 0
        ranks.append(r)
        sdims.append(hs.dim)
        tdims.append(ht.dim)
        if not (r == hs.dim == ht.dim):
            bad.append(k)
    return QuasiIsoCertificate(not bad, tuple(ranks), tuple(sdims), tuple(tdims), window, tuple(bad))


def is_chain_fibration(f: ChainMap) -> bool:
    """Surjective in every degree k >= 1; degree 0 is unconstrained."""
    for k in range(1, f.max_degree + 1):
        if rank(f.component(k)) != f.target.dim(k):
            return False
    return True


def tensor_index(a: FinChainComplex, b: FinChainComplex, n: int) -> list[tuple[int, int, int]]:
    """Basis of (a ⊗ b)_n as triples (i, index in a_i, index in b_{n-i})."""
    out = []
    for i in range(n + 1):
        for x in range(a.dim(i)):
            for y in range(b.dim(n - i)):
                out.append((i, x, y))
    return out


def tensor(a: FinChainComplex, b: FinChainComplex) -> FinChainComplex:
    """Tensor product with d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy."""
    top = a.max_degree + b.max_degree
    index = [tensor_index(a, b, n) for n in range(top + 1)]
    pos = [{t: j for j, t in enumerate(ix)} for ix in index]
    diffs = {}
    for n in range(1, top + 1):
        ent: dict = {}
        for col, (i, x, y) in enumerate(index[n]):
            if i >= 1:
                for r, c in a.differential(i).column(x).items():
                    key = (pos[n - 1][(i - 1, r, y)], col)
                    ent[key] = ent.get(key, 0) + c
            j = n - i
            if j >= 1:
                sign = -1 if i % 2 else 1
                for r, c in b.differential(j).column(y).items():
                    key = (pos[n - 1][(i, x, r)], col)
                    ent[key] = ent.get(key, 0) + sign * c
        diffs[n] = RationalMatrix(len(index[n - 1]), len(index[n]), ent)
    return FinChainComplex([len(ix) for ix in index], diffs)
