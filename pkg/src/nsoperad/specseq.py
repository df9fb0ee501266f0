"""Spectral sequence of a double complex filtered by columns.

Cells C^{p,q} with horizontal δ: (p,q) -> (p+1,q) and vertical d: (p,q) -> (p,q-1);
the total differential is D = (-1)^p d + δ on total degree t = q - p.  A
bicomplex truncated at column p_max is the quotient by columns > p_max, so its
pages are computed exactly; a cell is *certified* at page r when its value
agrees with the untruncated sequence (p + r <= p_max, q + r - 1 <= q_max).

E_r^{p,q} = π(Z_r) / π(B_{r-1}), where π projects onto column p,
Z_r = {x in F^p : Dx in F^{p+r}} and B_{r-1} = D{y in F^{p-r+1} : Dy in F^p}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .chain import FinChainComplex, is_quasi_iso, ChainMap
from .exactla import RationalMatrix, Span, axpy, kernel_basis_sparse, rank
from .hochschild import CosimplicialComplex, NormalizedComplex, _WeightTotal
from .operad import OperadMorphism


class InvariantViolation(ValueError):
    pass


class NotCosimplicialMap(ValueError):
    pass


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


class Bicomplex:
    """Finite first-quadrant double complex; missing cells are zero."""

    def __init__(self, dims: Mapping[tuple[int, int], int],
                 delta: Mapping[tuple[int, int], RationalMatrix],
                 vertical: Mapping[tuple[int, int], RationalMatrix],
                 p_max: int | None = None, q_max: int | None = None, check: bool = True):
        self.dims = {k: v for k, v in dims.items() if v}
        self.p_max = max((p for p, _ in self.dims), default=0) if p_max is None else p_max
        self.q_max = q_max
        self._delta = {k: m for k, m in delta.items() if k in self.dims}
        self._vert = {k: m for k, m in vertical.items() if k in self.dims}
        self.bases: dict | None = None
        for (p, q), m in self._delta.items():
            if m.shape != (self.dim(p + 1, q), self.dim(p, q)):
                raise InvariantViolation(f"δ at {(p, q)} has shape {m.shape}")
        for (p, q), m in self._vert.items():
            if m.shape != (self.dim(p, q - 1), self.dim(p, q)):
                raise InvariantViolation(f"d at {(p, q)} has shape {m.shape}")
        if check:
            bad = self.invariant_failures()
            if bad:
                raise InvariantViolation(bad[0])

    def dim(self, p: int, q: int) -> int:
        return self.dims.get((p, q), 0)

    def delta(self, p: int, q: int) -> RationalMatrix:
        m = self._delta.get((p, q))
        return m if m is not None else RationalMatrix.zeros(self.dim(p + 1, q), self.dim(p, q))

    def vertical(self, p: int, q: int) -> RationalMatrix:
        m = self._vert.get((p, q))
        return m if m is not None else RationalMatrix.zeros(self.dim(p, q - 1), self.dim(p, q))

    def invariant_failures(self) -> list[str]:
        bad = []
        for (p, q) in self.dims:
            if not (self.delta(p + 1, q) @ self.delta(p, q)).is_zero():
                bad.append(f"δ² != 0 at {(p, q)}")
            if not (self.vertical(p, q - 1) @ self.vertical(p, q)).is_zero():
                bad.append(f"d² != 0 at {(p, q)}")
            if self.delta(p, q - 1) @ self.vertical(p, q) != self.vertical(p + 1, q) @ self.delta(p, q):
                bad.append(f"δd != dδ at {(p, q)}")
        return bad

    def cells(self) -> list[tuple[int, int]]:
        return sorted(self.dims)

    def total_degrees(self) -> list[int]:
        return sorted({q - p for (p, q) in self.dims})

    def certified(self, p: int, q: int, r: int) -> bool:
        if p + r > self.p_max:
            return False
        return self.q_max is None or q + r - 1 <= self.q_max

    # -- total complex
    def total_dim(self, t: int) -> int:
        return sum(self.dim(p, p + t) for p in range(self.p_max + 1))

    def total_differential(self, t: int) -> RationalMatrix:
        src = [(p, p + t) for p in range(self.p_max + 1) if self.dim(p, p + t)]
        tgt = [(p, p + t - 1) for p in range(self.p_max + 1) if self.dim(p, p + t - 1)]
        soff, toff = _offsets(src, self.dims), _offsets(tgt, self.dims)
        ent = {}
        for (p, q) in src:
            for (r, c), v in self.vertical(p, q).entries().items():
                ent[(toff[(p, q - 1)] + r, soff[(p, q)] + c)] = _sign(p) * v
            if (p + 1, q) in toff:
                for (r, c), v in self.delta(p, q).entries().items():
                    key = (toff[(p + 1, q)] + r, soff[(p, q)] + c)
                    ent[key] = ent.get(key, 0) + v
        return RationalMatrix(self.total_dim(t - 1), self.total_dim(t), ent)

    def total_homology_dims(self) -> dict[int, int]:
        out = {}
        for t in range(min(self.total_degrees(), default=0), max(self.total_degrees(), default=-1) + 1):
            n = self.total_dim(t)
            out[t] = n - rank(self.total_differential(t)) - rank(self.total_differential(t + 1))
        return out

    # -- pages
    def _z_system(self, p: int, q: int, r: int):
        """Solutions x = (x_0..x_{r-1}) of the staircase equations; returns (kernel, layout)."""
        layout, off = [], 0
        for j in range(r):
            key = (p + j, q + j)
            if p + j > self.p_max:
                break
            layout.append((key, off))
            off += self.dim(*key)
        ent = {}
        row = 0
        for j, ((pj, qj), oj) in enumerate(layout):
            n_rows = self.dim(pj, qj - 1)
            for (a, b), v in self.vertical(pj, qj).entries().items():
                ent[(row + a, oj + b)] = _sign(pj) * v
            if j >= 1:
                (pk, qk), ok = layout[j - 1]
                for (a, b), v in self.delta(pk, qk).entries().items():
                    ent[(row + a, ok + b)] = ent.get((row + a, ok + b), 0) + v
            row += n_rows
        ker = kernel_basis_sparse(RationalMatrix(row, off, ent)) if off else []
        return ker, layout

    def z_space(self, p: int, q: int, r: int) -> tuple[list[dict], list[dict]]:
        """(π(Z_r) basis, matching lifts x) for cell (p, q)."""
        n0 = self.dim(p, q)
        if r == 0:
            return [{i: Fraction(1)} for i in range(n0)], [{i: Fraction(1)} for i in range(n0)]
        ker, layout = self._z_system(p, q, r)
        span = Span(n0)
        heads, lifts = [], []
        for k in ker:
            head = {i: v for i, v in k.items() if i < n0}
            if head and span.add(head):
                heads.append(head)
                lifts.append(k)
        return heads, lifts

    def b_space(self, p: int, q: int, r: int) -> list[dict]:
        """Basis of π(B_{r-1}) in cell (p, q) (spanning vectors, possibly dependent)."""
        if r == 0:
            return []
        layout, off = [], 0
        for s in range(max(p - r + 1, 0), p + 1):
            key = (s, q + 1 + s - p)
            layout.append((key, off))
            off += self.dim(*key)
        if not off:
            return []
        ent, row = {}, 0
        pos = {key: o for key, o in layout}
        for s in range(max(p - r + 1, 0), p):
            key = (s, q + 1 + s - p)
            n_rows = self.dim(s, key[1] - 1)
            for (a, b), v in self.vertical(*key).entries().items():
                ent[(row + a, pos[key] + b)] = _sign(s) * v
            prev = (s - 1, key[1] - 1)
            if prev in pos:
                for (a, b), v in self.delta(*prev).entries().items():
                    ent[(row + a, pos[prev] + b)] = ent.get((row + a, pos[prev] + b), 0) + v
            row += n_rows
        ker = kernel_basis_sparse(RationalMatrix(row, off, ent))
        out = []
        top = (p, q + 1)
        prev = (p - 1, q)
        for k in ker:
            img: dict = {}
            if top in pos:
                yp = {i - pos[top]: v for i, v in k.items() if pos[top] <= i < pos[top] + self.dim(*top)}
                axpy(img, Fraction(_sign(p)), self.vertical(*top).apply_sparse(yp))
            if prev in pos:
                yv = {i - pos[prev]: v for i, v in k.items() if pos[prev] <= i < pos[prev] + self.dim(*prev)}
                axpy(img, Fraction(1), self.delta(*prev).apply_sparse(yv))
            if img:
                out.append(img)
        return out

    def page_dim(self, p: int, q: int, r: int) -> int:
        heads, _ = self.z_space(p, q, r)
        bs = Span(self.dim(p, q))
        for b in self.b_space(p, q, r):
            bs.add(b)
        return len(heads) - bs.rank

    def dr_images(self, p: int, q: int, r: int) -> list[dict]:
        """Column-(p+r) components of D(lift) for the generators of π(Z_r^{p,q})."""
        _, lifts = self.z_space(p, q, r)
        _, layout = self._z_system(p, q, r)
        if len(layout) < r:
            return []
        (pl, ql), ol = layout[-1]
        out = []
        for k in lifts:
            last = {i - ol: v for i, v in k.items() if ol <= i < ol + self.dim(pl, ql)}
            out.append(self.delta(pl, ql).apply_sparse(last))
        return out

    def dr_rank(self, p: int, q: int, r: int) -> int:
        """Rank of d_r : E_r^{p,q} -> E_r^{p+r,q+r-1}."""
        if r == 0:
            return rank(self.vertical(p, q))
        tgt = (p + r, q + r - 1)
        if tgt[0] > self.p_max or not self.dim(*tgt) or not self.dim(p, q):
            return 0
        bs = Span(self.dim(*tgt))
        for b in self.b_space(*tgt, r):
            bs.add(b)
        base = bs.rank
        for v in self.dr_images(p, q, r):
            bs.add(v)
        return bs.rank - base


def _offsets(keys, dims) -> dict:
    out, off = {}, 0
    for k in keys:
        out[k] = off
        off += dims[k]
    return out


@dataclass
class PageTable:
    r: int
    dims: dict  # (p, q) -> dim E_r
    rank_out: dict  # (p, q) -> rank of d_r leaving
    rank_in: dict
    certified: dict

    def rows(self) -> list[tuple[int, int, int, int, bool]]:
        return [(self.r, p, q, self.dims[(p, q)], self.certified[(p, q)]) for (p, q) in sorted(self.dims)]

    def euler(self) -> int:
        return sum(_sign(q - p) * d for (p, q), d in self.dims.items())


def pages(b: Bicomplex, r_max: int) -> list[PageTable]:
    """E_1 .. E_{r_max}; dims are exact for the truncated bicomplex."""
    out = []
    cells = b.cells()
    for r in range(1, r_max + 1):
        dims = {c: b.page_dim(*c, r) for c in cells}
        ro = {c: b.dr_rank(*c, r) for c in cells}
        ri = {(p, q): ro.get((p - r, q - r + 1), 0) for (p, q) in cells}
        cert = {(p, q): b.certified(p, q, r) for (p, q) in cells}
        out.append(PageTable(r, dims, ro, ri, cert))
    for a, nxt in zip(out, out[1:]):
        for c in cells:
            if nxt.dims[c] != a.dims[c] - a.rank_out[c] - a.rank_in[c]:
                raise InvariantViolation(f"page {nxt.r} at {c}: {nxt.dims[c]} != "
                                         f"{a.dims[c]} - {a.rank_out[c]} - {a.rank_in[c]}")
    return out


def e_infinity(b: Bicomplex) -> PageTable:
    """Past page p_max + 1 every differential leaves the truncated region."""
    return pages(b, b.p_max + 2)[-1]


@dataclass
class CollapseReport:
    collapses_at_e2: bool
    first_nonzero: tuple | None  # (r, p, q) of the first certified nonzero d_r with r >= 2
    stable_from: dict  # cell -> first page from which its dimension no longer changes
    euler: list  # Euler characteristic per page
    pages: list = field(repr=False, default_factory=list)

    def verdict(self) -> str:
        if self.collapses_at_e2:
            return "collapses at E2"
        r, p, q = self.first_nonzero
        return f"does not collapse; first nonzero differential on page {r} at ({p},{q})"


def collapse_report(b: Bicomplex, r_max: int | None = None) -> CollapseReport:
    r_max = b.p_max + 2 if r_max is None else r_max
    ps = pages(b, max(r_max, 2))
    first = None
    for pt in ps[1:]:
        for c in sorted(pt.dims):
            if pt.rank_out[c] and pt.certified[c]:
                first = (pt.r, *c)
                break
        if first:
            break
    stable = {}
    for c in b.cells():
        last = ps[-1].dims[c]
        r0 = ps[-1].r
        for pt in reversed(ps):
            if pt.dims[c] != last:
                break
            r0 = pt.r
        stable[c] = r0
    return CollapseReport(first is None, first, stable, [pt.euler() for pt in ps], ps)


# ---------------------------------------------------- from cosimplicial data

def bicomplex_of(nc: NormalizedComplex, weight: int | None = None) -> Bicomplex:
    """Normalized bicomplex of a cosimplicial chain complex (optionally one weight)."""
    c = nc.cosimplicial
    keys = sorted({(p, q) for (p, q, w) in nc.cells if weight is None or w == weight})
    bases = {}
    for (p, q) in keys:
        vecs = []
        for (pp, qq, w), b in sorted(nc.cells.items()):
            if (pp, qq) == (p, q) and (weight is None or w == weight):
                vecs.extend(b)
        bases[(p, q)] = vecs
    spans = {}
    for k, vecs in bases.items():
        s = Span(c.dim(k[0]), track=True)
        for v in vecs:
            s.add(v)
        spans[k] = s

    def coords(key, v):
        if not v:
            return {}
        got = spans[key].coordinates(v) if key in spans else None
        if got is None:
            raise InvariantViolation(f"image leaves the normalized cell {key}")
        return got

    delta, vert = {}, {}
    for (p, q), vecs in bases.items():
        if p < nc.p_max and (p + 1, q) in bases:
            dm = c.delta(p)
            delta[(p, q)] = RationalMatrix.from_columns([coords((p + 1, q), dm.apply_sparse(v)) for v in vecs],
                                                        len(bases[(p + 1, q)]))
        if (p, q - 1) in bases:
            dm = c.internal_d(p)
            vert[(p, q)] = RationalMatrix.from_columns([coords((p, q - 1), dm.apply_sparse(v)) for v in vecs],
                                                       len(bases[(p, q - 1)]))
    op = c.operad
    q_max = op.degree_max if op is not None else None
    b = Bicomplex({k: len(v) for k, v in bases.items()}, delta, vert, nc.p_max, q_max)
    b.bases = bases
    b._spans = spans
    return b


def staircase_bicomplex() -> Bicomplex:
    """Four one-dimensional cells with a single nonzero d_2 from (0,1) to (2,2)."""
    one = RationalMatrix.identity(1)
    dims = {(0, 1): 1, (1, 1): 1, (1, 2): 1, (2, 2): 1}
    delta = {(0, 1): one, (1, 2): one}
    vert = {(1, 2): one}
    return Bicomplex(dims, delta, vert, p_max=2)


# ---------------------------------------------------------- E2 comparison

@dataclass
class CosimplicialMap:
    source: CosimplicialComplex
    target: CosimplicialComplex
    maps: dict  # p -> global RationalMatrix X^p -> Y^p

    def failures(self) -> list[str]:
        bad = []
        P = min(self.source.p_max, self.target.p_max)
        for p in range(P + 1):
            f = self.maps[p]
            if f @ self.source.internal_d(p) != self.target.internal_d(p) @ f:
                bad.append(f"column {p} is not a chain map")
            if p < P:
                for i in range(p + 2):
                    if self.maps[p + 1] @ self.source.coface(p, i) != self.target.coface(p, i) @ f:
                        bad.append(f"d^{i} on column {p} does not commute")
            for i in range(p):
                if self.maps[p - 1] @ self.source.codegeneracy(p, i) != self.target.codegeneracy(p, i) @ f:
                    bad.append(f"s^{i} on column {p} does not commute")
        return bad


def cosimplicial_map_of(f: OperadMorphism, cs: CosimplicialComplex, ct: CosimplicialComplex) -> CosimplicialMap:
    P = min(cs.p_max, ct.p_max)
    return CosimplicialMap(cs, ct, {p: f.maps[p] for p in range(P + 1)})


@dataclass
class E2Comparison:
    cells: list  # (p, q, dim source, dim target, induced rank, certified, iso)
    column_failures: list  # (arity, degrees) where a column is not a quasi-isomorphism

    @property
    def iso_on_certified(self) -> bool:
        return not self.column_failures and all(iso for (*_, cert, iso) in self.cells if cert)


def _column_chain_map(f: CosimplicialMap, p: int) -> ChainMap:
    cs, ct = f.source, f.target
    m = f.maps[p]
    comps = {}
    src, tgt = cs.columns[p], ct.columns[p]
    for k in range(max(src.max_degree, tgt.max_degree) + 1):
        rs = cs._block(p, k) if k <= src.max_degree else range(0)
        rt = ct._block(p, k) if k <= tgt.max_degree else range(0)
        ent = {(r - rt.start, c - rs.start): v for (r, c), v in m.entries().items() if r in rt and c in rs}
        comps[k] = RationalMatrix(tgt.dim(k), src.dim(k), ent)
    return ChainMap(src, tgt, comps, check=False)


def compare_E2(f: CosimplicialMap, ns: NormalizedComplex | None = None,
               nt: NormalizedComplex | None = None) -> E2Comparison:
    bad = f.failures()
    if bad:
        raise NotCosimplicialMap(bad[0])
    P = min(f.source.p_max, f.target.p_max)
    col_fail = []
    for p in range(P + 1):
        cert = is_quasi_iso(_column_chain_map(f, p),
                            window=max(f.source.columns[p].max_degree, f.target.columns[p].max_degree))
        if not cert:
            col_fail.append((p, cert.failing_degrees))
    bs = bicomplex_of(ns or NormalizedComplex(f.source))
    bt = bicomplex_of(nt or NormalizedComplex(f.target))
    cells = sorted(set(bs.dims) | set(bt.dims))
    rows = []
    for (p, q) in cells:
        ds, dt = bs.page_dim(p, q, 2), bt.page_dim(p, q, 2)
        heads, _ = bs.z_space(p, q, 2)
        tb = Span(bt.dim(p, q))
        for v in bt.b_space(p, q, 2):
            tb.add(v)
        base = tb.rank
        for h in heads:
            g = {}
            for i, c in h.items():
                axpy(g, c, bs.bases[(p, q)][i])
            img = f.maps[p].apply_sparse(g)
            if img:
                coords = bt._spans[(p, q)].coordinates(img) if (p, q) in bt._spans else None
                if coords is None:
                    raise NotCosimplicialMap(f"map leaves the normalized part at {(p, q)}")
                tb.add(coords)
        r = tb.rank - base
        cert = bs.certified(p, q, 2) and bt.certified(p, q, 2)
        rows.append((p, q, ds, dt, r, cert, r == ds == dt))
    return E2Comparison(rows, col_fail)
