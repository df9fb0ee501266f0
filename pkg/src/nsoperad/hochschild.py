"""Cosimplicial complex of a multiplicative operad, Hochschild cohomology and
the cochain-level cup product, braces and bracket.

Column p is O(p) with cofaces d^0 = μ∘₂-, d^i = -∘_i μ, d^{p+1} = μ∘₁- and
codegeneracies s^i = -∘_{i+1} e.  A cochain of bidegree (p, q) has total
degree t = q - p; the total differential is D = (-1)^p d + δ with
δ = Σ (-1)^i d^i, so D lowers t by one.

Cochains are stored as ``{(p, q): sparse vector in O(p)'s global basis}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .chain import ChainMap, FinChainComplex
from .exactla import (RationalMatrix, Span, SubquotientBasis, axpy, frac, kernel_basis_sparse,
                      subquotient, to_dense)
from .operad import FinOperad, MultiplicativeStructureError, OperadError, check_multiplicative, homology_operad


class CosimplicialIdentityFailure(ValueError):
    pass


class WindowNotCertified(ValueError):
    pass


class HostMismatch(ValueError):
    pass


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _global_d(o: FinOperad, n: int) -> RationalMatrix:
    return RationalMatrix.from_columns([o.d(n, {g: 1}) for g in range(o.dim(n))], o.dim(n))


def _weights(o: FinOperad, n: int) -> list[int]:
    if o.weights is None:
        return [0] * o.dim(n)
    return list(o.weights[n])


# ------------------------------------------------------------ cosimplicial

class CosimplicialComplex:
    """Columns X^0..X^P with cofaces into X^{p+1} for p < P and codegeneracies.

    Structure maps are kept as global matrices (block diagonal in internal
    degree); :meth:`coface_map` gives the ChainMap view.
    """

    def __init__(self, columns: Sequence[FinChainComplex], cofaces: Mapping[tuple[int, int], RationalMatrix],
                 codegeneracies: Mapping[tuple[int, int], RationalMatrix],
                 degrees: Sequence[Sequence[int]], weights: Sequence[Sequence[int]] | None = None,
                 operad: FinOperad | None = None):
        self.columns = list(columns)
        self.p_max = len(self.columns) - 1
        self.cofaces = dict(cofaces)
        self.codegeneracies = dict(codegeneracies)
        self.degrees = [list(d) for d in degrees]
        self.weights = [list(w) for w in weights] if weights is not None else [[0] * len(d) for d in degrees]
        self.operad = operad
        self._dint: dict[int, RationalMatrix] = {}

    def dim(self, p: int) -> int:
        return len(self.degrees[p]) if 0 <= p <= self.p_max else 0

    def coface(self, p: int, i: int) -> RationalMatrix:
        return self.cofaces[(p, i)]

    def codegeneracy(self, p: int, i: int) -> RationalMatrix:
        return self.codegeneracies[(p, i)]

    def delta(self, p: int) -> RationalMatrix:
        """Alternating sum of cofaces X^p -> X^{p+1}."""
        out = RationalMatrix.zeros(self.dim(p + 1), self.dim(p))
        for i in range(p + 2):
            m = self.cofaces[(p, i)]
            out = out - m if i % 2 else out + m
        return out

    def internal_d(self, p: int) -> RationalMatrix:
        """Global internal differential of column p."""
        if p not in self._dint:
            if self.operad is not None:
                self._dint[p] = _global_d(self.operad, p)
            else:
                self._dint[p] = _column_global_d(self.columns[p])
        return self._dint[p]

    def _block(self, p: int, k: int) -> range:
        start = sum(self.columns[p].dims[:k])
        return range(start, start + self.columns[p].dim(k))

    def coface_map(self, p: int, i: int) -> ChainMap:
        return self._as_chain_map(self.cofaces[(p, i)], p, p + 1)

    def codegeneracy_map(self, p: int, i: int) -> ChainMap:
        return self._as_chain_map(self.codegeneracies[(p, i)], p, p - 1)

    def _as_chain_map(self, m: RationalMatrix, src: int, tgt: int) -> ChainMap:
        cs, ct = self.columns[src], self.columns[tgt]
        comps = {}
        for k in range(max(cs.max_degree, ct.max_degree) + 1):
            rs, rt = self._block(src, k) if k <= cs.max_degree else range(0), \
                self._block(tgt, k) if k <= ct.max_degree else range(0)
            ent = {}
            for (r, c), v in m.entries().items():
                if r in rt and c in rs:
                    ent[(r - rt.start, c - rs.start)] = v
            comps[k] = RationalMatrix(ct.dim(k), cs.dim(k), ent)
        return ChainMap(cs, ct, comps, check=False)

    def identity_failures(self, first_only: bool = False) -> list[str]:
        """Cosimplicial identities and chain-map conditions that fail, as readable witnesses."""
        bad: list[str] = []

        def check(ok: bool, msg: str) -> bool:
            if not ok:
                bad.append(msg)
            return first_only and bool(bad)

        P = self.p_max
        for p in range(P):
            for i in range(p + 2):
                m = self.cofaces[(p, i)]
                if check(self.internal_d(p + 1) @ m == m @ self.internal_d(p), f"d^{i} on X^{p} is not a chain map"):
                    return bad
        for p in range(1, P + 1):
            for i in range(p):
                m = self.codegeneracies[(p, i)]
                if check(self.internal_d(p - 1) @ m == m @ self.internal_d(p), f"s^{i} on X^{p} is not a chain map"):
                    return bad
        # d^j d^i = d^i d^{j-1} for i < j
        for p in range(P - 1):
            for j in range(p + 3):
                for i in range(j):
                    lhs = self.cofaces[(p + 1, j)] @ self.cofaces[(p, i)]
                    rhs = self.cofaces[(p + 1, i)] @ self.cofaces[(p, j - 1)]
                    if check(lhs == rhs, f"d^{j} d^{i} != d^{i} d^{j - 1} on X^{p}"):
                        return bad
        # s^j s^i = s^i s^{j+1} for i <= j
        for p in range(2, P + 1):
            for j in range(p - 1):
                for i in range(j + 1):
                    lhs = self.codegeneracies[(p - 1, j)] @ self.codegeneracies[(p, i)]
                    rhs = self.codegeneracies[(p - 1, i)] @ self.codegeneracies[(p, j + 1)]
                    if check(lhs == rhs, f"s^{j} s^{i} != s^{i} s^{j + 1} on X^{p}"):
                        return bad
        # mixed relations on X^p -> X^{p+1} -> X^p
        for p in range(P):
            ident = RationalMatrix.identity(self.dim(p))
            for j in range(p + 1):
                for i in range(p + 2):
                    lhs = self.codegeneracies[(p + 1, j)] @ self.cofaces[(p, i)]
                    if i < j:
                        rhs = self.cofaces[(p - 1, i)] @ self.codegeneracies[(p, j - 1)]
                    elif i in (j, j + 1):
                        rhs = ident
                    else:
                        rhs = self.cofaces[(p - 1, i - 1)] @ self.codegeneracies[(p, j)]
                    if check(lhs == rhs, f"s^{j} d^{i} relation fails on X^{p}"):
                        return bad
        return bad


def _column_global_d(c: FinChainComplex) -> RationalMatrix:
    n = c.total_dim
    ent = {}
    off = [0]
    for k in range(c.max_degree + 1):
        off.append(off[-1] + c.dim(k))
    for k in range(1, c.max_degree + 1):
        for (r, col), v in c.differential(k).entries().items():
            ent[(off[k - 1] + r, off[k] + col)] = v
    return RationalMatrix(n, n, ent)


def cosimplicial_of(o: FinOperad, p_max: int | None = None, check: bool = True) -> CosimplicialComplex:
    """The cosimplicial chain complex O^• of a multiplicative operad, up to column p_max."""
    rep = check_multiplicative(o)
    if not rep.valid:
        raise MultiplicativeStructureError("; ".join(rep.problems))
    P = o.arity_max if p_max is None else p_max
    if P > o.arity_max:
        raise OperadError(f"p_max={P} exceeds arity_max={o.arity_max}")
    mu, e = o.mu, o.basepoint
    cofaces, codeg = {}, {}
    for p in range(P):
        for i in range(p + 2):
            cols = []
            for g in range(o.dim(p)):
                x = {g: Fraction(1)}
                if i == 0:
                    v = o.compose(2, 2, p, mu, x)
                elif i == p + 1:
                    v = o.compose(2, 1, p, mu, x)
                else:
                    v = o.compose(p, i, 2, x, mu)
                cols.append(v)
            cofaces[(p, i)] = RationalMatrix.from_columns(cols, o.dim(p + 1))
    for p in range(1, P + 1):
        for i in range(p):
            cols = [o.compose(p, i + 1, 0, {g: Fraction(1)}, e) for g in range(o.dim(p))]
            codeg[(p, i)] = RationalMatrix.from_columns(cols, o.dim(p - 1))
    degrees = [[o.degree(p, g) for g in range(o.dim(p))] for p in range(P + 1)]
    weights = [_weights(o, p) for p in range(P + 1)]
    c = CosimplicialComplex([o.components[p] for p in range(P + 1)], cofaces, codeg, degrees, weights, o)
    if check:
        bad = c.identity_failures(first_only=True)
        if bad:
            raise CosimplicialIdentityFailure(bad[0])
    return c


# ---------------------------------------------------------- normalization

class NormalizedComplex:
    """N^p = ∩ ker s^i, split into cells (p, q, w) with chosen bases (global vectors of X^p)."""

    def __init__(self, c: CosimplicialComplex, normalize: bool = True):
        self.cosimplicial = c
        self.normalized = normalize
        self.p_max = c.p_max
        self.cells: dict[tuple[int, int, int], list[dict]] = {}
        self._spans: dict[tuple[int, int, int], Span] = {}
        for p in range(c.p_max + 1):
            blocks: dict[tuple[int, int], list[int]] = {}
            for g, (q, w) in enumerate(zip(c.degrees[p], c.weights[p])):
                blocks.setdefault((q, w), []).append(g)
            for (q, w), idx in sorted(blocks.items()):
                if normalize and p >= 1:
                    pos = {g: j for j, g in enumerate(idx)}
                    ent = {}
                    row0 = 0
                    for i in range(p):
                        s = c.codegeneracies[(p, i)]
                        for (r, col), v in s.entries().items():
                            if col in pos:
                                ent[(row0 + r, pos[col])] = v
                        row0 += c.dim(p - 1)
                    ker = kernel_basis_sparse(RationalMatrix(row0, len(idx), ent))
                    basis = [{idx[j]: v for j, v in k.items()} for k in ker]
                else:
                    basis = [{g: Fraction(1)} for g in idx]
                if basis:
                    self.cells[(p, q, w)] = basis

    def dim(self, p: int, q: int, w: int | None = None) -> int:
        if w is None:
            return sum(len(b) for (pp, qq, _), b in self.cells.items() if pp == p and qq == q)
        return len(self.cells.get((p, q, w), ()))

    def weights(self) -> list[int]:
        return sorted({w for (_, _, w) in self.cells})

    def column_dims(self, p: int) -> tuple[int, ...]:
        top = max((q for (pp, q, _) in self.cells if pp == p), default=0)
        return tuple(self.dim(p, q) for q in range(top + 1))

    def span(self, key) -> Span:
        if key not in self._spans:
            p = key[0]
            s = Span(self.cosimplicial.dim(p), track=True)
            for v in self.cells.get(key, ()):
                s.add(v)
            self._spans[key] = s
        return self._spans[key]

    def coordinates(self, key, v: Mapping) -> dict:
        """Coordinates of ``v`` in the basis of cell ``key`` (raises if outside)."""
        if not v:
            return {}
        coords = self.span(key).coordinates(v)
        if coords is None:
            raise CosimplicialIdentityFailure(f"vector leaves the normalized cell {key}")
        return coords

    def delta_vec(self, p: int, v: Mapping) -> dict:
        return self.cosimplicial.delta(p).apply_sparse(v) if p < self.p_max else {}

    def dint_vec(self, p: int, v: Mapping) -> dict:
        return self.cosimplicial.internal_d(p).apply_sparse(v)


def normalized(c: CosimplicialComplex) -> NormalizedComplex:
    return NormalizedComplex(c, normalize=True)


# --------------------------------------------------------------- cochains

@dataclass
class HochschildCochain:
    """Element of the total complex: ``parts[(p, q)]`` is a vector of O(p) in degree q."""
    host: FinOperad
    parts: dict = field(default_factory=dict)

    def __post_init__(self):
        self.parts = {k: {g: frac(x) for g, x in v.items() if x} for k, v in self.parts.items()}
        self.parts = {k: v for k, v in self.parts.items() if v}

    @classmethod
    def homogeneous(cls, host: FinOperad, p: int, vec: Mapping) -> "HochschildCochain":
        vec = {g: frac(x) for g, x in vec.items() if x}
        if not vec:
            return cls(host, {})
        q = host.element_degree(p, vec)
        return cls(host, {(p, q): vec})

    @property
    def total_degree(self) -> int | None:
        ts = {q - p for (p, q) in self.parts}
        if len(ts) > 1:
            raise ValueError("cochain is not homogeneous in total degree")
        return ts.pop() if ts else None

    @property
    def p(self) -> int:
        ps = {p for (p, _) in self.parts}
        if len(ps) != 1:
            raise ValueError("cochain is not concentrated in one cosimplicial degree")
        return ps.pop()

    def is_zero(self) -> bool:
        return not self.parts

    def _check(self, other: "HochschildCochain"):
        if other.host is not self.host:
            raise HostMismatch("cochains live over different operads")

    def __add__(self, other: "HochschildCochain") -> "HochschildCochain":
        self._check(other)
        out = {k: dict(v) for k, v in self.parts.items()}
        for k, v in other.parts.items():
            axpy(out.setdefault(k, {}), Fraction(1), v)
        return HochschildCochain(self.host, out)

    def scale(self, a) -> "HochschildCochain":
        a = frac(a)
        return HochschildCochain(self.host, {k: {g: a * x for g, x in v.items()} for k, v in self.parts.items()})

    def __neg__(self) -> "HochschildCochain":
        return self.scale(-1)

    def __sub__(self, other: "HochschildCochain") -> "HochschildCochain":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HochschildCochain):
            return NotImplemented
        return self.host is other.host and self.parts == other.parts

    def __repr__(self) -> str:
        terms = []
        for (p, q), v in sorted(self.parts.items()):
            for g, x in sorted(v.items()):
                terms.append(f"{x}*{self.host.labels[p][g]}@({p},{q})")
        return " + ".join(terms) or "0"


def total_differential(x: HochschildCochain, p_max: int | None = None) -> HochschildCochain:
    """D = (-1)^p d + δ, computed with operadic compositions."""
    o = x.host
    top = o.arity_max - 1 if p_max is None else p_max - 1
    out: dict = {}
    for (p, q), v in x.parts.items():
        dv = o.d(p, v)
        if dv:
            axpy(out.setdefault((p, q - 1), {}), Fraction(_sign(p)), dv)
        if p > top:
            raise OperadError(f"δ out of cosimplicial degree {p} needs arity {p + 1}")
        acc: dict = {}
        axpy(acc, Fraction(1), o.compose(2, 2, p, o.mu, v))
        for i in range(1, p + 1):
            axpy(acc, Fraction(_sign(i)), o.compose(p, i, 2, v, o.mu))
        axpy(acc, Fraction(_sign(p + 1)), o.compose(2, 1, p, o.mu, v))
        if acc:
            axpy(out.setdefault((p + 1, q), {}), Fraction(1), acc)
    return HochschildCochain(o, out)


def _bilinear(x: HochschildCochain, y: HochschildCochain, f) -> HochschildCochain:
    x._check(y)
    out: dict = {}
    for (px, qx), vx in x.parts.items():
        for (py, qy), vy in y.parts.items():
            for key, vec in f(px, qx, vx, py, qy, vy):
                axpy(out.setdefault(key, {}), Fraction(1), vec)
    return HochschildCochain(x.host, out)


def cup(x: HochschildCochain, y: HochschildCochain) -> HochschildCochain:
    """x ⌣ y = (-1)^{q_x p_y} (μ∘₁x)∘_{p_x+1} y."""
    o = x.host

    def f(px, qx, vx, py, qy, vy):
        yield (px + py, qx + qy), _cup_vector(o, px, qx, vx, py, qy, vy)
    return _bilinear(x, y, f)


def _cup_vector(o: FinOperad, px, qx, vx, py, qy, vy, route: str | None = None) -> dict:
    if route is None:
        route = "left" if px + 1 <= o.arity_max else "right"
    if route == "left":
        v = o.compose(px + 1, px + 1, py, o.compose(2, 1, px, o.mu, vx), vy)
    else:
        # the same element as (μ∘₂y)∘₁x, which stays inside the arity truncation when p_y is small
        v = o.compose(py + 1, 1, px, o.compose(2, 2, py, o.mu, vy), vx)
        if qx * qy % 2:
            v = {g: -c for g, c in v.items()}
    if _sign(qx * py) < 0:
        v = {g: -c for g, c in v.items()}
    return v


def _insertion_sign(i: int, px: int, qx: int, py: int, qy: int) -> int:
    # position i (1-based) of an arity-px cochain receiving an arity-py cochain
    return _sign((i - 1) * (py - 1) + qx * (py - 1))


def circle(x: HochschildCochain, y: HochschildCochain) -> HochschildCochain:
    """x ∘ y = Σ_i ± x ∘_i y."""
    o = x.host

    def f(px, qx, vx, py, qy, vy):
        acc: dict = {}
        for i in range(1, px + 1):
            axpy(acc, Fraction(_insertion_sign(i, px, qx, py, qy)), o.compose(px, i, py, vx, vy))
        yield (px + py - 1, qx + qy), acc
    return _bilinear(x, y, f)


def brace(x: HochschildCochain, ys: Sequence[HochschildCochain]) -> HochschildCochain:
    """x{y_1, ..., y_k}: insert the y's at increasing, non-overlapping positions of x."""
    o = x.host
    ys = list(ys)
    for y in ys:
        x._check(y)
    if not ys:
        return x
    out = HochschildCochain(o, {})
    for (px, qx), vx in x.parts.items():
        # expand each y into homogeneous pieces
        def rec(j, choice):
            nonlocal out
            if j == len(ys):
                out = out + _brace_homogeneous(o, px, qx, vx, choice)
                return
            for key, v in ys[j].parts.items():
                rec(j + 1, choice + [(key, v)])
        rec(0, [])
    return out


def _brace_homogeneous(o, px, qx, vx, pieces) -> HochschildCochain:
    k = len(pieces)
    pys = [key[0] for key, _ in pieces]
    qys = [key[1] for key, _ in pieces]
    total: dict = {}
    for pos in combinations(range(1, px + 1), k):
        v, shift, sgn = dict(vx), 0, 0
        arity, deg = px, qx
        for j, ((py, qy), vy) in enumerate(pieces):
            i = pos[j] + shift
            sgn += _exponent(i, arity, deg, py, qy)
            v = o.compose(arity, i, py, v, vy)
            shift += py - 1
            arity += py - 1
            deg += qy
        axpy(total, Fraction(_sign(sgn)), v)
    key = (px + sum(pys) - k, qx + sum(qys))
    return HochschildCochain(o, {key: total})


def _exponent(i, px, qx, py, qy) -> int:
    return 0 if _insertion_sign(i, px, qx, py, qy) > 0 else 1


def bracket(x: HochschildCochain, y: HochschildCochain) -> HochschildCochain:
    """[x, y] = x∘y - (-1)^{(t_x+1)(t_y+1)} y∘x for homogeneous x, y."""
    tx, ty = x.total_degree, y.total_degree
    if tx is None or ty is None:
        return HochschildCochain(x.host, {})
    return circle(x, y) - circle(y, x).scale(_sign((tx + 1) * (ty + 1)))


def homotopy_sign(x: HochschildCochain, y: HochschildCochain) -> int:
    """σ in  x⌣y - (-1)^{t_x t_y} y⌣x = σ (D(x∘y) - Dx∘y - (-1)^{t_x+1} x∘Dy)."""
    return _sign(1 + x.total_degree + x.p * y.p)


# ------------------------------------------------------- total complex, HH

@dataclass
class HHCell:
    t: int
    weight: int
    dim: int
    certified: bool
    representatives: list


class _WeightTotal:
    """Total complex of one weight: T_t = ⊕_p N^p_{p+t}, D = (-1)^p d + δ."""

    def __init__(self, nc: NormalizedComplex, w: int):
        self.nc = nc
        self.w = w
        self._layout: dict[int, list[tuple[tuple, int]]] = {}
        self._D: dict[int, RationalMatrix] = {}

    def layout(self, t: int) -> list[tuple[tuple, int]]:
        """[(cell key, offset)] in increasing p."""
        if t not in self._layout:
            out, off = [], 0
            for p in range(self.nc.p_max + 1):
                key = (p, p + t, self.w)
                if key in self.nc.cells:
                    out.append((key, off))
                    off += len(self.nc.cells[key])
            self._layout[t] = out
        return self._layout[t]

    def dim(self, t: int) -> int:
        lay = self.layout(t)
        return lay[-1][1] + len(self.nc.cells[lay[-1][0]]) if lay else 0

    def D(self, t: int) -> RationalMatrix:
        """T_t -> T_{t-1}."""
        if t in self._D:
            return self._D[t]
        nc = self.nc
        tgt = {key: off for key, off in self.layout(t - 1)}
        cols = []
        for (p, q, w), off in self.layout(t):
            for b in nc.cells[(p, q, w)]:
                col: dict = {}
                dv = nc.dint_vec(p, b)
                if dv:
                    key = (p, q - 1, w)
                    for j, c in nc.coordinates(key, dv).items():
                        col[tgt[key] + j] = col.get(tgt[key] + j, 0) + _sign(p) * c
                if p < nc.p_max:
                    dl = nc.delta_vec(p, b)
                    if dl:
                        key = (p + 1, q, w)
                        for j, c in nc.coordinates(key, dl).items():
                            col[tgt[key] + j] = col.get(tgt[key] + j, 0) + c
                cols.append({r: v for r, v in col.items() if v})
        m = RationalMatrix.from_columns(cols, self.dim(t - 1))
        self._D[t] = m
        return m

    def to_cochain(self, t: int, coords: Sequence) -> HochschildCochain:
        parts: dict = {}
        for (p, q, w), off in self.layout(t):
            acc: dict = {}
            for j, b in enumerate(self.nc.cells[(p, q, w)]):
                if coords[off + j]:
                    axpy(acc, frac(coords[off + j]), b)
            if acc:
                parts[(p, q)] = acc
        return HochschildCochain(self.nc.cosimplicial.operad, parts)

    def coords_of(self, t: int, x: HochschildCochain) -> list[Fraction]:
        out = [Fraction(0)] * self.dim(t)
        wts = self.nc.cosimplicial.weights
        for (p, q, w), off in self.layout(t):
            v = x.parts.get((p, q))
            if not v:
                continue
            part = {g: c for g, c in v.items() if wts[p][g] == w}
            for j, c in self.nc.coordinates((p, q, w), part).items():
                out[off + j] = c
        return out

    def homology(self, t: int) -> SubquotientBasis:
        from .exactla import kernel_basis
        n = self.dim(t)
        cycles = kernel_basis(self.D(t)) if n else []
        up = self.D(t + 1)
        bounds = [to_dense(c, n) for c in up.column_dicts() if c]
        return subquotient(cycles, bounds, n)


class HHResult:
    """Hochschild cohomology per (total degree, weight) with certification flags."""

    def __init__(self, nc: NormalizedComplex, t_min: int, t_max: int, certificate: str):
        self.normalized_complex = nc
        self.t_min, self.t_max = t_min, t_max
        self.certificate = certificate
        self.cells: dict[tuple[int, int], HHCell] = {}
        self._totals: dict[int, _WeightTotal] = {}
        self._homology: dict[tuple[int, int], SubquotientBasis] = {}
        self.total_certified: dict[int, bool] = {}

    @property
    def p_max(self) -> int:
        return self.normalized_complex.p_max

    def weights(self) -> list[int]:
        return sorted({w for (_, w) in self.cells})

    def dim(self, t: int) -> int:
        return sum(c.dim for (tt, _), c in self.cells.items() if tt == t)

    def certified(self, t: int) -> bool:
        return self.total_certified.get(t, False)

    def rows(self) -> list[tuple[int, int, bool]]:
        return [(t, self.dim(t), self.certified(t)) for t in range(self.t_min, self.t_max + 1)]

    def cell_rows(self) -> list[tuple[int, int, int, bool]]:
        return [(t, w, c.dim, c.certified) for (t, w), c in sorted(self.cells.items())]

    def _split(self, x: HochschildCochain) -> dict[int, HochschildCochain]:
        t = x.total_degree
        wts = self.normalized_complex.cosimplicial.weights
        out: dict[int, dict] = {}
        for (p, q), v in x.parts.items():
            for g, c in v.items():
                out.setdefault(wts[p][g], {}).setdefault((p, q), {})[g] = c
        return {w: HochschildCochain(x.host, parts) for w, parts in out.items()}

    def class_of(self, x: HochschildCochain) -> dict[int, tuple]:
        """Coordinates of the class of cocycle ``x`` per weight (raises if not a cocycle)."""
        t = x.total_degree
        out = {}
        for w, xw in self._split(x).items():
            tot = self._totals[w]
            out[w] = self._homology[(t, w)].coordinates(tot.coords_of(t, xw))
        return {w: c for w, c in out.items() if any(c)}

    def is_coboundary(self, x: HochschildCochain) -> bool:
        if x.is_zero():
            return True
        t = x.total_degree
        for w, xw in self._split(x).items():
            tot = self._totals[w]
            if not self._homology[(t, w)].is_boundary(tot.coords_of(t, xw)):
                return False
        return True

    def same_class(self, x: HochschildCochain, y: HochschildCochain) -> bool:
        return self.is_coboundary(x - y)


def _cell_certified(nc: NormalizedComplex, support, t: int, w: int, o: FinOperad) -> bool:
    P = nc.p_max
    if o.degree_max is not None and P + t + 1 > o.degree_max:
        return False
    if support is not None:
        return support.max_p(w) + 2 <= P
    # observed vanishing: the last two columns carry nothing near total degree t
    top = max((p for p in range(P + 1) for dt in (-1, 0, 1) if (p, p + t + dt, w) in nc.cells), default=-1)
    return top + 2 <= P


def hochschild_cohomology(o: FinOperad, t_min: int, t_max: int, p_max: int | None = None,
                          normalize: bool = True, strict: bool = False,
                          complex: NormalizedComplex | None = None) -> HHResult:
    """HH^t for t_min <= t <= t_max, split by weight, from columns p <= p_max."""
    nc = complex or NormalizedComplex(cosimplicial_of(o, p_max), normalize=normalize)
    support = o.support if (normalize and o.support is not None) else None
    res = HHResult(nc, t_min, t_max, "proven" if support is not None else "observed")
    weights = nc.weights() or [0]
    for w in weights:
        res._totals[w] = _WeightTotal(nc, w)
    for t in range(t_min, t_max + 1):
        for w in weights:
            tot = res._totals[w]
            h = tot.homology(t)
            res._homology[(t, w)] = h
            if h.dim or tot.dim(t):
                reps = [tot.to_cochain(t, r) for r in h.representatives]
                res.cells[(t, w)] = HHCell(t, w, h.dim, _cell_certified(nc, support, t, w, o), reps)
        if support is not None:
            mw = support.max_weight(t)
            ok = mw is not None and all(_cell_certified(nc, support, t, w, o) for w in range(mw + 1))
        else:
            ok = all(_cell_certified(nc, None, t, w, o) for w in weights)
        res.total_certified[t] = ok
    if strict:
        bad = [t for t in range(t_min, t_max + 1) if not res.certified(t)]
        if bad:
            raise WindowNotCertified(f"total degrees {bad} are not certified at p_max={nc.p_max}")
    return res


@dataclass
class HHComparison:
    rows: list  # (t, dim_o, dim_h, certified, equal)
    cell_rows: list  # (t, w, dim_o, dim_h, certified, equal)

    @property
    def equal_on_certified(self) -> bool:
        return all(eq for (*_, cert, eq) in self.cell_rows if cert) and \
            all(eq for (*_, cert, eq) in self.rows if cert)


def compare_hochschild(a: HHResult, b: HHResult) -> HHComparison:
    rows = []
    for t in range(max(a.t_min, b.t_min), min(a.t_max, b.t_max) + 1):
        cert = a.certified(t) and b.certified(t)
        rows.append((t, a.dim(t), b.dim(t), cert, a.dim(t) == b.dim(t)))
    cells = []
    keys = sorted(set(a.cells) | set(b.cells))
    for (t, w) in keys:
        ca, cb = a.cells.get((t, w)), b.cells.get((t, w))
        da, db = (ca.dim if ca else 0), (cb.dim if cb else 0)
        cert = (ca is None or ca.certified) and (cb is None or cb.certified) and (ca is not None or cb is not None)
        cells.append((t, w, da, db, cert, da == db))
    return HHComparison(rows, cells)


def hochschild_of_homology_comparison(o: FinOperad, t_min: int, t_max: int, p_max: int | None = None,
                                      strict: bool = False) -> HHComparison:
    """HH of o against HH of its homology operad on a common window."""
    rep = check_multiplicative(o)
    if not rep.valid:
        raise MultiplicativeStructureError("; ".join(rep.problems))
    h = homology_operad(o).operad
    a = hochschild_cohomology(o, t_min, t_max, p_max)
    b = hochschild_cohomology(h, t_min, t_max, p_max)
    cmp = compare_hochschild(a, b)
    if strict and not any(cert for (*_, cert, _) in cmp.rows):
        raise WindowNotCertified("no total degree in the window is certified")
    return cmp
