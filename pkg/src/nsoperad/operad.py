"""Finite non-symmetric dg operads given by structure constants.

An arity-``n`` component is a :class:`FinChainComplex`; its basis is also
addressed by a *global* index that runs through degree 0 first, then
degree 1, and so on.  Operad elements are sparse ``{global_index: coef}``
dicts.  Partial compositions are tabulated on basis pairs:
``table[(n, i, m)][(a, b)]`` is the element ``a ∘_i b`` of arity n+m-1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .chain import ChainMap, FinChainComplex, is_quasi_iso, homology
from .exactla import RationalMatrix, SubquotientBasis, axpy, frac, rank, to_dense, to_sparse

Element = dict  # dict[int, Fraction]


class OperadError(ValueError):
    pass


class InvalidScalar(ValueError):
    pass


class NonZeroDifferential(ValueError):
    pass


class EndpointMismatch(ValueError):
    pass


class NonCommutingSquare(ValueError):
    pass


class NotWeakEquivalence(ValueError):
    pass


class MultiplicativeStructureError(ValueError):
    pass


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


@dataclass(frozen=True)
class NormalizedSupport:
    """Proven vanishing data for the normalized cosimplicial columns N^p.

    ``max_p(w)``: N^p is zero in weight w whenever p > max_p(w).
    ``max_weight(t)``: largest weight that can meet total degree t (None if unbounded).
    """
    max_p: Callable[[int], int]
    max_weight: Callable[[int], int | None]


class FinOperad:
    def __init__(self, arity_max: int, components: Mapping[int, FinChainComplex], unit: Mapping,
                 table: Mapping[tuple[int, int, int], Mapping[tuple[int, int], Mapping]],
                 labels: Mapping[int, Sequence[str]] | None = None,
                 mu: Mapping | None = None, basepoint: Mapping | None = None, name: str = "",
                 degree_max: int | None = None, vanishes_above: bool = False):
        if arity_max < 1:
            raise OperadError("arity_max must be at least 1 (the unit lives in arity 1)")
        self.arity_max = arity_max
        # compositions landing above degree_max are absent (degree truncation)
        self.degree_max = degree_max
        # True when the operad is genuinely zero above arity_max
        self.vanishes_above = vanishes_above
        self.name = name
        self.components = {n: components.get(n) or FinChainComplex([0]) for n in range(arity_max + 1)}
        self._offsets: dict[int, list[int]] = {}
        self._degree: dict[int, list[int]] = {}
        for n, c in self.components.items():
            offs, degs = [0], []
            for k, dk in enumerate(c.dims):
                offs.append(offs[-1] + dk)
                degs.extend([k] * dk)
            self._offsets[n] = offs
            self._degree[n] = degs
        self.unit: Element = {g: frac(x) for g, x in unit.items() if x}
        self.table: dict = {}
        for key, entries in table.items():
            n, i, m = key
            if not (1 <= i <= n and n + m - 1 <= arity_max and m <= arity_max):
                raise OperadError(f"composition {key} outside the truncation")
            clean = {}
            for pair, val in entries.items():
                v = {g: frac(x) for g, x in val.items() if x}
                if v:
                    clean[pair] = v
            self.table[key] = clean
        self.labels = {}
        for n in range(arity_max + 1):
            given = list((labels or {}).get(n, []))
            if not given:
                given = [f"b{n}_{g}" for g in range(self.dim(n))]
            if len(given) != self.dim(n):
                raise OperadError(f"arity {n}: {len(given)} labels for {self.dim(n)} basis elements")
            self.labels[n] = given
        self.mu = {g: frac(x) for g, x in mu.items() if x} if mu is not None else None
        self.basepoint = {g: frac(x) for g, x in basepoint.items() if x} if basepoint is not None else None
        self._dcache: dict[int, list[Element]] = {}
        # optional additive grading preserved by d, compositions, μ and e (weights[n][g])
        self.weights: dict[int, list[int]] | None = None
        # optional proven vanishing data for normalized cosimplicial columns
        self.support: NormalizedSupport | None = None

    # basis bookkeeping
    def dim(self, n: int) -> int:
        if n < 0 or n > self.arity_max:
            return 0
        return self._offsets[n][-1]

    def degree(self, n: int, g: int) -> int:
        return self._degree[n][g]

    def degree_range(self, n: int, k: int) -> range:
        offs = self._offsets[n]
        if k < 0 or k + 1 >= len(offs):
            return range(0)
        return range(offs[k], offs[k + 1])

    def max_degree(self) -> int:
        return max((c.max_degree for c in self.components.values()), default=0)

    def global_index(self, n: int, k: int, local: int) -> int:
        return self._offsets[n][k] + local

    def local_index(self, n: int, g: int) -> tuple[int, int]:
        k = self._degree[n][g]
        return k, g - self._offsets[n][k]

    def element_degree(self, n: int, x: Mapping) -> int | None:
        degs = {self._degree[n][g] for g in x}
        if len(degs) > 1:
            raise OperadError("inhomogeneous element")
        return degs.pop() if degs else None

    @property
    def is_multiplicative(self) -> bool:
        return self.mu is not None and self.basepoint is not None

    # structure
    def d(self, n: int, x: Mapping) -> Element:
        cols = self._dcache.get(n)
        if cols is None:
            c = self.components[n]
            cols = []
            for g in range(self.dim(n)):
                k, loc = self.local_index(n, g)
                col = c.differential(k).column(loc) if k >= 1 else {}
                cols.append({self.global_index(n, k - 1, r): v for r, v in col.items()})
            self._dcache[n] = cols
        out: Element = {}
        for g, a in x.items():
            axpy(out, a, cols[g])
        return out

    def has_composition(self, n: int, m: int) -> bool:
        return 0 <= n <= self.arity_max and 0 <= m <= self.arity_max and n >= 1 and n + m - 1 <= self.arity_max

    def compose_basis(self, n: int, i: int, m: int, a: int, b: int) -> Element:
        return self.table.get((n, i, m), {}).get((a, b), {})

    def compose(self, n: int, i: int, m: int, x: Mapping, y: Mapping) -> Element:
        if not (1 <= i <= n):
            raise IndexError(f"position {i} outside arity {n}")
        if not self.has_composition(n, m):
            raise OperadError(f"composition ({n},{i},{m}) beyond arity_max={self.arity_max}")
        tab = self.table.get((n, i, m), {})
        out: Element = {}
        for a, xa in x.items():
            for b, yb in y.items():
                r = tab.get((a, b))
                if r:
                    axpy(out, xa * yb, r)
        return out

    def basis_element(self, n: int, g: int) -> Element:
        return {g: Fraction(1)}

    def with_table(self, table) -> "FinOperad":
        return FinOperad(self.arity_max, self.components, self.unit, table, self.labels,
                         self.mu, self.basepoint, self.name, self.degree_max, self.vanishes_above)

    def with_multiplication(self, mu: Mapping | None, basepoint: Mapping | None) -> "FinOperad":
        return FinOperad(self.arity_max, self.components, self.unit, self.table, self.labels,
                         mu, basepoint, self.name, self.degree_max, self.vanishes_above)

    def truncate(self, arity_max: int) -> "FinOperad":
        arity_max = min(arity_max, self.arity_max)
        table = {k: v for k, v in self.table.items() if k[0] + k[2] - 1 <= arity_max and k[0] <= arity_max
                 and k[2] <= arity_max}
        out = FinOperad(arity_max, {n: self.components[n] for n in range(arity_max + 1)}, self.unit, table,
                        {n: self.labels[n] for n in range(arity_max + 1)},
                        self.mu if arity_max >= 2 else None,
                        self.basepoint, self.name, self.degree_max,
                        self.vanishes_above and arity_max == self.arity_max)
        for attr in ("keys", "key_index", "shift", "convention"):
            if hasattr(self, attr):
                val = getattr(self, attr)
                setattr(out, attr, {n: val[n] for n in range(arity_max + 1)} if isinstance(val, dict) else val)
        if self.weights is not None:
            out.weights = {n: self.weights[n] for n in range(arity_max + 1)}
        out.support = self.support
        return out

    def dims_table(self) -> dict[int, tuple[int, ...]]:
        return {n: self.components[n].dims for n in range(self.arity_max + 1)}

    def is_zero_differential(self) -> bool:
        return all(c.is_zero_differential() for c in self.components.values())

    def __repr__(self) -> str:
        return f"FinOperad({self.name or '?'}, arity_max={self.arity_max}, dims={[self.dim(n) for n in range(self.arity_max + 1)]})"


def build_operad(arity_max: int, bases: Mapping[int, Sequence[tuple[object, int]]],
                 compose_fn: Callable[[int, int, int, object, object], Mapping[object, Fraction]],
                 unit_key, differential_fn: Callable[[int, object], Mapping[object, Fraction]] | None = None,
                 label_fn: Callable[[object], str] = str, mu_key=None, basepoint_key=None,
                 name: str = "") -> FinOperad:
    """Tabulate an operad from keyed bases and a composition rule.

    ``bases[n]`` lists ``(key, degree)`` pairs; keys are reordered by degree
    (stably).  ``compose_fn(n, i, m, ka, kb)`` returns ``{key: coef}``.
    """
    order: dict[int, list] = {}
    index: dict[int, dict] = {}
    comps = {}
    for n in range(arity_max + 1):
        items = sorted(bases.get(n, []), key=lambda t: t[1])
        order[n] = [k for k, _ in items]
        index[n] = {k: g for g, k in enumerate(order[n])}
        top = max((d for _, d in items), default=0)
        dims = [0] * (top + 1)
        for _, d in items:
            dims[d] += 1
        degs = [d for _, d in items]
        offs = [0]
        for x in dims:
            offs.append(offs[-1] + x)
        diffs = {}
        if differential_fn is not None:
            for k in range(1, top + 1):
                ent = {}
                for g in range(offs[k], offs[k + 1]):
                    for key, coef in differential_fn(n, order[n][g]).items():
                        h = index[n][key]
                        if degs[h] != k - 1:
                            raise OperadError("differential does not lower degree by one")
                        ent[(h - offs[k - 1], g - offs[k])] = coef
                diffs[k] = RationalMatrix(dims[k - 1], dims[k], ent)
        comps[n] = FinChainComplex(dims, diffs)
    table = {}
    for n in range(1, arity_max + 1):
        for m in range(0, arity_max + 2 - n):
            for i in range(1, n + 1):
                entries = {}
                for a, ka in enumerate(order[n]):
                    for b, kb in enumerate(order[m]):
                        res = compose_fn(n, i, m, ka, kb)
                        if res:
                            tgt = index[n + m - 1]
                            entries[(a, b)] = {tgt[k]: c for k, c in res.items() if c}
                table[(n, i, m)] = entries
    unit = {index[1][unit_key]: Fraction(1)} if 1 in index and unit_key in index[1] else {}
    mu = {index[2][mu_key]: Fraction(1)} if mu_key is not None else None
    e = {index[0][basepoint_key]: Fraction(1)} if basepoint_key is not None else None
    labels = {n: [label_fn(k) for k in order[n]] for n in order}
    op = FinOperad(arity_max, comps, unit, table, labels, mu, e, name)
    op.keys = order
    op.key_index = index
    return op


def associative_operad(arity_max: int) -> FinOperad:
    """𝒜: one basis element μ_n in degree 0 per arity, μ_n ∘_i μ_m = μ_{n+m-1}."""
    bases = {n: [(n, 0)] for n in range(arity_max + 1)}
    op = build_operad(arity_max, bases, lambda n, i, m, a, b: {n + m - 1: Fraction(1)}, unit_key=1,
                      label_fn=lambda k: f"mu{k}", mu_key=2 if arity_max >= 2 else None,
                      basepoint_key=0, name="associative")
    op.weights = {n: [0] for n in range(arity_max + 1)}
    op.support = NormalizedSupport(lambda w: 0, lambda t: 0)
    return op


def trivial_operad(arity_max: int) -> FinOperad:
    """Unit only: Q in arity 1, zero elsewhere."""
    bases = {1: [("id", 0)]}
    op = build_operad(arity_max, bases, lambda n, i, m, a, b: {"id": Fraction(1)}, unit_key="id",
                      label_fn=str, name="trivial")
    op.vanishes_above = True
    return op


# ---------------------------------------------------------------- axioms

@dataclass
class AxiomReport:
    violations: list = field(default_factory=list)
    checked: int = 0

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def summary(self) -> str:
        if self.valid:
            return f"valid ({self.checked} instances checked)"
        first = self.violations[0]
        return f"{len(self.violations)} violation(s); first: {first}"


def check_operad_axioms(o: FinOperad, stop_after: int | None = None) -> AxiomReport:
    """Check unit, derivation, sequential and parallel associativity on basis elements."""
    rep = AxiomReport()
    N = o.arity_max

    def fail(**kw):
        rep.violations.append(kw)
        return stop_after is not None and len(rep.violations) >= stop_after

    deg = o.degree
    # unit
    if o.element_degree(1, o.unit) not in (0, None) or not o.unit:
        if fail(axiom="unit-degree"):
            return rep
    if o.d(1, o.unit):
        if fail(axiom="unit-cycle"):
            return rep
    for m in range(N + 1):
        for b in range(o.dim(m)):
            rep.checked += 1
            if o.compose(1, 1, m, o.unit, {b: 1}) != {b: 1}:
                if fail(axiom="left-unit", arity=m, basis=b):
                    return rep
    for n in range(1, N + 1):
        for a in range(o.dim(n)):
            for i in range(1, n + 1):
                rep.checked += 1
                if o.compose(n, i, 1, {a: 1}, o.unit) != {a: 1}:
                    if fail(axiom="right-unit", arity=n, position=i, basis=a):
                        return rep
    # degree of structure constants and derivation
    for (n, i, m), tab in sorted(o.table.items()):
        for (a, b), r in tab.items():
            dd = deg(n, a) + deg(m, b)
            if any(deg(n + m - 1, g) != dd for g in r):
                if fail(axiom="degree", triple=(n, i, m), basis=(a, b)):
                    return rep
        for a in range(o.dim(n)):
            da = o.d(n, {a: 1})
            for b in range(o.dim(m)):
                if o.degree_max is not None and deg(n, a) + deg(m, b) > o.degree_max:
                    continue
                rep.checked += 1
                lhs = o.d(n + m - 1, o.compose(n, i, m, {a: 1}, {b: 1}))
                rhs = o.compose(n, i, m, da, {b: 1})
                axpy(rhs, _sign(deg(n, a)), o.compose(n, i, m, {a: 1}, o.d(m, {b: 1})))
                if lhs != rhs:
                    if fail(axiom="derivation", triple=(n, i, m), basis=(a, b)):
                        return rep
    # associativity
    for n in range(1, N + 1):
        for m in range(0, N + 1):
            if n + m - 1 > N:
                continue
            for k in range(0, N + 1):
                total = n + m + k - 2
                if total > N or total < 0:
                    continue
                for x in range(o.dim(n)):
                    for y in range(o.dim(m)):
                        for z in range(o.dim(k)):
                            X, Y, Z = {x: 1}, {y: 1}, {z: 1}
                            for i in range(1, n + 1):
                                xy = None
                                if o.has_composition(n, m):
                                    xy = o.compose(n, i, m, X, Y)
                                # sequential
                                if m >= 1 and o.has_composition(m, k):
                                    for j in range(1, m + 1):
                                        rep.checked += 1
                                        lhs = o.compose(n + m - 1, i - 1 + j, k, xy, Z)
                                        rhs = o.compose(n, i, m + k - 1, X, o.compose(m, j, k, Y, Z))
                                        if lhs != rhs:
                                            if fail(axiom="sequential", arities=(n, m, k), positions=(i, j),
                                                    basis=(x, y, z)):
                                                return rep
                                # parallel, i < j
                                if not o.has_composition(n, k):
                                    continue
                                for j in range(i + 1, n + 1):
                                    rep.checked += 1
                                    lhs = o.compose(n + m - 1, j + m - 1, k, xy, Z)
                                    xz = o.compose(n, j, k, X, Z)
                                    if not o.has_composition(n + k - 1, m):
                                        continue
                                    rhs = o.compose(n + k - 1, i, m, xz, Y)
                                    s = _sign(deg(m, y) * deg(k, z))
                                    if s < 0:
                                        rhs = {g: -c for g, c in rhs.items()}
                                    if lhs != rhs:
                                        if fail(axiom="parallel", arities=(n, m, k), positions=(i, j),
                                                basis=(x, y, z)):
                                            return rep
    return rep


@dataclass
class MultiplicativeReport:
    problems: list

    @property
    def valid(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.valid


def check_multiplicative(o: FinOperad) -> MultiplicativeReport:
    """μ associative, e a two-sided unit for μ, both degree-0 cycles."""
    probs = []
    if not o.is_multiplicative:
        return MultiplicativeReport(["operad carries no multiplication/basepoint"])
    mu, e = o.mu, o.basepoint
    if o.arity_max < 2:
        return MultiplicativeReport(["arity_max < 2"])
    if o.element_degree(2, mu) not in (0,):
        probs.append("mu not in degree 0")
    if e and o.element_degree(0, e) != 0:
        probs.append("basepoint not in degree 0")
    if o.d(2, mu):
        probs.append("d(mu) != 0")
    if o.d(0, e):
        probs.append("d(e) != 0")
    if o.arity_max >= 3 and o.compose(2, 1, 2, mu, mu) != o.compose(2, 2, 2, mu, mu):
        probs.append("mu not associative")
    for i in (1, 2):
        if o.compose(2, i, 0, mu, e) != o.unit:
            probs.append(f"mu o_{i} e != unit")
    return MultiplicativeReport(probs)


# ------------------------------------------------------------- morphisms

class OperadMorphism:
    """Arity-wise degree-preserving linear maps between the global bases."""

    def __init__(self, source: FinOperad, target: FinOperad, maps: Mapping[int, RationalMatrix],
                 check: bool = True):
        self.source = source
        self.target = target
        top = min(source.arity_max, target.arity_max)
        self.arity_max = top
        self.maps: dict[int, RationalMatrix] = {}
        for n in range(top + 1):
            m = maps.get(n)
            if m is None:
                m = RationalMatrix.zeros(target.dim(n), source.dim(n))
            if m.shape != (target.dim(n), source.dim(n)):
                raise OperadError(f"arity {n}: map shape {m.shape}")
            self.maps[n] = m
        if check:
            problems = self.defects()
            if problems:
                raise OperadError(f"not an operad morphism: {problems[:3]}")

    def apply(self, n: int, x: Mapping) -> Element:
        return self.maps[n].apply_sparse(x)

    def chain_map(self, n: int) -> ChainMap:
        s, t = self.source, self.target
        comps = {}
        m = self.maps[n]
        ent_by_k: dict[int, dict] = {}
        for (r, c), x in m.entries().items():
            k, lc = s.local_index(n, c)
            kt, lr = t.local_index(n, r)
            if k != kt:
                raise OperadError("morphism does not preserve degree")
            ent_by_k.setdefault(k, {})[(lr, lc)] = x
        sc, tc = s.components[n], t.components[n]
        for k in range(max(sc.max_degree, tc.max_degree) + 1):
            comps[k] = RationalMatrix(tc.dim(k), sc.dim(k), ent_by_k.get(k, {}))
        return ChainMap(sc, tc, comps, check=False)

    def defects(self) -> list:
        s, t = self.source, self.target
        out = []
        for n in range(self.arity_max + 1):
            for (r, c) in self.maps[n].entries():
                if s.degree(n, c) != t.degree(n, r):
                    out.append(("degree", n))
                    break
            cm = self.chain_map(n)
            if cm.chain_map_defects():
                out.append(("chain-map", n))
        if self.arity_max >= 1 and self.apply(1, s.unit) != t.unit:
            out.append(("unit",))
        for (n, i, m), tab in s.table.items():
            if n + m - 1 > self.arity_max:
                continue
            for a in range(s.dim(n)):
                fa = self.apply(n, {a: 1})
                for b in range(s.dim(m)):
                    lhs = self.apply(n + m - 1, s.compose_basis(n, i, m, a, b))
                    rhs = t.compose(n, i, m, fa, self.apply(m, {b: 1}))
                    if lhs != rhs:
                        out.append(("composition", (n, i, m), (a, b)))
        return out

    def compose(self, other: "OperadMorphism") -> "OperadMorphism":
        """``self ∘ other``."""
        top = min(self.arity_max, other.arity_max)
        return OperadMorphism(other.source, self.target,
                              {n: self.maps[n] @ other.maps[n] for n in range(top + 1)}, check=False)

    def preserves_multiplication(self) -> bool:
        s, t = self.source, self.target
        if not (s.is_multiplicative and t.is_multiplicative):
            return False
        return self.apply(2, s.mu) == t.mu and self.apply(0, s.basepoint) == t.basepoint

    def is_identity(self) -> bool:
        if self.source is not self.target and self.source.dims_table() != self.target.dims_table():
            return False
        return all(m == RationalMatrix.identity(m.rows) for m in self.maps.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperadMorphism):
            return NotImplemented
        return self.maps == other.maps


def associative_morphism(o: FinOperad) -> OperadMorphism:
    """The map 𝒜 -> o sending the arity-n generator to the iterated product (e in arity 0)."""
    if not o.is_multiplicative:
        raise MultiplicativeStructureError("target carries no multiplication/basepoint")
    a = associative_operad(o.arity_max)
    powers = {0: dict(o.basepoint), 1: dict(o.unit)}
    for n in range(2, o.arity_max + 1):
        powers[n] = o.compose(2, 1, n - 1, o.mu, powers[n - 1])
    maps = {n: RationalMatrix(o.dim(n), 1, {(g, 0): c for g, c in powers[n].items()})
            for n in range(o.arity_max + 1)}
    return OperadMorphism(a, o, maps)


def identity_morphism(o: FinOperad) -> OperadMorphism:
    return OperadMorphism(o, o, {n: RationalMatrix.identity(o.dim(n)) for n in range(o.arity_max + 1)},
                          check=False)


@dataclass
class WeakEquivalenceCertificate:
    verdict: bool
    per_arity: dict

    def __bool__(self) -> bool:
        return self.verdict


def is_weak_equivalence(f: OperadMorphism, window: int | None = None) -> WeakEquivalenceCertificate:
    per = {}
    for n in range(f.arity_max + 1):
        cm = f.chain_map(n)
        w = window if window is not None else max(cm.source.max_degree, cm.target.max_degree)
        per[n] = is_quasi_iso(cm, window=w)
    return WeakEquivalenceCertificate(all(per.values()), per)


def is_operad_fibration(f: OperadMorphism) -> bool:
    """Surjective in every arity and every degree k >= 1."""
    for n in range(f.arity_max + 1):
        cm = f.chain_map(n)
        for k in range(1, cm.max_degree + 1):
            if rank(cm.component(k)) != cm.target.dim(k):
                return False
    return True


# --------------------------------------------------------- homology operad

@dataclass
class HomologyData:
    operad: FinOperad
    carriers: dict  # arity -> list of SubquotientBasis per degree (global vectors)

    def class_of(self, n: int, x: Mapping) -> Element:
        """Homology class of a homogeneous cycle of arity n, in H's global basis."""
        if not x:
            return {}
        k = self._host.element_degree(n, x)
        car = self.carriers[n][k]
        dense = to_dense(x, car.ambient_dim)
        coords = car.coordinates(dense)
        off = self.operad.degree_range(n, k).start
        return {off + j: c for j, c in enumerate(coords) if c}


def _carriers(o: FinOperad, n: int) -> list[SubquotientBasis]:
    """Per-degree homology carriers in global coordinates, with weight-homogeneous representatives."""
    from .exactla import kernel_basis_sparse, subquotient
    comp = o.components[n]
    dimn = o.dim(n)
    wts = o.weights[n] if o.weights is not None else [0] * dimn
    dcols = [o.d(n, {g: 1}) for g in range(dimn)]
    out = []
    for k in range(comp.max_degree + 1):
        cycles, bounds = [], []
        here = list(o.degree_range(n, k))
        above = list(o.degree_range(n, k + 1))
        for w in sorted({wts[g] for g in here}):
            idx = [g for g in here if wts[g] == w]
            ent = {(r, j): v for j, g in enumerate(idx) for r, v in dcols[g].items()}
            for kv in kernel_basis_sparse(RationalMatrix(dimn, len(idx), ent)):
                cycles.append(to_dense({idx[j]: v for j, v in kv.items()}, dimn))
            bounds.extend(to_dense(dcols[g], dimn) for g in above if wts[g] == w and dcols[g])
        out.append(subquotient(cycles, bounds, dimn))
    return out


def homology_operad(o: FinOperad) -> HomologyData:
    """H_*(o) with zero differential and compositions induced on cycle representatives."""
    carriers = {n: _carriers(o, n) for n in range(o.arity_max + 1)}
    comps, labels, reps = {}, {}, {}
    for n in range(o.arity_max + 1):
        dims = [c.dim for c in carriers[n]] or [0]
        comps[n] = FinChainComplex(dims)
        reps[n] = [to_sparse(r) for c in carriers[n] for r in c.representatives]
        labels[n] = [f"[{n}:{g}]" for g in range(len(reps[n]))]
    offsets = {n: [0] for n in carriers}
    for n, cs in carriers.items():
        for c in cs:
            offsets[n].append(offsets[n][-1] + c.dim)

    def cls(n, x):
        if not x:
            return {}
        k = o.element_degree(n, x)
        coords = carriers[n][k].coordinates(to_dense(x, o.dim(n)))
        return {offsets[n][k] + j: c for j, c in enumerate(coords) if c}

    table = {}
    for (n, i, m) in o.table:
        entries = {}
        for a, ra in enumerate(reps[n]):
            for b, rb in enumerate(reps[m]):
                v = cls(n + m - 1, o.compose(n, i, m, ra, rb))
                if v:
                    entries[(a, b)] = v
        table[(n, i, m)] = entries
    mu = cls(2, o.mu) if o.mu is not None else None
    e = cls(0, o.basepoint) if o.basepoint is not None else None
    h = FinOperad(o.arity_max, comps, cls(1, o.unit), table, labels, mu, e, f"H({o.name})")
    if o.weights is not None:
        # representatives are weight-homogeneous, and normalization commutes with homology
        h.weights = {n: [o.weights[n][next(iter(r))] if r else 0 for r in reps[n]] for n in reps}
        h.support = o.support
    data = HomologyData(h, carriers)
    data._host = o
    data.representatives = reps
    return data


def induced_homology_morphism(f: OperadMorphism, hs: HomologyData | None = None,
                              ht: HomologyData | None = None) -> OperadMorphism:
    hs = hs or homology_operad(f.source)
    ht = ht or homology_operad(f.target)
    maps = {}
    for n in range(f.arity_max + 1):
        cols = [ht.class_of(n, f.apply(n, r)) for r in hs.representatives[n]]
        maps[n] = RationalMatrix.from_columns(cols, ht.operad.dim(n))
    return OperadMorphism(hs.operad, ht.operad, maps, check=False)


# ------------------------------------------------------------------ scaling

def star_scale(a, f: OperadMorphism) -> OperadMorphism:
    """(a*f)_n = a^{n-1} f_n."""
    a = frac(a)
    if a == 0:
        raise InvalidScalar("scalar must be nonzero")
    maps = {n: m.scale(a ** (n - 1)) for n, m in f.maps.items()}
    return OperadMorphism(f.source, f.target, maps, check=False)


def scaling_automorphism(a, o: FinOperad) -> OperadMorphism:
    """φ_a with φ_{a,n} = a^{n-1} · id."""
    a = frac(a)
    if a == 0:
        raise InvalidScalar("scalar must be nonzero")
    maps = {n: RationalMatrix.identity(o.dim(n)).scale(a ** (n - 1)) for n in range(o.arity_max + 1)}
    return OperadMorphism(o, o, maps, check=False)


# ------------------------------------------------------- formal fixtures

# the augmented acyclic algebra C = span{1, v, u}, |u| = 1, du = v, uv = vu = u^2 = v^2 = 0
_C_DEG = {"1": 0, "v": 0, "u": 1}


def _c_mul(c1: str, c2: str) -> str | None:
    if c1 == "1":
        return c2
    if c2 == "1":
        return c1
    return None


def formal_test_operad(h: FinOperad) -> tuple[FinOperad, OperadMorphism]:
    """O(n) = h(n) ⊗ C together with the augmentation O -> h (a weak equivalence)."""
    if not h.is_zero_differential():
        raise NonZeroDifferential("formal_test_operad needs a zero-differential operad")
    bases = {}
    for n in range(h.arity_max + 1):
        bases[n] = [((g, c), h.degree(n, g) + _C_DEG[c]) for g in range(h.dim(n)) for c in ("1", "v", "u")]

    def compose(n, i, m, ka, kb):
        (a, c1), (b, c2) = ka, kb
        c = _c_mul(c1, c2)
        if c is None:
            return {}
        s = _sign(_C_DEG[c1] * h.degree(m, b))
        return {(g, c): s * x for g, x in h.compose_basis(n, i, m, a, b).items()}

    def differential(n, key):
        g, c = key
        if c == "u":
            return {(g, "v"): Fraction(_sign(h.degree(n, g)))}
        return {}

    O = _build_tensor_operad(h, bases, compose, differential)
    aug = {}
    for n in range(h.arity_max + 1):
        ent = {(g, gk): 1 for gk, (g, c) in enumerate(O.keys[n]) if c == "1"}
        aug[n] = RationalMatrix(h.dim(n), O.dim(n), ent)
    if h.weights is not None:
        O.weights = {n: [h.weights[n][g] for (g, _) in O.keys[n]] for n in O.keys}
        O.support = h.support
    return O, OperadMorphism(O, h, aug, check=False)


def _build_tensor_operad(h, bases, compose, differential) -> FinOperad:
    # build_operad needs a basis key for the unit; h's unit may be a combination, so patch it after
    proto = build_operad(h.arity_max, bases, compose, unit_key=(0, "1"), differential_fn=differential)
    idx = proto.key_index

    def lift(n, x):
        return {idx[n][(g, "1")]: c for g, c in x.items()}

    labels = {n: [f"{h.labels[n][g]}*{c}" for (g, c) in proto.keys[n]] for n in proto.keys}
    O = FinOperad(h.arity_max, proto.components, lift(1, h.unit), proto.table, labels,
                  lift(2, h.mu) if h.mu is not None else None,
                  lift(0, h.basepoint) if h.basepoint is not None else None, f"formal({h.name})")
    O.keys, O.key_index = proto.keys, proto.key_index
    return O


# --------------------------------------------------------- formality witness

@dataclass
class Horizontal:
    top: OperadMorphism
    bottom: OperadMorphism
    forward: bool = True  # True: column i -> column i+1


@dataclass
class FormalityWitness:
    columns: list  # OperadMorphism per column (vertical arrows)
    horizontals: list  # Horizontal between consecutive columns


@dataclass
class WitnessReport:
    squares: int
    weak_equivalences: int
    multiplicative: bool

    @property
    def valid(self) -> bool:
        return True


def _trimmed_dims(o: FinOperad) -> dict:
    out = {}
    for n, dims in o.dims_table().items():
        dims = list(dims)
        while len(dims) > 1 and dims[-1] == 0:
            dims.pop()
        out[n] = tuple(dims)
    return out


def check_formality_witness(w: FormalityWitness, multiplicative: bool = False) -> WitnessReport:
    cols = w.columns
    if len(w.horizontals) != len(cols) - 1 or not cols:
        raise EndpointMismatch("need one horizontal pair between consecutive columns")
    first, last = cols[0], cols[-1]
    h_target = homology_operad(first.target).operad
    h_source = homology_operad(first.source).operad
    if _trimmed_dims(last.target) != _trimmed_dims(h_target):
        raise EndpointMismatch("last column target does not have the homology dimensions of the first")
    if _trimmed_dims(last.source) != _trimmed_dims(h_source):
        raise EndpointMismatch("last column source does not have the homology dimensions of the first")
    nweq = 0
    for idx, hz in enumerate(w.horizontals):
        left, right = cols[idx], cols[idx + 1]
        if hz.forward:
            lhs = hz.bottom.compose(left)
            rhs = right.compose(hz.top)
        else:
            lhs = hz.bottom.compose(right)
            rhs = left.compose(hz.top)
        if lhs != rhs:
            for n in range(lhs.arity_max + 1):
                diff = lhs.maps[n] - rhs.maps[n]
                if not diff.is_zero():
                    col = min(c for (_, c) in diff.entries())
                    raise NonCommutingSquare(f"square {idx}: arity {n}, basis element {col}")
        for name, arrow in (("top", hz.top), ("bottom", hz.bottom)):
            cert = is_weak_equivalence(arrow)
            if not cert:
                bad = [(n, c.failing_degrees) for n, c in cert.per_arity.items() if not c]
                raise NotWeakEquivalence(f"square {idx} {name}: arity/degrees {bad[0]}")
            nweq += 1
        if multiplicative and not hz.top.is_identity():
            raise NotWeakEquivalence(f"square {idx}: top arrow is not the identity of the source")
    return WitnessReport(len(w.horizontals), nweq, multiplicative)
