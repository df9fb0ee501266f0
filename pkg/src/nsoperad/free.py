"""Free operads on planar trees, pushout presentations and a brute-force oracle.

A labelled tree is stored in Polish notation: a tuple of tokens listed in
preorder, where a vertex token is ``(kind, g, k)`` (label ``g`` of arity
``k`` drawn from the source named by ``kind``) and a leaf token is ``None``.
The tensor of vertex labels is ordered by preorder, so Koszul signs are
read straight off the token sequence:

* grafting ``y`` onto leaf i moves ``y`` past the tokens after that leaf;
* merging a child vertex b into its parent a moves b past the tokens
  strictly between them, and the child token simply disappears.

Kinds: ``"F"`` free generator, ``"O"`` element of the base operad,
``"A"`` attached cell (disk or sphere sequence).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .chain import ChainMap, FinChainComplex, InvalidParameter, homology_dims, is_quasi_iso
from .exactla import RationalMatrix, Span, axpy, frac
from .operad import FinOperad, OperadMorphism
from .trees import LEAF, TreeBounds, enumerate_shapes

UNIT = "unit"


class NonFinite(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


class NotACycle(ValueError):
    pass


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


# ------------------------------------------------------------------ sequences

class GradedSequence:
    """Arity-indexed chain complexes, addressed by degree-ordered global indices."""

    def __init__(self, arity_max: int, components: Mapping[int, FinChainComplex], name: str = ""):
        self.arity_max = arity_max
        self.name = name
        self.components = {n: components.get(n) or FinChainComplex([0]) for n in range(arity_max + 1)}
        self._offsets = {}
        self._degree = {}
        for n, c in self.components.items():
            offs, degs = [0], []
            for k, dk in enumerate(c.dims):
                offs.append(offs[-1] + dk)
                degs.extend([k] * dk)
            self._offsets[n], self._degree[n] = offs, degs

    def dim(self, n: int) -> int:
        return self._offsets[n][-1] if 0 <= n <= self.arity_max else 0

    def degree(self, n: int, g: int) -> int:
        return self._degree[n][g]

    def d(self, n: int, x: Mapping) -> dict:
        c = self.components[n]
        out: dict = {}
        for g, a in x.items():
            k = self._degree[n][g]
            if k == 0:
                continue
            col = c.differential(k).column(g - self._offsets[n][k])
            for r, v in col.items():
                out[self._offsets[n][k - 1] + r] = out.get(self._offsets[n][k - 1] + r, 0) + a * v
        return {g: v for g, v in out.items() if v}

    def nonzero_arities(self) -> list[int]:
        return [n for n in range(self.arity_max + 1) if self.dim(n)]

    def min_degree(self, arities: Iterable[int] | None = None) -> int | None:
        degs = [d for n in (arities if arities is not None else range(self.arity_max + 1))
                if 0 <= n <= self.arity_max for d in self._degree[n]]
        return min(degs) if degs else None

    def dims_table(self) -> dict:
        return {n: self.components[n].dims for n in range(self.arity_max + 1)}

    def __repr__(self) -> str:
        return f"GradedSequence({self.name or '?'}, dims={self.dims_table()})"


def concentrated_sequence(p: int, q: int, kind: str = "disk", arity_max: int | None = None) -> GradedSequence:
    """D^{p,q} (kind="disk") or S^{p,q} (kind="sphere"): the complex placed in arity q."""
    from .chain import disk_complex, sphere_complex
    if kind == "disk":
        comp = disk_complex(p)
    elif kind == "sphere":
        comp = sphere_complex(p)
    else:
        raise InvalidParameter(f"unknown kind {kind!r}")
    if q < 0:
        raise InvalidParameter("arity must be non-negative")
    top = q if arity_max is None else arity_max
    if top < q:
        raise InvalidParameter("arity_max below the concentration arity")
    return GradedSequence(top, {q: comp}, name=f"{'D' if kind == 'disk' else 'S'}^{{{p},{q}}}")


def underlying_sequence(o: FinOperad) -> GradedSequence:
    return GradedSequence(o.arity_max, o.components, name=f"U({o.name})")


@dataclass
class SequenceMorphism:
    source: GradedSequence
    target: GradedSequence
    maps: dict  # arity -> ChainMap

    def defects(self) -> list:
        return [n for n, f in self.maps.items() if f.chain_map_defects()]


def generating_cofibration(p: int, q: int) -> SequenceMorphism:
    """i^{p,q}: S^{p-1,q} -> D^{p,q}."""
    from .chain import sphere_inclusion
    s = concentrated_sequence(p - 1, q, "sphere")
    d = concentrated_sequence(p, q, "disk")
    return SequenceMorphism(s, d, {q: sphere_inclusion(p)})


def generating_acyclic_cofibration(p: int, q: int) -> SequenceMorphism:
    """j^{p,q}: 0 -> D^{p,q}."""
    from .chain import disk_unit
    d = concentrated_sequence(p, q, "disk")
    zero = GradedSequence(q, {})
    return SequenceMorphism(zero, d, {q: disk_unit(p)})


# ------------------------------------------------------------ token helpers

def subtree_end(tokens: Sequence, pos: int) -> int:
    """Index one past the subtree starting at ``pos``."""
    need = 1
    while need:
        tok = tokens[pos]
        need -= 1
        if tok is not None:
            need += tok[2]
        pos += 1
    return pos


def children_positions(tokens: Sequence, pos: int) -> list[int]:
    tok = tokens[pos]
    out = []
    cur = pos + 1
    for _ in range(tok[2]):
        out.append(cur)
        cur = subtree_end(tokens, cur)
    return out


def parents(tokens: Sequence) -> list:
    """Parent position of every token (None for the root)."""
    out = [None] * len(tokens)
    stack: list = []  # [position, remaining children]
    for p, tok in enumerate(tokens):
        if stack:
            out[p] = stack[-1][0]
            stack[-1][1] -= 1
            if stack[-1][1] == 0:
                stack.pop()
        if tok is not None and tok[2] > 0:
            stack.append([p, tok[2]])
    return out


def token_levels(tokens: Sequence) -> list[int]:
    par = parents(tokens)
    lev = [0] * len(tokens)
    for p in range(1, len(tokens)):
        lev[p] = lev[par[p]] + 1
    return lev


def tokens_arity(tokens) -> int:
    return sum(1 for t in tokens if t is None)


def shape_of(tokens):
    """Nested-tuple shape (trees module convention) of a token sequence."""
    def build(pos):
        tok = tokens[pos]
        if tok is None:
            return LEAF, pos + 1
        kids = []
        pos += 1
        for _ in range(tok[2]):
            kid, pos = build(pos)
            kids.append(kid)
        return tuple(kids), pos
    return build(0)[0]


def shape_tokens(shape) -> list:
    """Preorder list: None for leaves, In(v) for vertices."""
    out = []

    def walk(node):
        if node is LEAF:
            out.append(None)
            return
        out.append(len(node))
        for c in node:
            walk(c)
    walk(shape)
    return out


def shape_levels(shape) -> list[int]:
    out = []

    def walk(node, lev):
        out.append(lev)
        if node is not LEAF:
            for c in node:
                walk(c, lev + 1)
    walk(shape, 0)
    return out


class Labels:
    """Degree and differential of tokens, dispatched on token kind."""

    def __init__(self, sources: Mapping[str, object]):
        self.sources = dict(sources)

    def degree(self, tok) -> int:
        if tok is None:
            return 0
        kind, g, k = tok
        return self.sources[kind].degree(k, g)

    def tree_degree(self, tokens) -> int:
        return sum(self.degree(t) for t in tokens)

    def d_token(self, tok) -> dict:
        kind, g, k = tok
        return self.sources[kind].d(k, {g: Fraction(1)})


def leibniz(tokens: tuple, labels: Labels, special: Callable | None = None) -> dict:
    """Differential of a labelled tree, acting on one vertex label at a time.

    ``special(tokens, pos)`` may return a dict replacing the label action at
    ``pos`` (used for twisted differentials); the Koszul sign is applied here.
    """
    out: dict = {}
    acc = 0
    for p, tok in enumerate(tokens):
        if tok is None:
            continue
        s = _sign(acc)
        res = special(tokens, p) if special is not None else None
        if res is None:
            kind, g, k = tok
            for h, c in labels.d_token(tok).items():
                key = tokens[:p] + ((kind, h, k),) + tokens[p + 1:]
                out[key] = out.get(key, 0) + s * c
        else:
            for key, c in res.items():
                out[key] = out.get(key, 0) + s * c
        acc += labels.degree(tok)
    return {k: v for k, v in out.items() if v}


def graft(x: tuple, i: int, y: tuple, labels: Labels) -> tuple[int, tuple, int]:
    """Replace leaf i of x by the tree y; returns (sign, tokens, position of y's root)."""
    seen = 0
    for p, tok in enumerate(x):
        if tok is None:
            seen += 1
            if seen == i:
                after = sum(labels.degree(t) for t in x[p + 1:])
                return _sign(labels.tree_degree(y) * after), x[:p] + y + x[p + 1:], p
    raise IndexError(f"tree has no leaf {i}")


def merge_edge(tokens: tuple, pa: int, pb: int, o: FinOperad, labels: Labels) -> dict | None:
    """Merge the O-vertex at ``pb`` into its O-parent at ``pa`` via ∘_j.

    Returns None when the merged arity lies beyond the operad's truncation."""
    a, b = tokens[pa], tokens[pb]
    kids = children_positions(tokens, pa)
    j = kids.index(pb) + 1
    if not o.has_composition(a[2], b[2]):
        return None
    between = sum(labels.degree(t) for t in tokens[pa + 1:pb])
    s = _sign(labels.degree(b) * between)
    comp = o.compose(a[2], j, b[2], {a[1]: 1}, {b[1]: 1})
    k = a[2] + b[2] - 1
    rest = tokens[pa + 1:pb] + tokens[pb + 1:]
    out = {}
    for h, c in comp.items():
        out[tokens[:pa] + (("O", h, k),) + rest] = s * c
    return out


def first_even_edge(tokens: tuple, kind: str = "O") -> tuple[int, int] | None:
    par = parents(tokens)
    for p, tok in enumerate(tokens):
        if tok is not None and tok[0] == kind and par[p] is not None and tokens[par[p]][0] == kind:
            return par[p], p
    return None


def merge_all(vec: Mapping, o: FinOperad, labels: Labels) -> dict:
    """Merge adjacent O-vertices until none remain; drops terms beyond truncation."""
    out: dict = {}
    todo = list(vec.items())
    while todo:
        key, c = todo.pop()
        edge = first_even_edge(key)
        if edge is None:
            out[key] = out.get(key, 0) + c
            continue
        res = merge_edge(key, edge[0], edge[1], o, labels)
        if res:
            todo.extend((k, c * v) for k, v in res.items())
    return {k: v for k, v in out.items() if v}


# ------------------------------------------------------------ assembly

@dataclass
class TreeOperadData:
    """Basis bookkeeping shared by free operads and presentations."""
    keys: dict          # arity -> list of keys ordered by degree
    index: dict         # arity -> {key: global index}
    degrees: dict       # arity -> list of degrees


def _assemble(arity_max: int, keys_by_arity: Mapping[int, list], degree_fn: Callable, d_fn: Callable,
              unit: Mapping, label_fn: Callable, name: str, degree_max: int,
              compose_fn: Callable | None = None) -> FinOperad:
    keys, index, degrees, comps = {}, {}, {}, {}
    for n in range(arity_max + 1):
        ks = sorted(keys_by_arity.get(n, []), key=degree_fn)
        keys[n] = ks
        index[n] = {k: g for g, k in enumerate(ks)}
        degrees[n] = [degree_fn(k) for k in ks]
        top = max(degrees[n], default=0)
        dims = [0] * (top + 1)
        for dg in degrees[n]:
            dims[dg] += 1
        offs = [0]
        for x in dims:
            offs.append(offs[-1] + x)
        ents: dict = {k: {} for k in range(1, top + 1)}
        for g, key in enumerate(ks):
            dg = degrees[n][g]
            if dg == 0:
                continue
            for tgt, c in d_fn(key).items():
                h = index[n].get(tgt)
                if h is None:
                    raise NonFinite(f"differential leaves the enumerated basis at arity {n}")
                ents[dg][(h - offs[dg - 1], g - offs[dg])] = c
        diffs = {k: RationalMatrix(dims[k - 1], dims[k], ents[k]) for k in range(1, top + 1)}
        comps[n] = FinChainComplex(dims, diffs)
    table = {}
    if compose_fn is not None:
        for n in range(1, arity_max + 1):
            for m in range(0, arity_max + 2 - n):
                for i in range(1, n + 1):
                    entries = {}
                    for a, ka in enumerate(keys[n]):
                        for b, kb in enumerate(keys[m]):
                            if degrees[n][a] + degrees[m][b] > degree_max:
                                continue
                            res = compose_fn(ka, i, kb)
                            vec = {}
                            for k, c in res.items():
                                h = index[n + m - 1].get(k)
                                if h is not None and c:
                                    vec[h] = vec.get(h, 0) + c
                            vec = {h: c for h, c in vec.items() if c}
                            if vec:
                                entries[(a, b)] = vec
                    table[(n, i, m)] = entries
    unit_vec = {}
    for k, c in unit.items():
        unit_vec[index[1][k]] = c
    labels = {n: [label_fn(k) for k in keys[n]] for n in keys}
    op = FinOperad(arity_max, comps, unit_vec, table, labels, name=name, degree_max=degree_max)
    op.keys, op.key_index = keys, index
    return op


def tree_label(tokens, names: Mapping[str, Callable] | None = None) -> str:
    if tokens == UNIT:
        return "1"
    out = []

    def walk(pos):
        tok = tokens[pos]
        if tok is None:
            return "|", pos + 1
        kind, g, k = tok
        head = f"{kind}{k}.{g}"
        if names and kind in names:
            head = names[kind](k, g)
        parts = []
        pos += 1
        for _ in range(k):
            s, pos = walk(pos)
            parts.append(s)
        return head + ("(" + ",".join(parts) + ")" if parts else "()"), pos
    return walk(0)[0]


# ------------------------------------------------------------ free operad

def _label_assignments(shape, choices: Callable, labels: Labels, max_degree: int) -> list[tuple]:
    """Fill a shape's vertices with labels; ``choices(level, in_count)`` lists (kind, g)."""
    toks = shape_tokens(shape)
    levs = shape_levels(shape)
    out = []

    def rec(p, acc, deg):
        if p == len(toks):
            out.append(tuple(acc))
            return
        k = toks[p]
        if k is None:
            acc.append(None)
            rec(p + 1, acc, deg)
            acc.pop()
            return
        for kind, g in choices(levs[p], k):
            tok = (kind, g, k)
            dg = deg + labels.degree(tok)
            if dg > max_degree:
                continue
            acc.append(tok)
            rec(p + 1, acc, dg)
            acc.pop()
    rec(0, [], 0)
    return out


def free_operad(s: GradedSequence, arity_max: int | None = None, max_degree: int | None = None,
                max_vertices: int | None = None, with_compositions: bool = True) -> FinOperad:
    """ℱ(s) truncated at ``arity_max`` and ``max_degree``.

    The contributing trees are finite when s(0) and s(1) vanish or sit in
    positive degrees; otherwise ``max_vertices`` must be given.
    """
    arity_max = s.arity_max if arity_max is None else arity_max
    if max_degree is None:
        max_degree = max((c.max_degree for c in s.components.values()), default=0) * max(arity_max, 1)
    labels = Labels({"F": s})
    allowed = frozenset(s.nonzero_arities())
    low = [n for n in (0, 1) if n in allowed]
    lowdeg = s.min_degree(low) if low else None
    extra = None
    if not low:
        extra = 0
    elif lowdeg is not None and lowdeg >= 1:
        extra = max_degree // lowdeg
    if max_vertices is None and extra is None:
        raise NonFinite("s(0) or s(1) has degree-0 part; pass max_vertices")

    keys = {}
    for n in range(arity_max + 1):
        cap = max_vertices if max_vertices is not None else n + max(n - 1, 0) + 2 * extra + 1
        shapes = enumerate_shapes(n, TreeBounds(max_vertices=cap, in_counts=allowed)) if allowed else []
        ks = []
        for shape in shapes:
            ks.extend(_label_assignments(shape, lambda lev, k: [("F", g) for g in range(s.dim(k))],
                                         labels, max_degree))
        if n == 1:
            ks.append(UNIT)
        keys[n] = ks

    def degree(key):
        return 0 if key == UNIT else labels.tree_degree(key)

    def d(key):
        return {} if key == UNIT else leibniz(key, labels)

    def compose(x, i, y):
        if x == UNIT:
            return {y: 1}
        if y == UNIT:
            return {x: 1}
        sg, t, _ = graft(x, i, y, labels)
        return {t: sg}

    op = _assemble(arity_max, keys, degree, d, {UNIT: 1}, tree_label, f"F({s.name})", max_degree,
                   compose if with_compositions else None)
    op.sequence = s
    op.vanishes_above = False
    return op


def extend_to_free(F: FinOperad, o: FinOperad, gen_maps: Mapping[int, RationalMatrix]) -> OperadMorphism:
    """Operad map ℱ(s) -> o induced by sequence maps s(n) -> o(n) (columns = generators)."""
    s = F.sequence
    labels = Labels({"F": s})

    def value(tokens, pos):
        tok = tokens[pos]
        kind, g, k = tok
        cur = gen_maps[k].apply_sparse({g: Fraction(1)})
        cur_arity = k
        pos += 1
        slot = 1
        for _ in range(k):
            if tokens[pos] is None:
                slot += 1
                pos += 1
                continue
            sub, sub_arity, pos = value(tokens, pos)
            cur = o.compose(cur_arity, slot, sub_arity, cur, sub)
            cur_arity += sub_arity - 1
            slot += sub_arity
        return cur, cur_arity, pos

    maps = {}
    for n in range(min(F.arity_max, o.arity_max) + 1):
        cols = []
        for key in F.keys[n]:
            if key == UNIT:
                cols.append(dict(o.unit))
            else:
                cols.append(value(key, 0)[0])
        maps[n] = RationalMatrix.from_columns(cols, o.dim(n))
    return OperadMorphism(F, o, maps, check=False)


# ------------------------------------------------------------ presentations

@dataclass
class Presentation:
    """A pushout of o along a cell, presented on alternating odd trees."""
    operad: FinOperad
    inclusion: OperadMorphism
    base: FinOperad
    attach: GradedSequence
    q: int
    max_degree: int
    cell_min_degree: int | None
    twist: dict | None = None

    def odd_vertices(self, key) -> int:
        return sum(1 for t in key if t is not None and t[0] == "A")

    def certified(self, n: int, k: int) -> bool:
        """Whether the (arity n, degree k) cell is unaffected by the truncations."""
        if k > self.max_degree or n > self.operad.arity_max:
            return False
        if self.base.vanishes_above:
            return True
        if not self.cell_min_degree:
            return False
        return n + k // self.cell_min_degree <= self.base.arity_max

    def homology_certified(self, n: int, k: int) -> bool:
        return self.certified(n, k) and self.certified(n, k + 1)

    def dims(self) -> dict:
        return {(n, k): self.operad.components[n].dim(k)
                for n in range(self.operad.arity_max + 1) for k in range(self.max_degree + 1)}

    def homology(self) -> dict:
        out = {}
        for n in range(self.operad.arity_max + 1):
            hd = homology_dims(self.operad.components[n])
            for k in range(self.max_degree + 1):
                out[(n, k)] = hd[k] if k < len(hd) else 0
        return out

    def inclusion_quasi_iso(self) -> dict:
        """Per-arity verdicts of o -> P restricted to homology-certified degrees."""
        out = {}
        for n in range(self.inclusion.arity_max + 1):
            ks = [k for k in range(self.max_degree + 1) if self.homology_certified(n, k)]
            if not ks:
                continue
            w = max(ks)
            if any(k not in ks for k in range(w + 1)):
                w = next(k for k in range(w + 1) if k not in ks) - 1
            if w < 0:
                continue
            cm = self.inclusion.chain_map(n)
            out[n] = is_quasi_iso(cm, window=w)
        return out


def _presentation(o: FinOperad, attach: GradedSequence, q: int, arity_max: int, max_degree: int,
                  max_odd_vertices: int | None, twist: Mapping | None, with_compositions: bool,
                  name: str) -> Presentation:
    labels = Labels({"O": o, "A": attach})
    cell_min = attach.min_degree([q])
    if max_odd_vertices is None:
        if not cell_min:
            raise NonFinite("cell labels of degree 0 give infinitely many trees; pass max_odd_vertices")
        max_odd_vertices = max_degree // cell_min
    even = frozenset(n for n in range(o.arity_max + 1) if o.dim(n))

    keys = {}
    for n in range(arity_max + 1):
        cap = n + max_odd_vertices * (1 + q) + 1
        bounds = TreeBounds(max_vertices=cap, in_counts_even=even, in_counts_odd=frozenset({q}),
                            leaf_parity=1, max_odd_vertices=max_odd_vertices)

        def choices(lev, k):
            if lev % 2 == 0:
                return [("O", g) for g in range(o.dim(k))]
            return [("A", g) for g in range(attach.dim(k))]
        ks = []
        for shape in enumerate_shapes(n, bounds):
            ks.extend(_label_assignments(shape, choices, labels, max_degree))
        keys[n] = ks

    special = None
    if twist:
        tw = {g: frac(c) for g, c in twist.items() if c}

        def special(tokens, p):
            tok = tokens[p]
            if tok[0] != "A":
                return None
            # the top cell label goes to the attached element, spliced into the even layer
            res = {tokens[:p] + (("O", h, tok[2]),) + tokens[p + 1:]: c for h, c in tw.items()}
            return merge_all(res, o, labels)

    def d(key):
        return leibniz(key, labels, special)

    def compose(x, i, y):
        sg, t, p = graft(x, i, y, labels)
        par = parents(t)[p]
        res = merge_edge(t, par, p, o, labels)
        return {k: sg * c for k, c in res.items()} if res else {}

    unit = {(("O", g, 1), None): c for g, c in o.unit.items()}
    P = _assemble(arity_max, keys, labels.tree_degree, d, unit, tree_label, name, max_degree,
                  compose if with_compositions else None)
    if o.mu is not None and arity_max >= 2:
        P.mu = {P.key_index[2][(("O", g, 2), None, None)]: c for g, c in o.mu.items()}
    if o.basepoint is not None:
        P.basepoint = {P.key_index[0][(("O", g, 0),)]: c for g, c in o.basepoint.items()}
    maps = {}
    for n in range(min(arity_max, o.arity_max) + 1):
        ent = {}
        for g in range(o.dim(n)):
            key = (("O", g, n),) + (None,) * n
            ent[(P.key_index[n][key], g)] = 1
        maps[n] = RationalMatrix(P.dim(n), o.dim(n), ent)
    inc = OperadMorphism(o, P, maps, check=False)
    return Presentation(P, inc, o, attach, q, max_degree, cell_min, dict(twist) if twist else None)


def pushout_presentation(o: FinOperad, p: int, q: int, arity_max: int, max_degree: int,
                         max_odd_vertices: int | None = None, with_compositions: bool = False) -> Presentation:
    """o ⊔ ℱ(D^{p,q}) on odd trees: O-labels at even levels, disk labels at odd levels."""
    if p < 1:
        raise InvalidParameter("disk dimension p must be at least 1")
    attach = concentrated_sequence(p, q, "disk", max(q, arity_max))
    return _presentation(o, attach, q, arity_max, max_degree, max_odd_vertices, None, with_compositions,
                         f"{o.name}+D^{{{p},{q}}}")


def cofibration_pushout(o: FinOperad, g_iota: Mapping, p: int, q: int, arity_max: int, max_degree: int,
                        max_odd_vertices: int | None = None, with_compositions: bool = False) -> Presentation:
    """Pushout of o along ℱ(S^{p-1,q}) -> ℱ(D^{p,q}) attached by ι ↦ g_iota ∈ o(q)_{p-1}.

    The cell appears as S^{p,q} labels whose differential is g_iota spliced into the even layer."""
    if p < 1:
        raise InvalidParameter("sphere dimension p must be at least 1")
    g_iota = {g: frac(c) for g, c in g_iota.items() if c}
    if q > o.arity_max:
        raise InvalidParameter("attaching arity beyond the operad truncation")
    if g_iota:
        if o.element_degree(q, g_iota) != p - 1:
            raise DegreeMismatch(f"attaching element must have degree {p - 1}")
        if o.d(q, g_iota):
            raise NotACycle("attaching element must be a cycle")
    attach = concentrated_sequence(p, q, "sphere", max(q, arity_max))
    return _presentation(o, attach, q, arity_max, max_degree, max_odd_vertices, g_iota or None,
                         with_compositions, f"{o.name}+S^{{{p},{q}}}")


def pushout_map(f: OperadMorphism, P: Presentation, P2: Presentation) -> dict:
    """Arity-wise chain maps P -> P2 applying f to every even-level label."""
    out = {}
    for n in range(P.operad.arity_max + 1):
        cols = []
        for key in P.operad.keys[n]:
            vec = {(): Fraction(1)}
            for tok in key:
                new = {}
                if tok is None or tok[0] == "A":
                    for k, c in vec.items():
                        new[k + (tok,)] = c
                else:
                    img = f.apply(tok[2], {tok[1]: 1})
                    for k, c in vec.items():
                        for h, x in img.items():
                            new[k + (("O", h, tok[2]),)] = c * x
                vec = new
            col = {}
            for k, c in vec.items():
                h = P2.operad.key_index[n].get(k)
                if h is None:
                    raise NonFinite("image tree outside the target presentation")
                col[h] = col.get(h, 0) + c
            cols.append({h: c for h, c in col.items() if c})
        mat = RationalMatrix.from_columns(cols, P2.operad.dim(n))
        out[n] = _global_to_chain_map(P.operad, P2.operad, n, mat)
    return out


def _global_to_chain_map(s: FinOperad, t: FinOperad, n: int, mat: RationalMatrix) -> ChainMap:
    ent_by_k: dict = {}
    for (r, c), x in mat.entries().items():
        k, lc = s.local_index(n, c)
        _, lr = t.local_index(n, r)
        ent_by_k.setdefault(k, {})[(lr, lc)] = x
    sc, tc = s.components[n], t.components[n]
    comps = {k: RationalMatrix(tc.dim(k), sc.dim(k), ent_by_k.get(k, {}))
             for k in range(max(sc.max_degree, tc.max_degree) + 1)}
    return ChainMap(sc, tc, comps, check=False)


def filtration_layers(P: Presentation) -> list[dict]:
    """F^l: per arity, the global indices of trees with at most l odd-level vertices."""
    top = max((P.odd_vertices(k) for n in P.operad.keys for k in P.operad.keys[n]), default=0)
    out = []
    for l in range(top + 1):
        out.append({n: [g for g, k in enumerate(P.operad.keys[n]) if P.odd_vertices(k) <= l]
                    for n in P.operad.keys})
    return out


def filtration_is_closed(P: Presentation, layers: list[dict]) -> bool:
    for layer in layers:
        for n, idx in layer.items():
            allowed = set(idx)
            for g in idx:
                if not set(P.operad.d(n, {g: 1})) <= allowed:
                    return False
    return True


# ------------------------------------------------------------ oracle

@dataclass
class OracleResult:
    dims: dict = field(default_factory=dict)       # (n, k) -> dim of the quotient
    homology: dict = field(default_factory=dict)   # (n, k) -> homology dim
    raw_dims: dict = field(default_factory=dict)   # (n, k) -> free trees before quotient
    cap: int = 0


def _oracle_keys(o: FinOperad, attach: GradedSequence, n: int, k: int, cap: int) -> list:
    """Trees on o-labels and attach-labels of arity n, degree k and weight <= cap.

    Weight = vertices + attach->attach edges + attach->leaf edges + [attach root];
    merging lowers it, inserting a unit where a cell needs one keeps it fixed."""
    labels = Labels({"O": o, "A": attach})
    o_ar = [m for m in range(o.arity_max + 1) if o.dim(m)]
    a_ar = [m for m in range(attach.arity_max + 1) if attach.dim(m)]
    memo: dict = {}

    def sub(leaves, budget, deg, parent_attach):
        """Subtrees hanging below a parent; returns list of (tokens, weight, degree)."""
        key = (leaves, budget, deg, parent_attach)
        if key in memo:
            return memo[key]
        out = []
        if leaves == 1 and (not parent_attach or budget >= 1):
            out.append(((None,), 1 if parent_attach else 0, 0))
        if budget >= 1:
            for kind, arities, src in (("O", o_ar, o), ("A", a_ar, attach)):
                own = 1 + (1 if kind == "A" and parent_attach else 0)
                if own > budget:
                    continue
                for m in arities:
                    for g in range(src.dim(m)):
                        dg = src.degree(m, g)
                        if dg > deg:
                            continue
                        for kids, w, kd in forest(m, leaves, budget - own, deg - dg, kind == "A"):
                            out.append(((((kind, g, m),) + kids), w + own, kd + dg))
        memo[key] = out
        return out

    fmemo: dict = {}

    def forest(count, leaves, budget, deg, parent_attach):
        key = (count, leaves, budget, deg, parent_attach)
        if key in fmemo:
            return fmemo[key]
        if count == 0:
            res = [((), 0, 0)] if leaves == 0 else []
            fmemo[key] = res
            return res
        res = []
        for a in range(leaves + 1):
            for t1, w1, d1 in sub(a, budget, deg, parent_attach):
                for t2, w2, d2 in forest(count - 1, leaves - a, budget - w1, deg - d1, parent_attach):
                    res.append((t1 + t2, w1 + w2, d1 + d2))
        fmemo[key] = res
        return res

    keys = []
    for kind, arities, src in (("O", o_ar, o), ("A", a_ar, attach)):
        own = 1 + (1 if kind == "A" else 0)
        for m in arities:
            for g in range(src.dim(m)):
                dg = src.degree(m, g)
                if dg > k or own > cap:
                    continue
                for kids, w, kd in forest(m, n, cap - own, k - dg, kind == "A"):
                    if kd + dg == k:
                        keys.append((w + own, ((kind, g, m),) + kids))
    if n == 1 and k == 0:
        keys.append((1, UNIT))
    # heaviest trees first: every relation then pivots on its heaviest term
    keys.sort(key=lambda t: t[0])
    return [key for _, key in keys]


def skeleton(key) -> tuple:
    """Tree left after contracting every o-vertex; relations never change it."""
    if key == UNIT:
        return ("L",)

    def walk(pos):
        tok = key[pos]
        if tok is None:
            return ["L"], pos + 1
        kids = []
        pos += 1
        for _ in range(tok[2]):
            sub, pos = walk(pos)
            kids.extend(sub)
        if tok[0] == "O":
            return kids, pos
        return [("A", tuple(kids))], pos
    return tuple(walk(0)[0])


def pushout_oracle(o: FinOperad, attach: GradedSequence, arity_max: int, max_degree: int, cap,
                   twist: Mapping | None = None, cells: Iterable[tuple[int, int]] | None = None,
                   with_homology: bool = True) -> OracleResult:
    """Quotient of the free operad on U(o) ⊕ attach by the composition relations of o.

    Free trees are capped by weight (``cap`` is an int or a function of the
    cell); the relations are merges of adjacent o-vertices, the formal unit
    against the unit corolla, and unit insertions next to attached vertices.
    ``twist`` (an element of o(q)) makes the differential of the attached
    label equal to that element placed as an o-vertex (cofibration pushouts).
    Dimensions come from exact ranks of the relation span, and homology from
    the induced differential on the quotient (one cap per arity then).
    """
    labels = Labels({"O": o, "A": attach})
    unit_tokens = [(("O", g, 1), c) for g, c in o.unit.items()]
    tw = {g: frac(c) for g, c in (twist or {}).items() if c}
    cap_of = cap if callable(cap) else (lambda n, k: cap)

    def relations(key):
        if key == UNIT:
            v = {UNIT: Fraction(1)}
            for tok, c in unit_tokens:
                v[(tok, None)] = v.get((tok, None), 0) - c
            return [v]
        rels = []
        par = parents(key)
        for pb, tok in enumerate(key):
            pa = par[pb]
            if tok is not None and tok[0] == "O" and pa is not None and key[pa][0] == "O":
                res = merge_edge(key, pa, pb, o, labels)
                if res is None:
                    continue
                v = {key: Fraction(1)}
                for k2, c in res.items():
                    v[k2] = v.get(k2, 0) - c
                rels.append(v)
        # unit insertion where an attached vertex meets a leaf, another attached vertex, or the root
        for pb, tok in enumerate(key):
            pa = par[pb]
            if pa is None:
                need = tok[0] == "A"
            else:
                need = key[pa][0] == "A" and (tok is None or tok[0] == "A")
            if not need:
                continue
            end = subtree_end(key, pb)
            v = {key: Fraction(-1)}
            for ut, c in unit_tokens:
                k2 = key[:pb] + (ut,) + key[pb:]
                v[k2] = v.get(k2, 0) + c
            rels.append(v)
        return rels

    def special(tokens, p):
        tok = tokens[p]
        if tok[0] != "A" or labels.degree(tok) == 0 or attach.d(tok[2], {tok[1]: 1}):
            return None
        return {tokens[:p] + (("O", h, tok[2]),) + tokens[p + 1:]: c for h, c in tw.items()}

    def d(key):
        return {} if key == UNIT else leibniz(key, labels, special if tw else None)

    def blocks_for(n, k, c):
        """{skeleton: (keys, index, span of relations)} for one cell."""
        keys = _oracle_keys(o, attach, n, k, c)
        groups: dict = {}
        for key in keys:
            groups.setdefault(skeleton(key) if not tw else None, []).append(key)
        out = {}
        for sk, ks in groups.items():
            idx = {key: j for j, key in enumerate(ks)}
            span = Span(len(ks))
            for key in ks:
                for rel in relations(key):
                    if all(t in idx for t in rel):
                        span.add({idx[t]: x for t, x in rel.items() if x})
                    elif not tw and any(skeleton(t) != sk for t in rel):
                        raise AssertionError("relation changed the skeleton")
            out[sk] = (ks, idx, span)
        return out, len(keys)

    want = set(cells) if cells is not None else {(n, k) for n in range(arity_max + 1)
                                                   for k in range(max_degree + 1)}
    res = OracleResult(cap=cap if not callable(cap) else -1)
    for n in sorted({n for n, _ in want}):
        degs = sorted(k for m, k in want if m == n)
        need = set(degs)
        if with_homology:
            need |= {k + 1 for k in degs} | {k - 1 for k in degs if k > 0}
        uniform = cap_of(n, max(need)) if with_homology else None
        cellblocks = {}
        for k in sorted(need):
            blocks, raw = blocks_for(n, k, uniform if with_homology else cap_of(n, k))
            cellblocks[k] = blocks
            res.raw_dims[(n, k)] = raw
            if k in degs or with_homology:
                res.dims[(n, k)] = sum(len(ks) - sp.rank for ks, _, sp in blocks.values())
        if not with_homology:
            for k in list(res.dims):
                if k[0] == n and k[1] not in degs:
                    del res.dims[k]
            continue
        ranks = {}
        for k in sorted(need):
            if k - 1 not in cellblocks:
                continue
            total = 0
            lower = cellblocks[k - 1]
            for sk, (ks, _, _) in cellblocks[k].items():
                lks, lidx, lspan = lower.get(sk, ([], {}, Span(0)))
                span = lspan.copy()
                before = span.rank
                for key in ks:
                    img = d(key)
                    if any(t not in lidx for t in img):
                        raise NonFinite("differential leaves the capped basis")
                    span.add({lidx[t]: x for t, x in img.items()})
                total += span.rank - before
            ranks[k] = total
        for k in degs:
            res.homology[(n, k)] = res.dims[(n, k)] - ranks.get(k, 0) - ranks.get(k + 1, 0)
        for k in list(res.dims):
            if k[0] == n and k[1] not in degs:
                del res.dims[k]
    return res


def oracle_cap(P: Presentation, n: int, k: int) -> int:
    """Largest weight of a presentation tree in the (n, k) cell."""
    keys = [key for key in P.operad.keys[n] if P.operad.degree(n, P.operad.key_index[n][key]) == k]
    return max((len(key) - tokens_arity(key) for key in keys), default=1)
