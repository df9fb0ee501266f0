"""Planar rooted trees with ordered leaves and null (input-free) vertices.

A tree *shape* is a nested tuple: ``None`` is a leaf, a tuple is a labelled
vertex whose entries are its ordered children.  ``()`` is a null vertex.
The root is always a vertex (never a bare leaf); the formal unit of a free
operad is kept separately.  Leaves are numbered 1..n left to right.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

LEAF = None


@dataclass(frozen=True)
class VertexClassification:
    in_counts: dict  # vertex id -> In(v) (None for leaves)
    levels: dict     # vertex id -> level (root level 0)
    vin: frozenset
    vin0: frozenset
    vin1: frozenset


class PlanarTree:
    """Vertices are numbered in preorder; leaves get labels 1..n left to right."""

    __slots__ = ("shape", "parent", "children", "level", "leaf_label", "_kind")

    def __init__(self, shape):
        if shape is LEAF or not isinstance(shape, tuple):
            raise ValueError("the root must be a vertex")
        self.shape = shape
        self.parent: list = []
        self.children: list = []
        self.level: list = []
        self.leaf_label: dict = {}
        self._kind: list = []
        self._walk(shape, None, 0)

    def _walk(self, node, parent, level):
        vid = len(self.parent)
        self.parent.append(parent)
        self.children.append([])
        self.level.append(level)
        if parent is not None:
            self.children[parent].append(vid)
        if node is LEAF:
            self.leaf_label[vid] = len(self.leaf_label) + 1
            self._kind.append("leaf")
            return
        self._kind.append("root" if parent is None else ("null" if not node else "internal"))
        for child in node:
            self._walk(child, vid, level + 1)

    @property
    def arity(self) -> int:
        return len(self.leaf_label)

    @property
    def num_vertices(self) -> int:
        return len(self.parent)

    def kind(self, v: int) -> str:
        return self._kind[v]

    def internal_vertices(self) -> list[int]:
        """Labelled vertices (everything except leaves), in preorder."""
        return [v for v, k in enumerate(self._kind) if k != "leaf"]

    def leaves(self) -> list[int]:
        return sorted(self.leaf_label, key=self.leaf_label.get)

    def in_count(self, v: int) -> int | None:
        return None if self._kind[v] == "leaf" else len(self.children[v])

    def encode(self) -> str:
        return encode(self.shape)

    def __eq__(self, other) -> bool:
        return isinstance(other, PlanarTree) and self.shape == other.shape

    def __hash__(self) -> int:
        return hash(self.shape)

    def __repr__(self) -> str:
        return f"PlanarTree({self.encode()})"


def classify(t: PlanarTree) -> VertexClassification:
    ins = {v: t.in_count(v) for v in range(t.num_vertices)}
    levels = {v: t.level[v] for v in range(t.num_vertices)}
    vin = frozenset(t.internal_vertices())
    vin0 = frozenset(v for v in vin if levels[v] % 2 == 0)
    return VertexClassification(ins, levels, vin, vin0, vin - vin0)


def is_odd(shape) -> bool:
    """Every leaf at odd level."""
    def walk(node, level):
        if node is LEAF:
            return level % 2 == 1
        return all(walk(c, level + 1) for c in node)
    return walk(shape, 0)


def arity_of(shape) -> int:
    if shape is LEAF:
        return 1
    return sum(arity_of(c) for c in shape)


def size_of(shape) -> int:
    if shape is LEAF:
        return 1
    return 1 + sum(size_of(c) for c in shape)


def internal_count(shape) -> int:
    if shape is LEAF:
        return 0
    return 1 + sum(internal_count(c) for c in shape)


# ----------------------------------------------------------- text encoding

def encode(shape) -> str:
    counter = [0]

    def enc(node):
        if node is LEAF:
            counter[0] += 1
            return str(counter[0])
        return "(" + ",".join(enc(c) for c in node) + ")"
    return enc(shape)


def decode(text: str):
    """Inverse of :func:`encode`; leaf labels must read 1..n left to right."""
    pos = 0
    seen = [0]
    text = text.replace(" ", "")

    def parse():
        nonlocal pos
        if text[pos] == "(":
            pos += 1
            kids = []
            if text[pos] == ")":
                pos += 1
                return ()
            while True:
                kids.append(parse())
                if text[pos] == ",":
                    pos += 1
                    continue
                if text[pos] == ")":
                    pos += 1
                    return tuple(kids)
                raise ValueError(f"unexpected {text[pos]!r} at {pos}")
        start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if start == pos:
            raise ValueError(f"expected a leaf label at {pos}")
        label = int(text[start:pos])
        seen[0] += 1
        if label != seen[0]:
            raise ValueError(f"leaf labels must increase 1,2,...; got {label}")
        return LEAF

    shape = parse()
    if pos != len(text) or shape is LEAF:
        raise ValueError("trailing characters or bare leaf")
    return shape


# ------------------------------------------------------------- enumeration

@dataclass(frozen=True)
class TreeBounds:
    """Resource bounds for tree enumeration.

    ``in_counts`` restricts In(v) of every labelled vertex; ``in_counts_even``
    and ``in_counts_odd`` restrict by level parity and override it.
    ``leaf_parity`` forces leaves onto levels of that parity (1 = odd trees).
    """
    max_vertices: int | None = None
    in_counts: frozenset | None = None
    in_counts_even: frozenset | None = None
    in_counts_odd: frozenset | None = None
    leaf_parity: int | None = None
    max_odd_vertices: int | None = None

    def allowed(self, parity: int, top: int) -> list[int]:
        spec = self.in_counts_even if parity == 0 else self.in_counts_odd
        if spec is None:
            spec = self.in_counts
        if spec is None:
            return list(range(top + 1))
        return sorted(c for c in spec if c <= top)

    def effective_max_vertices(self, n: int) -> int:
        if self.max_vertices is not None:
            return self.max_vertices
        specs = [self.in_counts_even if self.in_counts_even is not None else self.in_counts,
                 self.in_counts_odd if self.in_counts_odd is not None else self.in_counts]
        if all(sp is not None and min(sp, default=2) >= 2 for sp in specs):
            # at most n-1 vertices, each of In >= 2, plus n leaves
            return 2 * n - 1 if n else 1
        raise ValueError("unbounded tree family: give max_vertices or restrict In(v) to >= 2")


def _enumerate(n: int, bounds: TreeBounds) -> list:
    budget = bounds.effective_max_vertices(n)
    max_odd = bounds.max_odd_vertices

    @lru_cache(maxsize=None)
    def vertex(leaves: int, budget: int, parity: int, odd_budget) -> tuple:
        """Subtrees rooted at a labelled vertex at a level of the given parity.

        Returns tuples (shape, size, odd_used)."""
        if budget < 1:
            return ()
        own_odd = 1 if parity == 1 else 0
        if odd_budget is not None and own_odd > odd_budget:
            return ()
        rest_odd = None if odd_budget is None else odd_budget - own_odd
        out = []
        for c in bounds.allowed(parity, budget - 1):
            for kids, size, odd in forest(c, leaves, budget - 1, 1 - parity, rest_odd):
                out.append((kids, size + 1, odd + own_odd))
        return tuple(out)

    @lru_cache(maxsize=None)
    def child(leaves: int, budget: int, parity: int, odd_budget) -> tuple:
        out = []
        if leaves == 1 and budget >= 1 and (bounds.leaf_parity is None or bounds.leaf_parity == parity):
            out.append((LEAF, 1, 0))
        out.extend(vertex(leaves, budget, parity, odd_budget))
        return tuple(out)

    @lru_cache(maxsize=None)
    def forest(count: int, leaves: int, budget: int, parity: int, odd_budget) -> tuple:
        if count == 0:
            return (((), 0, 0),) if leaves == 0 else ()
        if budget < count:
            return ()
        out = []
        for first_leaves in range(leaves + 1):
            for shape, size, odd in child(first_leaves, budget - (count - 1), parity, odd_budget):
                rest_odd = None if odd_budget is None else odd_budget - odd
                for kids, s2, o2 in forest(count - 1, leaves - first_leaves, budget - size, parity, rest_odd):
                    out.append(((shape,) + kids, size + s2, odd + o2))
        return tuple(out)

    return [shape for shape, _, _ in vertex(n, budget, 0, max_odd)]


def enumerate_trees(n: int, bounds: TreeBounds | None = None, **kw) -> Iterator[PlanarTree]:
    bounds = bounds or TreeBounds(**kw)
    for shape in _enumerate(n, bounds):
        yield PlanarTree(shape)


def enumerate_odd_trees(n: int, bounds: TreeBounds | None = None, **kw) -> Iterator[PlanarTree]:
    bounds = bounds or TreeBounds(**kw)
    b = TreeBounds(bounds.max_vertices, bounds.in_counts, bounds.in_counts_even, bounds.in_counts_odd, 1,
                   bounds.max_odd_vertices)
    for shape in _enumerate(n, b):
        yield PlanarTree(shape)


def enumerate_shapes(n: int, bounds: TreeBounds) -> list:
    return _enumerate(n, bounds)


def count_trees(n: int, bounds: TreeBounds) -> int:
    """Number of trees within bounds, by a counting recursion (no materialization)."""
    budget = bounds.effective_max_vertices(n)

    @lru_cache(maxsize=None)
    def vertex(leaves, budget, parity):
        # counts indexed by exact size
        out = {}
        if budget < 1:
            return out
        for c in bounds.allowed(parity, budget - 1):
            for size, cnt in forest(c, leaves, budget - 1, 1 - parity).items():
                out[size + 1] = out.get(size + 1, 0) + cnt
        return out

    @lru_cache(maxsize=None)
    def child(leaves, budget, parity):
        out = dict(vertex(leaves, budget, parity))
        if leaves == 1 and budget >= 1 and (bounds.leaf_parity is None or bounds.leaf_parity == parity):
            out[1] = out.get(1, 0) + 1
        return out

    @lru_cache(maxsize=None)
    def forest(count, leaves, budget, parity):
        if count == 0:
            return {0: 1} if leaves == 0 else {}
        out = {}
        for a in range(leaves + 1):
            for s1, c1 in child(a, budget, parity).items():
                for s2, c2 in forest(count - 1, leaves - a, budget - s1, parity).items():
                    out[s1 + s2] = out.get(s1 + s2, 0) + c1 * c2
        return out

    if bounds.max_odd_vertices is not None:
        return len(_enumerate(n, bounds))
    return sum(vertex(n, budget, 0).values())


def catalan(k: int) -> int:
    from math import comb
    return comb(2 * k, k) // (k + 1)
