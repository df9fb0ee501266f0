import pytest
from hypothesis import given, strategies as st

from nsoperad.trees import (PlanarTree, TreeBounds, arity_of, catalan, classify, count_trees, decode, encode,
                            enumerate_odd_trees, enumerate_trees, is_odd)

# little Schröder numbers: planar trees with every vertex of In >= 2
SCHROEDER = {2: 1, 3: 3, 4: 11, 5: 45, 6: 197}


def brute_shapes(size):
    """All shapes with exactly ``size`` nodes (leaves included); a root must be a vertex."""
    out = {}
    forests = {0: [()]}
    for s in range(1, size + 1):
        out[s] = ([None] if s == 1 else []) + list(forests[s - 1])
        forests[s] = [(head,) + tail for first in range(1, s + 1)
                      for head in out[first] for tail in forests[s - first]]
    return {s: [t for t in out[s] if t is not None] for s in out}


def leaf_levels(shape, level=0):
    if shape is None:
        return [level]
    return [x for c in shape for x in leaf_levels(c, level + 1)]


def in_counts(shape, level=0):
    if shape is None:
        return []
    return [(level, len(shape))] + [x for c in shape for x in in_counts(c, level + 1)]


@pytest.mark.parametrize("n", range(2, 8))
def test_binary_trees_are_catalan(n):
    b = TreeBounds(in_counts=frozenset({2}))
    assert count_trees(n, b) == catalan(n - 1)
    assert len(list(enumerate_trees(n, b))) == catalan(n - 1)


@pytest.mark.parametrize("n,expected", sorted(SCHROEDER.items()))
def test_reduced_trees_are_schroeder(n, expected):
    assert count_trees(n, TreeBounds(in_counts=frozenset(range(2, n + 1)))) == expected


@pytest.mark.parametrize("cap", range(1, 8))
def test_enumeration_matches_brute_force(cap):
    shapes = [s for size in range(1, cap + 1) for s in brute_shapes(cap)[size]]
    for n in range(0, 4):
        got = sorted(map(encode, (t.shape for t in enumerate_trees(n, max_vertices=cap))))
        want = sorted(encode(s) for s in shapes if arity_of(s) == n)
        assert got == want
        assert count_trees(n, TreeBounds(max_vertices=cap)) == len(want)


@pytest.mark.parametrize("cap", [4, 6, 8])
def test_odd_trees_match_filtered_brute_force(cap):
    even, odd = frozenset({0, 2}), frozenset({1, 2})
    shapes = [s for size in range(1, cap + 1) for s in brute_shapes(cap)[size]]
    for n in range(0, 4):
        want = sorted(encode(s) for s in shapes if arity_of(s) == n
                      and all(lv % 2 == 1 for lv in leaf_levels(s))
                      and all(k in (even if lv % 2 == 0 else odd) for lv, k in in_counts(s)))
        got = sorted(t.encode() for t in enumerate_odd_trees(n, in_counts_even=even, in_counts_odd=odd,
                                                            max_vertices=cap))
        assert got == want
        assert all(is_odd(decode(x)) for x in got)


shapes = st.recursive(st.just(None), lambda kids: st.lists(kids, max_size=3).map(tuple), max_leaves=8)


@given(shapes.filter(lambda s: s is not None))
def test_encode_decode_round_trip(shape):
    assert decode(encode(shape)) == shape
    t = PlanarTree(shape)
    assert t.arity == arity_of(shape) == len(leaf_levels(shape))
    c = classify(t)
    assert c.vin0 | c.vin1 == c.vin
    assert all(c.levels[v] % 2 == 0 for v in c.vin0)
    assert [t.leaf_label[v] for v in t.leaves()] == list(range(1, t.arity + 1))


def test_root_must_be_vertex():
    with pytest.raises(ValueError):
        PlanarTree(None)


def test_unbounded_family_refused():
    with pytest.raises(ValueError):
        count_trees(2, TreeBounds(in_counts=frozenset({1, 2})))
