from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import fraction_rank
from nsoperad.exactla import (ContainmentViolation, RationalMatrix, Span, image_basis, kernel_basis, rank,
                              solve, subquotient)

entry = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def matrices(draw, max_dim=6):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    sparse = draw(st.booleans())
    cell = st.one_of(st.just(Fraction(0)), entry) if sparse else entry
    return RationalMatrix.from_dense([[draw(cell) for _ in range(c)] for _ in range(r)])


@given(matrices())
def test_rank_matches_fraction_elimination(m):
    assert rank(m) == fraction_rank(m.to_dense())


@given(matrices())
def test_rank_nullity(m):
    ker = kernel_basis(m)
    assert len(ker) + rank(m) == m.cols
    for v in ker:
        assert not any(m.apply(v))


@given(matrices())
def test_image_basis_spans_columns(m):
    img = image_basis(m)
    assert len(img) == rank(m)
    s = Span(m.rows)
    for v in img:
        s.add(v)
    assert all(s.contains(col) for col in m.column_dicts())


@given(matrices(), st.data())
def test_solve_finds_preimage_of_image_vectors(m, data):
    x = [data.draw(entry) for _ in range(m.cols)]
    b = m.apply(x)
    y = solve(m, b)
    assert y is not None and m.apply(y) == b


def test_solve_rejects_vector_outside_image():
    m = RationalMatrix.from_dense([[1, 0], [0, 0]])
    assert solve(m, [0, 1]) is None


@given(matrices(4), matrices(4))
def test_matmul_associates_with_apply(a, b):
    if a.cols != b.rows:
        return
    v = [Fraction(i + 1, 3) for i in range(b.cols)]
    assert (a @ b).apply(v) == a.apply(b.apply(v))


def test_tracked_span_coordinates():
    s = Span(3, track=True)
    assert s.add({0: 1, 1: 1})
    assert s.add({1: 2, 2: 1})
    assert not s.add({0: 1, 1: 3, 2: 1})
    assert s.coordinates({0: 2, 1: 4, 2: 1}) == {0: Fraction(2), 1: Fraction(1)}
    assert s.coordinates({2: 1, 0: 5}) is None


def test_untracked_span_refuses_coordinates():
    with pytest.raises(RuntimeError):
        Span(2).coordinates({0: 1})


def test_subquotient_dimension_and_classes():
    cycles = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    boundaries = [(1, 1, 0)]
    q = subquotient(cycles, boundaries)
    assert q.dim == 2
    assert q.is_boundary((2, 2, 0))
    assert not q.is_boundary((1, 0, 0))
    # (1,0,0) and (0,-1,0) differ by a boundary
    assert q.coordinates((1, 0, 0)) == tuple(-x for x in q.coordinates((0, 1, 0)))


def test_subquotient_rejects_noncycle():
    q = subquotient([(1, 0)], [], 2)
    with pytest.raises(ContainmentViolation):
        q.coordinates((0, 1))


def test_large_integer_entries_stay_exact():
    big = 10 ** 30
    m = RationalMatrix.from_dense([[big, big + 1], [big - 1, big]])
    assert rank(m) == 2
    m2 = RationalMatrix.from_dense([[Fraction(1, big), 1], [1, big]])
    assert rank(m2) == 1
