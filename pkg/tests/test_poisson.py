import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nsoperad.operad import check_multiplicative, check_operad_axioms, homology_operad
from nsoperad.poisson import (Bracket, IndexOutOfRange, Letter, NonMultilinear, Product, compose, element_of,
                              normal_monomials, normalize, parse_expression, poincare_coefficients,
                              poisson_operad, vector_of)


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def partition_oracle(n, m):
    """Degree -> count, from set partitions weighted by (|B|-1)! bracket words per block."""
    out = {}
    for part in set_partitions(list(range(1, n + 1))):
        deg = m * (n - len(part))
        out[deg] = out.get(deg, 0) + math.prod(math.factorial(len(b) - 1) for b in part)
    return out


def product_polynomial(n, m):
    """Coefficients of prod_{i<n} (1 + i t^m)."""
    poly = {0: 1}
    for i in range(1, n):
        nxt = {}
        for k, c in poly.items():
            nxt[k] = nxt.get(k, 0) + c
            nxt[k + m] = nxt.get(k + m, 0) + i * c
        poly = nxt
    return poly


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("n", range(0, 7))
def test_dimensions_match_oracles(n, d):
    m = d - 1
    o = poisson_operad(d, max(n, 1))
    dims = {k: o.components[n].dim(k) for k in range(o.components[n].max_degree + 1)}
    dims = {k: v for k, v in dims.items() if v}
    assert dims == partition_oracle(n, m) == product_polynomial(n, m)
    assert sum(dims.values()) == math.factorial(n)
    assert {k: v for k, v in poincare_coefficients(n, m).items() if v} == dims
    assert len(normal_monomials(n)) == math.factorial(n)


@pytest.mark.parametrize("d", [3, 4])
def test_arity_two_basis(d):
    o = poisson_operad(d, 2)
    assert o.dim(2) == 2
    assert [o.degree(2, g) for g in range(2)] == [0, d - 1]


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("convention", ["infix", "prefix"])
def test_axioms_and_multiplicative(d, convention):
    o = poisson_operad(d, 4, convention=convention)
    assert check_operad_axioms(o).valid
    assert check_multiplicative(o).valid
    assert o.is_zero_differential()


def test_homology_is_fixed_point():
    o = poisson_operad(3, 4)
    h = homology_operad(o).operad
    assert h.dims_table() == o.dims_table()
    assert h.table == o.table


@pytest.mark.parametrize("m", [1, 2, 3])
def test_symmetry_example(m):
    sign = -((-1) ** (m * m))
    assert normalize("[x2,x1]", m) == sign * normalize("[x1,x2]", m)


@pytest.mark.parametrize("m", [1, 2])
def test_leibniz_example(m):
    got = normalize("[x1,x2x3]", m)
    # |x1| = |x2| = 0, so the second sign is (-1)^{(0+m)*0} = +1
    assert got == normalize("[x1,x2]x3", m) + normalize("x2[x1,x3]", m)


def test_non_multilinear_refused():
    with pytest.raises(NonMultilinear):
        normalize("[x1,x1]", 2)
    with pytest.raises(NonMultilinear):
        normalize("[x1,x3]", 2)


def test_compose_examples():
    m = 2
    mu = normalize("x1x2", m)
    br = normalize("[x1,x2]", m)
    assert compose(mu, 1, mu) == compose(mu, 2, mu)
    lhs = compose(br, 1, mu)
    assert len(lhs.terms) == 2
    assert lhs == normalize("[x1x2,x3]", m)
    with pytest.raises(IndexOutOfRange):
        compose(mu, 3, mu)


# random expression trees over a set of letters, with their bracket count
def expressions(letters):
    if len(letters) == 1:
        return st.just((Letter(letters[0]), 0))

    @st.composite
    def split(draw):
        k = draw(st.integers(1, len(letters) - 1))
        perm = draw(st.permutations(letters))
        left = draw(expressions(tuple(perm[:k])))
        right = draw(expressions(tuple(perm[k:])))
        if draw(st.booleans()):
            return Bracket(left[0], right[0]), left[1] + right[1] + 1
        return Product(left[0], right[0]), left[1] + right[1]
    return split()


def _sign(k):
    return -1 if k % 2 else 1


@st.composite
def three_parts(draw, n_max=6):
    n = draw(st.integers(3, n_max))
    perm = draw(st.permutations(range(1, n + 1)))
    i = draw(st.integers(1, n - 2))
    j = draw(st.integers(i + 1, n - 1))
    a = draw(expressions(tuple(perm[:i])))
    b = draw(expressions(tuple(perm[i:j])))
    c = draw(expressions(tuple(perm[j:])))
    return a, b, c


@given(three_parts(), st.sampled_from([1, 2, 3]))
def test_rewriting_is_order_independent(parts, m):
    (a, ba), (b, bb), (c, bc) = parts
    da, db = m * ba, m * bb
    # bracket symmetry and product commutativity (times c to use every letter)
    assert normalize(Product(Bracket(a, b), c), m) == \
        -_sign((da + m) * (db + m)) * normalize(Product(Bracket(b, a), c), m)
    assert normalize(Product(Product(a, b), c), m) == _sign(da * db) * normalize(Product(Product(b, a), c), m)
    # Leibniz in the right slot, then in the left slot via symmetry
    lhs = normalize(Bracket(a, Product(b, c)), m)
    rhs = normalize(Product(Bracket(a, b), c), m) + _sign((da + m) * db) * normalize(Product(b, Bracket(a, c)), m)
    assert lhs == rhs
    # product associativity
    assert normalize(Product(Product(a, b), c), m) == normalize(Product(a, Product(b, c)), m)


@given(three_parts(), st.sampled_from([1, 2, 3]))
def test_graded_jacobi_closes(parts, m):
    (a, ba), (b, bb), (c, bc) = parts
    sa, sb, sc = m * ba + m, m * bb + m, m * bc + m
    total = (_sign(sa * sc) * normalize(Bracket(Bracket(a, b), c), m)
             + _sign(sb * sa) * normalize(Bracket(Bracket(b, c), a), m)
             + _sign(sc * sb) * normalize(Bracket(Bracket(c, a), b), m))
    assert total.is_zero()


def test_element_vector_round_trip():
    o = poisson_operad(3, 4)
    for g in range(o.dim(4)):
        e = element_of(o, 4, {g: 1})
        assert vector_of(o, e) == {g: Fraction(1)}


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_expression("[x1,,x2]")
