import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from nsoperad.hochschild import (HochschildCochain, HostMismatch, NormalizedComplex, WindowNotCertified, bracket,
                                 brace, circle, compare_hochschild, cosimplicial_of, cup, homotopy_sign,
                                 hochschild_cohomology, hochschild_of_homology_comparison, total_differential)
from nsoperad.operad import (MultiplicativeStructureError, associative_operad, formal_test_operad,
                             trivial_operad)
from nsoperad.poisson import poisson_operad

from test_poisson import set_partitions


def _sign(k):
    return -1 if k % 2 else 1


def no_singleton_oracle(n, m):
    """Degree -> count of normal monomials whose blocks all have size >= 2."""
    out = {}
    for part in set_partitions(list(range(1, n + 1))):
        if any(len(b) == 1 for b in part):
            continue
        deg = m * (n - len(part))
        out[deg] = out.get(deg, 0) + math.prod(math.factorial(len(b) - 1) for b in part)
    return out


# ------------------------------------------------------------ cosimplicial

@pytest.mark.parametrize("d", [3, 4])
@pytest.mark.parametrize("convention", ["infix", "prefix"])
def test_cosimplicial_identities_poisson(d, convention):
    c = cosimplicial_of(poisson_operad(d, 5, convention))
    assert c.identity_failures() == []


def test_cosimplicial_identities_formal_fixture():
    o, _ = formal_test_operad(poisson_operad(3, 4))
    assert cosimplicial_of(o).identity_failures() == []


@pytest.mark.parametrize("d", [3, 4])
def test_normalized_dims_are_singleton_free(d):
    nc = NormalizedComplex(cosimplicial_of(poisson_operad(d, 5)))
    for p in range(6):
        got = {q: v for q, v in enumerate(nc.column_dims(p)) if v}
        assert got == no_singleton_oracle(p, d - 1)


def test_coface_delta_squares_to_zero():
    c = cosimplicial_of(poisson_operad(3, 5))
    for p in range(4):
        assert (c.delta(p + 1) @ c.delta(p)).is_zero()


def test_twisted_multiplication_refused():
    o = associative_operad(3)
    twisted = o.with_multiplication({g: 2 * x for g, x in o.mu.items()}, o.basepoint)
    with pytest.raises(MultiplicativeStructureError):
        cosimplicial_of(twisted)
    with pytest.raises(MultiplicativeStructureError):
        cosimplicial_of(trivial_operad(3))


# ------------------------------------------------------------ HH dimensions

@pytest.mark.parametrize("arity", [3, 5])
@pytest.mark.parametrize("normalize", [True, False])
def test_associative_hh(arity, normalize):
    res = hochschild_cohomology(associative_operad(arity), -3, 3, normalize=normalize)
    for t, dim, cert in res.rows():
        if cert:
            assert dim == (1 if t == 0 else 0)
    assert res.certified(0)


def test_associative_hh_strict_window():
    with pytest.raises(WindowNotCertified):
        hochschild_cohomology(poisson_operad(3, 4), 0, 1, strict=True)
    hochschild_cohomology(associative_operad(4), -2, 2, strict=True)


def test_poisson_d4_low_degrees():
    res = hochschild_cohomology(poisson_operad(4, 5), -1, 1)
    assert res.certificate == "proven"
    assert [(t, d) for t, d, c in res.rows() if c] == [(-1, 0), (0, 1), (1, 1)]


def test_poisson_d3_cells():
    res = hochschild_cohomology(poisson_operad(3, 5), 0, 1)
    assert not res.certified(0)
    cells = {(t, w): (d, c) for t, w, d, c in res.cell_rows()}
    assert cells[(0, 0)] == (1, True)
    assert cells[(0, 1)] == (1, True)


@pytest.mark.parametrize("d", [3, 4])
def test_conventions_agree(d):
    a = hochschild_cohomology(poisson_operad(d, 5, "infix"), -1, 3)
    b = hochschild_cohomology(poisson_operad(d, 5, "prefix"), -1, 3)
    assert a.cell_rows() == b.cell_rows()
    assert a.rows() == b.rows()


def test_normalized_agrees_with_unnormalized_where_certified():
    o = poisson_operad(4, 5)
    a = hochschild_cohomology(o, -1, 2)
    b = hochschild_cohomology(o, -1, 2, normalize=False)
    for (t, da, ca), (_, db, cb) in zip(a.rows(), b.rows()):
        if ca and cb:
            assert da == db


def test_formal_fixture_matches_homology():
    h = poisson_operad(3, 4)
    o, _ = formal_test_operad(h)
    cmp = compare_hochschild(hochschild_cohomology(o, 0, 2), hochschild_cohomology(h, 0, 2))
    assert cmp.equal_on_certified
    assert any(cert for (*_, cert, _) in cmp.cell_rows)
    assert hochschild_of_homology_comparison(o, 0, 2).equal_on_certified


# ------------------------------------------------------------ Gerstenhaber

HOSTS = {}


def host(name):
    if name not in HOSTS:
        HOSTS[name] = {"poisson3": lambda: poisson_operad(3, 5),
                       "poisson3-prefix": lambda: poisson_operad(3, 5, "prefix"),
                       "formal-poisson2": lambda: formal_test_operad(poisson_operad(2, 5))[0]}[name]()
    return HOSTS[name]


@st.composite
def cochains(draw, o, p_max=3):
    p = draw(st.integers(0, p_max))
    q = draw(st.integers(0, o.components[p].max_degree))
    idx = list(o.degree_range(p, q))
    coefs = draw(st.lists(st.integers(-2, 2), min_size=len(idx), max_size=len(idx)))
    x = HochschildCochain.homogeneous(o, p, {g: c for g, c in zip(idx, coefs)})
    return x


@given(st.sampled_from(sorted(["poisson3", "poisson3-prefix", "formal-poisson2"])), st.data())
@settings(max_examples=40)
def test_cochain_identities(name, data):
    o = host(name)
    x, y, z = (data.draw(cochains(o)) for _ in range(3))
    if x.is_zero() or y.is_zero() or z.is_zero():
        return
    D = total_differential
    tx, ty, tz = x.total_degree, y.total_degree, z.total_degree
    assert D(D(x)).is_zero()
    if x.p + y.p + 1 <= o.arity_max:
        assert D(cup(x, y)) == cup(D(x), y) + cup(x, D(y)).scale(_sign(tx))
        comm = cup(x, y) - cup(y, x).scale(_sign(tx * ty))
        htp = D(circle(x, y)) - circle(D(x), y) - circle(x, D(y)).scale(_sign(tx + 1))
        assert comm == htp.scale(homotopy_sign(x, y))
    if x.p + y.p - 1 <= o.arity_max:
        assert brace(x, [y]) == circle(x, y)
    if x.p + y.p + z.p - 2 <= o.arity_max:
        assoc = circle(circle(x, y), z) - circle(x, circle(y, z))
        assert assoc == brace(x, [y, z]) + brace(x, [z, y]).scale(_sign((ty + 1) * (tz + 1)))
        jac = (bracket(x, bracket(y, z)).scale(_sign((tx + 1) * (tz + 1)))
               + bracket(y, bracket(z, x)).scale(_sign((ty + 1) * (tx + 1)))
               + bracket(z, bracket(x, y)).scale(_sign((tz + 1) * (ty + 1))))
        assert jac.is_zero()


def test_cup_graded_commutative_on_classes():
    o = poisson_operad(3, 5)
    res = hochschild_cohomology(o, -2, 2)
    reps = [r for cell in res.cells.values() for r in cell.representatives]
    checked = 0
    for x in reps:
        for y in reps:
            if x.p + y.p + 1 > o.arity_max or x.total_degree + y.total_degree > 2:
                continue
            lhs, rhs = cup(x, y), cup(y, x).scale(_sign(x.total_degree * y.total_degree))
            assert res.same_class(lhs, rhs)
            checked += 1
    assert checked > 0


def test_cup_routes_agree():
    from nsoperad.hochschild import _cup_vector
    o = poisson_operad(3, 5)
    rng = random.Random(3)
    for _ in range(20):
        px, py = rng.randint(0, 2), rng.randint(0, 2)
        qx, qy = rng.choice([0, 2]), rng.choice([0, 2])
        vx = {g: rng.randint(-2, 2) for g in o.degree_range(px, min(qx, o.components[px].max_degree))}
        vy = {g: rng.randint(-2, 2) for g in o.degree_range(py, min(qy, o.components[py].max_degree))}
        qx, qy = o.element_degree(px, vx) or 0, o.element_degree(py, vy) or 0
        assert _cup_vector(o, px, qx, vx, py, qy, vy, "left") == _cup_vector(o, px, qx, vx, py, qy, vy, "right")


def test_mixed_hosts_refused():
    a, b = poisson_operad(3, 3), poisson_operad(4, 3)
    x = HochschildCochain.homogeneous(a, 1, {0: 1})
    y = HochschildCochain.homogeneous(b, 1, {0: 1})
    with pytest.raises(HostMismatch):
        cup(x, y)
