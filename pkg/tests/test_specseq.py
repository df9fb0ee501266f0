import pytest
from hypothesis import given, settings, strategies as st

from nsoperad.exactla import RationalMatrix
from nsoperad.hochschild import NormalizedComplex, cosimplicial_of, hochschild_cohomology
from nsoperad.operad import OperadMorphism, formal_test_operad, identity_morphism
from nsoperad.poisson import poisson_operad
from nsoperad.specseq import (Bicomplex, InvariantViolation, NotCosimplicialMap, collapse_report, compare_E2,
                              cosimplicial_map_of, e_infinity, pages, bicomplex_of, staircase_bicomplex)

SIZE = 3


@st.composite
def line_complexes(draw, length=SIZE):
    """A complex on 0..length-1 as (dims, maps k -> k+1, cohomology dims), made of points and edges,
    then scrambled by random unimodular basis changes."""
    points = draw(st.lists(st.integers(0, length - 1), max_size=3))
    edges = draw(st.lists(st.integers(0, length - 2), max_size=3))
    dims = [0] * length
    coh = [0] * length
    for k in points:
        dims[k] += 1
        coh[k] += 1
    slots = {}
    for k in edges:
        slots.setdefault(k, []).append((dims[k], dims[k + 1]))
        dims[k] += 1
        dims[k + 1] += 1
    maps = {}
    for k in range(length - 1):
        ent = {(tgt, src): 1 for src, tgt in slots.get(k, [])}
        maps[k] = RationalMatrix(dims[k + 1], dims[k], ent)
    # scramble: conjugate by elementary matrices E = I + c e_{ij}
    for k in range(length):
        n = dims[k]
        if n < 2:
            continue
        i, j = draw(st.permutations(range(n)))[:2]
        c = draw(st.integers(-2, 2))
        e = RationalMatrix(n, n, {**{(a, a): 1 for a in range(n)}, (i, j): c})
        einv = RationalMatrix(n, n, {**{(a, a): 1 for a in range(n)}, (i, j): -c})
        if k + 1 < length:
            maps[k] = maps[k] @ einv
        if k >= 1:
            maps[k - 1] = e @ maps[k - 1]
    return dims, maps, coh


def tensor_bicomplex(a, b):
    """δ = δ_A ⊗ 1 and d = 1 ⊗ d_B where B is read downwards (q -> q-1)."""
    (da, ma, _), (db, mb, _) = a, b
    dims, delta, vert = {}, {}, {}
    for p in range(SIZE):
        for q in range(SIZE):
            dims[(p, q)] = da[p] * db[q]
    for p in range(SIZE):
        for q in range(SIZE):
            if p + 1 < SIZE:
                ent = {}
                for (r, c), x in ma[p].entries().items():
                    for j in range(db[q]):
                        ent[(r * db[q] + j, c * db[q] + j)] = x
                delta[(p, q)] = RationalMatrix(dims[(p + 1, q)], dims[(p, q)], ent)
            if q >= 1:
                # mb[q-1] : B_{q-1} -> B_q, so read its transpose as B_q -> B_{q-1}
                ent = {}
                for (r, c), x in mb[q - 1].transpose().entries().items():
                    for i in range(da[p]):
                        ent[(i * db[q - 1] + r, i * db[q] + c)] = x
                vert[(p, q)] = RationalMatrix(dims[(p, q - 1)], dims[(p, q)], ent)
    return Bicomplex(dims, delta, vert, p_max=SIZE - 1)


def check_conservation(b):
    rep = collapse_report(b, b.p_max + 2)
    eulers = {pt.euler() for pt in rep.pages}
    assert len(eulers) == 1
    for lo, hi in zip(rep.pages, rep.pages[1:]):
        assert all(hi.dims[c] <= lo.dims[c] for c in lo.dims)
    einf = e_infinity(b)
    tot = {}
    for (p, q), d in einf.dims.items():
        tot[q - p] = tot.get(q - p, 0) + d
    hom = b.total_homology_dims()
    assert {t: v for t, v in tot.items() if v} == {t: v for t, v in hom.items() if v}
    return rep


@given(line_complexes(), line_complexes())
@settings(max_examples=40)
def test_tensor_bicomplex_collapses_with_kunneth_E2(a, b):
    bc = tensor_bicomplex(a, b)
    rep = check_conservation(bc)
    assert rep.collapses_at_e2
    e2 = rep.pages[1]
    # transposing B keeps ranks, so its homology read downward sits at the same q
    for (p, q), d in e2.dims.items():
        assert d == a[2][p] * b[2][q]


def test_staircase():
    b = staircase_bicomplex()
    rep = check_conservation(b)
    assert rep.verdict() == "does not collapse; first nonzero differential on page 2 at (0,1)"
    assert b.dr_rank(0, 1, 2) == 1
    assert all(pt.euler() == 0 for pt in rep.pages)


def test_zero_delta_collapses_at_E1():
    one = RationalMatrix.identity(1)
    b = Bicomplex({(0, 0): 1, (0, 1): 1, (1, 1): 1}, {}, {(0, 1): one})
    ps = pages(b, 3)
    assert ps[0].dims == ps[1].dims == {(0, 0): 0, (0, 1): 0, (1, 1): 1}


def test_zero_vertical_collapses_at_E2():
    one = RationalMatrix.identity(1)
    b = Bicomplex({(0, 0): 1, (1, 0): 1, (2, 0): 1, (2, 1): 1}, {(0, 0): one}, {}, p_max=2)
    rep = collapse_report(b)
    assert rep.collapses_at_e2
    assert rep.pages[1].dims == {(0, 0): 0, (1, 0): 0, (2, 0): 1, (2, 1): 1}


def test_invariants_enforced():
    one = RationalMatrix.identity(1)
    with pytest.raises(InvariantViolation):
        Bicomplex({(0, 0): 1, (1, 0): 1, (2, 0): 1}, {(0, 0): one, (1, 0): one}, {})
    with pytest.raises(InvariantViolation):
        Bicomplex({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1}, {(0, 1): one}, {(0, 1): one, (1, 1): one})


def test_certification_radius():
    b = staircase_bicomplex()
    assert b.certified(0, 1, 2) and not b.certified(1, 1, 2)


@pytest.mark.parametrize("d", [3, 4])
def test_poisson_collapses_and_matches_hh(d):
    o = poisson_operad(d, 5)
    nc = NormalizedComplex(cosimplicial_of(o))
    b = bicomplex_of(nc)
    rep = check_conservation(b)
    assert rep.verdict() == "collapses at E2"
    hh = hochschild_cohomology(o, -5, 10, complex=nc)
    einf = e_infinity(b)
    for t in range(-5, 11):
        assert sum(v for (p, q), v in einf.dims.items() if q - p == t) == hh.dim(t)


def test_formal_fixture_E2_is_E_infinity():
    o, _ = formal_test_operad(poisson_operad(3, 4))
    b = bicomplex_of(NormalizedComplex(cosimplicial_of(o)))
    rep = check_conservation(b)
    e2, einf = rep.pages[1], e_infinity(b)
    assert all(e2.dims[c] == einf.dims[c] for c in e2.dims if e2.certified[c])


def test_compare_E2_identity_and_augmentation():
    h = poisson_operad(3, 4)
    ch = cosimplicial_of(h)
    assert compare_E2(cosimplicial_map_of(identity_morphism(h), ch, ch)).iso_on_certified
    o, aug = formal_test_operad(h)
    cmp = compare_E2(cosimplicial_map_of(aug, cosimplicial_of(o), ch))
    assert cmp.iso_on_certified
    assert any(cert for (*_, cert, _) in cmp.cells)


def test_compare_E2_reports_non_quasi_iso_column():
    h = poisson_operad(3, 4)
    o, aug = formal_test_operad(h)
    zero = OperadMorphism(o, h, {n: RationalMatrix.zeros(*m.shape) for n, m in aug.maps.items()}, check=False)
    cmp = compare_E2(cosimplicial_map_of(zero, cosimplicial_of(o), cosimplicial_of(h)))
    assert not cmp.iso_on_certified
    p, degrees = cmp.column_failures[0]
    assert p == 0 and 0 in degrees


def test_compare_E2_refuses_non_cosimplicial_map():
    h = poisson_operad(3, 4)
    ch = cosimplicial_of(h)
    maps = {n: RationalMatrix.identity(h.dim(n)) for n in range(5)}
    maps[2] = maps[2].scale(2)
    with pytest.raises(NotCosimplicialMap):
        compare_E2(cosimplicial_map_of(OperadMorphism(h, h, maps, check=False), ch, ch))
