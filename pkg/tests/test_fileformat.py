from importlib.resources import files

import pytest
from hypothesis import given, settings, strategies as st

from nsoperad.fileformat import FormatError, emit_document, parse_document, read_operad, read_sequence
from nsoperad.operad import associative_operad, check_multiplicative, check_operad_axioms, formal_test_operad
from nsoperad.poisson import poisson_operad

FIXTURES = files("nsoperad") / "fixtures"

MINIMAL = """format_version 1
field Q
name tiny
arity_max 1
basis 1 0 id
unit id 1/1
compose 1 1 1 id id id 1/1
"""


def builders():
    return {
        "associative": lambda: associative_operad(3),
        "poisson3": lambda: poisson_operad(3, 3),
        "poisson4-prefix": lambda: poisson_operad(4, 3, "prefix"),
        "formal": lambda: formal_test_operad(poisson_operad(3, 3))[0],
    }


@pytest.mark.parametrize("name", sorted(builders()))
def test_round_trip_is_byte_identical(name):
    o = builders()[name]()
    text = emit_document(o)
    back = parse_document(text)
    assert emit_document(back) == text
    assert back.dims_table() == o.dims_table()
    assert check_operad_axioms(back).valid
    assert check_multiplicative(back).valid


@pytest.mark.parametrize("name", ["associative.od", "poisson_d3_a4.od", "trivial.od"])
def test_bundled_fixtures_are_canonical(name):
    text = (FIXTURES / name).read_text()
    assert emit_document(parse_document(text)) == text


def test_bundled_poisson_fixture_shape():
    o = read_operad(FIXTURES / "poisson_d3_a4.od")
    assert o.arity_max == 4 and o.dim(2) == 2
    assert o.weights is not None


def test_weights_survive_round_trip():
    o = poisson_operad(3, 3)
    back = parse_document(emit_document(o))
    assert back.weights == o.weights


def test_comments_and_quoting():
    text = MINIMAL.replace("name tiny", "name 'two words'  # trailing comment") + "# a comment line\n"
    o = parse_document(text)
    assert o.name == "two words"
    assert emit_document(o).startswith("format_version 1\nfield Q\nname 'two words'\n")


@pytest.mark.parametrize("mutation, message", [
    (lambda t: t.replace("format_version 1", "format_version 2"), "format_version"),
    (lambda t: t.replace("field Q", "field F2"), "field Q"),
    (lambda t: t.replace("arity_max 1\n", ""), "arity_max"),
    (lambda t: t.replace("unit id 1/1\n", ""), "missing unit"),
    (lambda t: t.replace("unit id 1/1", "unit id 1"), "numerator/denominator"),
    (lambda t: t.replace("unit id 1/1", "unit id 1/0"), "bad coefficient"),
    (lambda t: t.replace("unit id 1/1", "unit nope 1/1"), "unknown label"),
    (lambda t: t + "basis 1 0 id\n", "duplicate label"),
    (lambda t: t + "frobnicate 3\n", "unknown directive"),
    (lambda t: t + "compose 1 2 1 id id id 1/1\n", "position"),
    (lambda t: t + "basis 3 0 z\n", "outside"),
    (lambda t: t + "d 1 id id 1/1\n", "lower degree"),
    (lambda t: t + "compose 1 1\n", "too few"),
])
def test_malformed_documents(mutation, message):
    with pytest.raises(FormatError, match=message):
        parse_document(mutation(MINIMAL))


def test_errors_carry_line_numbers():
    with pytest.raises(FormatError) as e:
        parse_document(MINIMAL + "frobnicate\n")
    assert e.value.line == 8


def test_sequence_documents(tmp_path):
    text = "format_version 1\nfield Q\narity_max 2\nbasis 2 0 a\nbasis 2 1 b\nd 2 b a 1/1\n"
    p = tmp_path / "s.od"
    p.write_text(text)
    s = read_sequence(p)
    assert s.dims_table() == {0: (0,), 1: (0,), 2: (1, 1)}
    with pytest.raises(FormatError, match="sequence"):
        parse_document(MINIMAL, sequence=True)


coefs = st.fractions(min_value=-50, max_value=50, max_denominator=50).filter(bool)


@given(coefs)
@settings(max_examples=30)
def test_coefficients_exact_through_text(c):
    text = MINIMAL + f"compose 1 1 1 id id id {c.numerator}/{c.denominator}\n"
    o = parse_document(text)
    # two compose lines for the same slot accumulate
    assert o.compose(1, 1, 1, {0: 1}, {0: 1}) == ({0: 1 + c} if 1 + c else {})
