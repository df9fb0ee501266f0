import os
from importlib.resources import files
from pathlib import Path

import pytest

from nsoperad.cli import EXIT_INVALID, EXIT_OK, EXIT_UNCERTIFIED, main
from nsoperad.fileformat import emit_document, parse_document

FIX = files("nsoperad") / "fixtures"
GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("NSOPERAD_REGEN_GOLDEN") == "1"

CASES = {
    "validate_associative": ["validate", str(FIX / "associative.od")],
    "validate_poisson": ["validate", str(FIX / "poisson_d3_a4.od")],
    "poisson_d3": ["poisson", "--d", "3", "--arity-max", "6", "--tsv"],
    "poisson_d4": ["poisson", "--d", "4", "--arity-max", "6"],
    "hh_associative": ["hh", str(FIX / "associative.od"), "--t-min", "-2", "--t-max", "2", "--tsv"],
    "hh_poisson": ["hh", str(FIX / "poisson_d3_a4.od"), "--t-min", "0", "--t-max", "2", "--by-weight"],
    "ss_staircase": ["ss", "--staircase", "--tsv"],
    "ss_poisson": ["ss", str(FIX / "poisson_d3_a4.od")],
    "free_catalan": ["free", "--sphere", "0", "2", "--arity-max", "8", "--max-degree", "0", "--tsv"],
    "free_disk": ["free", "--disk", "2", "2", "--arity-max", "4", "--max-degree", "4"],
    "pushout_trivial": ["pushout-check", str(FIX / "trivial.od"), "--p", "2", "--q", "2", "--arity-max", "3",
                        "--max-degree", "3", "--tsv"],
}


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_output(name, capsys):
    code, out, _ = run(capsys, CASES[name])
    assert code == EXIT_OK
    path = GOLDEN / f"{name}.txt"
    if REGEN:
        GOLDEN.mkdir(exist_ok=True)
        path.write_text(out)
    assert out == path.read_text()
    # deterministic: a second run is byte-identical
    assert run(capsys, CASES[name])[1] == out


def test_poisson_emits_valid_file(tmp_path, capsys):
    out = tmp_path / "p.od"
    code, text, _ = run(capsys, ["poisson", "--d", "3", "--arity-max", "2", "--out", str(out)])
    assert code == EXIT_OK
    o = parse_document(out.read_text())
    assert o.dim(2) == 2
    assert run(capsys, ["validate", str(out)])[0] == EXIT_OK


def test_corrupted_coefficient_fails_validation(tmp_path, capsys):
    text = (FIX / "associative.od").read_text()
    lines = text.splitlines()
    i = next(k for k, ln in enumerate(lines) if ln.startswith("compose 2 1 2"))
    lines[i] = lines[i].rsplit(" ", 1)[0] + " 2/1"
    bad = tmp_path / "bad.od"
    bad.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, ["validate", str(bad)])
    assert code == EXIT_INVALID
    assert out.startswith("INVALID operad axioms:") and "axiom" in out


def test_twisted_multiplication_fails_validation(tmp_path, capsys):
    text = (FIX / "associative.od").read_text().replace("multiplication mu2 1/1", "multiplication mu2 3/1")
    bad = tmp_path / "twist.od"
    bad.write_text(text)
    code, out, _ = run(capsys, ["validate", str(bad)])
    assert code == EXIT_INVALID
    assert "INVALID multiplicative structure" in out


def test_strict_uncertified_window(capsys):
    code, out, err = run(capsys, ["hh", str(FIX / "poisson_d3_a4.od"), "--t-min", "0", "--t-max", "1",
                                  "--strict"])
    assert code == EXIT_UNCERTIFIED
    assert "?" in out and "not certified" in err
    code, _, _ = run(capsys, ["hh", str(FIX / "associative.od"), "--t-min", "-1", "--t-max", "1", "--strict"])
    assert code == EXIT_OK


def test_usage_errors(tmp_path, capsys):
    assert run(capsys, ["hh"])[0] == EXIT_INVALID
    assert run(capsys, ["hh", str(tmp_path / "missing.od"), "--t-min", "0", "--t-max", "0"])[0] == EXIT_INVALID
    garbage = tmp_path / "g.od"
    garbage.write_text("nonsense\n")
    code, _, err = run(capsys, ["validate", str(garbage)])
    assert code == EXIT_INVALID and "line 1" in err
    assert run(capsys, ["ss"])[0] == EXIT_INVALID
    assert run(capsys, ["--help"])[0] == EXIT_OK


def test_free_from_sequence_file(tmp_path, capsys):
    seq = tmp_path / "s.od"
    seq.write_text("format_version 1\nfield Q\narity_max 2\nbasis 2 0 m\n")
    code, out, _ = run(capsys, ["free", "--seq", str(seq), "--arity-max", "5", "--max-degree", "0", "--tsv"])
    assert code == EXIT_OK
    catalan_rows = [ln for ln in out.splitlines() if ln.startswith(("2\t0", "3\t0", "4\t0", "5\t0"))]
    assert [r.split("\t")[2] for r in catalan_rows] == ["1", "2", "5", "14"]


def test_pushout_check_associative(capsys):
    code, out, _ = run(capsys, ["pushout-check", str(FIX / "associative.od"), "--p", "2", "--q", "2",
                                "--arity-max", "2", "--max-degree", "2", "--cap-slack", "0"])
    assert code == EXIT_OK
    assert "AGREE" in out.splitlines()
    assert "NOT quasi-iso" not in out and "inclusion arity 2: quasi-iso" in out


@pytest.mark.parametrize("argv", [
    ["hh", str(FIX / "associative.od"), "--t-min", "-1", "--t-max", "1"],
    ["ss", "--staircase"],
    ["free", "--sphere", "0", "2", "--arity-max", "5", "--max-degree", "0"],
])
def test_figures_written(tmp_path, capsys, argv):
    fig = tmp_path / "fig.png"
    assert run(capsys, argv + ["--figure", str(fig)])[0] == EXIT_OK
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_emit_matches_bundled_poisson(capsys, tmp_path):
    out = tmp_path / "p.od"
    run(capsys, ["poisson", "--d", "3", "--arity-max", "4", "--out", str(out)])
    assert out.read_text() == (FIX / "poisson_d3_a4.od").read_text()
    assert emit_document(parse_document(out.read_text())) == out.read_text()
