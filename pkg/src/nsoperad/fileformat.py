"""Line-based operad description documents (``.od``).

One directive per line, tokens separated by spaces (shell-style quoting for
labels containing spaces or quotes), ``#`` starts a comment::

    format_version 1
    field Q
    name associative
    arity_max 2
    basis 0 0 mu0
    basis 1 0 mu1
    basis 2 0 mu2
    unit mu1 1/1
    multiplication mu2 1/1
    basepoint mu0 1/1
    compose 1 1 1 mu1 mu1 mu1 1/1
    d 2 u v 1/1

``weight n label w`` optionally attaches an additive weight grading; when
present it must cover every label.  ``basis n k labels...`` lists arity-n basis labels of degree k; labels are
unique within an arity.  ``d n from to c`` is a differential entry,
``compose n i m a b to c`` a structure constant of a ∘_i b.  Coefficients
are always written ``numerator/denominator``.  Emission sorts every section
(labels and tuples lexicographically), so emit(parse(doc)) == doc for
canonical documents.
"""
from __future__ import annotations

import shlex
from fractions import Fraction
from pathlib import Path

from .chain import FinChainComplex
from .exactla import RationalMatrix
from .free import GradedSequence
from .operad import FinOperad

FORMAT_VERSION = 1


class FormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


def _coef(text: str, line: int) -> Fraction:
    if "/" not in text:
        raise FormatError(f"coefficient {text!r} must be written numerator/denominator", line)
    try:
        num, den = text.split("/")
        c = Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"bad coefficient {text!r}", line) from None
    return c


def _fmt(c: Fraction) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def _q(label: str) -> str:
    return shlex.quote(label)


def parse_document(text: str, sequence: bool = False):
    """Parse an operad, or with ``sequence=True`` a bare graded sequence (basis and d lines only)."""
    header: dict = {}
    basis: dict[int, dict[int, list[str]]] = {}
    where: dict[int, dict[str, tuple[int, int]]] = {}
    diffs, comps, unit, mu, base, wts = [], [], [], [], [], []
    for ln, raw in enumerate(text.splitlines(), 1):
        try:
            tok = shlex.split(raw, comments=True)
        except ValueError as e:
            raise FormatError(str(e), ln) from None
        if not tok:
            continue
        key, args = tok[0], tok[1:]
        try:
            if key in ("format_version", "arity_max", "degree_max"):
                header[key] = (int(args[0]), ln)
            elif key == "field":
                header[key] = (args[0], ln)
            elif key == "name":
                header[key] = (" ".join(args), ln)
            elif key == "basis":
                n, k = int(args[0]), int(args[1])
                labels = args[2:]
                slot = basis.setdefault(n, {}).setdefault(k, [])
                for lab in labels:
                    if lab in where.setdefault(n, {}):
                        raise FormatError(f"duplicate label {lab!r} in arity {n}", ln)
                    where[n][lab] = (k, len(slot))
                    slot.append(lab)
            elif key == "d":
                diffs.append((int(args[0]), args[1], args[2], _coef(args[3], ln), ln))
            elif key == "compose":
                n, i, m = int(args[0]), int(args[1]), int(args[2])
                comps.append((n, i, m, args[3], args[4], args[5], _coef(args[6], ln), ln))
            elif key == "weight":
                wts.append((int(args[0]), args[1], int(args[2]), ln))
            elif key == "unit":
                unit.append((args[0], _coef(args[1], ln), ln))
            elif key == "multiplication":
                mu.append((args[0], _coef(args[1], ln), ln))
            elif key == "basepoint":
                base.append((args[0], _coef(args[1], ln), ln))
            else:
                raise FormatError(f"unknown directive {key!r}", ln)
        except IndexError:
            raise FormatError(f"too few fields for {key!r}", ln) from None
        except ValueError as e:
            if isinstance(e, FormatError):
                raise
            raise FormatError(f"malformed {key!r} line: {e}", ln) from None
    if header.get("format_version", (None,))[0] != FORMAT_VERSION:
        raise FormatError(f"format_version must be {FORMAT_VERSION}")
    if header.get("field", ("Q",))[0] != "Q":
        raise FormatError("only field Q is supported", header["field"][1])
    if "arity_max" not in header:
        raise FormatError("missing arity_max")
    N = header["arity_max"][0]
    for n in basis:
        if not 0 <= n <= N:
            raise FormatError(f"basis arity {n} outside 0..{N}")

    dims = {n: [len(basis.get(n, {}).get(k, [])) for k in range(max(basis.get(n, {0: []}), default=0) + 1)]
            for n in range(N + 1)}
    offsets = {n: [sum(dims[n][:k]) for k in range(len(dims[n]) + 1)] for n in dims}

    def gidx(n: int, lab: str, ln: int) -> int:
        if n not in where or lab not in where[n]:
            raise FormatError(f"unknown label {lab!r} in arity {n}", ln)
        k, j = where[n][lab]
        return offsets[n][k] + j

    def deg(n: int, lab: str) -> int:
        return where[n][lab][0]

    dmats: dict[int, dict[int, dict]] = {}
    for n, a, b, c, ln in diffs:
        gidx(n, a, ln), gidx(n, b, ln)
        ka, kb = deg(n, a), deg(n, b)
        if kb != ka - 1:
            raise FormatError(f"differential {a!r} -> {b!r} does not lower degree by one", ln)
        ent = dmats.setdefault(n, {}).setdefault(ka, {})
        ent[(where[n][b][1], where[n][a][1])] = ent.get((where[n][b][1], where[n][a][1]), 0) + c
    components = {}
    for n in range(N + 1):
        ds = dims[n]
        mats = {k: RationalMatrix(ds[k - 1], ds[k], dmats.get(n, {}).get(k, {})) for k in range(1, len(ds))}
        components[n] = FinChainComplex(ds, mats)
    if sequence:
        stray = comps[:1] or unit[:1] or mu[:1] or base[:1]
        if stray:
            raise FormatError("a sequence document has no unit, multiplication, basepoint or compose lines",
                              stray[0][-1])
        return GradedSequence(N, components, header.get("name", ("",))[0])
    table: dict = {}
    for n, i, m, a, b, to, c, ln in comps:
        if not (1 <= i <= n):
            raise FormatError(f"position {i} outside arity {n}", ln)
        ga, gb, gt = gidx(n, a, ln), gidx(m, b, ln), gidx(n + m - 1, to, ln)
        entry = table.setdefault((n, i, m), {}).setdefault((ga, gb), {})
        entry[gt] = entry.get(gt, 0) + c

    def element(items, n):
        out = {}
        for lab, c, ln in items:
            g = gidx(n, lab, ln)
            out[g] = out.get(g, 0) + c
        return out

    if not unit:
        raise FormatError("missing unit")
    labels = {n: [lab for k in range(len(dims[n])) for lab in basis.get(n, {}).get(k, [])] for n in range(N + 1)}
    dmax = header.get("degree_max", (None,))[0]
    o = FinOperad(N, components, element(unit, 1), table, labels,
                  element(mu, 2) if mu else None, element(base, 0) if base else None,
                  header.get("name", ("",))[0], degree_max=dmax)
    if wts:
        w = {n: [None] * o.dim(n) for n in range(N + 1)}
        for n, lab, x, ln in wts:
            w[n][gidx(n, lab, ln)] = x
        missing = [(n, labels[n][g]) for n in w for g, x in enumerate(w[n]) if x is None]
        if missing:
            raise FormatError(f"weight missing for label {missing[0][1]!r} in arity {missing[0][0]}")
        o.weights = w
    return o


def emit_document(o: FinOperad) -> str:
    lines = [f"format_version {FORMAT_VERSION}", "field Q"]
    if o.name:
        lines.append(f"name {_q(o.name)}")
    lines.append(f"arity_max {o.arity_max}")
    if o.degree_max is not None:
        lines.append(f"degree_max {o.degree_max}")
    for n in range(o.arity_max + 1):
        for k in range(o.components[n].max_degree + 1):
            labs = sorted(o.labels[n][g] for g in o.degree_range(n, k))
            if labs:
                lines.append(" ".join(["basis", str(n), str(k)] + [_q(x) for x in labs]))
    lab = o.labels

    def elem_lines(key: str, n: int, x) -> list[str]:
        return [f"{key} {_q(lab[n][g])} {_fmt(c)}" for g, c in sorted(x.items(), key=lambda gc: lab[n][gc[0]])]

    lines += elem_lines("unit", 1, o.unit)
    if o.mu is not None:
        lines += elem_lines("multiplication", 2, o.mu)
    if o.basepoint is not None:
        lines += elem_lines("basepoint", 0, o.basepoint)
    if o.weights is not None:
        for n in range(o.arity_max + 1):
            for g in sorted(range(o.dim(n)), key=lambda g: lab[n][g]):
                lines.append(f"weight {n} {_q(lab[n][g])} {o.weights[n][g]}")
    drows = []
    for n in range(o.arity_max + 1):
        for g in range(o.dim(n)):
            for h, c in o.d(n, {g: 1}).items():
                drows.append((n, lab[n][g], lab[n][h], c))
    for n, a, b, c in sorted(drows):
        lines.append(f"d {n} {_q(a)} {_q(b)} {_fmt(c)}")
    crows = []
    for (n, i, m), entries in o.table.items():
        for (a, b), v in entries.items():
            for g, c in v.items():
                crows.append((n, i, m, lab[n][a], lab[m][b], lab[n + m - 1][g], c))
    for n, i, m, a, b, to, c in sorted(crows):
        lines.append(f"compose {n} {i} {m} {_q(a)} {_q(b)} {_q(to)} {_fmt(c)}")
    return "\n".join(lines) + "\n"


def read_operad(path) -> FinOperad:
    return parse_document(Path(path).read_text())


def read_sequence(path) -> GradedSequence:
    return parse_document(Path(path).read_text(), sequence=True)


def write_operad(o: FinOperad, path) -> None:
    Path(path).write_text(emit_document(o))
