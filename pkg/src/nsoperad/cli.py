"""Command line front end: ``nsoperad <command> ...``.

Exit codes: 0 success, 1 validation failure or bad input, 2 a requested
window is not fully certified under ``--strict``.
"""
from __future__ import annotations

import argparse
import math
import sys

from .fileformat import FormatError, read_operad, read_sequence, write_operad
from .operad import check_multiplicative, check_operad_axioms

EXIT_OK, EXIT_INVALID, EXIT_UNCERTIFIED = 0, 1, 2


class UsageFailure(Exception):
    pass


def _emit(rows, header, tsv: bool, out=None) -> None:
    out = out or sys.stdout
    if tsv:
        print("\t".join(header), file=out)
        for r in rows:
            print("\t".join(str(x) for x in r), file=out)
        return
    cells = [list(header)] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(header))]
    for r in cells:
        print("  ".join(x.rjust(w) for x, w in zip(r, widths)), file=out)


def _mark(dim, certified: bool) -> str:
    return f"{dim}" if certified else f"{dim}?"


def _load(path: str):
    try:
        return read_operad(path)
    except OSError as e:
        raise UsageFailure(f"cannot read {path}: {e.strerror}") from None
    except FormatError as e:
        raise UsageFailure(f"{path}: {e}") from None


# ----------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    from .hochschild import cosimplicial_of
    o = _load(args.path)
    ax = check_operad_axioms(o, stop_after=1)
    if not ax.valid:
        print(f"INVALID operad axioms: {ax.violations[0]}")
        return EXIT_INVALID
    print(f"operad axioms: {ax.summary()}")
    if not o.is_multiplicative:
        print("multiplicative structure: absent")
        return EXIT_OK
    mr = check_multiplicative(o)
    if not mr.valid:
        print(f"INVALID multiplicative structure: {mr.problems[0]}")
        return EXIT_INVALID
    print("multiplicative structure: valid")
    bad = cosimplicial_of(o, check=False).identity_failures(first_only=True)
    if bad:
        print(f"INVALID cosimplicial identities: {bad[0]}")
        return EXIT_INVALID
    print("cosimplicial identities: valid")
    return EXIT_OK


def cmd_poisson(args) -> int:
    from .poisson import poisson_operad
    if args.d < 1 or args.arity_max < 0:
        raise UsageFailure("need d >= 1 and arity-max >= 0")
    o = poisson_operad(args.d, args.arity_max, convention=args.convention)
    rows = []
    for n in range(args.arity_max + 1):
        dims = {k: o.components[n].dim(k) for k in range(o.components[n].max_degree + 1)}
        for k, v in dims.items():
            if v:
                rows.append((n, k, v))
        total = sum(dims.values())
        rows.append((n, "total", total))
        if total != math.factorial(n):
            print(f"row sum in arity {n} is {total}, expected {math.factorial(n)}", file=sys.stderr)
            return EXIT_INVALID
    _emit(rows, ("arity", "degree", "dim"), args.tsv)
    if args.out:
        write_operad(o, args.out)
        print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_hh(args) -> int:
    from .hochschild import hochschild_cohomology
    o = _load(args.path)
    if args.t_min > args.t_max:
        raise UsageFailure("t-min exceeds t-max")
    res = hochschild_cohomology(o, args.t_min, args.t_max, p_max=args.p_max, normalize=not args.unnormalized)
    print(f"# {o.name or args.path}: certificate {res.certificate}")
    _emit([(t, _mark(d, c)) for t, d, c in res.rows()], ("t", "dim"), args.tsv)
    if args.by_weight:
        _emit([(t, w, _mark(d, c)) for t, w, d, c in res.cell_rows()], ("t", "weight", "dim"), args.tsv)
    if args.figure:
        from .plotting import plot_hh
        plot_hh(res.rows(), args.figure, title=f"HH of {o.name}")
    if args.strict and not all(c for _, _, c in res.rows()):
        print("window not certified", file=sys.stderr)
        return EXIT_UNCERTIFIED
    return EXIT_OK


def cmd_ss(args) -> int:
    from .specseq import bicomplex_of, collapse_report, staircase_bicomplex
    if args.staircase:
        b, name = staircase_bicomplex(), "staircase"
    elif args.path:
        from .hochschild import NormalizedComplex, cosimplicial_of
        o = _load(args.path)
        b, name = bicomplex_of(NormalizedComplex(cosimplicial_of(o, args.p_max))), o.name or args.path
    else:
        raise UsageFailure("give an operad file or --staircase")
    rep = collapse_report(b, args.r_max)
    print(f"# {name}")
    rows = [(pt.r, p, q, _mark(d, c)) for pt in rep.pages for (_, p, q, d, c) in pt.rows()]
    _emit(rows, ("page", "p", "q", "dim"), args.tsv)
    print(f"verdict: {rep.verdict()}")
    print("euler: " + " ".join(f"E{pt.r}={pt.euler()}" for pt in rep.pages))
    if args.figure:
        from .plotting import plot_pages
        plot_pages(rep.pages, args.figure, title=name)
    if args.strict and not all(all(pt.certified.values()) for pt in rep.pages):
        print("window not certified", file=sys.stderr)
        return EXIT_UNCERTIFIED
    return EXIT_OK


def cmd_free(args) -> int:
    from .free import concentrated_sequence, free_operad
    if args.seq:
        try:
            s = read_sequence(args.seq)
        except OSError as e:
            raise UsageFailure(f"cannot read {args.seq}: {e.strerror}") from None
        except FormatError as e:
            raise UsageFailure(f"{args.seq}: {e}") from None
    else:
        kind, (p, q) = ("disk", args.disk) if args.disk else ("sphere", args.sphere)
        s = concentrated_sequence(p, q, kind, max(q, args.arity_max))
    F = free_operad(s, args.arity_max, max_degree=args.max_degree, max_vertices=args.max_vertices,
                    with_compositions=False)
    table = {(n, k): F.components[n].dim(k) for n in range(args.arity_max + 1)
             for k in range(args.max_degree + 1)}
    print(f"# {F.name}")
    _emit([(n, k, v) for (n, k), v in sorted(table.items())], ("arity", "degree", "dim"), args.tsv)
    if args.figure:
        from .plotting import plot_dims_table
        plot_dims_table(table, args.figure, title=F.name)
    return EXIT_OK


def cmd_pushout_check(args) -> int:
    from .free import concentrated_sequence, oracle_cap, pushout_oracle, pushout_presentation
    o = _load(args.path)
    P = pushout_presentation(o, args.p, args.q, args.arity_max, args.max_degree)
    attach = concentrated_sequence(args.p, args.q, "disk", max(args.q, args.arity_max))
    cells = [(n, k) for n in range(args.arity_max + 1) for k in range(args.max_degree + 1) if P.certified(n, k)]
    def cap(n, k):
        return oracle_cap(P, n, k) + args.cap_slack

    orc = pushout_oracle(o, attach, args.arity_max, args.max_degree, cap, cells=cells, with_homology=False)
    dims = P.dims()
    rows, agree = [], True
    for n in range(args.arity_max + 1):
        for k in range(args.max_degree + 1):
            cert = (n, k) in orc.dims
            same = orc.dims.get((n, k)) == dims[(n, k)] if cert else None
            agree &= same is not False
            rows.append((n, k, _mark(dims[(n, k)], cert), "" if same is None else ("yes" if same else "NO")))
    _emit(rows, ("arity", "degree", "presentation", "oracle_agrees"), args.tsv)
    print("AGREE" if agree else "DISAGREE")
    qi = P.inclusion_quasi_iso()
    for n in range(args.arity_max + 1):
        v = qi.get(n)
        print(f"inclusion arity {n}: " + ("uncertified" if v is None else ("quasi-iso" if v else "NOT quasi-iso")))
    if not agree or any(v is False for v in qi.values()):
        return EXIT_INVALID
    if args.strict and (len(cells) < len(dims) or len(qi) <= args.arity_max):
        print("window not certified", file=sys.stderr)
        return EXIT_UNCERTIFIED
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nsoperad", description="Exact computations with truncated dg operads.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check axioms, multiplicative structure and cosimplicial identities")
    v.add_argument("path")
    v.set_defaults(func=cmd_validate)

    p = sub.add_parser("poisson", help="dimension table of the graded Poisson operad")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--arity-max", type=int, required=True)
    p.add_argument("--convention", choices=("infix", "prefix"), default="infix")
    p.add_argument("--out", help="write the operad as a .od document")
    p.add_argument("--tsv", action="store_true")
    p.set_defaults(func=cmd_poisson)

    h = sub.add_parser("hh", help="Hochschild cohomology of a multiplicative operad")
    h.add_argument("path")
    h.add_argument("--t-min", type=int, required=True)
    h.add_argument("--t-max", type=int, required=True)
    h.add_argument("--p-max", type=int)
    h.add_argument("--unnormalized", action="store_true")
    h.add_argument("--by-weight", action="store_true")
    h.add_argument("--strict", action="store_true")
    h.add_argument("--tsv", action="store_true")
    h.add_argument("--figure")
    h.set_defaults(func=cmd_hh)

    s = sub.add_parser("ss", help="spectral sequence of the column filtration")
    s.add_argument("path", nargs="?")
    s.add_argument("--staircase", action="store_true")
    s.add_argument("--p-max", type=int)
    s.add_argument("--r-max", type=int)
    s.add_argument("--strict", action="store_true")
    s.add_argument("--tsv", action="store_true")
    s.add_argument("--figure")
    s.set_defaults(func=cmd_ss)

    f = sub.add_parser("free", help="dimensions of a free operad")
    src = f.add_mutually_exclusive_group(required=True)
    src.add_argument("--seq")
    src.add_argument("--disk", type=int, nargs=2, metavar=("P", "Q"))
    src.add_argument("--sphere", type=int, nargs=2, metavar=("P", "Q"))
    f.add_argument("--arity-max", type=int, required=True)
    f.add_argument("--max-degree", type=int, required=True)
    f.add_argument("--max-vertices", type=int)
    f.add_argument("--tsv", action="store_true")
    f.add_argument("--figure")
    f.set_defaults(func=cmd_free)

    c = sub.add_parser("pushout-check", help="compare a disk pushout presentation with the quotient oracle")
    c.add_argument("path")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--arity-max", type=int, required=True)
    c.add_argument("--max-degree", type=int, required=True)
    c.add_argument("--cap-slack", type=int, default=1,
                   help="extra tree weight allowed in the oracle beyond the presentation's largest tree")
    c.add_argument("--strict", action="store_true")
    c.add_argument("--tsv", action="store_true")
    c.set_defaults(func=cmd_pushout_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID
    try:
        return args.func(args)
    except UsageFailure as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
