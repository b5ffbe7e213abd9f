"""Command-line front end.

Exit codes: 0 decisive verdict / all fixtures reproduced, 2 inconclusive
verdict, 1 usage or input error, 3 fixture mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import documents
from .asymptotics import classify_variation, decide_comparability
from .errors import XOrderError
from .fixtures import SUITES, RunConfig, run_suite
from .orders import (
    GenericFamily,
    PowerFamily,
    ScaleFamily,
    SweepConfig,
    _span,
    quantile_compose,
    saunders_moran_D,
    v_curve,
)
from .systems import build_system

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_MISMATCH = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; 2 means "inconclusive" here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _load_system(path: str):
    if path.startswith("builtin:"):
        return build_system({"family": "builtin_tail", "name": path.split(":", 1)[1]})
    return build_system(documents.read_json(path))


def _emit(doc, out: str | None) -> None:
    if out:
        documents.write_json(out, doc)
    else:
        sys.stdout.write(documents.dumps(doc))


def _sweep_config(args) -> SweepConfig:
    return SweepConfig(grid_size=args.grid, eps=args.tol)


def _check_run_config(args) -> RunConfig:
    return RunConfig(x_max=args.xmax, grid=args.grid, tol=args.tol)


def cmd_compare(args) -> int:
    _check_run_config(args)
    X, Y = _load_system(args.lhs), _load_system(args.rhs)
    cfg = _sweep_config(args)
    verdict = decide_comparability(X, Y, cfg)
    doc = verdict.to_doc()
    doc["diagnostics"]["config"] = {"grid": args.grid, "tol": args.tol, "x_max": args.xmax}
    doc = json.loads(documents.dumps(doc))
    documents.validate(doc, "verdict")
    _emit(doc, args.out)
    if args.curves:
        lo, hi = _span(X, Y, cfg)
        xs = np.geomspace(lo, hi, args.grid)
        documents.write_curve_csv(args.curves, xs, quantile_compose(X, Y, xs))
    return EXIT_OK if verdict.decisive else EXIT_INCONCLUSIVE


def cmd_classify(args) -> int:
    spec = _load_system(args.dist)
    if spec.__class__.__name__ == "Component":
        spec = spec.dist
    doc = classify_variation(spec).to_doc()
    doc = json.loads(documents.dumps(doc))
    documents.validate(doc, "classification")
    _emit(doc, args.out)
    return EXIT_OK


def _family(doc: dict):
    kind = doc.get("type")
    base = documents.dist_from_doc(doc.get("base", {}))
    if kind == "power":
        return PowerFamily(base)
    if kind == "scale":
        return ScaleFamily(base)
    if kind == "field":
        # varies one named field of the base document, others held fixed
        key = doc.get("field")
        if key not in doc["base"]:
            raise XOrderError(f"family field {key!r} is not a field of the base distribution")
        base_doc = doc["base"]
        return GenericFamily(lambda t: documents.dist_from_doc({**base_doc, key: t}), name=key)
    raise XOrderError(f"family type must be 'power', 'scale' or 'field', got {kind!r}")


def _grid(args, default_span) -> np.ndarray:
    lo = args.lo if args.lo is not None else default_span[0]
    hi = args.hi if args.hi is not None else default_span[1]
    if not (hi > lo):
        raise XOrderError("curve grid needs hi > lo")
    if args.grid < 2:
        raise XOrderError("curve grid needs at least 2 points")
    if args.spacing == "log":
        if lo <= 0:
            raise XOrderError("log spacing needs lo > 0")
        return np.geomspace(lo, hi, args.grid)
    return np.linspace(lo, hi, args.grid)


def cmd_curve(args) -> int:
    if args.kind in ("h", "V"):
        if not (args.lhs and args.rhs):
            raise XOrderError(f"curve --kind {args.kind} needs --lhs and --rhs")
        X, Y = _load_system(args.lhs), _load_system(args.rhs)
        xs = _grid(args, _span(X, Y, SweepConfig()))
        if args.kind == "h":
            vals = quantile_compose(X, Y, xs)
        else:
            if args.a is None or args.b is None:
                raise XOrderError("curve --kind V needs -a and -b")
            if not args.a > 0:
                raise XOrderError("-a must be positive")
            vals = v_curve(X, Y, args.a, args.b, xs, normalized=not args.raw)
    else:
        if not args.family or args.param is None:
            raise XOrderError("curve --kind D needs --family and --param")
        fam = _family(documents.read_json(args.family))
        member = fam.member(args.param)
        span = (float(member.quantile(1e-6)), float(member.quantile(1 - 1e-6)))
        xs = _grid(args, span)
        vals = saunders_moran_D(fam, args.param, xs)
    documents.write_curve_csv(args.out, xs, np.asarray(vals, dtype=float))
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if args.suite not in SUITES:
        print(f"unknown fixture suite {args.suite!r}; expected one of {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_ERROR
    cfg = RunConfig(x_max=args.xmax, grid=args.grid, tol=args.tol)
    outcomes = run_suite(args.suite, cfg)
    failed = [o for o in outcomes if not o.passed]
    report = {
        "suite": args.suite,
        "total": len(outcomes),
        "passed": len(outcomes) - len(failed),
        "fixtures": [o.to_doc() for o in outcomes],
    }
    if args.out:
        documents.write_json(args.out, report)
    for o in outcomes:
        print(f"{'PASS' if o.passed else 'FAIL'}  {o.name}")
        for line in o.failures:
            print(f"      - {line}")
    print(f"{report['passed']}/{report['total']} fixtures reproduced")
    return EXIT_OK if not failed else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="xorder", description="Transform-order comparisons of lifetime laws and systems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def numeric(sp):
        sp.add_argument("--xmax", type=float, default=1e6, help="largest probe point for tail limits")
        sp.add_argument("--grid", type=int, default=4096, help="x-grid size for sign tests")
        sp.add_argument("--tol", type=float, default=1e-9, help="relative zero tolerance for sign patterns")

    c = sub.add_parser("compare", help="decide comparability of two systems")
    c.add_argument("--lhs", required=True)
    c.add_argument("--rhs", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--curves", help="also write h = tail_rhs^-1(tail_lhs) as CSV")
    numeric(c)
    c.set_defaults(func=cmd_compare)

    k = sub.add_parser("classify", help="variation class of a tail")
    k.add_argument("--dist", required=True, help="distribution document path, or builtin:NAME")
    k.add_argument("--out")
    k.set_defaults(func=cmd_classify)

    v = sub.add_parser("curve", help="export h, V or D as CSV")
    v.add_argument("--kind", required=True, choices=("h", "V", "D"))
    v.add_argument("--lhs")
    v.add_argument("--rhs")
    v.add_argument("-a", type=float)
    v.add_argument("-b", type=float)
    v.add_argument("--raw", action="store_true", help="V without normalization")
    v.add_argument("--family", help="family document: {type: power|scale|field, base: distribution[, field: name]}")
    v.add_argument("--param", type=float)
    v.add_argument("--lo", type=float)
    v.add_argument("--hi", type=float)
    v.add_argument("--grid", type=int, default=4096)
    v.add_argument("--spacing", choices=("log", "linear"), default="log")
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_curve)

    f = sub.add_parser("fixtures", help="reproduce the fixture suite")
    f.add_argument("--suite", default="paper")
    f.add_argument("--out", help="write the JSON report here")
    numeric(f)
    f.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (XOrderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
