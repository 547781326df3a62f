"""Command-line front end: ``berezin <command> [flags]``.

Exit codes: 0 success, 1 a verification suite failed, 2 invalid input,
3 numerical failure.  JSON goes to stdout (or ``--out``) with sorted keys;
``twist-report`` writes CSV.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .cocycle import class_residual, cocycle_c, integer_class, trivializer_gamma
from .config import build_grid, load_config, twist_spec
from .currents import big_cocycle_C_with_error
from .errors import BerezinError, InvalidInput, NumericalFailure
from .lattice import holonomy, obstruction_witness, relator_winding
from .suites import SUITES, run_suite
from .surface import twist_report

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(message)


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text, out):
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InvalidInput(f"cannot write {out}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


def _complex(w):
    return [float(w.real), float(w.imag)]


def cmd_cocycle(args):
    cfg = load_config(args.config, "cocycle", args.seed, args.out)
    if cfg.matrices:
        if len(cfg.matrices) != 2:
            raise InvalidInput("cocycle takes exactly two matrices")
        g1, g2 = cfg.matrices
        result = {
            "n": g1.shape[0] // 2,
            "c": cocycle_c(g1, g2),
            "gamma_g1": trivializer_gamma(g1),
            "gamma_g2": trivializer_gamma(g2),
            "gamma_g1g2": trivializer_gamma(g1 @ g2),
            "integer_class": integer_class(g1, g2),
            "class_residual": float(class_residual(g1, g2)),
        }
    elif cfg.maps:
        if len(cfg.maps) != 2:
            raise InvalidInput("cocycle takes exactly two maps")
        grid = build_grid(cfg)
        value, err = big_cocycle_C_with_error(cfg.maps[0], cfg.maps[1], grid)
        result = {"C": value, "error_estimate": err, "grid": grid.describe()}
    else:
        raise InvalidInput("config needs 'matrices' or 'maps'")
    _emit(_dump(result), cfg.out)
    return EXIT_OK


def cmd_verify(args):
    cfg = load_config(args.config, "verify", args.seed, args.out)
    results = run_suite(args.suite, cfg.seed, args.trials, args.alpha, cfg.tolerances)
    ok = all(r.ok for r in results.values())
    summary = {"seed": cfg.seed, "trials": args.trials, "alpha": args.alpha,
               "suites": {k: r.to_dict() for k, r in results.items()}, "all_passed": ok}
    _emit(_dump(summary), cfg.out)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_twist_report(args):
    cfg = load_config(args.config, "twist-report", args.seed, args.out)
    spec = twist_spec(cfg)
    res = cfg.resolution or (64, 64)
    if len(res) == 1:
        res = res * 2
    report = twist_report(spec, cfg.epsilons, res[0], res[1])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = report.columns() + ["fitted_limit", "slope"]
    writer.writerow(header)
    for row in report.table():
        writer.writerow([repr(float(v)) for v in row] + ["", ""])
    blank = [""] * (len(header) - 3)
    for name in report.columns()[1:]:
        if name in report.fits:
            limit, slope = report.fits[name]
            writer.writerow([name] + blank + [repr(limit), repr(slope)])
    _emit(buf.getvalue(), cfg.out)
    return EXIT_OK


def cmd_obstruction(args):
    _emit(_dump(obstruction_witness(args.alpha).to_dict()), args.out)
    return EXIT_OK


def cmd_holonomy(args):
    if not args.word:
        raise InvalidInput("--word is required")
    value = holonomy(args.word, args.alpha)
    result = {"word": args.word, "alpha": args.alpha, "holonomy": _complex(value),
              "winding": relator_winding(args.word)}
    _emit(_dump(result), args.out)
    return EXIT_OK


def _finite(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("must be finite")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return v


def _positive(text):
    v = _seed(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    p = _Parser(prog="berezin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="JSON run configuration")
        sp.add_argument("--seed", type=_seed, default=None, help="random seed (default 0)")
        sp.add_argument("--out", help="write the result here instead of stdout")

    sp = sub.add_parser("cocycle", help="c for two matrices, or C for two maps")
    common(sp)
    sp.set_defaults(func=cmd_cocycle)

    sp = sub.add_parser("verify", help="run property suites")
    common(sp)
    sp.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)} or all")
    sp.add_argument("--trials", type=_positive, default=100)
    sp.add_argument("--alpha", type=_finite, default=0.5)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("twist-report", help="epsilon sweep of twist invariants as CSV")
    common(sp)
    sp.set_defaults(func=cmd_twist_report)

    sp = sub.add_parser("obstruction", help="holonomy witness for alpha")
    sp.add_argument("--alpha", type=_finite, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_obstruction)

    sp = sub.add_parser("holonomy", help="holonomy of a relation word")
    sp.add_argument("--word", required=True, help="comma list of I, J, K, I^-1, ...")
    sp.add_argument("--alpha", type=_finite, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_holonomy)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        with np.errstate(all="ignore"):
            return args.func(args)
    except InvalidInput as exc:
        print(f"berezin: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"berezin: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BerezinError as exc:
        # domain violations and unsupported requests are input problems
        print(f"berezin: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
