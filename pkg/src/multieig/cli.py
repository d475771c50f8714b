"""Command line front end.

    multieig run PROBLEM [--mu RE IM] [--weights w0,...,wm] [--tol-mult X]
                         [--tol-eig X] [--lower-bound X] [--out REPORT]
    multieig curve PROBLEM --range A B --steps N --out FILE.csv
    multieig check-normal PROBLEM

Exit status: 0 on success (including the partial report of the tied case),
2 for problem-file errors, 3 for violated mathematical preconditions,
4 for internal-consistency failures, 5 when the perturbed polynomial fails
the multiple-eigenvalue check, 1 for anything else.
"""

import argparse
import csv
from dataclasses import replace
import json
import logging
import math
import sys

import numpy as np

from . import matpoly, svcurve
from .errors import (
    ConsistencyError,
    MultiEigError,
    PreconditionError,
    ProblemFileError,
)
from .perturbation import WeightSet
from .pipeline import report_dict, run_pipeline
from .problem import parse_problem

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_CONSISTENCY = 4
EXIT_VERIFICATION = 5


def _round16(obj):
    """Round floats to 16 significant digits, recursively."""
    if obj is None:
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x:.16g}") if math.isfinite(x) else None
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round16(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round16(v) for v in obj]
    return obj


def format_report(doc):
    return json.dumps(_round16(doc), indent=2) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _apply_overrides(spec, args):
    kw = {}
    if getattr(args, "mu", None) is not None:
        kw["mu"] = complex(args.mu[0], args.mu[1])
    if getattr(args, "weights", None) is not None:
        try:
            w = [float(x) for x in args.weights.split(",")]
            kw["weights"] = WeightSet(w)
        except ValueError as exc:
            raise ProblemFileError(f"--weights: {exc}") from exc
    tol = spec.tolerances.updated(tol_mult=getattr(args, "tol_mult", None),
                                  tol_eig=getattr(args, "tol_eig", None))
    kw["tolerances"] = tol
    if getattr(args, "lower_bound", None) is not None:
        kw["lower_bound"] = args.lower_bound
    return replace(spec, **kw)


def cmd_run(args):
    spec = _apply_overrides(parse_problem(args.problem), args)
    res = run_pipeline(spec)
    _emit(format_report(report_dict(res)), args.out)
    if res.partial:
        return EXIT_OK
    return EXIT_OK if res.perturbation.success else EXIT_VERIFICATION


def export_curve(spec, gamma_range, steps, path):
    """Write ``gamma, s_{2n-1}, s_{2n-2}`` samples to a CSV file."""
    if steps < 2:
        raise ValueError("steps must be at least 2")
    a, b = gamma_range
    rows = svcurve.curve_samples(spec.polynomial, spec.mu, np.linspace(a, b, steps))
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["gamma", "s_2n_minus_1", "s_2n_minus_2"])
        for g, s1, s2 in rows:
            wr.writerow([f"{g:.16g}", f"{s1:.16g}", f"{s2:.16g}"])
    return rows


def cmd_curve(args):
    spec = _apply_overrides(parse_problem(args.problem), args)
    try:
        export_curve(spec, args.range, args.steps, args.out)
    except OSError as exc:
        print(f"[cli] cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_OTHER
    return EXIT_OK


def cmd_check_normal(args):
    spec = parse_problem(args.problem)
    wit = matpoly.is_weakly_normal(spec.polynomial, spec.tolerances.tol_weak,
                                   seed=spec.tolerances.seed)
    doc = {
        "is_weakly_normal": wit.is_weakly_normal,
        "normality_defect": wit.normality_defect,
        "commutator_defect": wit.commutator_defect,
        "residual": None if np.isnan(wit.residual) else wit.residual,
        "tol_weak": spec.tolerances.tol_weak,
    }
    if wit.is_weakly_normal:
        doc["diagonalizer"] = [[[z.real, z.imag] for z in row] for row in wit.diagonalizer]
    sys.stdout.write(format_report(doc))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="multieig",
        description="Distance bound from a matrix polynomial to polynomials with a "
                    "prescribed multiple eigenvalue.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="full pipeline, writes a JSON report")
    r.add_argument("problem")
    r.add_argument("--mu", nargs=2, type=float, metavar=("RE", "IM"))
    r.add_argument("--weights", help="comma separated w0,...,wm")
    r.add_argument("--tol-mult", type=float)
    r.add_argument("--tol-eig", type=float)
    r.add_argument("--lower-bound", type=float,
                   help="externally computed lower bound, echoed in the report")
    r.add_argument("--out")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("curve", help="export s_{2n-1} and s_{2n-2} over a gamma grid")
    c.add_argument("problem")
    c.add_argument("--range", nargs=2, type=float, metavar=("A", "B"), default=(0.0, 10.0))
    c.add_argument("--steps", type=int, default=1000)
    c.add_argument("--mu", nargs=2, type=float, metavar=("RE", "IM"))
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_curve)

    k = sub.add_parser("check-normal", help="weak normality test")
    k.add_argument("problem")
    k.set_defaults(func=cmd_check_normal)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ProblemFileError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PRECONDITION
    except ConsistencyError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONSISTENCY
    except MultiEigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_OTHER
    except ValueError as exc:
        print(f"[cli] {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
