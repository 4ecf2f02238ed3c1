"""Command-line front end: ``qcs-gauss {qcs,sweep,breed,wigner}``.

Exit codes: 0 success, 1 usage or parse error (including the term cap),
2 state fails validation, 3 numerical failure.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import io, oracle, states
from .core import qcs, validate
from .errors import (
    GridTooCoarse,
    HermiticityViolation,
    NonPositiveDefinite,
    SingularCovariance,
    SingularPairSum,
    TermCapExceeded,
    TruncationTooTight,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

SWEEP_AXES = ("eta", "alpha", "epsilon", "r")
NUMERICAL_ERRORS = (
    SingularPairSum,
    SingularCovariance,
    GridTooCoarse,
    TruncationTooTight,
    NonPositiveDefinite,
    HermiticityViolation,
)


class ValidationFailed(Exception):
    def __init__(self, diagnostics):
        super().__init__("state failed validation")
        self.diagnostics = diagnostics


def fmt(value):
    """Fixed 17-significant-digit rendering used for every CSV field."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(rows, header, out):
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


def _emit(rows, header, path):
    if path is None:
        _write_csv(rows, header, sys.stdout)
    else:
        with open(path, "w", newline="") as fh:
            _write_csv(rows, header, fh)


def _diagnostics_dict(diag):
    return {
        "normalization_residual": diag.normalization_residual,
        "hermiticity_residual": diag.hermiticity_residual,
        "symmetry_residual": float(np.max(diag.symmetry_residuals)),
    }


def _checked_state(doc):
    state = io.build_state(doc)
    diag = validate(state)
    if not diag.ok():
        raise ValidationFailed(diag)
    return state


# ---------------------------------------------------------------------------
# subcommands


def cmd_qcs(args):
    state = _checked_state(io.load_document(args.document))
    report = qcs(state).as_dict()
    report["diagnostics"] = _diagnostics_dict(validate(state))
    print(json.dumps(report, indent=2))
    return EXIT_OK


def cmd_sweep(args):
    if args.steps < 1:
        raise io.DocumentError("--steps must be at least 1")
    doc = io.load_document(args.document)
    rows = []
    for value in np.linspace(args.start, args.stop, args.steps):
        state = _checked_state(io.with_parameter(doc, args.param, float(value)))
        report = qcs(state)
        row = [value, report.qcs_squared, report.purity]
        if args.negativity:
            row.append(oracle.negativity_volume(state))
        rows.append(row)
    header = [args.param, "qcs_squared", "purity"] + (["negativity"] if args.negativity else [])
    _emit(rows, header, args.out)
    return EXIT_OK


def _gkp_reference(r):
    if r <= 0:
        return math.nan
    return qcs(states.gkp(states.gkp_reference_epsilon(r))).qcs_squared


def cmd_breed(args):
    if args.rounds < 0:
        raise io.DocumentError("--rounds must be non-negative")
    reference = _gkp_reference(args.r)
    rows = []
    for m in range(args.rounds + 1):
        state = states.breed(args.alpha, args.r, m, args.protocol)
        report = qcs(state)
        rows.append([m, report.qcs_squared, report.purity, state.n_terms, reference])
    _emit(rows, ["M", "qcs_squared", "purity", "n_terms", "gkp_reference"], args.out)
    return EXIT_OK


def _section_value(text):
    text = text.strip()
    if text.startswith("p="):
        text = text[2:]
    try:
        return float(text)
    except ValueError as exc:
        raise io.DocumentError(f"cannot parse section {text!r}; use e.g. p=0") from exc


def cmd_wigner(args):
    state = _checked_state(io.load_document(args.document))
    if state.n_modes != 1:
        raise io.DocumentError("wigner output needs a one-mode state")
    default = oracle.auto_grid(state)
    half = default.half_width if args.half_width is None else args.half_width
    center = (
        default.center[0] if args.center_x is None else args.center_x,
        default.center[1] if args.center_p is None else args.center_p,
    )
    grid = oracle.GridSpec(half, args.points, center)
    if args.section is not None:
        p = _section_value(args.section)
        xs = grid.axes()[0]
        w = oracle.wigner_section(state, xs, p).real
        rows = [(x, p, v) for x, v in zip(xs, w)]
    else:
        xs, ps, w, _ = oracle.wigner_grid(state, grid)
        w = w.real
        rows = [(x, p, w[i, j]) for i, x in enumerate(xs) for j, p in enumerate(ps)]
    _emit(rows, ["x", "p", "W"], args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser():
    parser = _Parser(prog="qcs-gauss", description="Quadrature coherence scale of Gaussian-sum states.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("qcs", help="report purity and QCS of a state document as JSON")
    p.add_argument("document", help="state document (JSON)")
    p.set_defaults(func=cmd_qcs)

    p = sub.add_parser("sweep", help="sweep one parameter and write CSV")
    p.add_argument("document", help="state document (JSON)")
    p.add_argument("--param", required=True, choices=SWEEP_AXES)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--negativity", action="store_true", help="add the negativity volume column")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("breed", help="QCS after each breeding round, as CSV")
    p.add_argument("--alpha", type=float, default=None, help="defaults to the GKP-spacing amplitude")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--protocol", choices=("slow", "efficient"), default="slow")
    p.add_argument("--out")
    p.set_defaults(func=cmd_breed)

    p = sub.add_parser("wigner", help="dump the Wigner function on a grid, as CSV")
    p.add_argument("document", help="state document (JSON)")
    p.add_argument("--half-width", type=float)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--center-x", type=float)
    p.add_argument("--center-p", type=float)
    p.add_argument("--section", help="emit only the slice at fixed p, e.g. p=0")
    p.add_argument("--out")
    p.set_defaults(func=cmd_wigner)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except ValidationFailed as exc:
        print(json.dumps({"error": "validation failed", **_diagnostics_dict(exc.diagnostics)}, indent=2))
        return EXIT_INVALID
    except (io.DocumentError, TermCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
