"""Batch command line front end.

Exit status: 0 success, 1 validation error, 2 numeric tolerance failure.
Failures print a JSON error object ``{"error": {"code", "message"}}`` on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import almost_periodic as ap
from .entire import (
    EvalConfig,
    eval_F,
    eval_f,
    eval_g,
    eval_logderiv_direct,
    eval_logderiv_spectral,
    logderiv_direct_defect,
    spectral_cutoff,
)
from .errors import NumericalError, QCKitError, ValidationError
from .io import dumps, parse_measure, spectrum_for, write_atomic
from .multiset import Window
from .poisson import GaussianTest, poisson_residual
from .spectrum import empirical_spectrum, mass_growth, spectral_tail_bound

EXIT_OK, EXIT_INVALID, EXIT_TOLERANCE = 0, 1, 2
FUNCTIONS = ("f", "logderiv-direct", "logderiv-spectral", "g", "F")


class _UsageError(ValidationError):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class ToleranceExceeded(NumericalError):
    code = "tolerance_exceeded"

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


def parse_grid(text: str) -> tuple[np.ndarray, float]:
    """``"x0:x1:step@y"`` -> (x values including x1 when on the lattice, y)."""
    try:
        xs, y = text.split("@")
        x0, x1, step = (float(v) for v in xs.split(":"))
        y = float(y)
    except ValueError as exc:
        raise _UsageError(f"bad grid {text!r}; expected x0:x1:step@y") from exc
    if step <= 0 or x1 < x0:
        raise _UsageError(f"bad grid {text!r}: need step > 0 and x0 <= x1")
    n = int(math.floor((x1 - x0) / step + 1e-9))
    return x0 + step * np.arange(n + 1), y


def _load_input(arg: str | None) -> dict:
    if arg is None:
        raise _UsageError("--input is required")
    text = arg if arg.lstrip().startswith("{") else Path(arg).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        err = ValidationError(f"malformed JSON input: {exc}")
        err.code = "malformed_json"
        raise err from exc
    if not isinstance(doc, dict):
        raise ValidationError("input must be a JSON object")
    return doc


def _measure_doc(doc: dict) -> dict:
    return doc["measure"] if "measure" in doc else doc


def _config(args, doc: dict) -> EvalConfig:
    kw = dict(doc.get("config", {}))
    if args.truncation is not None:
        kw["truncation"] = args.truncation
    if args.include_zero_atom is not None:
        kw["include_zero_atom"] = args.include_zero_atom
    if args.tolerance is not None:
        kw["abs_tol"] = args.tolerance
    try:
        return EvalConfig(**kw)
    except TypeError as exc:
        raise ValidationError(f"bad config: {exc}") from exc


def cmd_generate(args, doc):
    return parse_measure(_measure_doc(doc)).to_json()


def cmd_density(args, doc):
    A = parse_measure(_measure_doc(doc))
    lengths = doc.get("lengths") or [A.window.length * f for f in (0.01, 0.1, 1.0)]
    est = ap.estimate_density(A, lengths, doc.get("center"))
    return {"d": est.d, "lengths": est.lengths, "counts": est.counts, "eta": est.eta}


def cmd_decompose(args, doc):
    A = parse_measure(_measure_doc(doc))
    d = doc.get("density") or ap.estimate_density(A, [A.window.length]).d
    D = ap.decompose(A, float(d))
    if args.format == "csv":
        buf = _stdio.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "phi"])
        for n, p in zip(D.indices, D.phi):
            w.writerow([int(n), repr(float(p))])
        return buf.getvalue()
    return {"density": D.density, "n_min": D.n_min, "n_max": D.n_max, "sup_phi": D.sup_phi}


def cmd_almost_periods(args, doc):
    A = parse_measure(_measure_doc(doc))
    eps = float(doc.get("epsilon", 0.05))
    lo, hi = doc.get("tau_range", [0.0, 10.0])
    span = Window.closed(lo, hi)
    taus = ap.find_almost_periods(A, eps, span, float(doc.get("tau_step", eps / 2)), doc.get("density"))
    reports = [ap.is_almost_period(A, t, eps, doc.get("density")) for t in taus]
    return {
        "epsilon": eps,
        "tau_range": [lo, hi],
        "almost_periods": [{"tau": r.tau, "h": r.index_shift, "mismatch": r.max_mismatch} for r in reports],
        "max_gap": ap.max_gap(taus, span),
    }


def cmd_spectrum(args, doc):
    mdoc = _measure_doc(doc)
    if "candidates" in doc:
        A = parse_measure(mdoc)
        band = doc.get("band")
        S = empirical_spectrum(
            A, doc["candidates"], float(doc.get("T", A.window.hi)), doc.get("probes"),
            None if band is None else Window.closed(*band),
        )
    else:
        S = spectrum_for(doc, mdoc)
    out = S.to_json()
    if doc.get("growth_radii"):
        g = mass_growth(S, doc["growth_radii"])
        out["growth"] = {"r": g.r, "mass": g.mass, "kappa": g.kappa}
    return out


def _eval_grid(args, doc):
    fn = args.function
    cfg = _config(args, doc)
    mdoc = _measure_doc(doc)
    grids = [parse_grid(g) for g in (args.grid or [])]
    if not grids:
        raise _UsageError("--grid is required for evaluate")
    z = np.concatenate([x + 1j * y for x, y in grids])
    header = {"function": fn, "config": cfg.__dict__, "points": int(z.size)}
    if fn in ("f", "logderiv-direct", "F"):
        A = parse_measure(mdoc)
    if fn in ("logderiv-spectral", "g", "F"):
        S = spectrum_for(doc, mdoc)
    if fn == "f":
        vals = eval_f(A, z, cfg)
    elif fn == "logderiv-direct":
        vals = eval_logderiv_direct(A, z, cfg)
        header["max_defect"] = float(np.max(logderiv_direct_defect(A, z, cfg)))
    elif fn == "logderiv-spectral":
        vals = eval_logderiv_spectral(S, z, cfg)
        bounds = []
        for y in sorted({float(v) for v in z.imag}):
            T = cfg.series_cutoff or spectral_cutoff(S, y, cfg.abs_tol)
            bounds.append(spectral_tail_bound(S, T, y))
        header["tail_bound"] = max(bounds)
    elif fn == "g":
        vals = eval_g(S, z)
    else:
        vals = eval_F(A, S, z, cfg)
    return z, np.asarray(vals, dtype=complex), header


def cmd_evaluate(args, doc):
    z, vals, header = _eval_grid(args, doc)
    if args.format == "csv":
        buf = _stdio.StringIO()
        buf.write("# " + json.dumps(json.loads(dumps(header)), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "re", "im"])
        for zz, v in zip(z, vals):
            w.writerow([repr(float(zz.real)), repr(float(zz.imag)), repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()
    return {**header, "x": z.real, "y": z.imag, "re": vals.real, "im": vals.imag}


def cmd_verify(args, doc):
    tol = args.tolerance if args.tolerance is not None else float(doc.get("tolerance", 1e-8))
    mdoc = _measure_doc(doc)
    A = parse_measure(mdoc)
    S = spectrum_for(doc, mdoc)
    if args.check == "poisson":
        g = doc.get("gaussian", {})
        h = GaussianTest(float(g.get("scale", 1.0)), float(g.get("center", 0.0)))
        r = poisson_residual(A, S, h, float(doc.get("lambda_cutoff", 50.0)), float(doc.get("gamma_cutoff", 50.0)))
        report = {
            "check": "poisson",
            "lhs": r.lhs,
            "rhs": r.rhs,
            "residual": r.residual,
            "tail_bounds": [r.tail_bound_lhs, r.tail_bound_rhs],
            "tolerance": tol,
        }
    else:
        cfg = _config(args, {**doc, "config": {**doc.get("config", {})}})
        grids = [parse_grid(g) for g in (args.grid or ["-5:5:0.25@1", "-5:5:0.25@-1"])]
        z = np.concatenate([x + 1j * y for x, y in grids])
        diff = np.abs(eval_logderiv_direct(A, z, cfg) - eval_logderiv_spectral(S, z, cfg))
        report = {"check": "logderiv", "residual": float(diff.max()), "points": int(z.size), "tolerance": tol}
    report["passed"] = bool(report["residual"] <= tol)
    if not report["passed"]:
        raise ToleranceExceeded(f"residual {report['residual']:.3g} above tolerance {tol:.3g}", report)
    return report


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", help="path to a JSON document, or inline JSON")
    common.add_argument("--output", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tolerance", type=float, help="residual gate / absolute tolerance")
    common.add_argument("--truncation", type=int, help="symmetric index cutoff N")
    common.add_argument("--include-zero-atom", action=argparse.BooleanOptionalAction, default=None)
    common.add_argument("--grid", action="append", help='evaluation line "x0:x1:step@y" (repeatable)')

    parser = _Parser(prog="qckit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, fn in [
        ("generate", cmd_generate),
        ("density", cmd_density),
        ("decompose", cmd_decompose),
        ("almost-periods", cmd_almost_periods),
        ("spectrum", cmd_spectrum),
    ]:
        sub.add_parser(name, parents=[common]).set_defaults(handler=fn)
    ev = sub.add_parser("evaluate", parents=[common])
    ev.add_argument("function", choices=FUNCTIONS)
    ev.set_defaults(handler=cmd_evaluate)
    vf = sub.add_parser("verify", parents=[common])
    vf.add_argument("check", choices=("poisson", "logderiv"))
    vf.set_defaults(handler=cmd_verify)
    return parser


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else dumps(payload)
    if args is not None and args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def _fail(exc: Exception, status: int) -> int:
    code = getattr(exc, "code", "error")
    sys.stderr.write(json.dumps({"error": {"code": code, "message": str(exc)}}, sort_keys=True) + "\n")
    return status


def run(argv=None) -> int:
    args = None
    try:
        args = build_parser().parse_args(argv)
        doc = _load_input(args.input)
        _emit(args, args.handler(args, doc))
        return EXIT_OK
    except ToleranceExceeded as exc:
        _emit(args, exc.report)
        return _fail(exc, EXIT_TOLERANCE)
    except NumericalError as exc:
        return _fail(exc, EXIT_TOLERANCE)
    except (QCKitError, OSError, KeyError) as exc:
        if isinstance(exc, KeyError):
            exc = ValidationError(f"missing field {exc}")
        return _fail(exc, EXIT_INVALID)


def main() -> None:
    sys.exit(run())
