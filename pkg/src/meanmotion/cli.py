"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
Logging verbosity comes from ``MEANMOTION_LOG`` (error, warn, info, debug).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import replace

import numpy as np

from .bessel import bessel_eval, jp_integral_oracle
from .exceptions import NumericalError, ValidationError
from .problem import load_problem
from .report import CONVERGENCE_HEADER, analyze, convergence_rows
from .spectral import OscillatorSum
from .switching import ZeroConfig, count_zeros, simulate_bang_bang
from .torus_volume import QuadratureConfig, torus_volume

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _uint64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meanmotion",
        description="Switching-point density of bang-bang controls via the mean motion of oscillator sums.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full analysis of a problem file")
    p.add_argument("--input", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--horizons", type=_float_list, default=None, help="extra horizons for the empirical mean motion")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--tol", type=float, default=None, help="quadrature tolerance override")

    p = sub.add_parser("convergence", help="empirical mean motion and zero density versus T")
    p.add_argument("--input", required=True)
    p.add_argument("--T-max", dest="T_max", type=float, required=True)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("wvolume", help="torus volume W_m(r; amps)")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--amps", type=_float_list, required=True)
    p.add_argument("--method", choices=("auto", "closed", "bww", "mc"), default="auto")
    p.add_argument("--seed", type=_uint64, default=None)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--format", choices=("json", "table"), default="table")

    p = sub.add_parser("zeros", help="count zeros of Re sum a_k exp(i l_k t) on [0, T]")
    p.add_argument("--freqs", type=_float_list, default=None)
    p.add_argument("--amps", type=_float_list, default=None, help="real amplitudes")
    p.add_argument("--input", default=None)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--format", choices=("json", "table"), default="table")

    p = sub.add_parser("bessel", help="evaluate J0 or J1")
    p.add_argument("--order", type=int, choices=(0, 1), required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--oracle", action="store_true", help="also evaluate the integral definition")
    p.add_argument("--format", choices=("json", "table"), default="table")

    p = sub.add_parser("simulate", help="bang-bang closed loop for a system or blocks problem")
    p.add_argument("--input", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--x0", type=_float_list, default=None, help="initial state (default: zeros)")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("MEANMOTION_LOG", "warn").lower()
    logging.basicConfig(level=_LOG_LEVELS.get(level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    handler = globals()[f"_cmd_{args.command}"]
    try:
        out = handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.write(out)
    return EXIT_OK


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _positive(name, value):
    if not (value is not None and math.isfinite(value) and value > 0):
        raise ValidationError(f"--{name} must be a positive number, got {value}")


def _cmd_analyze(args) -> str:
    _positive("T", args.T)
    problem = load_problem(args.input)
    if args.tol is not None:
        problem = replace(problem, quadrature=replace(problem.quadrature, tol=args.tol))
    horizons = args.horizons or ()
    for h in horizons:
        _positive("horizons", h)
    report = analyze(problem, args.T, horizons)
    if args.format == "json":
        return _dump(report)
    return _table_report(report)


def _table_report(report: dict) -> str:
    lines = [f"input form        {report['input_form']}"]
    if report["spectrum"] is not None:
        lines.append(f"purely imaginary  {report['spectrum']['purely_imaginary']}")
        lines.append(f"controllable      {report['controllability']['controllable']} "
                     f"(rank {report['controllability']['kalman_rank']})")
    lines.append("")
    lines.append(f"{'|a_k|':>14} {'lambda_k':>14} {'V_k':>14}")
    for osc, w in zip(report["oscillators"], report["mean_motion"]["weights"]):
        lines.append(f"{osc['abs']:14.8g} {osc['freq']:14.8g} {w:14.8g}")
    lines.append("")
    mm = report["mean_motion"]
    lines.append(f"resonance         {report['resonance']['status']}"
                 + (f" witness {report['resonance']['witness']}" if report['resonance']['witness'] else ""))
    lines.append(f"Omega             {mm['omega']:.10g} +/- {mm['omega_error']:.2g}")
    z = report["zeros"]
    b = report["bound"]
    lines.append(f"N({z['T']:g})           {z['count']}")
    lines.append(f"lower bound       {b['lower_bound']:.6g} (holds: {b['holds']})")
    if report["density_ratio"] is not None:
        lines.append(f"N pi / (|Omega| T) {report['density_ratio']:.6g}")
    for e in report["empirical"]:
        lines.append(f"Phi(T)/T at T={e['T']:g}: {e['omega_hat']:.10g} (min |z| {e['min_abs_z']:.3g})")
    return "\n".join(lines) + "\n"


def _cmd_convergence(args) -> str:
    _positive("T-max", args.T_max)
    if args.points < 2:
        raise ValidationError(f"--points must be >= 2, got {args.points}")
    problem = load_problem(args.input)
    rows = convergence_rows(problem, args.T_max, args.points, args.spacing)
    if args.format == "json":
        return _dump({
            "rows": [dict(zip(CONVERGENCE_HEADER, r)) for r in rows],
            "final_abs_error": abs(rows[-1][1] - rows[-1][2]),
        })
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONVERGENCE_HEADER)
    for r in rows:
        writer.writerow([repr(float(r[0])), repr(float(r[1])), repr(float(r[2])), int(r[3]), repr(float(r[4]))])
    return buf.getvalue()


def _cmd_wvolume(args) -> str:
    cfg = QuadratureConfig(tol=args.tol) if args.tol is not None else None
    res = torus_volume(args.r, args.amps, method=args.method, cfg=cfg, samples=args.samples, seed=args.seed)
    if args.format == "json":
        return _dump({"value": res.value, "method": res.method, "error_estimate": res.error_estimate,
                      "detail": res.detail})
    return f"{res.value!r}\n"


def _cmd_zeros(args) -> str:
    _positive("T", args.T)
    if args.input is not None:
        if args.freqs is not None or args.amps is not None:
            raise ValidationError("give either --input or --freqs/--amps, not both")
        problem = load_problem(args.input)
        osc, zcfg = problem.oscillators, problem.zero
    else:
        if args.freqs is None or args.amps is None:
            raise ValidationError("--freqs and --amps are required without --input")
        if len(args.freqs) != len(args.amps):
            raise ValidationError("--freqs and --amps must have the same length")
        osc, zcfg = OscillatorSum(np.array(args.amps, dtype=complex), args.freqs), ZeroConfig()
    res = count_zeros(osc, args.T, zcfg)
    if args.format == "json":
        return _dump({"count": res.count, "zeros": res.zeros.tolist(), "grid_step": res.grid_step,
                      "suspect_tangencies": res.suspect_tangencies.tolist()})
    return f"{res.count}\n"


def _cmd_bessel(args) -> str:
    ev = bessel_eval(args.order, args.x)
    out = {"order": args.order, "x": args.x, "value": ev.value, "abs_error_estimate": ev.abs_error_estimate}
    if args.oracle:
        out["oracle"] = jp_integral_oracle(args.order, args.x)
    if args.format == "json":
        return _dump(out)
    return f"{ev.value!r}\n" + (f"{out['oracle']!r}\n" if args.oracle else "")


def _cmd_simulate(args) -> str:
    _positive("T", args.T)
    _positive("h", args.h)
    problem = load_problem(args.input)
    if problem.system is None:
        raise ValidationError("simulate needs a 'system' or 'blocks' problem")
    x0 = args.x0 if args.x0 is not None else np.zeros(problem.system.n)
    traj = simulate_bang_bang(problem.system, x0, args.T, args.h, osc=problem.oscillators)
    if args.format == "json":
        return _dump({
            "switch_times": traj.switch_times.tolist(),
            "t": traj.t.tolist(),
            "x": traj.x.tolist(),
            "u": traj.u.tolist(),
        })
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"x{i + 1}" for i in range(problem.system.n)] + ["u"])
    for t, x, u in traj:
        writer.writerow([repr(float(t))] + [repr(float(v)) for v in x] + [int(u)])
    return buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
