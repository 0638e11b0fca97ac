"""Command-line interface: propagator sweeps, wave evolution, diffusion scans, validation.

Usage examples::

    relprop propagator --model salpeter --method closed --m 1 --t-grid 0.01:2.56:9:log --x-rel 0:5:256
    relprop wavefunction --delta 1 --t 1 --m 1 --n-points 4001 --output psi.csv
    relprop moments --t-min 1e-3 --t-max 1e3 --points-per-decade 8 --m 1
    relprop validate --suite all --json report.json

Options may also come from a JSON file given by ``--config`` whose keys mirror
the long flag names; explicit flags take precedence.  No environment variables
are read.  Every number is written with 17 significant digits.

Exit codes: 0 success, 1 validation failure, 2 usage or configuration error,
3 quadrature non-convergence (only with ``--strict``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from .baeumer import (
    baeumer_closed,
    baeumer_gaussian_limit,
    baeumer_integral_inner,
    diffusion_scan,
)
from .exceptions import ConvergenceError, LightConeSingularity, RelpropError
from .quadrature import QuadratureConfig
from .salpeter import (
    CONE_EXCLUSION,
    salpeter_classical,
    salpeter_closed,
    salpeter_integral_inner,
    salpeter_integral_outer,
)
from .series import DEFAULT_ORDER, series_propagator
from .verify import SUITES, run_suite
from .wavefunc import default_grid, evolve, initial_state, total_probability

__all__ = ["main", "build_parser", "PROPAGATOR_HEADER", "EXIT_OK", "EXIT_VALIDATION",
           "EXIT_USAGE", "EXIT_NONCONVERGENCE"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3

PROPAGATOR_HEADER = ["model", "method", "m", "t", "x", "re", "im", "abs", "phase", "err_estimate", "flags"]

#: Fallback values for options that neither a flag nor the config file set.
DEFAULTS = {
    "model": "salpeter",
    "method": "closed",
    "m": 1.0,
    "order": DEFAULT_ORDER,
    "delta": 1.0,
    "n_points": 4001,
    "points_per_decade": 8,
    "suite": "all",
    "perturb": 0.0,
    "format": "csv",
    "output": None,
    "json": None,
    "strict": False,
    "abs_tol": 1e-10,
    "rel_tol": 1e-8,
    "max_subdivisions": 2000,
}


class UsageError(Exception):
    """Invalid combination of options."""


def fmt(value) -> str:
    """17-significant-digit representation (exact round trip for doubles)."""
    return format(float(value), ".17g")


# ---------------------------------------------------------------------------
# option handling
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with option values (flags take precedence)")
    p.add_argument("--output", "-o", help="output file (default: standard output)")
    p.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
    p.add_argument("--strict", action="store_true", default=None,
                   help="exit with status 3 on quadrature non-convergence")
    p.add_argument("--abs-tol", type=float, help="absolute quadrature tolerance")
    p.add_argument("--rel-tol", type=float, help="relative quadrature tolerance")
    p.add_argument("--max-subdivisions", type=int, help="quadrature subdivision budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relprop",
        description="Relativistic (Salpeter) and diffusion (Baeumer) propagators in 1+1 dimensions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagator", help="tabulate G(x, t) on a grid")
    p.add_argument("--model", choices=["salpeter", "baeumer"])
    p.add_argument("--method", choices=["closed", "integral", "series", "classical"])
    p.add_argument("--m", type=float, help="mass (>= 0)")
    tg = p.add_mutually_exclusive_group()
    tg.add_argument("--t", type=float, help="single time")
    tg.add_argument("--t-grid", help="MIN:MAX:COUNT[:lin|log]")
    xg = p.add_mutually_exclusive_group()
    xg.add_argument("--x", type=float, help="single position")
    xg.add_argument("--x-grid", help="MIN:MAX:COUNT (absolute positions)")
    xg.add_argument("--x-rel", help="MIN:MAX:COUNT in multiples of t")
    p.add_argument("--order", type=int, help="series truncation order (even)")
    _add_common(p)

    p = sub.add_parser("wavefunction", help="evolve the cosine bump and tabulate psi(t, x)")
    p.add_argument("--delta", type=float, help="initial support width")
    p.add_argument("--t", type=float, help="time (0 samples the initial state)")
    p.add_argument("--m", type=float, help="mass (>= 0)")
    p.add_argument("--n-points", type=int, help="grid points (default 4001)")
    p.add_argument("--x-min", type=float, help="grid start (default: symmetric automatic grid)")
    p.add_argument("--x-max", type=float, help="grid end")
    _add_common(p)

    p = sub.add_parser("moments", help="peak value and second moment of the diffusion kernel")
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--points-per-decade", type=int)
    p.add_argument("--m", type=float, help="mass (> 0)")
    _add_common(p)

    p = sub.add_parser("validate", help="run consistency checks and emit a JSON report")
    p.add_argument("--suite", choices=list(SUITES))
    p.add_argument("--json", help="also write the report to this file")
    p.add_argument("--perturb", type=float,
                   help="multiply one side of every relation by 1 + PERTURB (fault injection)")
    _add_common(p)
    return parser


def resolve(args: argparse.Namespace) -> Dict[str, object]:
    """Merge flags, the optional config file and defaults (in that precedence)."""
    file_values: Dict[str, object] = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config file {args.config!r}: {exc}") from exc
        if not isinstance(raw, dict):
            raise UsageError("config file must contain a JSON object")
        file_values = {k.replace("-", "_"): v for k, v in raw.items()}
    known = {k for k in vars(args) if k not in ("command", "config")}
    unknown = sorted(set(file_values) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    resolved: Dict[str, object] = {"command": args.command}
    for key in sorted(known):
        value = getattr(args, key)
        if value is None:
            value = file_values.get(key, DEFAULTS.get(key))
        resolved[key] = value
    return resolved


def _quad_config(opts) -> QuadratureConfig:
    try:
        return QuadratureConfig(abs_tol=float(opts["abs_tol"]), rel_tol=float(opts["rel_tol"]),
                                max_subdivisions=int(opts["max_subdivisions"]))
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def parse_grid(spec: str, allow_log: bool = True) -> np.ndarray:
    """Parse ``MIN:MAX:COUNT[:lin|log]`` into an array of points."""
    parts = str(spec).split(":")
    if len(parts) not in (3, 4):
        raise UsageError(f"grid {spec!r} must look like MIN:MAX:COUNT[:lin|log]")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad grid {spec!r}: {exc}") from exc
    spacing = parts[3] if len(parts) == 4 else "lin"
    if count < 1:
        raise UsageError("grid count must be at least 1")
    if spacing not in ("lin", "log") or (spacing == "log" and not allow_log):
        raise UsageError(f"unsupported grid spacing {spacing!r}")
    if hi < lo:
        raise UsageError("grid maximum is below its minimum")
    if count == 1:
        return np.array([lo])
    if spacing == "log":
        if lo <= 0:
            raise UsageError("log spacing requires positive bounds")
        return np.logspace(math.log10(lo), math.log10(hi), count)
    return np.linspace(lo, hi, count)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _emit(opts, header: Sequence[str], rows: List[list], meta: dict, trailer: Optional[list] = None) -> None:
    if opts["format"] == "json":
        records = [dict(zip(header, (_json_value(v) for v in row))) for row in rows]
        doc = {"meta": meta, "rows": records}
        if trailer is not None:
            doc["summary"] = {trailer[0]: _json_value(trailer[1])}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_value(v) for v in row])
        if trailer is not None:
            buf.write("#" + ",".join(_csv_value(v) for v in trailer) + "\n")
        text = buf.getvalue()
    if opts["output"]:
        with open(opts["output"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def _meta(opts) -> dict:
    return {k: opts[k] for k in sorted(opts)}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _evaluate(model, method, x, t, m, order, cfg):
    """Return (value, err_estimate, flags) for one propagator sample."""
    if model == "baeumer":
        if method == "closed":
            return complex(baeumer_closed(x, t, m)), 0.0, ""
        if method == "integral":
            value, err, ok = baeumer_integral_inner(x, t, m, cfg, with_error=True)
            return complex(value), err, "" if ok else "nonconverged"
        if method == "classical":
            return complex(baeumer_gaussian_limit(x, t, m)), None, ""
        raise UsageError("the series method is only available for the salpeter model")
    if abs(abs(x) - t) <= CONE_EXCLUSION * t:
        raise LightConeSingularity("on the light cone")
    if method == "closed":
        return complex(salpeter_closed(x, t, m)), 0.0, ""
    if method == "integral":
        fn = salpeter_integral_inner if abs(x) < t else salpeter_integral_outer
        value, err, ok = fn(x, t, m, cfg, with_error=True)
        return complex(value), err, "" if ok else "nonconverged"
    if method == "series":
        if abs(x) == t:
            raise LightConeSingularity("on the light cone")
        ev = series_propagator(x, t, m, order)
        return ev.value, ev.last_term_magnitude, ""
    return complex(salpeter_classical(x, t, m)), None, ""


def cmd_propagator(opts) -> int:
    cfg = _quad_config(opts)
    model, method = opts["model"], opts["method"]
    m = float(opts["m"])
    order = int(opts["order"])
    if m < 0:
        raise UsageError("--m must be non-negative")
    if method in ("series", "classical") and m == 0:
        raise UsageError(f"the {method} method requires m > 0")
    if method == "series" and (order < 0 or order % 2):
        raise UsageError("--order must be even and non-negative")
    if model == "baeumer" and method == "series":
        raise UsageError("the series method is only available for the salpeter model")
    if opts["t"] is not None:
        times = np.array([float(opts["t"])])
    elif opts["t_grid"] is not None:
        times = parse_grid(opts["t_grid"])
    else:
        raise UsageError("give --t or --t-grid")
    if np.any(times <= 0):
        raise UsageError("times must be positive")
    if opts["x"] is not None:
        x_of_t = lambda t: np.array([float(opts["x"])])  # noqa: E731
    elif opts["x_grid"] is not None:
        xs = parse_grid(opts["x_grid"], allow_log=False)
        x_of_t = lambda t: xs  # noqa: E731
    elif opts["x_rel"] is not None:
        fr = parse_grid(opts["x_rel"], allow_log=False)
        x_of_t = lambda t: fr * t  # noqa: E731
    else:
        raise UsageError("give --x, --x-grid or --x-rel")

    rows = []
    status = EXIT_OK
    for t in times:
        t = float(t)
        for x in x_of_t(t):
            x = float(x)
            try:
                value, err, flags = _evaluate(model, method, x, t, m, order, cfg)
            except LightConeSingularity:
                rows.append([model, method, m, t, x, None, None, None, None, None, "singular"])
                continue
            except ConvergenceError as exc:
                if opts["strict"]:
                    print(f"relprop: no convergence at t={t!r}, x={x!r}: {exc}", file=sys.stderr)
                    return EXIT_NONCONVERGENCE
                partial = exc.partial
                rows.append([model, method, m, t, x, None, None, None, None,
                             None if partial is None else float(partial.error_estimate),
                             "nonconverged"])
                continue
            if flags == "nonconverged" and opts["strict"]:
                print(f"relprop: no convergence at t={t!r}, x={x!r}", file=sys.stderr)
                return EXIT_NONCONVERGENCE
            magnitude = abs(value)
            phase = 0.5 - math.atan2(value.imag, value.real) / math.pi
            rows.append([model, method, m, t, x, value.real, value.imag, magnitude, phase,
                         None if err is None else float(err), flags])
    _emit(opts, PROPAGATOR_HEADER, rows, _meta(opts))
    return status


def cmd_wavefunction(opts) -> int:
    cfg = _quad_config(opts)
    delta = float(opts["delta"])
    m = float(opts["m"]) if opts["m"] is not None else float(DEFAULTS["m"])
    if opts["t"] is None:
        raise UsageError("give --t")
    t = float(opts["t"])
    n = int(opts["n_points"])
    if delta <= 0 or t < 0 or m < 0 or n < 2:
        raise UsageError("need delta > 0, t >= 0, m >= 0 and at least two grid points")
    if (opts["x_min"] is None) != (opts["x_max"] is None):
        raise UsageError("give both --x-min and --x-max, or neither")
    if opts["x_min"] is not None:
        spec = (float(opts["x_min"]), float(opts["x_max"]), n)
    else:
        spec = default_grid(delta, t, m, n)
    state = initial_state(delta, spec) if t == 0 else evolve(delta, t, m, spec, cfg)
    rows = [[x, a.real, a.imag, abs(a) ** 2] for x, a in zip(state.grid, state.amplitudes)]
    _emit(opts, ["x", "re", "im", "abs2"], rows, _meta(opts),
          trailer=["total_probability", total_probability(state)])
    return EXIT_OK


def cmd_moments(opts) -> int:
    cfg = _quad_config(opts)
    if opts["t_min"] is None or opts["t_max"] is None:
        raise UsageError("give --t-min and --t-max")
    m = float(opts["m"])
    summary = diffusion_scan(float(opts["t_min"]), float(opts["t_max"]),
                             int(opts["points_per_decade"]), m, cfg)
    rows = []
    n = len(summary.times)
    for i in range(n):
        inner = 0 < i < n - 1
        rows.append([summary.times[i], summary.peak_values[i], summary.second_moments[i],
                     summary.peak_slopes[i - 1] if inner else None,
                     summary.moment_slopes[i - 1] if inner else None])
    _emit(opts, ["t", "peak", "moment", "peak_slope", "moment_slope"], rows, _meta(opts))
    return EXIT_OK


def cmd_validate(opts) -> int:
    cfg = _quad_config(opts)
    report = run_suite(str(opts["suite"]), cfg, perturb=float(opts["perturb"]))
    doc = report.to_dict()
    doc["meta"] = _meta(opts)
    text = json.dumps(doc, indent=2) + "\n"
    if opts["json"]:
        with open(opts["json"], "w", encoding="utf-8") as fh:
            fh.write(text)
    if opts["output"]:
        with open(opts["output"], "w", encoding="utf-8") as fh:
            fh.write(text)
    elif not opts["json"]:
        sys.stdout.write(text)
    else:
        print(f"suite={report.suite} passed={report.passed} cases={len(report.cases)} "
              f"failed={len(report.failures)} worst_deviation={fmt(report.worst_deviation)}")
    return EXIT_OK if report.passed else EXIT_VALIDATION


COMMANDS = {
    "propagator": cmd_propagator,
    "wavefunction": cmd_wavefunction,
    "moments": cmd_moments,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve(args)
        return COMMANDS[args.command](opts)
    except UsageError as exc:
        print(f"relprop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"relprop: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (RelpropError, ValueError) as exc:
        print(f"relprop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
