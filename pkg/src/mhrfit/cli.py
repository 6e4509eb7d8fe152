"""Command line surface.

Subcommands: `estimate` (fit + confidence intervals from a CSV),
`diagnose` (convexity diagnostic of the composed cumulative hazards),
`simulate` (synthetic-study metrics), `order-check` (stochastic order
verdicts for discrete mass functions), and `chernoff` (limit-law
quantile table generation).

Input CSVs are comma separated with a `time,status,arm` header, `.`
decimals, UTF-8; status and arm are 0/1.  Every run with artifacts also
writes a manifest recording the command, flags, seed and paths.  Exit
codes: 0 success, 2 input error, 3 statistical degeneracy.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .inference import (DEFAULT_PROBABILITIES, ChernoffConfig, chernoff_table,
                        plugin_ci, split_ci, split_fit)
from .mhr_estimator import (TruncationPolicy, diagnostic_curve, fit_theta,
                            theta_at)
from .simulation import StudyConfig, run_study
from .stochastic_orders import DiscreteDistribution, figure1_suite, order_report
from .survival_core import CensoredSample

__all__ = ["main", "RunManifest", "cmd_estimate", "cmd_diagnose",
           "cmd_simulate", "cmd_order_check", "cmd_chernoff"]


class InputError(Exception):
    """User-input problem; maps to exit code 2."""


@dataclass(frozen=True)
class RunManifest:
    command: str
    flags: dict
    seed: int | None
    inputs: tuple
    outputs: tuple
    version: str

    def to_json_text(self) -> str:
        body = {"command": self.command, "flags": self.flags,
                "seed": self.seed, "inputs": list(self.inputs),
                "outputs": list(self.outputs), "version": self.version}
        return json.dumps(body, indent=2, sort_keys=True) + "\n"


def _write_manifest(out_dir: str, command: str, args, inputs, outputs) -> None:
    flags = {}
    for key, value in vars(args).items():
        if key == "func" or callable(value):
            continue
        flags[key] = value if isinstance(value, (int, float, bool, str,
                                                 type(None))) else str(value)
    manifest = RunManifest(command=command, flags=flags,
                           seed=getattr(args, "seed", None),
                           inputs=tuple(inputs), outputs=tuple(outputs),
                           version=__version__)
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(manifest.to_json_text())


def _read_sample(path: str) -> CensoredSample:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(str(exc)) from exc
    times, status, arms = [], [], []
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InputError(f"{path}: empty file")
        if [h.strip() for h in header] != ["time", "status", "arm"]:
            raise InputError(f"{path}: header must be exactly 'time,status,arm'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise InputError(f"{path}: line {lineno}: expected 3 fields, "
                                 f"got {len(row)}")
            try:
                t = float(row[0])
                s = int(row[1])
                a = int(row[2])
            except ValueError as exc:
                raise InputError(f"{path}: line {lineno}: {exc}") from exc
            if not np.isfinite(t) or t < 0:
                raise InputError(f"{path}: line {lineno}: time must be a "
                                 "finite nonnegative number")
            if s not in (0, 1):
                raise InputError(f"{path}: line {lineno}: status must be 0 or 1")
            if a not in (0, 1):
                raise InputError(f"{path}: line {lineno}: arm must be 0 or 1")
            times.append(t)
            status.append(s)
            arms.append(a)
    if not times:
        raise InputError(f"{path}: no data rows")
    try:
        return CensoredSample.from_arrays(np.asarray(times), np.asarray(status),
                                          np.asarray(arms))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _parse_policy(text: str) -> TruncationPolicy:
    if text == "auto":
        return TruncationPolicy.recommended()
    try:
        fraction = float(text)
    except ValueError as exc:
        raise InputError(f"--rn must be 'auto' or a number, got {text!r}") from exc
    try:
        return TruncationPolicy.fixed(fraction)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _parse_float_list(text: str, flag: str) -> tuple:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise InputError(f"{flag}: could not parse {text!r}") from exc
    if not values:
        raise InputError(f"{flag}: empty list")
    return values


def _resolve_grid(text: str, gamma: float) -> tuple:
    if text == "auto":
        return tuple(float(f) * gamma for f in np.linspace(0.1, 0.9, 9))
    values = _parse_float_list(text, "--grid")
    if any(v < 0 for v in values):
        raise InputError("--grid: evaluation points must be nonnegative")
    return tuple(sorted(values))


def _resolve_threads(value) -> int:
    if value is not None:
        if value < 1:
            raise InputError("--threads must be at least 1")
        return value
    env = os.environ.get("THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InputError("THREADS environment variable must be an "
                             "integer") from exc
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# SVG emission.  Hand-rolled, single <svg> root, numbers only, so the
# output is well-formed XML without a plotting dependency.

def _svg_render(series, width=640, height=420, margin=50.0) -> str:
    xs = [p[0] for s in series for p in s["points"]]
    ys = [p[1] for s in series for p in s["points"]]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0

    def sx(x):
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">',
             f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
             f'height="{height - 2 * margin}" fill="none" stroke="black" '
             'stroke-width="1"/>']
    for s in series:
        coords = " ".join(f"{sx(px):.2f},{sy(py):.2f}" for px, py in s["points"])
        dash = ' stroke-dasharray="6,4"' if s.get("dashed") else ""
        color = s.get("color", "black")
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"{dash}/>')
    labels = [(margin, height - margin + 16, repr(round(x0, 6)), "start"),
              (width - margin, height - margin + 16, repr(round(x1, 6)), "end"),
              (margin - 6, height - margin, repr(round(y0, 6)), "end"),
              (margin - 6, margin + 10, repr(round(y1, 6)), "end")]
    for lx, ly, text, anchor in labels:
        parts.append(f'<text x="{lx}" y="{ly}" font-size="11" '
                     f'text-anchor="{anchor}">{text}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _step_points(knots, values, value_at_zero, x_end):
    pts = [(0.0, value_at_zero)]
    level = value_at_zero
    for k, v in zip(knots, values):
        pts.append((float(k), level))
        pts.append((float(k), float(v)))
        level = float(v)
    if len(knots) == 0 or x_end > knots[-1]:
        pts.append((float(x_end), level))
    return pts


def _fit_payload(fit) -> dict:
    return {
        "theta": {"knots": [float(k) for k in fit.theta.knots],
                  "values": [float(v) for v in fit.theta.values],
                  "value_at_zero": float(fit.theta.value_at_zero)},
        "gamma_n": float(fit.gamma_n),
        "eta_n": float(fit.eta_n),
        "hull": {"u": [float(p.u) for p in fit.hull.vertices],
                 "v": [float(p.v) for p in fit.hull.vertices],
                 "slopes": [float(s) for s in fit.hull.slopes]},
    }


def _format_cell(value) -> str:
    return "" if value is None else repr(float(value))


def cmd_estimate(args) -> int:
    sample = _read_sample(args.input)
    policy = _parse_policy(args.rn)
    try:
        fit = fit_theta(sample, policy=policy)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    grid = _resolve_grid(args.grid, fit.gamma_n)
    methods = {"plugin": ("plugin",), "split": ("split",),
               "both": ("plugin", "split")}[args.ci]

    table = None
    if "plugin" in methods:
        config = ChernoffConfig(replications=args.chernoff_reps)
        table = chernoff_table(config, cache_path=args.chernoff_cache)
    sfit = None
    if "split" in methods:
        try:
            sfit = split_fit(sample, args.splits, seed=args.seed, policy=policy)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3

    rows = []
    for method in methods:
        for x in grid:
            estimate = lower = upper = None
            if x > fit.gamma_n:
                if not args.clamp:
                    print(f"warning: x={x} beyond truncation time "
                          f"{fit.gamma_n}; skipped (use --clamp)",
                          file=sys.stderr)
                    continue
                estimate = float(fit.theta(fit.gamma_n))
            elif method == "plugin":
                estimate = theta_at(fit, x)
                try:
                    ci = plugin_ci(fit, sample, x, args.alpha, table)
                    lower, upper = ci.lower, ci.upper
                except ValueError as exc:
                    print(f"warning: no plugin interval at x={x}: {exc}",
                          file=sys.stderr)
            else:
                try:
                    ci = split_ci(sfit, x, alpha=args.alpha)
                    estimate, lower, upper = ci.estimate, ci.lower, ci.upper
                except ValueError as exc:
                    print(f"warning: no split interval at x={x}: {exc}",
                          file=sys.stderr)
                    estimate = theta_at(fit, x)
            rows.append((x, estimate, lower, upper, method))

    os.makedirs(args.out, exist_ok=True)
    fit_path = os.path.join(args.out, "fit.json")
    with open(fit_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(_fit_payload(fit), indent=2, sort_keys=True) + "\n")
    ci_path = os.path.join(args.out, "ci.csv")
    with open(ci_path, "w", encoding="utf-8") as fh:
        fh.write("x,estimate,lower,upper,method\n")
        for x, est, lo, hi, method in rows:
            fh.write(",".join([repr(float(x)), _format_cell(est),
                               _format_cell(lo), _format_cell(hi),
                               method]) + "\n")
    svg_path = os.path.join(args.out, "theta.svg")
    series = [{"points": _step_points(fit.theta.knots, fit.theta.values,
                                      fit.theta.value_at_zero, fit.gamma_n)}]
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write(_svg_render(series))
    _write_manifest(args.out, "estimate", args, [args.input],
                    [fit_path, ci_path, svg_path])
    return 0


def cmd_diagnose(args) -> int:
    sample = _read_sample(args.input)
    policy = _parse_policy(args.rn)
    try:
        points, hull = diagnostic_curve(sample, policy=policy)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "diagnostic.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("lambda_T,lambda_S,hull\n")
        for p in points:
            fh.write(f"{p.u!r},{p.v!r},{hull.value_at(p.u)!r}\n")
    svg_path = os.path.join(args.out, "diagnostic.svg")
    series = [
        {"points": [(p.u, p.v) for p in points]},
        {"points": [(p.u, p.v) for p in hull.vertices],
         "dashed": True, "color": "gray"},
    ]
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write(_svg_render(series))
    _write_manifest(args.out, "diagnose", args, [args.input],
                    [csv_path, svg_path])
    return 0


def cmd_simulate(args) -> int:
    if args.n < 2:
        raise InputError("--n must be at least 2")
    if args.reps < 1:
        raise InputError("--reps must be at least 1")
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    for m in methods:
        if m not in ("monotone", "split", "kernel"):
            raise InputError(f"unknown method {m!r}")
    grid = _parse_float_list(args.grid, "--grid")
    try:
        config = StudyConfig(scenario=args.scenario, n=args.n,
                             replications=args.reps, grid=grid,
                             alpha=args.alpha, methods=methods,
                             seed=args.seed, splits=args.splits,
                             threads=_resolve_threads(args.threads),
                             chernoff=ChernoffConfig(
                                 replications=args.chernoff_reps),
                             chernoff_cache=args.chernoff_cache)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    metrics = run_study(config)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "metrics.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(metrics.to_csv_text())
    json_path = os.path.join(args.out, "metrics.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(metrics.to_json_text())
    _write_manifest(args.out, "simulate", args, [], [csv_path, json_path])
    return 0


def _read_distribution(path: str) -> DiscreteDistribution:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(str(exc)) from exc
    pairs = []
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InputError(f"{path}: empty file")
        if [h.strip() for h in header] != ["support", "mass"]:
            raise InputError(f"{path}: header must be exactly 'support,mass'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise InputError(f"{path}: line {lineno}: expected 2 fields")
            try:
                point = float(row[0])
                # parse the mass from its decimal text so 0.2 means 1/5
                mass = Fraction(row[1].strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise InputError(f"{path}: line {lineno}: {exc}") from exc
            pairs.append((point, mass))
    if not pairs:
        raise InputError(f"{path}: no data rows")
    total = sum(m for _, m in pairs)
    if abs(total - 1) > Fraction(1, 10 ** 9):
        raise InputError(f"{path}: masses sum to {float(total)!r}, not 1 "
                         "(tolerance 1e-9)")
    pairs = [(p, m / total) for p, m in pairs]
    try:
        return DiscreteDistribution.from_pairs(pairs)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_order_check(args) -> int:
    if args.figure1:
        print(f"{'pair':34s}{'claims'}")
        for entry in figure1_suite():
            claims = ", ".join(f"{k}={v}" for k, v in entry["claims"].items())
            print(f"{entry['name']:34s}{claims}")
        return 0
    if len(args.files) != 2:
        raise InputError("provide two mass-function CSVs or --figure1")
    dist_s = _read_distribution(args.files[0])
    dist_t = _read_distribution(args.files[1])
    report = order_report(dist_s, dist_t)
    print("order  holds  witness")
    for kind in ("mhr", "hr", "st", "lr"):
        holds = getattr(report, kind)
        witness = "" if holds else str(report.witness.get(kind, ""))
        print(f"{kind:5s}  {str(holds):5s}  {witness}")
    return 0


def cmd_chernoff(args) -> int:
    if args.probs is None:
        probs = DEFAULT_PROBABILITIES
    else:
        probs = _parse_float_list(args.probs, "--probs")
        if any(not 0.0 < p < 1.0 for p in probs) or list(probs) != sorted(set(probs)):
            raise InputError("--probs must be strictly increasing values in (0, 1)")
    try:
        config = ChernoffConfig(replications=args.reps,
                                domain_half_width=args.L,
                                grid_step=args.delta, seed=args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    parent = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(parent, exist_ok=True)
    table = chernoff_table(config, probabilities=probs, cache_path=args.out)
    print(f"table with {len(table.probabilities)} quantiles at {args.out}; "
          f"variance {table.variance:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhrfit",
        description="Monotone hazard ratio estimation for two-arm "
                    "right-censored data.")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="fit the monotone hazard ratio "
                                          "and write intervals")
    est.add_argument("--input", required=True, help="CSV with time,status,arm")
    est.add_argument("--out", default="mhrfit_out", help="output directory")
    est.add_argument("--alpha", type=float, default=0.05)
    est.add_argument("--ci", choices=("plugin", "split", "both"),
                     default="plugin")
    est.add_argument("--splits", type=int, default=5)
    est.add_argument("--rn", default="auto",
                     help="'auto' or a fixed truncation fraction")
    est.add_argument("--grid", default="auto",
                     help="comma-separated evaluation points, or 'auto' "
                          "for interior deciles of the truncation range")
    est.add_argument("--clamp", action="store_true",
                     help="extend the fit flat beyond the truncation time "
                          "(no intervals there)")
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--chernoff-reps", type=int, default=100_000)
    est.add_argument("--chernoff-cache", default=None)
    est.set_defaults(func=cmd_estimate)

    dia = sub.add_parser("diagnose", help="convexity diagnostic of the "
                                          "composed cumulative hazards")
    dia.add_argument("--input", required=True)
    dia.add_argument("--out", default="mhrfit_out")
    dia.add_argument("--rn", default="auto")
    dia.add_argument("--seed", type=int, default=0)
    dia.set_defaults(func=cmd_diagnose)

    sim = sub.add_parser("simulate", help="synthetic-study metrics")
    sim.add_argument("--scenario", required=True,
                     choices=("linear", "convex", "concave"))
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--reps", type=int, required=True)
    sim.add_argument("--out", default="mhrfit_out")
    sim.add_argument("--grid", default="0.5,1.0,1.5")
    sim.add_argument("--methods", default="monotone,split,kernel")
    sim.add_argument("--alpha", type=float, default=0.05)
    sim.add_argument("--splits", type=int, default=5)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--threads", type=int, default=None,
                     help="worker processes; defaults to available "
                          "parallelism or the THREADS environment variable")
    sim.add_argument("--chernoff-reps", type=int, default=100_000)
    sim.add_argument("--chernoff-cache", default=None)
    sim.set_defaults(func=cmd_simulate)

    orc = sub.add_parser("order-check", help="stochastic order verdicts")
    orc.add_argument("files", nargs="*",
                     help="two CSVs with support,mass columns")
    orc.add_argument("--figure1", action="store_true",
                     help="run the built-in four-pair gallery")
    orc.set_defaults(func=cmd_order_check)

    che = sub.add_parser("chernoff", help="generate or refresh the "
                                          "limit-law quantile table")
    che.add_argument("--out", default="chernoff_table.json",
                     help="table file path (also used as the cache)")
    che.add_argument("--probs", default=None,
                     help="comma-separated probabilities")
    che.add_argument("--reps", type=int, default=100_000)
    che.add_argument("--L", type=float, default=10.0)
    che.add_argument("--delta", type=float, default=0.005)
    che.add_argument("--seed", type=int, default=1234)
    che.set_defaults(func=cmd_chernoff)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
