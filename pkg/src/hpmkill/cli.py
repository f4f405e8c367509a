"""Command-line front end: ``hpmkill eval | sweep | dwell | sensitivity | validate``.

Exit codes: 0 ok, 1 usage error, 2 scenario/config validation error, 3 Monte-Carlo gate failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import HPMError, ValidationError
from .kill import cumulative_kill_probability
from .link import pulse_count
from .montecarlo import MCConfig, simulate
from .scenario import SWEEP_PARAMETERS, Scenario, evaluate, load_config
from .sensitivity import DEFAULT_STEP, elasticity_report

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_GATE = 0, 1, 2, 3
SWEEP_HEADER = ("param_value", "p_kill", "p_tot", "mean_E_J", "mu_lnE", "sigma2_lnE")
PHYSICAL_TOLERANCE = 0.02  # absolute, on p_kill and mu_lnE
MIN_GATE_SAMPLES = 1000
# Keeps a 3-SE gate from failing on rounding when the SE is exactly 0 or vanishingly small.
SURROGATE_TOLERANCE_FLOOR = 1e-12

_EVAL_ROWS = (
    ("mean_R_m", "m"), ("var_R_m2", "m^2"), ("cv2_R", ""), ("mu_lnR", "ln m"), ("sigma2_lnR", ""),
    ("g0", ""), ("k_sharp_per_rad2", "rad^-2"), ("mean_G", ""), ("var_G", ""), ("mu_lnG", ""),
    ("sigma2_lnG", ""), ("mu_A_dB", "dB"), ("sigma2_A_dB2", "dB^2"), ("elevation_rad", "rad"),
    ("mu_lnE", "ln J"), ("sigma2_lnE", ""), ("mean_E_J", "J"), ("deterministic_E_J", "J"),
    ("p_kill", ""), ("n_pulses", ""), ("p_tot", ""),
)


def _num(x: float) -> str:
    return format(x, ".17g")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    scale: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}; choose from {', '.join(SWEEP_PARAMETERS)}")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"scale must be 'linear' or 'log', got {self.scale!r}")
        if not self.start < self.stop:
            raise ValueError("sweep start must be below stop")
        if self.scale == "log" and not self.start > 0:
            raise ValueError("logarithmic sweeps need start > 0")
        if self.points < 2:
            raise ValueError("a sweep needs at least 2 points")

    def grid(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


def sweep_rows(s: Scenario, spec: SweepSpec) -> list[tuple[float, ...]]:
    rows = []
    for value in spec.grid():
        out = evaluate(s.with_param(spec.parameter, float(value)))
        rows.append((float(value), out.p_kill, out.p_tot, out.mean_E,
                     out.log_energy.mu_lnE, out.log_energy.sigma2_lnE))
    return rows


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _warn(messages) -> None:
    for msg in messages:
        print(f"warning: {msg}", file=sys.stderr)


def cmd_eval(args) -> int:
    s = load_config(args.config)
    out = evaluate(s)
    _warn(out.warnings)
    data = out.to_dict()
    if args.format == "json":
        text = json.dumps(data, indent=2) + "\n"
    elif args.format == "csv":
        text = _csv_text([k for k, _ in _EVAL_ROWS], [[float(data[k]) for k, _ in _EVAL_ROWS]])
    else:
        width = max(len(k) for k, _ in _EVAL_ROWS)
        lines = [f"{k:<{width}}  {_num(float(data[k])):>24}  {unit}".rstrip() for k, unit in _EVAL_ROWS]
        lines += [f"note: {n}" for n in out.notes]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    s = load_config(args.config)
    try:
        spec = SweepSpec(args.param, args.scale, args.start, args.stop, args.points)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(_csv_text(SWEEP_HEADER, sweep_rows(s, spec)), args.out)
    return EXIT_OK


def cmd_dwell(args) -> int:
    s = load_config(args.config)
    out = evaluate(s)
    _warn(out.warnings)
    start = 0.0 if args.start is None else args.start
    stop = s.dwell if args.stop is None else args.stop
    if not 0 <= start <= stop:
        print("error: dwell grid needs 0 <= start <= stop", file=sys.stderr)
        return EXIT_USAGE
    rows = []
    for t in np.linspace(start, stop, args.points):
        t = float(t)
        rows.append((t, pulse_count(s.tx.prf, t), cumulative_kill_probability(out.p_kill, s.tx.prf, t)))
    _emit(_csv_text(("dwell_s", "n_pulses", "p_tot"), rows), args.out)
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    s = load_config(args.config)
    report = elasticity_report(s, args.step)
    rows = [(name, r.analytic, r.finite_difference, r.abs_gap, r.unit) for name, r in report.rows.items()]
    total = report.total_range
    if args.format == "json":
        data = {name: {"analytic": a, "finite_difference": f, "abs_gap": g, "unit": u}
                for name, a, f, g, u in rows}
        data["R_bar_total"] = {"analytic": total.analytic, "finite_difference": total.finite_difference,
                               "abs_gap": total.abs_gap, "unit": total.unit}
        text = json.dumps({"rel_step": args.step, "rows": data}, indent=2) + "\n"
    elif args.format == "csv":
        text = _csv_text(("parameter", "analytic", "finite_difference", "abs_gap", "unit"), rows)
    else:
        lines = [f"{'parameter':<12} {'analytic':>12} {'finite_diff':>12} {'gap':>10}  unit"]
        for name, a, f, g, u in rows:
            lines.append(f"{name:<12} {a:>12.6f} {f:>12.6f} {g:>10.2e}  {u}")
        lines.append(f"{'R_bar_total':<12} {total.analytic:>12.6f} {total.finite_difference:>12.6f} "
                     f"{total.abs_gap:>10.2e}  elasticity incl. attenuation growth")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def validation_table(s: Scenario, n_samples: int, seed: int, mode: str, workers: int = 1):
    """Analytic vs Monte-Carlo rows ``(quantity, analytic, empirical, se, tolerance, passed)``.

    Surrogate rows gate at 3 standard errors. Physical rows gate ``p_kill`` and
    ``mu_lnE`` at the closure tolerance; the rest are reported ungated (tolerance NaN).
    """
    out = evaluate(s)
    rep = simulate(s, MCConfig(n_samples, seed, mode, workers))
    le = out.log_energy
    n_pulses = pulse_count(s.tx.prf, s.dwell)
    p_tot_an = out.p_tot
    p_tot_mc = rep.p_tot_hat(s.dwell)
    se_p_tot = n_pulses * (1.0 - rep.p_kill_hat) ** max(n_pulses - 1.0, 0.0) * rep.p_kill_se if n_pulses else 0.0
    se_sigma2 = math.sqrt(2.0 / max(rep.n_samples - 1, 1)) * rep.empirical_sigma2_lnE
    nan = float("nan")
    if mode == "surrogate":
        mean_an = math.exp(le.mu_lnE + 0.5 * le.sigma2_lnE)
        spec = [
            ("mean_E_J", mean_an, rep.empirical_mean_E, rep.se_mean_E, None),
            ("mu_lnE", le.mu_lnE, rep.empirical_mu_lnE, rep.se_mu_lnE, None),
            ("sigma2_lnE", le.sigma2_lnE, rep.empirical_sigma2_lnE, se_sigma2, None),
            ("p_kill", out.p_kill, rep.p_kill_hat, rep.p_kill_se, None),
            ("p_tot", p_tot_an, p_tot_mc, se_p_tot, None),
        ]
    else:
        spec = [
            ("mean_E_J", out.mean_E, rep.empirical_mean_E, rep.se_mean_E, nan),
            ("mu_lnE", le.mu_lnE, rep.empirical_mu_lnE, rep.se_mu_lnE, PHYSICAL_TOLERANCE),
            ("sigma2_lnE", le.sigma2_lnE, rep.empirical_sigma2_lnE, se_sigma2, nan),
            ("p_kill", out.p_kill, rep.p_kill_hat, rep.p_kill_se, PHYSICAL_TOLERANCE),
            ("p_tot", p_tot_an, p_tot_mc, se_p_tot, nan),
        ]
    rows = []
    for name, analytic, empirical, se, tol in spec:
        if tol is None:
            tol = max(3.0 * se, SURROGATE_TOLERANCE_FLOOR)
        passed = True if math.isnan(tol) else abs(analytic - empirical) <= tol
        rows.append((name, analytic, empirical, se, tol, passed))
    return rows


def cmd_validate(args) -> int:
    s = load_config(args.config)
    if args.samples < MIN_GATE_SAMPLES:
        _warn([f"{args.samples} samples: standard errors too large for a meaningful gate"])
    rows = validation_table(s, args.samples, args.seed, args.mode, args.workers)
    ok = all(r[-1] for r in rows)
    if args.format == "json":
        data = {
            "mode": args.mode, "samples": args.samples, "seed": args.seed, "passed": ok,
            "rows": [dict(zip(("quantity", "analytic", "empirical", "se", "tolerance", "passed"), r))
                     for r in rows],
        }
        text = json.dumps(data, indent=2, allow_nan=True) + "\n"
    elif args.format == "csv":
        text = _csv_text(("quantity", "analytic", "empirical", "se", "tolerance", "passed"),
                         [(n, a, e, se, t, "pass" if p else "FAIL") for n, a, e, se, t, p in rows])
    else:
        lines = [f"mode={args.mode} samples={args.samples} seed={args.seed}",
                 f"{'quantity':<11} {'analytic':>14} {'empirical':>14} {'se':>10} {'tolerance':>10}  result"]
        for n, a, e, se, t, p in rows:
            tol = "ungated" if math.isnan(t) else f"{t:.3g}"
            lines.append(f"{n:<11} {a:>14.6g} {e:>14.6g} {se:>10.3g} {tol:>10}  {'pass' if p else 'FAIL'}")
        lines.append("PASS" if ok else "FAIL")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_GATE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hpmkill", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, formats=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario key = value file")
        p.add_argument("--out", help="write output here instead of stdout")
        if formats:
            p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.set_defaults(func=func)
        return p

    add("eval", cmd_eval, "evaluate the analytic engagement statistics")

    p = add("sweep", cmd_sweep, "sweep one parameter and write CSV", formats=False)
    p.add_argument("--param", required=True, choices=SWEEP_PARAMETERS)
    p.add_argument("--scale", choices=("linear", "log"), default="linear")
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--points", type=int, default=50)

    p = add("dwell", cmd_dwell, "cumulative kill probability versus dwell time (CSV)", formats=False)
    p.add_argument("--start", type=float, default=None, help="first dwell, s (default 0)")
    p.add_argument("--stop", type=float, default=None, help="last dwell, s (default: dwell_s)")
    p.add_argument("--points", type=int, default=101)

    p = add("sensitivity", cmd_sensitivity, "analytic and finite-difference elasticities")
    p.add_argument("--step", type=float, default=DEFAULT_STEP)

    p = add("validate", cmd_validate, "compare the analytic model with Monte Carlo")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("physical", "surrogate"), default="surrogate")
    p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        for msg in exc.failures:
            print(f"error: {msg}", file=sys.stderr)
        return EXIT_VALIDATION
    except HPMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
