"""Command-line surface: load a scenario file, run the planner or a
baseline, and emit machine-readable results.

Scenario files are plain ``key = value`` text with Python literals on the
right-hand side; see scenarios/ for a worked example.  Every run writes the
same four files (plan.json, trace.csv, trajectory.csv, association.csv) so
plotting tools never care which scheme produced a plan.

Exit codes: 0 success, 1 scenario/plan parse failure, 2 infeasible bracket,
3 solver failure.
"""

from __future__ import annotations

import argparse
import ast
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .baselines import circular_baseline, hover_baseline
from .bounds import prop1_bound
from .errors import InfeasibleBracket, ScenarioFormatError, SecuavError
from .planner import (PlanResult, SolverOptions, feasible_for,
                      minimize_latency)
from .scenario import (Association, Scenario, Trajectory, db_to_linear,
                       dbm_to_watts, megabytes_to_bits)
from .validate import check_plan

_REQUIRED_KEYS = (
    "users", "eve", "uav_start", "altitude_m", "ref_gain_db", "tx_power_dbw",
    "noise_dbm", "bandwidth_hz", "slot_s", "vmax_mps", "content_mb",
)


def load_scenario(path) -> Scenario:
    """Parse a key = value scenario file into a validated Scenario."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioFormatError(f"cannot read scenario file: {exc}") from exc
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioFormatError(f"line {lineno}: expected key = value")
        key, _, rhs = line.partition("=")
        key = key.strip()
        if key not in _REQUIRED_KEYS:
            raise ScenarioFormatError(f"line {lineno}: unknown field {key!r}")
        try:
            values[key] = ast.literal_eval(rhs.strip())
        except (ValueError, SyntaxError) as exc:
            raise ScenarioFormatError(
                f"line {lineno}: bad literal for {key!r}: {exc}") from exc
    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ScenarioFormatError(f"missing field: {', '.join(missing)}")
    try:
        return Scenario(
            user_positions=np.asarray(values["users"], dtype=float),
            eve_position=np.asarray(values["eve"], dtype=float),
            uav_start=np.asarray(values["uav_start"], dtype=float),
            altitude=float(values["altitude_m"]),
            ref_gain=db_to_linear(float(values["ref_gain_db"])),
            tx_power=db_to_linear(float(values["tx_power_dbw"])),
            noise_power=dbm_to_watts(float(values["noise_dbm"])),
            bandwidth=float(values["bandwidth_hz"]),
            slot_len=float(values["slot_s"]),
            v_max=float(values["vmax_mps"]),
            content_bits=megabytes_to_bits(float(values["content_mb"])),
        )
    except (TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"invalid scenario: {exc}") from exc


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_plan_files(result: PlanResult, out_dir) -> list[Path]:
    """Write plan.json plus the three plot-ready CSV series."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = result.to_dict()
    if result.report is not None:
        rep = result.report
        payload["report"] = {
            "passed": bool(rep.passed),
            "required_bits": float(rep.required_bits),
            "per_user_bits": [float(b) for b in rep.per_user_bits],
            "speed_violations": len(rep.speed_violations),
            "boundary_violations": len(rep.boundary_violations),
            "column_violations": len(rep.column_violations),
            "binary_violations": len(rep.binary_violations),
        }
    files = []

    plan_path = out / "plan.json"
    plan_path.write_text(json.dumps(payload, indent=2) + "\n")
    files.append(plan_path)

    trace_path = out / "trace.csv"
    lines = ["iteration,penalized_objective,lambda,binarity_residual"]
    for row in result.trace:
        lines.append(f"{row.iteration},{_fmt(row.penalized)},{_fmt(row.lam)},"
                     f"{_fmt(row.binarity)}")
    trace_path.write_text("\n".join(lines) + "\n")
    files.append(trace_path)

    traj_path = out / "trajectory.csv"
    lines = ["n,x,y"]
    for i, (x, y) in enumerate(result.trajectory.points, start=1):
        lines.append(f"{i},{_fmt(x)},{_fmt(y)}")
    traj_path.write_text("\n".join(lines) + "\n")
    files.append(traj_path)

    assoc_path = out / "association.csv"
    lines = ["n,k,e"]
    entries = result.association.entries
    for n in range(entries.shape[1]):
        for k in range(entries.shape[0]):
            lines.append(f"{n + 1},{k + 1},{_fmt(entries[k, n])}")
    assoc_path.write_text("\n".join(lines) + "\n")
    files.append(assoc_path)
    return files


def _options_from_args(args) -> SolverOptions:
    return SolverOptions(
        omega=args.omega, bcd_max_iters=args.bcd_max_iters,
        bcd_rel_tol=args.bcd_rel_tol, n_min=args.n_min, n_max=args.n_max,
        seed=args.seed, jitter=args.jitter)


def cmd_plan(args) -> int:
    scn = load_scenario(args.scenario)
    opts = _options_from_args(args)
    if args.baseline == "hover":
        result = hover_baseline(scn)
    elif args.baseline == "circular":
        n = args.slots if args.slots else prop1_bound(scn)
        result = circular_baseline(scn, n)
    elif args.slots:
        ok, result = feasible_for(scn, args.slots, opts)
        if not ok:
            print(f"note: no complete plan found at {args.slots} slots; "
                  f"emitting the best attempt", file=sys.stderr)
    else:
        result = minimize_latency(scn, opts)
    files = write_plan_files(result, args.out_dir)
    print(f"{result.method}: {result.n_star} slots, latency "
          f"{result.latency_s:.6g} s, complete={result.complete}; wrote "
          + ", ".join(str(f) for f in files))
    return 0


def cmd_validate(args) -> int:
    scn = load_scenario(args.scenario)
    try:
        data = json.loads(Path(args.plan).read_text())
        traj = Trajectory(np.asarray(data["trajectory"], dtype=float))
        assoc = Association(np.asarray(data["association"], dtype=float))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ScenarioFormatError(f"cannot load plan: {exc}") from exc
    report = check_plan(scn, traj, assoc)
    print(report.summary())
    return 0 if report.passed else 1


_SWEEPABLE = {
    "bandwidth_hz": "bandwidth",
    "content_mb": "content_bits",
    "vmax_mps": "v_max",
    "slot_s": "slot_len",
    "altitude_m": "altitude",
}


def _parse_values(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ScenarioFormatError("range must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 2:
            raise ScenarioFormatError("range count must be >= 2")
        return list(np.linspace(start, stop, count))
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ScenarioFormatError("empty sweep range")
    return values


def cmd_sweep(args) -> int:
    scn = load_scenario(args.scenario)
    if args.parameter not in _SWEEPABLE:
        raise ScenarioFormatError(
            f"cannot sweep {args.parameter!r}; choose from "
            + ", ".join(sorted(_SWEEPABLE)))
    field_name = _SWEEPABLE[args.parameter]
    opts = _options_from_args(args)
    rows = [f"{args.parameter},n_star,prop1_bound"]
    for value in _parse_values(args.values):
        stored = (megabytes_to_bits(value) if args.parameter == "content_mb"
                  else value)
        swept = replace(scn, **{field_name: stored})
        bound = prop1_bound(swept)
        result = minimize_latency(swept, opts)
        rows.append(f"{_fmt(value)},{result.n_star},{bound}")
        print(rows[-1])
    Path(args.out).write_text("\n".join(rows) + "\n")
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secuav",
        description="Minimum-latency secure UAV content-delivery planning")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_flags(p):
        p.add_argument("--omega", type=float, default=0.1,
                       help="penalty weight (default 0.1)")
        p.add_argument("--bcd-max-iters", type=int, default=50)
        p.add_argument("--bcd-rel-tol", type=float, default=1e-4)
        p.add_argument("--n-min", type=int, default=None,
                       help="override the bisection lower bracket")
        p.add_argument("--n-max", type=int, default=None,
                       help="override the bisection upper bracket")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jitter", type=float, default=0.0,
                       help="initialization jitter in units of the max step")

    p_plan = sub.add_parser("plan", help="compute a delivery plan")
    p_plan.add_argument("scenario")
    p_plan.add_argument("--out-dir", default="out")
    p_plan.add_argument("--slots", type=int, default=None,
                        help="solve at a fixed slot count instead of "
                             "minimizing latency")
    p_plan.add_argument("--baseline", choices=["hover", "circular"],
                        default=None, help="run a comparison scheme instead "
                                           "of the optimizer")
    add_solver_flags(p_plan)
    p_plan.set_defaults(func=cmd_plan)

    p_val = sub.add_parser("validate", help="check a plan file")
    p_val.add_argument("scenario")
    p_val.add_argument("plan")
    p_val.set_defaults(func=cmd_validate)

    p_sweep = sub.add_parser("sweep", help="n_star across a parameter grid")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("parameter")
    p_sweep.add_argument("values",
                         help="comma list or start:stop:count grid")
    p_sweep.add_argument("--out", default="sweep.csv")
    add_solver_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleBracket as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SecuavError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
