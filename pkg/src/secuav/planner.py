"""Block-coordinate planning loop and the outer slot-count search.

One planner iteration cycles three blocks: a convexified trajectory step
anchored at the current waypoints, a closed-form auxiliary-matrix update, and
a schedule linear program.  Each block is an ascent step for the penalized
objective, so the recorded trace must never decrease; a decrease larger than
1e-9 is a bug and raises immediately.  The outer search bisects the slot
count between a travel lower bound and a constructive upper bound, storing
every feasible witness so the final answer needs no re-solve.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .approx import AuxiliaryMatrix, optimal_x, penalty
from .bounds import hover_tour_slots, hover_witness, prop1_bound, travel_lower_bound
from .convex_solver import (TrajectorySubproblem, solve_association_interior,
                            solve_trajectory)
from .errors import InfeasibleBracket, InfeasibleHorizon, NonMonotoneObjective
from .scenario import (EPS_BIN, Association, Scenario, Trajectory,
                       min_user_rate_sum, rate_difference_matrix)
from .validate import PlanReport, check_plan

_MONOTONE_SLACK = 1e-9


@dataclass
class SolverOptions:
    """Tunable knobs for the planner; defaults reproduce the reference runs."""

    omega: float = 0.1
    bcd_max_iters: int = 50
    bcd_rel_tol: float = 1e-4
    tol_feas: float = 1e-6
    tol_opt: float = 1e-6
    n_min: int | None = None
    n_max: int | None = None
    seed: int | None = None
    jitter: float = 0.0
    # binarity rescue: multiply omega by omega_growth up to omega_retries
    # times when the schedule stays fractional
    omega_growth: float = 5.0
    omega_retries: int = 3

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.n_min is not None and self.n_max is not None:
            if not (1 <= self.n_min < self.n_max):
                raise ValueError("bracket must satisfy 1 <= n_min < n_max")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    penalized: float
    lam: float
    binarity: float


@dataclass
class PlanResult:
    """A finished plan plus the diagnostics the experiments consume."""

    n_star: int
    trajectory: Trajectory
    association: Association
    secure_bits: np.ndarray
    lam: float
    trace: list[TraceRow]
    binarity: float
    wall_time: float
    latency_s: float
    complete: bool
    method: str
    probes: list[tuple[int, bool]] = field(default_factory=list)
    post_checks: list[tuple[int, bool]] = field(default_factory=list)
    report: PlanReport | None = None

    def to_dict(self) -> dict:
        return {
            "n_star": int(self.n_star),
            "latency_s": float(self.latency_s),
            "lam": float(self.lam),
            "secure_bits": [float(b) for b in self.secure_bits],
            "binarity": float(self.binarity),
            "complete": bool(self.complete),
            "method": self.method,
            "wall_time": float(self.wall_time),
            "probes": [[int(n), bool(ok)] for n, ok in self.probes],
            "post_checks": [[int(n), bool(ok)] for n, ok in self.post_checks],
            "trajectory": [[float(x), float(y)] for x, y in self.trajectory.points],
            "association": [[float(e) for e in row]
                            for row in self.association.entries],
            "trace": [[row.iteration, row.penalized, row.lam, row.binarity]
                      for row in self.trace],
        }


def default_init(scn: Scenario, n: int, seed: int | None = None,
                 jitter: float = 0.0) -> tuple[Trajectory, Association]:
    """Circular sweep toward the user centroid plus equal time sharing.

    The circle passes through the start point, its radius is capped so every
    chord respects the speed limit, and a full revolution is spread over the
    available slots.  Degenerate layouts collapse to parking at the start.
    """
    k = scn.n_users
    start = scn.uav_start
    centroid = scn.user_positions.mean(axis=0)
    offset = centroid - start
    dist = float(np.linalg.norm(offset))
    pts = np.tile(start, (n, 1)).astype(float)
    if n > 2 and dist > 1e-9:
        radius = min(dist, scn.max_step * (1.0 - 1e-9)
                     / (2.0 * math.sin(math.pi / (n - 1))))
        center = start + (offset / dist) * radius
        theta0 = math.atan2(start[1] - center[1], start[0] - center[0])
        angles = theta0 + 2.0 * math.pi * np.arange(n) / (n - 1)
        pts = center + radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        pts[0] = start
        pts[-1] = start
    if jitter > 0.0 and n > 2:
        rng = np.random.default_rng(seed)
        pts[1:-1] += rng.normal(0.0, jitter * scn.max_step, size=(n - 2, 2))
        legs = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        worst = legs.max(initial=0.0)
        cap = scn.max_step * (1.0 - 1e-9)
        if worst > cap:
            pts[1:-1] = start + (pts[1:-1] - start) * (cap / worst)
    entries = np.full((k, n), 1.0 / k)
    return Trajectory(pts), Association(entries)


def penalized_value(scn: Scenario, traj: Trajectory, assoc: Association,
                    aux: AuxiliaryMatrix, omega: float) -> float:
    """Exact penalized objective: worst row sum minus omega times the gap."""
    return min_user_rate_sum(scn, traj, assoc) - omega * penalty(assoc, aux)


def _trajectory_step(scn, traj, assoc, opts) -> Trajectory:
    """One minorize-maximize trajectory update with an acceptance guard."""
    sub = TrajectorySubproblem.build(scn, assoc, traj)
    sol = solve_trajectory(sub, opts)
    before = min_user_rate_sum(scn, traj, assoc)
    after = min_user_rate_sum(scn, sol.trajectory, assoc)
    if after >= before:
        return sol.trajectory
    return traj


def _bcd_loop(scn, n, opts, init, omega, use_penalty: bool):
    """Shared iteration engine for the penalty and relaxation variants."""
    if init is None:
        init = default_init(scn, n, seed=opts.seed, jitter=opts.jitter)
    traj, assoc = init
    if assoc.shape != (scn.n_users, n) or traj.n_slots != n:
        raise ValueError("initial blocks do not match the slot count")

    aux = optimal_x(assoc) if use_penalty else None

    def value(tr, ac, ax):
        if use_penalty:
            return penalized_value(scn, tr, ac, ax, omega)
        return min_user_rate_sum(scn, tr, ac)

    trace = [TraceRow(0, value(traj, assoc, aux),
                      min_user_rate_sum(scn, traj, assoc),
                      assoc.binarity_residual())]
    for it in range(1, opts.bcd_max_iters + 1):
        traj = _trajectory_step(scn, traj, assoc, opts)
        if use_penalty:
            aux = optimal_x(assoc)
        cand, _ = solve_association_interior(scn, traj, aux,
                                             omega if use_penalty else 0.0,
                                             opts)
        # ties within solver precision still move the schedule; the tolerance
        # stays an order under the trace's monotonicity slack
        if value(traj, cand, aux) >= value(traj, assoc, aux) - 1e-10:
            assoc = cand
        v_now = value(traj, assoc, aux)
        v_prev = trace[-1].penalized
        if v_now < v_prev - _MONOTONE_SLACK:
            raise NonMonotoneObjective(
                f"objective fell from {v_prev:.12g} to {v_now:.12g} at "
                f"iteration {it}")
        trace.append(TraceRow(it, v_now, min_user_rate_sum(scn, traj, assoc),
                              assoc.binarity_residual()))
        plateaued = abs(v_now - v_prev) <= opts.bcd_rel_tol * max(1.0, abs(v_now))
        # the penalty run keeps sharpening a still-fractional schedule after
        # the objective flattens, but a frozen residual means this weight has
        # a fractional optimum and more iterations cannot help
        sharp = (not use_penalty) or assoc.binarity_residual() <= EPS_BIN
        stalled = abs(trace[-1].binarity - trace[-2].binarity) <= 1e-6
        if plateaued and (sharp or stalled):
            break
    lam = min_user_rate_sum(scn, traj, assoc)
    return traj, assoc, lam, trace


def solve_p1(scn: Scenario, n: int, opts: SolverOptions,
             init: tuple[Trajectory, Association] | None = None):
    """Penalty-method block descent for a fixed slot count.

    Returns (trajectory, association, lam, trace); the trace is the
    per-iteration penalized objective and is non-decreasing.
    """
    return _bcd_loop(scn, n, opts, init, opts.omega, use_penalty=True)


def solve_cr(scn: Scenario, n: int, opts: SolverOptions,
             init: tuple[Trajectory, Association] | None = None):
    """Continuous-relaxation variant: same loop, no penalty, no rounding."""
    return _bcd_loop(scn, n, opts, init, 0.0, use_penalty=False)


def solve_p1_binary(scn: Scenario, n: int, opts: SolverOptions,
                    init: tuple[Trajectory, Association] | None = None):
    """Penalty loop with the weight-escalation rescue.

    Runs solve_p1 at the configured weight; if the schedule terminates
    fractional (the weight's optimum genuinely ties two users on a slot),
    multiplies the weight by omega_growth and re-runs warm-started, up to
    omega_retries times.  Returns (trajectory, association, lam, trace,
    weight_used); the trace is the final run's trace.
    """
    omega = opts.omega
    traj = assoc = None
    lam = 0.0
    trace: list[TraceRow] = []
    for attempt in range(opts.omega_retries + 1):
        stage = SolverOptions(
            omega=omega, bcd_max_iters=opts.bcd_max_iters,
            bcd_rel_tol=opts.bcd_rel_tol, tol_feas=opts.tol_feas,
            tol_opt=opts.tol_opt, seed=opts.seed, jitter=opts.jitter,
            omega_growth=opts.omega_growth, omega_retries=opts.omega_retries)
        traj, assoc, lam, trace = solve_p1(scn, n, stage, init)
        if assoc.binarity_residual() <= EPS_BIN:
            break
        init = (traj, assoc)
        omega *= opts.omega_growth
    return traj, assoc, lam, trace, omega


def round_association(assoc: Association) -> Association:
    """Entrywise threshold at one half, keeping only each slot's largest
    entry so column sums stay below one."""
    entries = np.zeros_like(assoc.entries)
    best = np.argmax(assoc.entries, axis=0)
    cols = np.arange(assoc.entries.shape[1])
    keep = assoc.entries[best, cols] >= 0.5
    entries[best[keep], cols[keep]] = 1.0
    return Association(entries)


def repair_schedule(delta: np.ndarray, entries: np.ndarray,
                    max_steps: int | None = None) -> np.ndarray:
    """Steepest-ascent slot exchange on a binary schedule.

    Reassigns one slot, or a pair of slots, to whichever users (or idle)
    raise the minimum per-user row sum of ``entries * delta`` the most,
    until no move helps.  Rounding a fractional schedule can strand a slot
    on the wrong user; single and pairwise exchanges recover those without
    touching the trajectory.
    """
    k_users, n = delta.shape
    cur = np.asarray(entries, dtype=float).copy()
    sums = (cur * delta).sum(axis=1)
    owners = np.where(cur.any(axis=0), np.argmax(cur, axis=0), -1)

    def moved(sums, i, a, b):
        out = sums.copy()
        if a >= 0:
            out[a] -= delta[a, i]
        if b >= 0:
            out[b] += delta[b, i]
        return out

    if max_steps is None:
        max_steps = 4 * n + 8
    for _ in range(max_steps):
        base = sums.min()
        best_gain, best_mv = 1e-12, None
        for i in range(n):
            for b in range(-1, k_users):
                if b == owners[i]:
                    continue
                gain = moved(sums, i, owners[i], b).min() - base
                if gain > best_gain:
                    best_gain, best_mv = gain, ((i, b),)
        for i in range(n):
            for j in range(i + 1, n):
                for bi in range(-1, k_users):
                    si = moved(sums, i, owners[i], bi)
                    for bj in range(-1, k_users):
                        if bi == owners[i] and bj == owners[j]:
                            continue
                        gain = moved(si, j, owners[j], bj).min() - base
                        if gain > best_gain:
                            best_gain, best_mv = gain, ((i, bi), (j, bj))
        if best_mv is None:
            break
        for i, b in best_mv:
            sums = moved(sums, i, owners[i], b)
            cur[:, i] = 0.0
            if b >= 0:
                cur[b, i] = 1.0
            owners[i] = b
    return cur


def round_and_polish(scn: Scenario, traj: Trajectory, assoc: Association,
                     opts: SolverOptions) -> tuple[Trajectory, Association]:
    """Round the schedule, repair it by slot exchange, then one corrective
    trajectory step with it fixed."""
    rounded = round_association(assoc)
    delta = np.maximum(rate_difference_matrix(scn, traj), 0.0)
    repaired = Association(repair_schedule(delta, rounded.entries))
    polished = _trajectory_step(scn, traj, repaired, opts)
    return polished, repaired


def result_from_plan(scn, n, traj, assoc, trace, method, wall) -> PlanResult:
    """Validate a finished (trajectory, schedule) pair and package it."""
    report = check_plan(scn, traj, assoc)
    delta = rate_difference_matrix(scn, traj)
    lam_clamped = float((assoc.entries * np.maximum(delta, 0.0)).sum(axis=1).min())
    return PlanResult(
        n_star=n, trajectory=traj, association=assoc,
        secure_bits=report.per_user_bits, lam=lam_clamped, trace=trace,
        binarity=assoc.binarity_residual(), wall_time=wall,
        latency_s=n * scn.slot_len, complete=report.passed, method=method,
        report=report)


def feasible_for(scn: Scenario, n: int, opts: SolverOptions
                 ) -> tuple[bool, PlanResult]:
    """Can every user receive the content within n slots?

    Runs the penalty loop (raising the weight if the schedule stays
    fractional), rounds, polishes, and validates.  When the polished plan
    fails but a hover tour fits in n slots, that tour is the witness.
    """
    start_t = time.perf_counter()
    traj, assoc, _, trace, _ = solve_p1_binary(scn, n, opts)
    polished, rounded = round_and_polish(scn, traj, assoc, opts)
    result = result_from_plan(scn, n, polished, rounded, trace, "bcd",
                               time.perf_counter() - start_t)
    if result.complete:
        return True, result
    if n >= hover_tour_slots(scn):
        try:
            h_traj, h_assoc = hover_witness(scn, n)
        except InfeasibleHorizon:
            return False, result
        fallback = result_from_plan(scn, n, h_traj, h_assoc, trace,
                                     "hover-fallback",
                                     time.perf_counter() - start_t)
        if fallback.complete:
            return True, fallback
    return False, result


def bisect_slots(predicate, n_min: int, n_max: int):
    """Binary search for the smallest n with predicate(n) true.

    Assumes predicate is monotone, false at n_min, true at n_max; neither
    endpoint is probed.  Returns (n, probe list).
    """
    if not 0 <= n_min < n_max:
        raise InfeasibleBracket(f"bad bracket ({n_min}, {n_max})")
    probes: list[tuple[int, bool]] = []
    lo, hi = n_min, n_max
    while hi - lo > 1:
        mid = (lo + hi + 1) // 2
        ok = bool(predicate(mid))
        probes.append((mid, ok))
        if ok:
            hi = mid
        else:
            lo = mid
    return hi, probes


def minimize_latency(scn: Scenario, opts: SolverOptions | None = None
                     ) -> PlanResult:
    """Smallest slot count that still delivers the content to every user.

    Brackets between the travel lower bound and the constructive upper
    bound, bisects, then walks the answer down while the slot below stays
    feasible so the reported n_star is minimal among checked counts.
    """
    if opts is None:
        opts = SolverOptions()
    start_t = time.perf_counter()
    n_max = opts.n_max if opts.n_max is not None else prop1_bound(scn)
    n_min = opts.n_min if opts.n_min is not None else travel_lower_bound(scn)
    n_min = max(0, min(n_min, n_max - 1))

    ok_top, witness = feasible_for(scn, n_max, opts)
    if not ok_top:
        raise InfeasibleBracket(
            f"upper bracket n={n_max} is not feasible; the bound does not "
            f"hold for this scenario")
    best: dict[int, PlanResult] = {n_max: witness}

    def probe(n: int) -> bool:
        ok, wit = feasible_for(scn, n, opts)
        if ok:
            best[n] = wit
        return ok

    if n_max - n_min > 1:
        n_star, probes = bisect_slots(probe, n_min, n_max)
    else:
        n_star, probes = n_max, []

    post: list[tuple[int, bool]] = []
    while n_star > 1:
        ok_below, wit_below = feasible_for(scn, n_star - 1, opts)
        post.append((n_star - 1, ok_below))
        if not ok_below:
            break
        best[n_star - 1] = wit_below
        n_star -= 1

    result = best[n_star]
    result.probes = probes
    result.post_checks = post
    result.wall_time = time.perf_counter() - start_t
    report = check_plan(scn, result.trajectory, result.association)
    result.report = report
    result.complete = report.passed
    result.secure_bits = report.per_user_bits
    return result
