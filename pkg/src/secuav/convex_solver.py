"""Solvers for the two per-iteration subproblems.

The trajectory subproblem maximizes the worst user's scheduled rate sum over
waypoints, Eve-distance slacks, and the bound variable, after both
nonconvexities have been minorized (concave quadratic user rates, affine Eve
distance).  The resulting smooth concave program is solved with a dense
log-barrier Newton method; the problem has about 3N + 1 variables, so dense
linear algebra is more than enough.  Internally everything is scaled by the
altitude so coordinates, slacks, and curvatures share a common magnitude.

The association subproblem is a linear program over the schedule box; it is
delegated to scipy's HiGHS backend, which is deterministic, and the returned
objective is recomputed from the raw data rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .approx import eve_minorant_arrays, rate_minorant_arrays
from .errors import DimensionMismatch, MaxIterations, NumericalFailure
from .scenario import (LN2, Association, Scenario, Trajectory,
                       rate_difference_matrix)

# Barrier internals; attribute lookups fall back to these when the options
# object does not carry them.
_BARRIER_T0 = 1.0
_BARRIER_MU = 20.0
_NEWTON_PER_STAGE = 60
_NEWTON_TOTAL_CAP = 4000
_ARMIJO = 0.25
_D_LO_SCALED = -0.5  # slack floor, in units of altitude^2


def eve_rate_of_slack(scn: Scenario, d) -> np.ndarray:
    """Eavesdropper rate log2(1 + rho0/(z^2 + d)) as a function of the
    squared-distance slack; convex and decreasing for d > -z^2."""
    d = np.asarray(d, dtype=float)
    z2 = scn.altitude ** 2
    return np.log2(1.0 + scn.rho0 / (z2 + d))


@dataclass(frozen=True)
class TrajectorySubproblem:
    """Data of one convexified trajectory program.

    Minorant coefficients are expanded at ``anchor`` and stay fixed for the
    whole solve; the association is a constant weight matrix here.
    """

    scenario: Scenario
    association: np.ndarray          # (K, N), entries in [0, 1]
    anchor: Trajectory               # N waypoints, speed/boundary feasible
    omega: float
    rate_constants: np.ndarray       # (K, N) minorant values at the anchor
    rate_slopes: np.ndarray          # (K, N) positive quadratic coefficients
    rate_anchor_sq: np.ndarray       # (K, N) squared anchor offsets
    eve_grads: np.ndarray            # (N, 2) affine bound gradients
    eve_offsets: np.ndarray          # (N,) squared anchor-to-Eve distances

    @classmethod
    def build(cls, scn: Scenario, assoc, anchor: Trajectory,
              omega: float = 0.0) -> "TrajectorySubproblem":
        entries = assoc.entries if isinstance(assoc, Association) else np.asarray(assoc, float)
        if entries.shape != (scn.n_users, anchor.n_slots):
            raise DimensionMismatch(
                f"association {entries.shape} vs K={scn.n_users}, N={anchor.n_slots}")
        constants, slopes, anchor_sq = rate_minorant_arrays(scn, anchor)
        grads, offsets = eve_minorant_arrays(scn, anchor)
        return cls(scenario=scn, association=entries, anchor=anchor,
                   omega=omega, rate_constants=constants, rate_slopes=slopes,
                   rate_anchor_sq=anchor_sq, eve_grads=grads,
                   eve_offsets=offsets)


@dataclass
class ConvexSolution:
    """Decision values plus solver quality figures for one subproblem solve."""

    trajectory: Trajectory
    eve_slack: np.ndarray
    lam: float
    objective: float
    max_violation: float
    stationarity: float
    newton_steps: int
    converged: bool


def _subproblem_row_values(sub: TrajectorySubproblem, points: np.ndarray,
                           slack: np.ndarray) -> np.ndarray:
    """Exact per-user values of the minorized rate rows, physical units."""
    scn = sub.scenario
    diff = points[None, :, :] - scn.user_positions[:, None, :]
    dist_sq = np.sum(diff ** 2, axis=2)
    minorant = sub.rate_constants - sub.rate_slopes * (dist_sq - sub.rate_anchor_sq)
    eve = eve_rate_of_slack(scn, slack)
    return (sub.association * (minorant - eve[None, :])).sum(axis=1)


def subproblem_residuals(sub: TrajectorySubproblem, sol: ConvexSolution) -> dict:
    """Independent constraint residuals of a solution, physical units.

    Every value is a maximum violation (<= 0 means satisfied); the rate
    residual is relative to the reported lambda.
    """
    scn = sub.scenario
    pts = sol.trajectory.points
    slack = sol.eve_slack
    bound = sub.eve_offsets + np.einsum("nj,nj->n", sub.eve_grads,
                                        pts - sub.anchor.points)
    legs_sq = np.sum(np.diff(pts, axis=0) ** 2, axis=1)
    rows = _subproblem_row_values(sub, pts, slack)
    return {
        "eve_bound": float(np.max(slack - bound, initial=-np.inf)),
        "slack_floor": float(np.max(-(slack + 0.5 * scn.altitude ** 2),
                                    initial=-np.inf)),
        "rate_rows": float(np.max(sol.lam - rows)),
        "speed": float(np.max(legs_sq - scn.max_step ** 2, initial=-np.inf)),
        "boundary": float(max(np.linalg.norm(pts[0] - scn.uav_start),
                              np.linalg.norm(pts[-1] - scn.uav_start))),
    }


def solve_trajectory(sub: TrajectorySubproblem, opts) -> ConvexSolution:
    """Solve the convexified trajectory program with a log-barrier method.

    Maximizes the bound variable subject to the minorized rate rows, the
    affine Eve-distance bounds, speed limits, and pinned endpoints.  The
    returned point is strictly feasible with duality gap at most tol_opt.
    """
    scn = sub.scenario
    tol_opt = getattr(opts, "tol_opt", 1e-6)
    n = sub.anchor.n_slots
    k_users = scn.n_users
    zt = scn.altitude

    if not np.any(sub.association > 0.0):
        # every slot idles, so the objective cannot depend on the path; the
        # anchor itself is optimal with a zero bound
        true_d = np.sum((sub.anchor.points - scn.eve_position) ** 2, axis=1)
        sol = ConvexSolution(
            trajectory=Trajectory(sub.anchor.points.copy()),
            eve_slack=true_d, lam=0.0, objective=0.0, max_violation=0.0,
            stationarity=0.0, newton_steps=0, converged=True)
        return sol

    # Scaled data.
    start = scn.uav_start / zt
    users = scn.user_positions / zt
    rho = scn.rho0 / zt ** 2
    vstep = scn.max_step / zt
    anchor = sub.anchor.points / zt
    e_w = sub.association
    c_rate = sub.rate_constants
    m_rate = sub.rate_slopes * zt ** 2
    u0_rate = sub.rate_anchor_sq / zt ** 2
    g_eve = sub.eve_grads / zt
    off_eve = sub.eve_offsets / zt ** 2

    free = list(range(1, n - 1))
    f_count = len(free)
    dim = 2 * f_count + n + 1
    d_off = 2 * f_count
    lam_idx = dim - 1
    n_con = 2 * n + k_users + max(n - 1, 0)

    def positions(x):
        pts = np.empty((n, 2))
        pts[0] = start
        pts[-1] = start
        if f_count:
            pts[1:n - 1] = x[:d_off].reshape(f_count, 2)
        return pts

    def g_of(d):
        return (np.log1p(rho + d) - np.log1p(d)) / LN2

    def g_prime(d):
        return (1.0 / (1.0 + rho + d) - 1.0 / (1.0 + d)) / LN2

    def g_second(d):
        return (1.0 / (1.0 + d) ** 2 - 1.0 / (1.0 + rho + d) ** 2) / LN2

    def residuals(x):
        pts = positions(x)
        d = x[d_off:d_off + n]
        lam = x[lam_idx]
        s_a = off_eve + np.einsum("nj,nj->n", g_eve, pts - anchor) - d
        s_b = d - _D_LO_SCALED
        dist_sq = np.sum((pts[None, :, :] - users[:, None, :]) ** 2, axis=2)
        minorant = c_rate - m_rate * (dist_sq - u0_rate)
        rows = (e_w * (minorant - g_of(d)[None, :])).sum(axis=1)
        s_c = rows - lam
        deltas = np.diff(pts, axis=0)
        s_d = vstep ** 2 - np.sum(deltas ** 2, axis=1)
        return np.concatenate([s_a, s_b, s_c, s_d]), pts, d, deltas

    def barrier_value(x, t):
        # trial points during the line search may leave the domain of the
        # logs entirely; treat them as infinitely bad rather than NaN
        with np.errstate(invalid="ignore", divide="ignore"):
            s, _, _, _ = residuals(x)
            if not np.all(np.isfinite(s)) or np.any(s <= 0.0):
                return np.inf
            return -t * x[lam_idx] - np.log(s).sum()

    # Strictly feasible start: shrink the anchor toward the start point and
    # back the slacks off their bounds.
    shrink = 1e-4
    legs = np.linalg.norm(np.diff(anchor, axis=0), axis=1)
    max_leg = legs.max(initial=0.0)
    if max_leg > 0 and (1.0 - shrink) * max_leg >= vstep:
        shrink = max(shrink, 1.0 - vstep * (1.0 - 1e-9) / max_leg)
    pts0 = start + (1.0 - shrink) * (anchor - start)
    x = np.zeros(dim)
    if f_count:
        x[:d_off] = pts0[1:n - 1].ravel()
    bound0 = off_eve + np.einsum("nj,nj->n", g_eve, positions(x) - anchor)
    true0 = np.sum((positions(x) - scn.eve_position / zt) ** 2, axis=1)
    base = np.minimum(bound0, true0)
    d0 = base - 1e-3 * (1.0 + np.abs(base))
    d0 = np.maximum(d0, _D_LO_SCALED + 1e-9)
    bad = d0 >= bound0
    if np.any(bad):
        d0[bad] = 0.5 * (bound0[bad] + _D_LO_SCALED)
    if np.any(d0 >= bound0):
        raise NumericalFailure("could not construct a strictly feasible start")
    x[d_off:d_off + n] = d0
    s_probe, _, _, _ = residuals(np.concatenate([x[:lam_idx], [0.0]]))
    rows0 = s_probe[2 * n:2 * n + k_users]
    x[lam_idx] = rows0.min() - 0.01 * (1.0 + abs(rows0.min()))

    s_check, _, _, _ = residuals(x)
    if np.any(s_check <= 0.0):
        raise NumericalFailure("initial point is not strictly feasible")

    t = getattr(opts, "barrier_t0", _BARRIER_T0)
    mu = getattr(opts, "barrier_mu", _BARRIER_MU)
    total_steps = 0
    dec2 = np.inf
    while True:
        for _ in range(_NEWTON_PER_STAGE):
            s, pts, d, deltas = residuals(x)
            if not np.all(np.isfinite(s)):
                raise NumericalFailure("non-finite constraint residuals")
            w = 1.0 / s

            grad_rows = np.zeros((n_con, dim))
            # Eve affine rows.
            for idx, slot in enumerate(free):
                grad_rows[slot, 2 * idx:2 * idx + 2] = g_eve[slot]
            grad_rows[np.arange(n), d_off + np.arange(n)] = -1.0
            # Slack floor rows.
            grad_rows[n + np.arange(n), d_off + np.arange(n)] = 1.0
            # Rate rows.
            gp = g_prime(d)
            row0 = 2 * n
            for k in range(k_users):
                row = row0 + k
                if f_count:
                    coeff = (e_w[k, 1:n - 1] * m_rate[k, 1:n - 1])[:, None]
                    grad_rows[row, :d_off] = (-2.0 * coeff
                                              * (pts[1:n - 1] - users[k])).ravel()
                grad_rows[row, d_off:d_off + n] = -e_w[k] * gp
                grad_rows[row, lam_idx] = -1.0
            # Speed rows.
            row0 = 2 * n + k_users
            for slot in range(n - 1):
                row = row0 + slot
                fi = slot - 1
                if 1 <= slot <= n - 2:
                    grad_rows[row, 2 * fi:2 * fi + 2] = 2.0 * deltas[slot]
                fj = slot
                if 1 <= slot + 1 <= n - 2:
                    grad_rows[row, 2 * fj:2 * fj + 2] = -2.0 * deltas[slot]

            grad = -grad_rows.T @ w
            grad[lam_idx] -= t

            hess = (grad_rows * (w ** 2)[:, None]).T @ grad_rows
            # Curvature of the rate rows.
            w_c = w[2 * n:2 * n + k_users]
            if f_count:
                r_diag = 2.0 * ((w_c[:, None] * e_w[:, 1:n - 1]
                                 * m_rate[:, 1:n - 1]).sum(axis=0))
                idx = np.arange(d_off)
                hess[idx, idx] += np.repeat(r_diag, 2)
            d_diag = g_second(d) * (w_c[:, None] * e_w).sum(axis=0)
            idx = d_off + np.arange(n)
            hess[idx, idx] += d_diag
            # Curvature of the speed rows.
            w_d = w[2 * n + k_users:]
            for slot in range(n - 1):
                c2 = 2.0 * w_d[slot]
                fi, fj = slot - 1, slot
                i_free = 1 <= slot <= n - 2
                j_free = 1 <= slot + 1 <= n - 2
                if i_free:
                    hess[2 * fi, 2 * fi] += c2
                    hess[2 * fi + 1, 2 * fi + 1] += c2
                if j_free:
                    hess[2 * fj, 2 * fj] += c2
                    hess[2 * fj + 1, 2 * fj + 1] += c2
                if i_free and j_free:
                    hess[2 * fi, 2 * fj] -= c2
                    hess[2 * fj, 2 * fi] -= c2
                    hess[2 * fi + 1, 2 * fj + 1] -= c2
                    hess[2 * fj + 1, 2 * fi + 1] -= c2

            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                ridge = 1e-10 * (np.trace(hess) / dim + 1.0)
                step = np.linalg.solve(hess + ridge * np.eye(dim), -grad)

            dec2 = float(-grad @ step)
            total_steps += 1
            if dec2 <= 2e-10:
                break
            f_cur = barrier_value(x, t)
            alpha = 1.0
            for _ in range(100):
                trial = x + alpha * step
                f_trial = barrier_value(trial, t)
                if f_trial <= f_cur + _ARMIJO * alpha * (-dec2):
                    break
                alpha *= 0.5
            else:
                alpha = 0.0
            if alpha == 0.0:
                break
            x = x + alpha * step
            if total_steps >= _NEWTON_TOTAL_CAP:
                break
        gap = n_con / t
        if gap <= tol_opt:
            break
        if total_steps >= _NEWTON_TOTAL_CAP:
            sol = _package(sub, x, positions, d_off, n, lam_idx, zt,
                           gap + max(dec2, 0.0), total_steps, False)
            raise MaxIterations("barrier Newton iteration cap reached",
                                payload=sol)
        t *= mu

    stationarity = n_con / t + max(dec2, 0.0)
    return _package(sub, x, positions, d_off, n, lam_idx, zt, stationarity,
                    total_steps, True)


def _package(sub, x, positions, d_off, n, lam_idx, zt, stationarity,
             steps, converged) -> ConvexSolution:
    pts = positions(x) * zt
    pts[0] = sub.scenario.uav_start
    pts[-1] = sub.scenario.uav_start
    traj = Trajectory(pts)
    slack = x[d_off:d_off + n] * zt ** 2
    lam = float(x[lam_idx])
    sol = ConvexSolution(trajectory=traj, eve_slack=slack, lam=lam,
                         objective=lam, max_violation=0.0,
                         stationarity=float(stationarity),
                         newton_steps=steps, converged=converged)
    res = subproblem_residuals(sub, sol)
    sol.max_violation = max(0.0, res["eve_bound"], res["slack_floor"],
                            res["rate_rows"], res["speed"])
    return sol


def _association_cost(delta: np.ndarray, aux, omega: float) -> np.ndarray:
    """Maximization cost vector [per-entry bonus..., 1] for the schedule LP."""
    k_users, n = delta.shape
    cost = np.zeros(k_users * n + 1)
    if omega != 0.0:
        x_entries = aux.entries if hasattr(aux, "entries") else np.asarray(aux, float)
        if x_entries.shape != (k_users, n):
            raise DimensionMismatch(
                f"auxiliary {x_entries.shape} vs K={k_users}, N={n}")
        cost[:-1] = 2.0 * omega * (2.0 * x_entries - 1.0).ravel()
    cost[-1] = 1.0
    return cost


def solve_association(scn: Scenario, traj: Trajectory, aux, omega: float,
                      opts=None) -> tuple[Association, float]:
    """Best schedule for a fixed trajectory: an LP over the unit box.

    Maximizes lambda + omega tr{(2E - 1)(2X - 1)^T} subject to per-slot
    exclusivity and the per-user rate rows.  Negative rate differences stay
    in the program; the optimum zeroes those entries on its own.  The HiGHS
    backend returns a vertex, so ties resolve to extreme schedules; the
    planning loop uses the interior variant instead and this exact solve
    serves as the independent reference.
    """
    delta = rate_difference_matrix(scn, traj)
    k_users, n = delta.shape
    nv = k_users * n + 1
    cost = _association_cost(delta, aux, omega)

    a_ub = np.zeros((n + k_users, nv))
    for slot in range(n):
        # entry (k, slot) lives at flat index k*n + slot; spell the indices
        # out so the stride never reaches the lambda column
        a_ub[slot, np.arange(k_users) * n + slot] = 1.0
    for k in range(k_users):
        a_ub[n + k, k * n:(k + 1) * n] = -delta[k]
        a_ub[n + k, -1] = 1.0
    b_ub = np.concatenate([np.ones(n), np.zeros(k_users)])
    bounds = [(0.0, 1.0)] * (k_users * n) + [(None, None)]

    res = linprog(-cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise NumericalFailure(f"association LP failed: {res.message}")
    entries = np.clip(res.x[:-1].reshape(k_users, n), 0.0, 1.0)
    assoc = Association(entries)
    lam = float((assoc.entries * delta).sum(axis=1).min())
    return assoc, lam


def _barrier_lp_max(cost, a_ub, b_ub, x0, tol):
    """Maximize cost @ x over a_ub @ x <= b_ub from a strictly feasible x0.

    Plain log-barrier Newton; the returned point lies in the relative
    interior of the near-optimal set, so ties between optimal vertices come
    back as fractional blends rather than an arbitrary extreme point.
    """
    m, nv = a_ub.shape
    x = np.asarray(x0, dtype=float).copy()
    if np.any(b_ub - a_ub @ x <= 0.0):
        raise NumericalFailure("interior LP start is infeasible")
    t = 1.0
    steps = 0
    while True:
        for _ in range(60):
            s = b_ub - a_ub @ x
            w = 1.0 / s
            grad = -t * cost + a_ub.T @ w
            hess = (a_ub * (w ** 2)[:, None]).T @ a_ub
            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                ridge = 1e-12 * (np.trace(hess) / nv + 1.0)
                step = np.linalg.solve(hess + ridge * np.eye(nv), -grad)
            dec2 = float(-grad @ step)
            steps += 1
            if dec2 <= 2e-10:
                break
            f_cur = -t * (cost @ x) - np.log(s).sum()
            alpha = 1.0
            for _ in range(100):
                trial = x + alpha * step
                s_t = b_ub - a_ub @ trial
                if np.all(s_t > 0.0):
                    f_t = -t * (cost @ trial) - np.log(s_t).sum()
                    if f_t <= f_cur + _ARMIJO * alpha * (-dec2):
                        break
                alpha *= 0.5
            else:
                alpha = 0.0
            if alpha == 0.0:
                break
            x = x + alpha * step
            if steps >= _NEWTON_TOTAL_CAP:
                raise MaxIterations("interior LP iteration cap reached")
        if m / t <= tol:
            return x
        t *= 20.0


def solve_association_interior(scn: Scenario, traj: Trajectory, aux,
                               omega: float, opts=None
                               ) -> tuple[Association, float]:
    """Schedule update via a barrier method, as the planning loop uses it.

    Same program as solve_association but solved to an interior point of
    the near-optimal face: slots where users tie keep fractional shares
    until the penalty bonus separates them.
    """
    tol = getattr(opts, "tol_opt", 1e-6) if opts is not None else 1e-6
    delta = rate_difference_matrix(scn, traj)
    k_users, n = delta.shape
    kn = k_users * n
    nv = kn + 1
    cost = _association_cost(delta, aux, omega)

    m = 2 * kn + n + k_users
    a_ub = np.zeros((m, nv))
    b_ub = np.empty(m)
    idx = np.arange(kn)
    a_ub[idx, idx] = 1.0                       # e <= 1
    b_ub[:kn] = 1.0
    a_ub[kn + idx, idx] = -1.0                 # e >= 0
    b_ub[kn:2 * kn] = 0.0
    for slot in range(n):
        a_ub[2 * kn + slot, np.arange(k_users) * n + slot] = 1.0  # col sums <= 1
    b_ub[2 * kn:2 * kn + n] = 1.0
    for k in range(k_users):
        row = 2 * kn + n + k                   # lambda <= user row sum
        a_ub[row, k * n:(k + 1) * n] = -delta[k]
        a_ub[row, -1] = 1.0
    b_ub[2 * kn + n:] = 0.0

    x0 = np.empty(nv)
    x0[:kn] = 1.0 / (2.0 * k_users)
    rows0 = delta.sum(axis=1) / (2.0 * k_users)
    x0[-1] = rows0.min() - 1.0 - 0.1 * abs(rows0.min())

    x = _barrier_lp_max(cost, a_ub, b_ub, x0, tol)
    entries = np.clip(x[:kn].reshape(k_users, n), 0.0, 1.0)
    assoc = Association(entries)
    lam = float((assoc.entries * delta).sum(axis=1).min())
    return assoc, lam
