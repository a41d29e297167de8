"""Ground-truth checking of plans against the original delivery problem.

The validator recomputes every rate from scratch and applies the secrecy
clamp, so it is independent of any quantity the planner caches.  All
"the plan validates" claims elsewhere in the library defer to check_plan.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InstanceTooLarge
from .scenario import (EPS_BIN, EPS_FEAS, Association, Scenario, Trajectory,
                       eve_rate_vector, rate_difference_matrix,
                       user_rate_matrix)


@dataclass
class PlanReport:
    """Outcome of validating one plan."""

    per_user_bits: np.ndarray
    required_bits: float
    speed_violations: list = field(default_factory=list)      # (slot, excess m)
    boundary_violations: list = field(default_factory=list)   # (which end, offset m)
    column_violations: list = field(default_factory=list)     # (slot, column sum)
    binary_violations: list = field(default_factory=list)     # (user, slot, value)

    @property
    def delivery_met(self) -> bool:
        tol = EPS_FEAS * max(1.0, self.required_bits)
        return bool(np.all(self.per_user_bits >= self.required_bits - tol))

    @property
    def violation_count(self) -> int:
        return (len(self.speed_violations) + len(self.boundary_violations)
                + len(self.column_violations) + len(self.binary_violations))

    @property
    def passed(self) -> bool:
        return self.delivery_met and self.violation_count == 0

    def summary(self) -> str:
        bits = ", ".join(f"{b:.4g}" for b in self.per_user_bits)
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}: delivered bits [{bits}] vs required "
                f"{self.required_bits:.4g}; {self.violation_count} violations")


def check_plan(scn: Scenario, traj: Trajectory, assoc: Association) -> PlanReport:
    """Validate a binary plan against delivery, motion, and scheduling rules.

    Per-user secure bits use the clamped secrecy rate
    B0 tau sum_n e_k[n] max(0, R_k[n] - R_e[n]).
    """
    if assoc.shape[0] != scn.n_users or assoc.shape[1] != traj.n_slots:
        raise DimensionMismatch(
            f"association {assoc.shape} vs K={scn.n_users}, N={traj.n_slots}")
    e = assoc.entries
    report = PlanReport(
        per_user_bits=np.zeros(scn.n_users),
        required_bits=scn.content_bits,
    )

    secrecy = np.maximum(rate_difference_matrix(scn, traj), 0.0)
    report.per_user_bits = scn.bandwidth * scn.slot_len * (e * secrecy).sum(axis=1)

    max_step = scn.max_step + EPS_FEAS
    legs = traj.leg_lengths()
    for n in np.nonzero(legs > max_step)[0]:
        report.speed_violations.append((int(n), float(legs[n] - scn.max_step)))

    start_off = float(np.linalg.norm(traj.points[0] - scn.uav_start))
    end_off = float(np.linalg.norm(traj.points[-1] - scn.uav_start))
    if start_off > EPS_FEAS:
        report.boundary_violations.append(("first", start_off))
    if end_off > EPS_FEAS:
        report.boundary_violations.append(("last", end_off))

    col_sums = e.sum(axis=0)
    for n in np.nonzero(col_sums > 1.0 + EPS_FEAS)[0]:
        report.column_violations.append((int(n), float(col_sums[n])))

    off_bit = np.minimum(np.abs(e), np.abs(1.0 - e))  # catches e outside [0, 1] too
    for k, n in zip(*np.nonzero(off_bit > EPS_BIN)):
        report.binary_violations.append((int(k), int(n), float(e[k, n])))

    return report


def brute_force_association(scn: Scenario, traj: Trajectory):
    """Exhaustive best binary schedule for a fixed trajectory.

    Enumerates every per-slot choice in {idle, user 1, ..., user K} and
    returns (best binary association, best lambda) for the unclamped
    max-min objective.  The clamped optimum is computed alongside and must
    coincide; the mismatch would indicate the zero-out argument fails.
    """
    k_users = scn.n_users
    n = traj.n_slots
    n_choices = (k_users + 1) ** n
    if n_choices > 6561:
        raise InstanceTooLarge(
            f"({k_users}+1)^{n} = {n_choices} assignments exceed desk scale")

    delta = rate_difference_matrix(scn, traj)          # (K, N)
    delta_clamped = np.maximum(delta, 0.0)

    choices = np.arange(n_choices)
    digits = np.empty((n_choices, n), dtype=np.int64)  # per-slot choice
    rem = choices
    for slot in range(n):
        digits[:, slot] = rem % (k_users + 1)
        rem = rem // (k_users + 1)

    sums = np.zeros((n_choices, k_users))
    sums_clamped = np.zeros((n_choices, k_users))
    for k in range(k_users):
        mask = digits == (k + 1)
        sums[:, k] = mask @ delta[k]
        sums_clamped[:, k] = mask @ delta_clamped[k]

    values = sums.min(axis=1)
    values_clamped = sums_clamped.min(axis=1)
    best = int(values.argmax())
    best_value = float(values[best])
    best_value_clamped = float(values_clamped.max())

    if abs(best_value - best_value_clamped) > 1e-9 * max(1.0, abs(best_value)):
        raise AssertionError(
            "clamped and unclamped exhaustive optima differ: "
            f"{best_value_clamped} vs {best_value}")

    entries = np.zeros((k_users, n))
    for slot in range(n):
        c = digits[best, slot]
        if c > 0:
            entries[c - 1, slot] = 1.0
    return Association(entries), best_value


def brute_force_values(scn: Scenario, traj: Trajectory):
    """(unclamped optimum, clamped optimum) over all binary schedules."""
    k_users = scn.n_users
    n = traj.n_slots
    n_choices = (k_users + 1) ** n
    if n_choices > 6561:
        raise InstanceTooLarge(
            f"({k_users}+1)^{n} = {n_choices} assignments exceed desk scale")
    delta = rate_difference_matrix(scn, traj)
    delta_clamped = np.maximum(delta, 0.0)
    choices = np.arange(n_choices)
    digits = np.empty((n_choices, n), dtype=np.int64)
    rem = choices
    for slot in range(n):
        digits[:, slot] = rem % (k_users + 1)
        rem = rem // (k_users + 1)
    sums = np.zeros((n_choices, k_users))
    sums_clamped = np.zeros((n_choices, k_users))
    for k in range(k_users):
        mask = digits == (k + 1)
        sums[:, k] = mask @ delta[k]
        sums_clamped[:, k] = mask @ delta_clamped[k]
    return float(sums.min(axis=1).max()), float(sums_clamped.min(axis=1).max())
