"""Non-optimized comparison schemes: visit-and-hover and a fixed circle.

Both return the same result type as the planner so downstream emission and
plotting code does not care where a plan came from.  The hover scheme always
completes by construction; the circular scheme may legitimately fail to
deliver everything, and then says so instead of raising.
"""

from __future__ import annotations

import time

import numpy as np

from .bounds import hover_tour_slots, hover_witness, overhead_secrecy_rate
from .errors import DegenerateGeometry, NeverCompletes
from .planner import PlanResult, default_init, result_from_plan
from .scenario import Association, Scenario, rate_difference_matrix


def hover_baseline(scn: Scenario) -> PlanResult:
    """Fly user to user at max speed, hover overhead until each is served.

    Raises NeverCompletes when some user has no positive secrecy rate even
    directly overhead (Eve co-located or closer in the projected sense).
    """
    start_t = time.perf_counter()
    for k in range(scn.n_users):
        if overhead_secrecy_rate(scn, k) <= 0.0:
            raise NeverCompletes(
                f"user {k} has no positive secrecy rate under hovering")
    try:
        n = hover_tour_slots(scn)
        traj, assoc = hover_witness(scn, n)
    except DegenerateGeometry as exc:
        raise NeverCompletes(str(exc)) from exc
    return result_from_plan(scn, n, traj, assoc, [], "hover-baseline",
                            time.perf_counter() - start_t)


def circular_baseline(scn: Scenario, n: int) -> PlanResult:
    """Fixed circular sweep with greedy scheduling, no optimization.

    Each slot serves the unmet user with the largest positive secrecy rate;
    delivery may stay incomplete, which the result reports truthfully.
    """
    start_t = time.perf_counter()
    traj, _ = default_init(scn, n)
    delta = rate_difference_matrix(scn, traj)
    per_slot_bits = scn.bandwidth * scn.slot_len
    remaining = np.full(scn.n_users, scn.content_bits, dtype=float)
    entries = np.zeros((scn.n_users, n))
    for slot in range(n):
        gains = np.where(remaining > 0.0, delta[:, slot], -np.inf)
        k = int(np.argmax(gains))
        if gains[k] <= 0.0:
            continue
        entries[k, slot] = 1.0
        remaining[k] -= per_slot_bits * delta[k, slot]
    return result_from_plan(scn, n, traj, Association(entries), [],
                            "circular-baseline",
                            time.perf_counter() - start_t)
