"""Certified slot-count upper bound and its constructive hover witness.

The bound combines a conservative serve term (all content delivered at the
worst-case overhead secrecy rate) with the travel time of the user tour in
scenario order.  The witness makes the bound executable: visit users in
order at max speed, hover overhead until each content is delivered, return
to the start, idle for any remaining slots.

The worst-case overhead rate uses the smallest user-to-Eve distance: the
overhead secrecy rate is strictly increasing in that distance, so the
minimum is the only per-slot rate that every hover position is guaranteed
to achieve, and the bound must be built from it for the witness to fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, InfeasibleHorizon
from .scenario import (Association, Scenario, Trajectory, spectral_rate_eve,
                       spectral_rate_user)


@dataclass(frozen=True)
class FeasibilityBound:
    """Slot-count bound together with the hover plan witnessing it."""

    n_max: int
    hover_plan: tuple[Trajectory, Association]


def user_tour_length(scn: Scenario) -> float:
    """Length of start -> user_1 -> ... -> user_K -> start, scenario order."""
    chain = np.vstack([scn.uav_start, scn.user_positions, scn.uav_start])
    return float(np.linalg.norm(np.diff(chain, axis=0), axis=1).sum())


def travel_lower_bound(scn: Scenario) -> int:
    """Slot count needed just to fly the user tour at max speed."""
    return int(math.ceil(user_tour_length(scn) / scn.max_step))


def worst_case_overhead_rate(scn: Scenario) -> float:
    """Secrecy rate when hovering over the user closest to Eve [bits/s/Hz].

    Equals log2[(z^2 + rho0)(z^2 + delta) / (z^2 (z^2 + rho0 + delta))] with
    delta the smallest squared user-to-Eve distance; every user's overhead
    rate is at least this value.
    """
    z2 = scn.altitude ** 2
    rho = scn.rho0
    delta = float(np.sum((scn.user_positions - scn.eve_position) ** 2,
                         axis=1).min())
    if delta <= 0.0:
        raise DegenerateGeometry("Eve is co-located with a user")
    return math.log2((z2 + rho) * (z2 + delta) / (z2 * (z2 + rho + delta)))


def prop1_bound(scn: Scenario) -> int:
    """Certified upper bound on the optimal number of slots.

    ceil( sK / (B0 tau r_min) + tour_length / (v_max tau) ) where r_min is
    the worst-case overhead secrecy rate.
    """
    rate = worst_case_overhead_rate(scn)
    serve = scn.content_bits * scn.n_users / (scn.bandwidth * scn.slot_len * rate)
    travel = user_tour_length(scn) / scn.max_step
    return int(math.ceil(serve + travel))


def overhead_secrecy_rate(scn: Scenario, k: int) -> float:
    """Secrecy rate while hovering directly above user k."""
    rk = scn.user_positions[k]
    return spectral_rate_user(scn, rk, k) - spectral_rate_eve(scn, rk)


def _hover_tour(scn: Scenario):
    """Slot list (position, served user or None) of the visit-and-hover tour.

    The arrival waypoint above a user doubles as its first hover slot.
    """
    bits_per_unit_rate = scn.bandwidth * scn.slot_len
    step = scn.max_step
    slots: list[tuple[np.ndarray, int | None]] = [(scn.uav_start.copy(), None)]
    cur = scn.uav_start
    for k in range(scn.n_users):
        rk = scn.user_positions[k]
        dist = float(np.linalg.norm(rk - cur))
        if dist > 1e-12:
            m = int(math.ceil(dist / step))
            for i in range(1, m + 1):
                slots.append((cur + (i / m) * (rk - cur), None))
        cur = rk
        rate = overhead_secrecy_rate(scn, k)
        if rate <= 0.0:
            raise DegenerateGeometry(
                f"hovering above user {k} yields no positive secrecy rate")
        hover = int(math.ceil(scn.content_bits / (bits_per_unit_rate * rate)))
        pos, serve = slots[-1]
        if serve is None and float(np.linalg.norm(pos - rk)) <= 1e-12:
            slots[-1] = (pos, k)
            hover -= 1
        for _ in range(hover):
            slots.append((rk.copy(), k))
    dist = float(np.linalg.norm(scn.uav_start - cur))
    if dist > 1e-12:
        m = int(math.ceil(dist / step))
        for i in range(1, m + 1):
            slots.append((cur + (i / m) * (scn.uav_start - cur), None))
    return slots


def hover_tour_slots(scn: Scenario) -> int:
    """Exact slot count of the visit-and-hover tour."""
    return len(_hover_tour(scn))


def hover_witness(scn: Scenario, n: int) -> tuple[Trajectory, Association]:
    """Feasible plan on ``n`` slots built from the visit-and-hover tour.

    Requires n >= prop1_bound(scn); remaining slots idle at the start point.
    """
    slots = _hover_tour(scn)
    if len(slots) > n:
        raise InfeasibleHorizon(
            f"hover construction needs {len(slots)} slots, only {n} available")
    points = np.empty((n, 2))
    entries = np.zeros((scn.n_users, n))
    for i, (pos, serve) in enumerate(slots):
        points[i] = pos
        if serve is not None:
            entries[serve, i] = 1.0
    points[len(slots):] = scn.uav_start
    return Trajectory(points), Association(entries)


def feasibility_bound(scn: Scenario) -> FeasibilityBound:
    """prop1_bound together with its validating hover plan."""
    n = prop1_bound(scn)
    return FeasibilityBound(n_max=n, hover_plan=hover_witness(scn, n))
