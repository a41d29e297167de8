"""Physical model of the delivery scenario and all rate quantities.

Geometry is planar: every node has a horizontal coordinate in meters and the
UAV flies at a fixed altitude.  The air-to-ground channel is line-of-sight,
with power gain inversely proportional to squared 3-D distance.  All
quantities are stored linear (watts, Hz, linear gain); dB inputs are converted
once at load time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch

# Absolute feasibility slack (meters or unitless) and binariness tolerance.
EPS_FEAS = 1e-6
EPS_BIN = 1e-3

LN2 = math.log(2.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def megabytes_to_bits(mb: float) -> float:
    # Decimal megabytes: 1 MB = 8e6 bits.
    return mb * 8e6


@dataclass(frozen=True)
class Scenario:
    """All physical constants and node geometry of one instance.

    Attributes
    ----------
    user_positions : (K, 2) array, horizontal coordinates of the users [m].
    eve_position : (2,) array, horizontal coordinate of the eavesdropper [m].
    uav_start : (2,) array, start and end point of the flight [m].
    altitude : flight altitude [m], > 0.
    ref_gain : channel power gain at 1 m reference distance (linear).
    tx_power : transmit power [W].
    noise_power : receiver noise power [W].
    bandwidth : system bandwidth [Hz].
    slot_len : slot duration [s].
    v_max : maximum horizontal speed [m/s].
    content_bits : per-user content size [bits].
    """

    user_positions: np.ndarray
    eve_position: np.ndarray
    uav_start: np.ndarray
    altitude: float
    ref_gain: float
    tx_power: float
    noise_power: float
    bandwidth: float
    slot_len: float
    v_max: float
    content_bits: float

    def __post_init__(self):
        users = np.atleast_2d(np.asarray(self.user_positions, dtype=float))
        if users.ndim != 2 or users.shape[1] != 2 or users.shape[0] < 1:
            raise ValueError("user_positions must be a (K, 2) array with K >= 1")
        object.__setattr__(self, "user_positions", users)
        object.__setattr__(self, "eve_position",
                           np.asarray(self.eve_position, dtype=float).reshape(2))
        object.__setattr__(self, "uav_start",
                           np.asarray(self.uav_start, dtype=float).reshape(2))
        for name in ("altitude", "ref_gain", "tx_power", "noise_power",
                     "bandwidth", "slot_len", "v_max", "content_bits"):
            value = float(getattr(self, name))
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be strictly positive and finite")
            object.__setattr__(self, name, value)
        if not math.isfinite(self.rho0):
            raise ValueError("P * ref_gain / noise_power must be finite")

    @property
    def n_users(self) -> int:
        return self.user_positions.shape[0]

    @property
    def rho0(self) -> float:
        """Reference SNR P * h0 / sigma^2 (linear)."""
        return self.tx_power * self.ref_gain / self.noise_power

    @property
    def max_step(self) -> float:
        """Largest distance the UAV may cover in one slot [m]."""
        return self.v_max * self.slot_len


@dataclass(frozen=True)
class Trajectory:
    """Sequence of per-slot horizontal UAV waypoints."""

    points: np.ndarray  # (N, 2)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a (N, 2) array with N >= 1")
        object.__setattr__(self, "points", pts)

    @property
    def n_slots(self) -> int:
        return self.points.shape[0]

    def leg_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)


@dataclass(frozen=True)
class Association:
    """K x N scheduling matrix, nominally with entries in [0, 1].

    Entries are continuous during optimization; a finished plan is binary up
    to EPS_BIN, and at most one user may be scheduled per slot.  Neither is
    enforced here: a candidate schedule may violate both, and the plan
    checker reports exactly where.  Only the shape is validated.
    """

    entries: np.ndarray  # (K, N)

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=float)
        if mat.ndim != 2:
            raise ValueError("entries must be a (K, N) matrix")
        if not np.all(np.isfinite(mat)):
            raise ValueError("entries must be finite")
        object.__setattr__(self, "entries", mat)

    @property
    def shape(self):
        return self.entries.shape

    def binarity_residual(self) -> float:
        """max over entries of min(e, 1 - e); 0 for a binary matrix."""
        e = self.entries
        if e.size == 0:
            return 0.0
        return float(np.minimum(e, 1.0 - e).max())

    def is_binary(self, eps: float = EPS_BIN) -> bool:
        return self.binarity_residual() <= eps


# ----------------------------------------------------------------------------
# Rate quantities
# ----------------------------------------------------------------------------

def channel_gain(scn: Scenario, r, target) -> float:
    """LoS power gain between the UAV at ``r`` and a ground node at ``target``.

    h = h0 / (z^2 + ||r - target||^2); always in (0, h0/z^2].
    """
    r = np.asarray(r, dtype=float)
    target = np.asarray(target, dtype=float)
    d2 = float(np.sum((r - target) ** 2))
    return scn.ref_gain / (scn.altitude ** 2 + d2)


def _spectral_rate(scn: Scenario, horizontal_sq: float) -> float:
    return math.log2(1.0 + scn.rho0 / (scn.altitude ** 2 + horizontal_sq))


def spectral_rate_user(scn: Scenario, r, k: int) -> float:
    """Spectral efficiency toward user ``k`` (bits/s/Hz), without the
    scheduling factor; the scheduler applies e_k[n] multiplicatively."""
    if not 0 <= k < scn.n_users:
        raise IndexError(f"user index {k} out of range")
    r = np.asarray(r, dtype=float)
    d2 = float(np.sum((r - scn.user_positions[k]) ** 2))
    return _spectral_rate(scn, d2)


def spectral_rate_eve(scn: Scenario, r) -> float:
    """Spectral efficiency the eavesdropper achieves (bits/s/Hz)."""
    r = np.asarray(r, dtype=float)
    d2 = float(np.sum((r - scn.eve_position) ** 2))
    return _spectral_rate(scn, d2)


def secrecy_rate(scn: Scenario, r, k: int) -> float:
    """Clamped secrecy spectral efficiency max(0, R_k - R_e) at position r.

    The clamp belongs to the validator semantics; the optimizer works with
    the unclamped difference, which attains the same optimum.
    """
    return max(0.0, spectral_rate_user(scn, r, k) - spectral_rate_eve(scn, r))


def spectral_rate_user_gradient(scn: Scenario, r, k: int) -> np.ndarray:
    """Analytic gradient of spectral_rate_user with respect to r."""
    r = np.asarray(r, dtype=float)
    y = r - scn.user_positions[k]
    u = float(np.sum(y ** 2))
    a2 = scn.altitude ** 2
    coeff = -scn.rho0 / ((scn.rho0 + a2 + u) * (a2 + u) * LN2)
    return coeff * 2.0 * y


def user_rate_matrix(scn: Scenario, traj: Trajectory) -> np.ndarray:
    """(K, N) matrix of per-slot user spectral efficiencies along ``traj``."""
    diff = traj.points[None, :, :] - scn.user_positions[:, None, :]
    d2 = np.sum(diff ** 2, axis=2)
    return np.log2(1.0 + scn.rho0 / (scn.altitude ** 2 + d2))


def eve_rate_vector(scn: Scenario, traj: Trajectory) -> np.ndarray:
    """(N,) vector of per-slot eavesdropper spectral efficiencies."""
    d2 = np.sum((traj.points - scn.eve_position) ** 2, axis=1)
    return np.log2(1.0 + scn.rho0 / (scn.altitude ** 2 + d2))


def rate_difference_matrix(scn: Scenario, traj: Trajectory) -> np.ndarray:
    """(K, N) unclamped differences R_k[n] - R_e[n] along ``traj``."""
    return user_rate_matrix(scn, traj) - eve_rate_vector(scn, traj)[None, :]


def min_user_rate_sum(scn: Scenario, traj: Trajectory, assoc: Association) -> float:
    """min over users of the scheduled unclamped rate-difference sum.

    This is the max-min objective the feasibility subproblem maximizes.
    """
    if assoc.shape != (scn.n_users, traj.n_slots):
        raise DimensionMismatch(
            f"association {assoc.shape} vs K={scn.n_users}, N={traj.n_slots}")
    delta = rate_difference_matrix(scn, traj)
    return float((assoc.entries * delta).sum(axis=1).min())


# ----------------------------------------------------------------------------
# Reference instance
# ----------------------------------------------------------------------------

def reference_scenario(bandwidth_hz: float = 5e6) -> Scenario:
    """Two-user reference instance used throughout the experiments.

    The reference setup leaves the bandwidth open; 5 MHz is the documented
    default and can be overridden.
    """
    return Scenario(
        user_positions=np.array([[200.0, 0.0], [600.0, 0.0]]),
        eve_position=np.array([500.0, 100.0]),
        uav_start=np.array([400.0, 200.0]),
        altitude=100.0,
        ref_gain=db_to_linear(-60.0),
        tx_power=db_to_linear(0.0),
        noise_power=dbm_to_watts(-110.0),
        bandwidth=bandwidth_hz,
        slot_len=0.5,
        v_max=50.0,
        content_bits=megabytes_to_bits(10.0),
    )
