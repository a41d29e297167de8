"""Convexification machinery for the feasibility subproblem.

Three ingredients:

* a bilinear penalty that is zero exactly on binary schedules paired with
  their own copy in the auxiliary ball, so binary constraints can be dropped
  in favor of a penalized continuous program;
* the closed-form maximizer of the penalty's trace term over that ball;
* two minorants used for successive convex approximation: a concave
  quadratic lower bound on the user-rate function and an affine lower bound
  on the squared distance to the eavesdropper.  Both are tight in value and
  gradient at the expansion point, which yields the ascent guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .scenario import LN2, Association, Scenario, Trajectory


@dataclass(frozen=True)
class AuxiliaryMatrix:
    """K x N auxiliary matrix X constrained to ||2X - 1||_F^2 <= KN."""

    entries: np.ndarray

    def __post_init__(self):
        mat = np.atleast_2d(np.asarray(self.entries, dtype=float))
        object.__setattr__(self, "entries", mat)

    @property
    def shape(self):
        return self.entries.shape

    def ball_residual(self) -> float:
        """||2X - 1||_F^2 - KN; feasible iff <= 0 (up to slack)."""
        k, n = self.entries.shape
        return float(np.sum((2.0 * self.entries - 1.0) ** 2) - k * n)


def _entries(mat) -> np.ndarray:
    if isinstance(mat, (Association, AuxiliaryMatrix)):
        return mat.entries
    return np.atleast_2d(np.asarray(mat, dtype=float))


def penalty(assoc, aux) -> float:
    """Binariness penalty KN - tr{(2E - 1)(2X - 1)^T}.

    Nonnegative whenever E is in the unit box and X in the Frobenius ball;
    zero exactly when E is binary and X = E.
    """
    e = _entries(assoc)
    x = _entries(aux)
    if e.shape != x.shape:
        raise DimensionMismatch(f"association {e.shape} vs auxiliary {x.shape}")
    k, n = e.shape
    return float(k * n - np.sum((2.0 * e - 1.0) * (2.0 * x - 1.0)))


def trace_objective(assoc, aux) -> float:
    """tr{(2E - 1)(2X - 1)^T}, the part of the penalty the X block maximizes."""
    e = _entries(assoc)
    x = _entries(aux)
    if e.shape != x.shape:
        raise DimensionMismatch(f"association {e.shape} vs auxiliary {x.shape}")
    return float(np.sum((2.0 * e - 1.0) * (2.0 * x - 1.0)))


def optimal_x(assoc) -> AuxiliaryMatrix:
    """Closed-form maximizer of the trace term over the Frobenius ball.

    X* = sqrt(KN) (2E - 1) / (2 ||2E - 1||_F) + 1/2, the ball boundary point
    aligned with 2E - 1.  When E is identically 1/2 any feasible value is
    optimal; X = E is returned for determinism.
    """
    e = _entries(assoc)
    k, n = e.shape
    direction = 2.0 * e - 1.0
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        return AuxiliaryMatrix(e.copy())
    x = math.sqrt(k * n) * direction / (2.0 * norm) + 0.5
    return AuxiliaryMatrix(x)


@dataclass(frozen=True)
class MinorantCoeffs:
    """Concave quadratic lower bound on f(y) = log2(1 + a1/(a2 + ||y||^2)).

    f(y) >= constant - slope * (||y||^2 - anchor_sq), with equality and
    matching gradient at y = anchor.
    """

    constant: float      # f at the anchor [bits/s/Hz]
    slope: float         # positive curvature coefficient [per m^2]
    anchor: np.ndarray   # expansion point y0 (2,)
    anchor_sq: float     # ||y0||^2

    def value(self, y) -> float:
        y = np.asarray(y, dtype=float)
        return self.constant - self.slope * (float(np.sum(y ** 2)) - self.anchor_sq)

    def gradient(self, y) -> np.ndarray:
        return -2.0 * self.slope * np.asarray(y, dtype=float)


def _minorant_at(a1: float, a2: float, y0: np.ndarray) -> MinorantCoeffs:
    u0 = float(np.sum(y0 ** 2))
    constant = math.log2(1.0 + a1 / (a2 + u0))
    slope = a1 / ((a1 + a2 + u0) * (a2 + u0) * LN2)
    return MinorantCoeffs(constant=constant, slope=slope,
                          anchor=y0.copy(), anchor_sq=u0)


def rate_minorant(scn: Scenario, k: int, anchor_traj: Trajectory) -> list[MinorantCoeffs]:
    """Per-slot minorants of user k's rate, expanded at the anchor trajectory.

    The rate is f(r[n] - r_k) with a1 = rho0 and a2 = z^2; each slot gets the
    concave quadratic expanded at y0 = anchor[n] - r_k.
    """
    if not 0 <= k < scn.n_users:
        raise IndexError(f"user index {k} out of range")
    a1 = scn.rho0
    a2 = scn.altitude ** 2
    rk = scn.user_positions[k]
    return [_minorant_at(a1, a2, p - rk) for p in anchor_traj.points]


@dataclass(frozen=True)
class AffineMinorant:
    """Affine lower bound on ||r - r_e||^2, tight at the anchor waypoint.

    value(r) = offset + grad . (r - anchor) with grad = 2 (anchor - r_e) and
    offset = ||anchor - r_e||^2.  Global bound by convexity of the square.
    """

    grad: np.ndarray
    offset: float
    anchor: np.ndarray

    def value(self, r) -> float:
        r = np.asarray(r, dtype=float)
        return self.offset + float(self.grad @ (r - self.anchor))


def eve_distance_minorant(r_e, anchor_traj: Trajectory) -> list[AffineMinorant]:
    """Per-slot affine lower bounds on the squared UAV-to-Eve distance."""
    r_e = np.asarray(r_e, dtype=float).reshape(2)
    out = []
    for p in anchor_traj.points:
        out.append(AffineMinorant(grad=2.0 * (p - r_e),
                                  offset=float(np.sum((p - r_e) ** 2)),
                                  anchor=p.copy()))
    return out


# Array packings used by the trajectory subproblem solver.

def rate_minorant_arrays(scn: Scenario, anchor_traj: Trajectory):
    """Stacked minorant coefficients for all users and slots.

    Returns (constants, slopes, anchor_sq), each of shape (K, N).
    """
    diff = anchor_traj.points[None, :, :] - scn.user_positions[:, None, :]
    u0 = np.sum(diff ** 2, axis=2)
    a1 = scn.rho0
    a2 = scn.altitude ** 2
    constants = np.log2(1.0 + a1 / (a2 + u0))
    slopes = a1 / ((a1 + a2 + u0) * (a2 + u0) * LN2)
    return constants, slopes, u0


def eve_minorant_arrays(scn: Scenario, anchor_traj: Trajectory):
    """Stacked affine Eve-distance bounds: gradients (N, 2), offsets (N,)."""
    delta = anchor_traj.points - scn.eve_position
    return 2.0 * delta, np.sum(delta ** 2, axis=1)
