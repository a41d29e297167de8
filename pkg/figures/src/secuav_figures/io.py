"""Readers for the planner's emitted file formats.

Every reader checks the header and each data row, and reports failures by
file and 1-based row number so a truncated or hand-edited file is caught
before anything is drawn.
"""

from __future__ import annotations

import ast
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class FigureInputError(Exception):
    """An input file does not conform to its contract."""


@dataclass(frozen=True)
class Series:
    """One scheme's data for a figure, with its legend label."""

    label: str
    data: np.ndarray


@dataclass(frozen=True)
class Geometry:
    """Marker positions for the planar trajectory figure."""

    users: np.ndarray       # (K, 2)
    eve: np.ndarray         # (2,)
    start: np.ndarray       # (2,)


def _rows(path, expected_header):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise FigureInputError(f"{p}: {exc}") from exc
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise FigureInputError(f"{p}: row 1: missing header") from None
    if header != expected_header:
        raise FigureInputError(
            f"{p}: row 1: header {','.join(header)!r}, "
            f"expected {','.join(expected_header)!r}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(expected_header):
            raise FigureInputError(
                f"{p}: row {lineno}: {len(row)} fields, "
                f"expected {len(expected_header)}")
        try:
            rows.append([float(v) for v in row])
        except ValueError as exc:
            raise FigureInputError(f"{p}: row {lineno}: {exc}") from exc
    if not rows:
        raise FigureInputError(f"{p}: no data rows")
    return np.asarray(rows)


def read_trace(path) -> np.ndarray:
    """Columns: iteration, penalized objective, lambda, binarity residual."""
    data = _rows(path, ["iteration", "penalized_objective", "lambda",
                        "binarity_residual"])
    if np.any(np.diff(data[:, 0]) <= 0):
        raise FigureInputError(f"{path}: iteration column must increase")
    return data


def read_trajectory(path) -> np.ndarray:
    """Columns: slot (1-based), x, y; returns the (N, 2) waypoint array."""
    data = _rows(path, ["n", "x", "y"])
    slots = data[:, 0]
    if not np.array_equal(slots, np.arange(1, len(slots) + 1)):
        raise FigureInputError(f"{path}: slot column must run 1..N in order")
    return data[:, 1:]


def read_association(path) -> np.ndarray:
    """Rows (n, k, e), both indices 1-based; returns the (K, N) matrix."""
    data = _rows(path, ["n", "k", "e"])
    slots = data[:, 0].astype(int)
    users = data[:, 1].astype(int)
    if np.any(slots != data[:, 0]) or np.any(users != data[:, 1]):
        raise FigureInputError(f"{path}: n and k must be integers")
    n, k = slots.max(), users.max()
    if slots.min() < 1 or users.min() < 1:
        raise FigureInputError(f"{path}: indices are 1-based")
    entries = np.full((k, n), np.nan)
    entries[users - 1, slots - 1] = data[:, 2]
    if np.any(np.isnan(entries)):
        missing = np.argwhere(np.isnan(entries))[0]
        raise FigureInputError(
            f"{path}: no row for slot {missing[1] + 1}, user {missing[0] + 1}")
    return entries


def read_scenario_geometry(path) -> Geometry:
    """Pull users, eve, and uav_start out of a scenario file.

    Only the geometry keys are parsed; radio parameters are irrelevant to
    the figures and stay untouched.
    """
    p = Path(path)
    try:
        lines = p.read_text().splitlines()
    except OSError as exc:
        raise FigureInputError(f"{p}: {exc}") from exc
    found = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or "=" not in stripped:
            continue
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in ("users", "eve", "uav_start"):
            continue
        try:
            found[key] = np.asarray(ast.literal_eval(value.strip()),
                                    dtype=float)
        except (ValueError, SyntaxError) as exc:
            raise FigureInputError(f"{p}: row {lineno}: {exc}") from exc
    missing = [k for k in ("users", "eve", "uav_start") if k not in found]
    if missing:
        raise FigureInputError(f"{p}: missing key: {', '.join(missing)}")
    users = np.atleast_2d(found["users"])
    if users.shape[1] != 2 or found["eve"].shape != (2,) \
            or found["uav_start"].shape != (2,):
        raise FigureInputError(f"{p}: geometry entries must be planar points")
    return Geometry(users=users, eve=found["eve"], start=found["uav_start"])
