import dataclasses

import numpy as np
import pytest

from secuav import (Association, DimensionMismatch, InstanceTooLarge,
                    SolverOptions, Trajectory, brute_force_association,
                    brute_force_values, check_plan, hover_witness, optimal_x,
                    reference_scenario, prop1_bound, rate_difference_matrix,
                    solve_association)

from helpers import random_small_trajectory, single_user_scenario


@pytest.fixture(scope="module")
def witness():
    scn = reference_scenario()
    n = prop1_bound(scn)
    traj, assoc = hover_witness(scn, n)
    return scn, traj, assoc


def test_hover_plan_passes(witness):
    scn, traj, assoc = witness
    report = check_plan(scn, traj, assoc)
    assert report.passed
    assert np.all(report.per_user_bits >= scn.content_bits - 1e-3)


def test_speed_tamper_flagged_with_slot(witness):
    scn, traj, assoc = witness
    pts = traj.points.copy()
    pts[10] += np.array([400.0, 0.0])
    report = check_plan(scn, Trajectory(pts), assoc)
    assert not report.passed
    flagged = {slot for slot, _ in report.speed_violations}
    assert {9, 10} & flagged  # both legs touching waypoint 10 blow the limit


def test_boundary_tamper_flagged(witness):
    scn, traj, assoc = witness
    pts = traj.points.copy()
    pts[-1] += np.array([3.0, 0.0])
    report = check_plan(scn, Trajectory(pts), assoc)
    assert any(end == "last" for end, _ in report.boundary_violations)


def test_column_sum_tamper_flagged(witness):
    scn, traj, assoc = witness
    e = assoc.entries.copy()
    e[:, 5] = 1.0  # both users in one slot
    report = check_plan(scn, traj, Association(e))
    assert any(slot == 5 for slot, _ in report.column_violations)


def test_fractional_and_out_of_range_entries_flagged(witness):
    scn, traj, assoc = witness
    e = assoc.entries.copy()
    e[0, 3] = 0.4
    e[1, 7] = 1.7
    report = check_plan(scn, traj, Association(e))
    flagged = {(k, n) for k, n, _ in report.binary_violations}
    assert (0, 3) in flagged and (1, 7) in flagged


def test_dimension_mismatch_raises(witness):
    scn, traj, _ = witness
    with pytest.raises(DimensionMismatch):
        check_plan(scn, traj, Association(np.ones((2, 3))))


def test_validator_reports_shortfall():
    scn = single_user_scenario()
    traj = Trajectory(np.tile(scn.uav_start, (2, 1)))
    assoc = Association(np.ones((1, 2)))
    report = check_plan(scn, traj, assoc)  # needs 3 slots, given 2
    assert not report.passed
    assert report.violation_count == 0  # purely a delivery shortfall


# --- exhaustive association oracle -------------------------------------------


def test_brute_force_all_positive_single_user():
    scn = single_user_scenario()
    traj = Trajectory(np.tile(scn.uav_start, (3, 1)))
    best, lam = brute_force_association(scn, traj)
    assert np.all(best.entries == 1.0)
    delta = rate_difference_matrix(scn, traj)
    assert lam == pytest.approx(delta.sum())


def test_brute_force_skips_negative_user():
    # user 1 sits behind Eve, so every slot's difference is negative for it
    scn = reference_scenario()
    scn = dataclasses.replace(
        scn, user_positions=np.array([[200.0, 0.0], [520.0, 110.0]]))
    traj = Trajectory(np.tile([250.0, 10.0], (4, 1)))
    delta = rate_difference_matrix(scn, traj)
    assert np.all(delta[1] < 0.0)
    unclamped, clamped = brute_force_values(scn, traj)
    # the max-min optimum leaves user 1 idle, so both optima sit at zero
    assert unclamped == pytest.approx(0.0, abs=1e-12)
    assert clamped == pytest.approx(0.0, abs=1e-12)


def test_brute_force_instance_cap():
    scn = reference_scenario()
    with pytest.raises(InstanceTooLarge):
        brute_force_association(scn, Trajectory(np.zeros((9, 2))))


def test_clamped_and_unclamped_optima_agree_randomized():
    scn = reference_scenario()
    rng = np.random.default_rng(101)
    for _ in range(10):
        traj = random_small_trajectory(rng, int(rng.integers(5, 9)),
                                       center=(400.0, 100.0), spread=250.0)
        unclamped, clamped = brute_force_values(scn, traj)
        assert unclamped == pytest.approx(clamped, abs=1e-9)


def test_lp_relaxation_dominates_brute_force():
    scn = reference_scenario()
    rng = np.random.default_rng(77)
    opts = SolverOptions()
    for _ in range(8):
        traj = random_small_trajectory(rng, 7, center=(380.0, 80.0), spread=220.0)
        _, lam_star = brute_force_association(scn, traj)
        assoc0 = Association(np.full((2, 7), 0.5))
        relaxed, lam_lp = solve_association(scn, traj, optimal_x(assoc0), 0.0,
                                            opts)
        assert lam_lp >= lam_star - 1e-7
