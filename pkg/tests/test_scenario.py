import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secuav import (Association, DimensionMismatch, Scenario, Trajectory,
                    db_to_linear, dbm_to_watts, megabytes_to_bits,
                    min_user_rate_sum, reference_scenario, rate_difference_matrix,
                    secrecy_rate, spectral_rate_eve, spectral_rate_user)
from secuav.scenario import spectral_rate_user_gradient


def test_unit_conversions():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(-60.0) == pytest.approx(1e-6)
    assert dbm_to_watts(-110.0) == pytest.approx(1e-14)
    assert megabytes_to_bits(10.0) == 8e7


def test_reference_scenario_channel_numbers():
    scn = reference_scenario()
    # P h0 / sigma^2 with 0 dBW, -60 dB, -110 dBm
    assert scn.rho0 == pytest.approx(1e8, rel=1e-12)
    assert scn.altitude == 100.0
    assert scn.max_step == pytest.approx(25.0)
    assert scn.content_bits == 8e7
    assert scn.n_users == 2


def test_rate_at_overhead_position():
    scn = reference_scenario()
    r = scn.user_positions[0]
    # directly overhead: distance^2 = z^2, SNR = rho0 / z^2 = 1e4
    assert spectral_rate_user(scn, r, 0) == pytest.approx(math.log2(1 + 1e4))


def test_secrecy_rate_clamped_nonnegative():
    scn = reference_scenario()
    # start point is nearer to Eve than to either user
    assert secrecy_rate(scn, scn.uav_start, 0) == 0.0
    assert secrecy_rate(scn, scn.user_positions[0], 0) > 0.0


def test_secrecy_positive_iff_closer_than_eve():
    scn = reference_scenario()
    rng = np.random.default_rng(7)
    for _ in range(200):
        r = rng.uniform(-200, 800, size=2)
        d_user = np.linalg.norm(r - scn.user_positions[0])
        d_eve = np.linalg.norm(r - scn.eve_position)
        s = secrecy_rate(scn, r, 0)
        if d_user < d_eve:
            assert s > 0.0
        else:
            assert s == 0.0


def test_user_rate_strictly_decreasing_in_distance():
    scn = reference_scenario()
    rng = np.random.default_rng(11)
    u = scn.user_positions[0]
    for _ in range(1000):
        d1, d2 = sorted(rng.uniform(0.0, 2000.0, size=2))
        if d2 - d1 < 1e-9:
            continue
        theta = rng.uniform(0, 2 * np.pi)
        direction = np.array([np.cos(theta), np.sin(theta)])
        r_near = spectral_rate_user(scn, u + d1 * direction, 0)
        r_far = spectral_rate_user(scn, u + d2 * direction, 0)
        assert r_near > r_far


def test_rate_gradient_matches_finite_differences():
    scn = reference_scenario()
    rng = np.random.default_rng(3)
    h = 1e-3
    for _ in range(100):
        r = rng.uniform(-500, 1000, size=2)
        g = spectral_rate_user_gradient(scn, r, 1)
        fd = np.array([
            (spectral_rate_user(scn, r + [h, 0], 1)
             - spectral_rate_user(scn, r - [h, 0], 1)) / (2 * h),
            (spectral_rate_user(scn, r + [0, h], 1)
             - spectral_rate_user(scn, r - [0, h], 1)) / (2 * h),
        ])
        scale = max(1e-9, np.linalg.norm(g))
        assert np.linalg.norm(g - fd) / scale < 1e-6


def test_trajectory_leg_lengths():
    t = Trajectory(np.array([[0.0, 0.0], [3.0, 4.0], [3.0, 4.0]]))
    assert t.n_slots == 3
    assert t.leg_lengths() == pytest.approx([5.0, 0.0])


def test_association_shape_and_binarity():
    a = Association(np.array([[1.0, 0.0], [0.0, 0.4]]))
    assert a.shape == (2, 2)
    assert a.binarity_residual() == pytest.approx(0.4)
    with pytest.raises(Exception):
        Association(np.array([1.0, 0.0]))  # 1-D rejected


def test_min_user_rate_sum_matches_manual():
    scn = reference_scenario()
    traj = Trajectory(np.tile(scn.user_positions[0], (4, 1)))
    assoc = Association(np.array([[1, 1, 0, 0], [0, 0, 1, 1]], dtype=float))
    delta = rate_difference_matrix(scn, traj)
    manual = min((assoc.entries * delta).sum(axis=1))
    assert min_user_rate_sum(scn, traj, assoc) == pytest.approx(manual)


def test_rate_matrix_rejects_dim_mismatch():
    scn = reference_scenario()
    traj = Trajectory(np.zeros((3, 2)))
    bad = Association(np.ones((3, 3)))  # three users, scenario has two
    with pytest.raises(DimensionMismatch):
        min_user_rate_sum(scn, traj, bad)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-50.0, max_value=50.0),
       st.floats(min_value=-50.0, max_value=50.0))
def test_eve_rate_continuous_under_small_moves(dx, dy):
    scn = reference_scenario()
    base = scn.eve_position + np.array([300.0, 0.0])
    r = base + np.array([dx, dy])
    a = spectral_rate_eve(scn, r)
    b = spectral_rate_eve(scn, r + 1e-6)
    assert abs(a - b) < 1e-6  # Lipschitz at this scale


def test_scenario_rejects_nonpositive_parameters():
    scn = reference_scenario()
    for field, bad in [("altitude", 0.0), ("bandwidth", -1.0),
                       ("slot_len", 0.0), ("v_max", 0.0)]:
        kwargs = dict(
            user_positions=scn.user_positions, eve_position=scn.eve_position,
            uav_start=scn.uav_start, altitude=scn.altitude,
            ref_gain=scn.ref_gain, tx_power=scn.tx_power,
            noise_power=scn.noise_power, bandwidth=scn.bandwidth,
            slot_len=scn.slot_len, v_max=scn.v_max,
            content_bits=scn.content_bits)
        kwargs[field] = bad
        with pytest.raises(ValueError):
            Scenario(**kwargs)
