import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strcs.fields import (
    Scenario,
    channel,
    channel_matrix,
    dump_scenario,
    load_scenario,
    prm_variances,
    r_frv,
    random_scenario,
    t_frv,
    to_virtual,
)


def single_path(t_angle=(0.0, 0.0), r_angle=(0.0, 0.0), gain=1.0):
    return Scenario([t_angle], [r_angle], [[gain]])


def test_to_virtual_extremes():
    assert to_virtual(math.pi / 2, 0.0) == pytest.approx((1.0, 0.0), abs=1e-15)
    assert to_virtual(0.0, 1.234) == pytest.approx((0.0, 1.0), abs=1e-15)


def test_to_virtual_closed_form():
    # sin(pi/3)cos(pi/4) = sqrt(3)/2 * sqrt(2)/2 = sqrt(6)/4
    v = to_virtual(math.pi / 3, math.pi / 4)
    assert v.theta == pytest.approx(0.6123724356957945, abs=1e-12)
    assert v.phi == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("elev,azim", [(-0.1, 0.0), (0.0, 3.2), (4.0, 1.0)])
def test_to_virtual_domain(elev, azim):
    with pytest.raises(ValueError):
        to_virtual(elev, azim)


@given(st.floats(0, math.pi), st.floats(0, math.pi))
def test_to_virtual_in_unit_disk(elev, azim):
    theta, phi = to_virtual(elev, azim)
    assert theta**2 + phi**2 <= 1 + 1e-12


def test_frv_center_is_ones(rng):
    sc = random_scenario(3, 3, 1.0, rng)
    np.testing.assert_allclose(t_frv(sc, (0, 0)), np.ones(3))
    np.testing.assert_allclose(r_frv(sc, (0, 0)), np.ones(3))


def test_frv_examples():
    sc = single_path(t_angle=(1.0, 0.0), r_angle=(0.0, 1.0))
    np.testing.assert_allclose(t_frv(sc, (0.5, 0.0)), [-1.0], atol=1e-15)
    np.testing.assert_allclose(r_frv(sc, (0.0, 0.25)), [1j], atol=1e-15)
    sc = single_path(t_angle=(0.5, -0.5))
    np.testing.assert_allclose(t_frv(sc, (1.0, 1.0)), [1.0], atol=1e-15)


def test_r_frv_scalar_loop(rng):
    sc = random_scenario(3, 3, 1.0, rng)
    r = (0.3, -0.7)
    expected = []
    for theta, phi in sc.r_angles:
        rho = r[0] * theta + r[1] * phi
        expected.append(complex(math.cos(2 * math.pi * rho), math.sin(2 * math.pi * rho)))
    np.testing.assert_allclose(r_frv(sc, r), expected, rtol=0, atol=1e-13)


def test_channel_scalar_cases():
    assert channel(single_path(gain=0.3 - 2j), (0, 0), (0, 0)) == pytest.approx(0.3 - 2j)
    sc = single_path(t_angle=(1.0, 0.0))
    assert channel(sc, (0.5, 0.0), (0.0, 0.0)) == pytest.approx(-1.0)


def test_channel_double_sum(rng):
    sc = random_scenario(3, 3, 1.0, rng)
    t, r = (0.4, -1.1), (-0.8, 1.7)
    g, f = t_frv(sc, t), r_frv(sc, r)
    total = 0j
    for q in range(3):
        for p in range(3):
            total += f[q].conjugate() * sc.prm[q, p] * g[p]
    assert channel(sc, t, r) == pytest.approx(total, abs=1e-13)


def test_channel_matrix_matches_pointwise(rng):
    sc = random_scenario(3, 3, 1.0, rng)
    tp = rng.uniform(-2, 2, (5, 2))
    rp = rng.uniform(-2, 2, (4, 2))
    h = channel_matrix(sc.t_angles, sc.r_angles, sc.prm, tp, rp)
    for v in range(4):
        for u in range(5):
            assert h[v, u] == pytest.approx(channel(sc, tp[u], rp[v]), abs=1e-13)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.floats(-2, 2), st.floats(-2, 2))
def test_frv_unit_modulus(seed, x, y):
    sc = random_scenario(3, 3, 1.0, np.random.default_rng(seed))
    assert np.all(np.abs(np.abs(t_frv(sc, (x, y))) - 1) < 1e-12)
    assert np.all(np.abs(np.abs(r_frv(sc, (x, y))) - 1) < 1e-12)


@settings(max_examples=50)
@given(
    st.integers(0, 2**32 - 1),
    st.tuples(st.floats(-2, 2), st.floats(-2, 2)),
    st.tuples(st.floats(-2, 2), st.floats(-2, 2)),
)
def test_frv_phase_additivity(seed, t1, t2):
    sc = random_scenario(4, 4, 1.0, np.random.default_rng(seed))
    t12 = (t1[0] + t2[0], t1[1] + t2[1])
    np.testing.assert_allclose(
        t_frv(sc, t12), t_frv(sc, t1) * t_frv(sc, t2), rtol=0, atol=1e-11
    )


def test_channel_path_permutation_invariance(rng):
    sc = random_scenario(3, 3, 1.0, rng)
    pt, pr = rng.permutation(3), rng.permutation(3)
    perm = Scenario(sc.t_angles[pt], sc.r_angles[pr], sc.prm[np.ix_(pr, pt)])
    for _ in range(5):
        t, r = rng.uniform(-2, 2, 2), rng.uniform(-2, 2, 2)
        assert channel(perm, t, r) == pytest.approx(channel(sc, t, r), abs=1e-13)


def test_scenario_shape_validation():
    with pytest.raises(ValueError):
        Scenario([[0, 0], [0.1, 0.1]], [[0, 0]], [[1.0]])
    with pytest.raises(ValueError):
        Scenario([[1.5, 0]], [[0, 0]], [[1.0]])


def test_prm_variances_paper_case():
    var = prm_variances(3, 3, 1.0)
    np.testing.assert_allclose(np.diag(var), 1 / 6)
    np.testing.assert_allclose(var[~np.eye(3, dtype=bool)], 1 / 12)
    assert var.sum() == pytest.approx(1.0)


def test_prm_variances_large_eta():
    var = prm_variances(3, 3, 1e12)
    assert var[0, 1] < 1e-12
    assert var[0, 0] == pytest.approx(1 / 3)


def test_prm_variances_single_receive_path():
    var = prm_variances(1, 1, 1.0)
    assert var.shape == (1, 1)
    assert var[0, 0] == pytest.approx(0.5)
    var = prm_variances(3, 1, 1.0)
    assert np.count_nonzero(var) == 1


def test_random_scenario_statistics():
    rng = np.random.default_rng(2024)
    n = 100_000
    diag = np.empty(n)
    off = np.empty(n)
    for i in range(n):
        prm = random_scenario(3, 3, 1.0, rng).prm
        diag[i] = abs(prm[0, 0]) ** 2
        off[i] = abs(prm[0, 1]) ** 2
    assert diag.mean() == pytest.approx(1 / 6, rel=0.03)
    assert off.mean() == pytest.approx(1 / 12, rel=0.03)


def test_random_scenario_angles_in_range(rng):
    for _ in range(50):
        sc = random_scenario(3, 3, 1.0, rng)
        for ang in (sc.t_angles, sc.r_angles):
            assert np.all(np.abs(ang) <= 1)
            assert np.all(ang[:, 0] ** 2 + ang[:, 1] ** 2 <= 1 + 1e-12)


def test_random_scenario_seeded():
    a = random_scenario(3, 3, 1.0, np.random.default_rng(7))
    b = random_scenario(3, 3, 1.0, np.random.default_rng(7))
    assert dump_scenario(a) == dump_scenario(b)


def test_dump_round_trip(rng):
    sc = random_scenario(3, 2, 2.5, rng)
    back = load_scenario(dump_scenario(sc))
    np.testing.assert_array_equal(back.t_angles, sc.t_angles)
    np.testing.assert_array_equal(back.r_angles, sc.r_angles)
    np.testing.assert_array_equal(back.prm, sc.prm)
    assert back.eta == sc.eta
