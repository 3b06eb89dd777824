import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpcircle import birkhoff as bk
from qpcircle.maps import iterate_orbit
from qpcircle.projection import AngleSequence, project_angles

GOLDEN = math.sqrt(2) - 1
SURDS = [math.sqrt(p) % 1 for p in (2, 3, 5, 6, 7, 8, 10, 11, 12, 13, 14, 15, 17, 18, 19, 20, 21, 22, 23, 24)]


def rigid_angles(rho, M):
    return AngleSequence(np.zeros(2), np.mod(np.arange(M + 1) * rho, 1.0))


def unit_circle_orbit(rho, M):
    t = 2 * np.pi * np.mod(np.arange(M + 1) * rho, 1.0)
    return np.column_stack([np.cos(t), np.sin(t)])


def test_weights_two_nodes():
    np.testing.assert_array_equal(bk.make_weights(2), [0.0, 1.0])


@pytest.mark.parametrize("N", [2, 3, 10, 97, 1000, 12345, 10 ** 6])
def test_weights_normalized_and_nonnegative(N):
    w = bk.make_weights(N)
    assert len(w) == N
    assert np.all(w >= 0)
    assert abs(math.fsum(w) - 1) < 1e-14


def test_weights_symmetric():
    w = np.append(bk.make_weights(10), 0.0)
    for n in range(1, 10):
        assert w[n] == w[10 - n]


def test_weights_reject_short():
    with pytest.raises(ValueError):
        bk.make_weights(1)


@given(c=st.floats(-1e6, 1e6, allow_nan=False), N=st.integers(2, 3000))
def test_weighted_average_of_constant(c, N):
    assert bk.weighted_average(np.full(N, c), bk.make_weights(N)) == pytest.approx(c, rel=1e-15, abs=1e-300)


def test_weighted_average_length_mismatch():
    with pytest.raises(ValueError):
        bk.weighted_average(np.ones(5), bk.make_weights(6))


def test_weighted_average_zero_mean_observable():
    N = 10_000
    t = np.mod(np.arange(N) * GOLDEN, 1.0)
    assert abs(bk.weighted_average(np.sin(2 * np.pi * t), bk.make_weights(N))) < 1e-12


def test_weighted_average_converges_superpolynomially():
    errs = []
    for N in (100, 200, 400, 800):
        t = np.mod(np.arange(N) * GOLDEN, 1.0)
        errs.append(abs(bk.weighted_average(np.exp(np.cos(2 * np.pi * t)), bk.make_weights(N)) - np.i0(1.0)))
    # each doubling gains far more than any fixed power would
    assert errs[1] < errs[0] / 100 and errs[2] < errs[1] / 100


@pytest.mark.parametrize("rho", SURDS)
def test_rigid_rotation_number(rho):
    assert abs(bk.rotation_number(rigid_angles(rho, 1000)).rho - rho) < 1e-13


def test_rotation_number_reference_values(henon_spec):
    a = project_angles(iterate_orbit(henon_spec, (0.1, 0.0), 1000))
    assert abs(bk.rotation_number(a, [1000]).rho - 0.211095709965479) < 1e-11
    b = project_angles(iterate_orbit(henon_spec, (0.4, 0.0), 120_000))
    assert abs(bk.rotation_number(b, [120_000]).rho - 0.206174514865704) < 1e-11


def test_rotation_number_history_and_spread():
    est = bk.rotation_number(rigid_angles(GOLDEN, 4000), [1000, 2000, 3000, 4000])
    assert [m for m, _ in est.history] == [1000, 2000, 3000, 4000]
    assert est.M == 4000 and est.spread < 1e-13


def test_rotation_number_checkpoint_validation():
    a = rigid_angles(GOLDEN, 100)
    with pytest.raises(ValueError):
        bk.rotation_number(a, [50, 40])
    with pytest.raises(bk.InsufficientData):
        bk.rotation_number(a, [50, 200])


def test_classify_regular_and_chaotic(henon_spec):
    cps = [50_000, 100_000, 120_000]
    reg = bk.classify_orbit(project_angles(iterate_orbit(henon_spec, (0.4, 0.0), 120_000)), cps)
    assert reg.quasiperiodic and reg.estimate.spread < 1e-11
    cha = bk.classify_orbit(project_angles(iterate_orbit(henon_spec, (0.3, -0.44), 120_000)), cps)
    assert cha.kind is bk.OrbitKind.NONCONVERGENT


def test_classify_rigid_rotation():
    assert bk.classify_orbit(rigid_angles(GOLDEN, 2000)).quasiperiodic


def test_classify_needs_three_checkpoints():
    with pytest.raises(ValueError):
        bk.classify_orbit(rigid_angles(GOLDEN, 100), [50, 100])


def test_unit_circle_coefficients():
    pts = unit_circle_orbit(GOLDEN, 5000)
    c = bk.fourier_coefficients(pts, GOLDEN, [1, 3, -1])
    np.testing.assert_allclose(c[0], [0.5, -0.5j], atol=1e-10)
    np.testing.assert_allclose(c[1], [0, 0], atol=1e-10)
    np.testing.assert_allclose(c[2], [0.5, 0.5j], atol=1e-10)


def test_coefficient_phase_anchor():
    pts = unit_circle_orbit(GOLDEN, 5000)
    c = bk.fourier_coefficient(pts, GOLDEN, 1, theta0=0.25)
    np.testing.assert_allclose(c.value, np.array([0.5, -0.5j]) * np.exp(-0.5j * np.pi), atol=1e-10)


@given(s=st.floats(-3, 3, allow_nan=False), t=st.floats(-3, 3, allow_nan=False))
def test_coefficients_linear_in_data(s, t):
    rng = np.random.default_rng(0)
    p, q = rng.normal(size=(301, 2)), rng.normal(size=(301, 2))
    lhs = bk.fourier_coefficients(s * p + t * q, 0.3, [0, 1, 2])
    rhs = s * bk.fourier_coefficients(p, 0.3, [0, 1, 2]) + t * bk.fourier_coefficients(q, 0.3, [0, 1, 2])
    np.testing.assert_allclose(lhs, rhs, atol=1e-13 * (1 + abs(s) + abs(t)))


def test_coefficients_match_converged_circle(henon_circle, henon_spec):
    K = henon_circle.system.circles[0]
    rho = henon_circle.system.rho
    orbit = iterate_orbit(henon_spec, K(0.0), 10_000)
    got = bk.fourier_coefficients(orbit, rho, range(-5, 6))
    N = K.N
    np.testing.assert_allclose(got[:, 0], K.a[N - 5:N + 6], atol=1e-6)
    np.testing.assert_allclose(got[:, 1], K.b[N - 5:N + 6], atol=1e-6)


def test_decay_of_unit_circle():
    dec = bk.sample_decay(unit_circle_orbit(GOLDEN, 5000), GOLDEN, [2, 3])
    assert all(v < 1e-10 for _, v in dec)


def test_decay_slope_negative(henon_spec):
    dec = bk.sample_decay(iterate_orbit(henon_spec, (0.1, 0.0), 1000), 0.211095709965479, [2, 4, 6, 8, 10])
    n, v = np.array(dec).T
    assert np.polyfit(n, np.log(v), 1)[0] < 0


def test_estimate_truncation_exact_geometric():
    assert bk.estimate_truncation([(10, 1e-3), (20, 1e-6)], 1e-12) == 64


def test_estimate_truncation_rejects_growth():
    with pytest.raises(bk.DecayFitError):
        bk.estimate_truncation([(2, 1e-4), (4, 1e-3), (6, 1e-2)])


def test_estimate_truncation_needs_data():
    with pytest.raises(bk.DecayFitError):
        bk.estimate_truncation([(2, 1e-20), (4, 1e-3)])
