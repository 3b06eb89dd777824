import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpcircle.maps import (Family, MapOverflowError, MapSpec, PeriodicOrbitError, StabilityKind, eval_map,
                           extend_orbit, find_periodic_orbit, henon, iterate_orbit, jacobian, stability_type,
                           standard)

coord = st.floats(-3, 3, allow_nan=False)
ALL_SPECS = [henon(cos_alpha=0.24), standard(math.pi / 4), MapSpec(Family.ROTATION, 0.7),
             MapSpec(Family.TWIST, 0.3)]


def test_henon_origin_is_fixed(henon_spec):
    np.testing.assert_array_equal(eval_map(henon_spec, (0.0, 0.0)), [0.0, 0.0])


def test_henon_formula(henon_spec):
    c, s = 0.24, math.sin(math.acos(0.24))
    x, y = 0.3, -0.2
    u = y - x * x
    np.testing.assert_allclose(eval_map(henon_spec, (x, y)), [x * c - u * s, x * s + u * c], rtol=0, atol=1e-15)


def test_standard_formula(standard_spec):
    x, y = 1.0, 0.5
    y1 = y + math.pi / 4 * math.sin(x)
    np.testing.assert_allclose(eval_map(standard_spec, (x, y)), [x + y1, y1], atol=1e-15)


def test_standard_fixed_point():
    np.testing.assert_allclose(eval_map(standard(1.0), (math.pi, 0.0)), [math.pi, 0.0], atol=1e-15)


def test_alpha_cos_shortcut():
    assert henon(cos_alpha=0.24).alpha == math.acos(0.24)


def test_nonfinite_alpha_rejected():
    with pytest.raises(ValueError):
        henon(float("nan"))


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.family.value)
def test_area_preserving_on_random_points(spec, rng):
    pts = rng.uniform(-2, 2, size=(1000, 2))
    for p in pts:
        assert abs(np.linalg.det(jacobian(spec, p)) - 1) < 1e-13


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.family.value)
@given(x=coord, y=coord)
def test_jacobian_matches_finite_differences(spec, x, y):
    h = 1e-6
    J = jacobian(spec, (x, y))
    fd = np.column_stack([(eval_map(spec, (x + h, y)) - eval_map(spec, (x - h, y))) / (2 * h),
                          (eval_map(spec, (x, y + h)) - eval_map(spec, (x, y - h))) / (2 * h)])
    np.testing.assert_allclose(J, fd, atol=1e-6 * (1 + np.abs(J).max()))


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.family.value)
def test_vectorized_matches_scalar(spec, rng):
    pts = rng.uniform(-1, 1, size=(50, 2))
    fx, fy = spec(pts[:, 0], pts[:, 1])
    for p, qx, qy in zip(pts, fx, fy):
        np.testing.assert_allclose(eval_map(spec, p), [qx, qy], rtol=0, atol=1e-15)


def test_stride_is_bitwise_downsampling(henon_spec):
    full = iterate_orbit(henon_spec, (0.1, 0.0), 500)
    coarse = iterate_orbit(henon_spec, (0.1, 0.0), 100, stride=5)
    np.testing.assert_array_equal(coarse.points, full.points[::5])


def test_extend_orbit_bitwise(henon_spec):
    one = iterate_orbit(henon_spec, (0.4, 0.0), 300)
    two = extend_orbit(iterate_orbit(henon_spec, (0.4, 0.0), 120), 180)
    np.testing.assert_array_equal(one.points, two.points)


def test_orbit_length(henon_spec):
    assert iterate_orbit(henon_spec, (0.1, 0.0), 10).points.shape == (11, 2)


def test_escaping_orbit_raises(henon_spec):
    with pytest.raises(MapOverflowError):
        iterate_orbit(henon_spec, (3.0, 3.0), 100)


def test_invalid_lengths(henon_spec):
    with pytest.raises(ValueError):
        iterate_orbit(henon_spec, (0.1, 0.0), 0)


def test_fixed_point_of_henon(henon_spec):
    orb = find_periodic_orbit(henon_spec, (0.01, 0.02), 1)
    np.testing.assert_allclose(orb.points[0], [0.0, 0.0], atol=1e-12)
    assert stability_type(orb).kind is StabilityKind.ELLIPTIC
    assert stability_type(orb).trace == pytest.approx(2 * 0.24)


def test_period_five_orbit(henon_spec):
    orb = find_periodic_orbit(henon_spec, (0.57, 0.0), 5)
    assert orb.points.shape == (5, 2)
    assert orb.residual < 1e-11
    # genuinely period 5, not a fixed point
    assert np.min(np.hypot(*orb.points.T)) > 0.1
    q = orb.points[0]
    for _ in range(5):
        q = eval_map(henon_spec, q)
    assert np.max(np.abs(q - orb.points[0])) < 1e-11
    assert stability_type(orb).kind is StabilityKind.ELLIPTIC


def test_standard_fixed_point_found(standard_spec):
    orb = find_periodic_orbit(standard_spec, (3.0, 0.1), 1)
    np.testing.assert_allclose(orb.points[0], [math.pi, 0.0], atol=1e-12)
    st_ = stability_type(orb)
    assert st_.kind is StabilityKind.ELLIPTIC
    assert st_.trace == pytest.approx(2 - math.pi / 4, abs=1e-14)


def test_henon_jacobian_at_origin(henon_spec):
    c, s = 0.24, math.sin(math.acos(0.24))
    np.testing.assert_allclose(jacobian(henon_spec, (0.0, 0.0)), [[c, -s], [s, c]], atol=1e-16)


def test_hyperbolic_standard_fixed_point():
    orb = find_periodic_orbit(standard(1.0), (0.01, 0.0), 1)
    np.testing.assert_allclose(orb.points[0], [0.0, 0.0], atol=1e-12)
    st_ = stability_type(orb)
    assert st_.kind is StabilityKind.HYPERBOLIC and st_.trace > 2


def test_elliptic_angle():
    orb = find_periodic_orbit(MapSpec(Family.ROTATION, 0.7), (0.0, 0.0), 1)
    st_ = stability_type(orb)
    assert st_.kind is StabilityKind.ELLIPTIC
    assert st_.angle == pytest.approx(0.7)


def test_periodic_orbit_failure_reported(henon_spec):
    with pytest.raises(PeriodicOrbitError):
        find_periodic_orbit(henon_spec, (50.0, 50.0), 3)


def test_periodic_orbit_tol_validated(henon_spec):
    with pytest.raises(ValueError):
        find_periodic_orbit(henon_spec, (0.0, 0.0), 1, tol=0)
