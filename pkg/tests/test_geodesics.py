import numpy as np
import pytest

from s3sr.curves import SampledCurve, omega_fd_residuals
from s3sr.frames import frame_at, omega_eval
from s3sr.geodesics import (
    GeodesicParams,
    ab_profile,
    acceleration_T_residual,
    angle_profile,
    geodesic_point,
    integrate_geodesic,
    verify_velocity_energy,
)
from s3sr.quaternions import QUAT_J, qexp_pure, qmul
from conftest import random_unit

ONE = np.array([1.0, 0.0, 0.0, 0.0])


def test_ab_profile_initial_values():
    p = GeodesicParams(2.0, 0.7, 1.3)
    a, b = ab_profile(p, 0.0)
    assert abs(a - 2.0 * np.cos(0.7)) <= 1e-15
    assert abs(b - 2.0 * np.sin(0.7)) <= 1e-15


def test_ab_profile_constant_when_lambda_zero():
    p = GeodesicParams(1.5, 0.4, 0.0)
    s = np.linspace(0, 10, 11)
    a, b = ab_profile(p, s)
    assert np.ptp(a) == 0.0 and np.ptp(b) == 0.0


def test_ab_profile_energy_identity(rng):
    p = GeodesicParams(1.7, 1.1, -0.8)
    s = rng.uniform(0, 10, 100)
    a, b = ab_profile(p, s)
    assert np.max(np.abs(a * a + b * b - p.r**2)) <= 1e-14


def test_ab_profile_rotation_law_complex_step():
    # a' = -2 lam b and b' = 2 lam a, differentiated by complex step
    p = GeodesicParams(1.3, 0.9, 0.6)
    eps = 1e-20
    for s in np.linspace(0.0, 5.0, 21):
        a_c, b_c = ab_profile(p, s + 1j * eps)
        da, db = a_c.imag / eps, b_c.imag / eps
        a, b = ab_profile(p, s)
        assert abs(da + 2.0 * p.lam * b) <= 1e-12
        assert abs(db - 2.0 * p.lam * a) <= 1e-12


def test_params_reject_negative_speed():
    with pytest.raises(ValueError):
        GeodesicParams(-1.0, 0.0, 0.0)


def test_integrator_argument_checks():
    with pytest.raises(ValueError):
        integrate_geodesic(ONE, GeodesicParams(1, 0, 0), 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate_geodesic(ONE, GeodesicParams(1, 0, 0), -1.0, 0.1)
    with pytest.raises(ValueError):
        integrate_geodesic([1, 1, 0, 0], GeodesicParams(1, 0, 0), 1.0, 0.1)
    with pytest.raises(ValueError):
        integrate_geodesic(ONE, GeodesicParams(1, 0, 0), 1.0, 0.1, order=3)


def test_zero_horizon_single_sample():
    c = integrate_geodesic(ONE, GeodesicParams(1, 0.2, 0.5), 0.0, 1e-3)
    assert c.n == 1
    assert np.array_equal(c.points[0], ONE)


def test_lambda_zero_is_one_parameter_subgroup():
    p = GeodesicParams(1.0, 0.0, 0.0)
    c = integrate_geodesic(ONE, p, np.pi, 1e-3)
    assert np.max(np.abs(c.end - [-1.0, 0.0, 0.0, 0.0])) <= 1e-10
    u = np.array([-1.0, 0.0, 0.0])  # -cos(theta0) i - sin(theta0) k
    closed = qexp_pure(np.outer(c.s, u))
    assert np.max(np.abs(c.points - closed)) <= 1e-10


def test_integrator_matches_closed_form_generic(rng):
    q0 = random_unit(rng)
    p = GeodesicParams(1.0, 1.1, 0.7)
    c = integrate_geodesic(q0, p, 3.0, 1e-3)
    assert np.max(np.abs(c.points - geodesic_point(q0, p, c.s))) <= 1e-9


def test_integrator_fourth_order_convergence():
    p = GeodesicParams(1.0, 0.4, 0.9)
    exact = geodesic_point(ONE, p, 2.0)

    def err(h, order):
        return np.max(np.abs(integrate_geodesic(ONE, p, 2.0, h, order=order).end - exact))

    assert err(0.02, 4) / err(0.01, 4) >= 8.0
    r2 = err(0.02, 2) / err(0.01, 2)
    assert 3.0 <= r2 <= 5.0  # the plain midpoint-exponential scheme is order 2


def test_unit_norm_preservation():
    # no renormalization anywhere; rounding bias keeps the drift near 1e-12
    # per 1e5 steps (the sqrt(N)*eps random-walk ideal is not attainable)
    p = GeodesicParams(1.0, 1.1, 0.7)
    c = integrate_geodesic(ONE, p, 100.0, 1e-3, order=2)
    assert c.n == 100001
    drift = np.max(np.abs(np.linalg.norm(c.points, axis=1) - 1.0))
    assert drift <= 1.5e-12


def test_velocities_are_horizontal_and_unit_speed():
    p = GeodesicParams(1.0, 0.3, 0.8)
    c = integrate_geodesic(ONE, p, 5.0, 1e-3)
    speed2 = np.sum(c.velocities * c.velocities, axis=1)
    assert np.max(np.abs(speed2 - 1.0)) <= 1e-10
    assert np.max(np.abs(omega_eval(c.points, c.velocities))) <= 1e-8


def test_angle_profile_linear_law():
    p = GeodesicParams(1.0, 1.1, 0.5)
    c = integrate_geodesic(ONE, p, 4.0, 1e-3)
    ang = angle_profile(c)
    expected = 2.0 * p.lam * c.s + p.theta0
    assert np.max(np.abs(ang - expected)) <= 1e-8
    slope = np.polyfit(c.s, ang, 1)[0]
    assert abs(slope - 1.0) <= 1e-6
    # velocity is orthogonal to T everywhere
    t_dots = [np.dot(v, frame_at(q).T) for q, v in zip(c.points[::100], c.velocities[::100])]
    assert np.max(np.abs(t_dots)) <= 1e-10


def test_angle_profile_constant_for_lambda_zero():
    c = integrate_geodesic(ONE, GeodesicParams(1.0, 0.9, 0.0), 3.0, 1e-3)
    ang = angle_profile(c)
    assert np.ptp(ang) <= 1e-9
    # cos(angle to X) equals a(s)/r
    a, _ = ab_profile(GeodesicParams(1.0, 0.9, 0.0), c.s)
    assert np.max(np.abs(np.cos(ang) - a)) <= 1e-8


def test_angle_profile_rejects_zero_velocity():
    c = integrate_geodesic(ONE, GeodesicParams(0.0, 0.0, 0.0), 1.0, 1e-2)
    with pytest.raises(ValueError):
        angle_profile(c)


def test_verify_velocity_energy_geodesic():
    c = integrate_geodesic(ONE, GeodesicParams(1.0, 0.7, 0.6), 3.0, 1e-3)
    assert verify_velocity_energy(c) <= 1e-10


def test_verify_velocity_energy_constant_curve():
    pts = np.tile(ONE, (5, 1))
    c = SampledCurve(np.linspace(0, 1, 5), pts, np.zeros((5, 4)))
    assert verify_velocity_energy(c) == 0.0


def test_verify_velocity_energy_requires_velocities():
    c = integrate_geodesic(ONE, GeodesicParams(1.0, 0.7, 0.6), 1.0, 1e-2)
    c.velocities = None
    with pytest.raises(ValueError):
        verify_velocity_energy(c)


def test_frame_matrix_at_identity_is_signed_permutation():
    f = frame_at(ONE)
    m = np.stack(f)
    assert np.array_equal(np.abs(m), np.abs(np.array(
        [[0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [1, 0, 0, 0]], dtype=float)))
    assert np.array_equal(m @ m.T, np.eye(4))
    # with rows stacked as (X, Y, T, N) the determinant is -1 on all of
    # the sphere (constant by continuity); orthogonality is the point
    assert abs(np.linalg.det(m) + 1.0) <= 1e-15


def test_acceleration_T_residual_geodesic():
    c = integrate_geodesic(ONE, GeodesicParams(1.0, 0.5, 0.7), 2.0, 1e-3)
    assert acceleration_T_residual(c) <= 1e-5


def test_acceleration_T_residual_great_circle():
    c = integrate_geodesic(ONE, GeodesicParams(1.0, 0.5, 0.0), 2.0, 1e-3)
    assert acceleration_T_residual(c) <= 1e-5


def test_acceleration_T_residual_sensitivity():
    # a T-rotation with growing rate has <acc, T> = 1 exactly: the
    # steady T-spin itself has zero T-acceleration (its c-component is
    # constant), so the accelerating version is the sensitivity witness
    s = np.linspace(0.0, 1.0, 2001)
    steady = qmul(ONE, qexp_pure(np.outer(-s, [0.0, 1.0, 0.0])))
    accel = qmul(ONE, qexp_pure(np.outer(-0.5 * s * s, [0.0, 1.0, 0.0])))
    assert acceleration_T_residual(SampledCurve(s, steady)) <= 1e-8
    res = acceleration_T_residual(SampledCurve(s, accel))
    assert res > 0.1
    assert abs(res - 1.0) <= 1e-4


def test_acceleration_T_residual_argument_checks():
    c = integrate_geodesic(ONE, GeodesicParams(1, 0, 0), 0.0, 1e-3)
    with pytest.raises(ValueError):
        acceleration_T_residual(c)
    bad = SampledCurve(np.array([0.0, 0.1, 0.5]), np.tile(ONE, (3, 1)))
    with pytest.raises(ValueError):
        acceleration_T_residual(bad)


def test_fd_omega_residual_small_on_geodesics():
    c = integrate_geodesic(ONE, GeodesicParams(1.0, 0.4, 0.7), 2.0, 1e-3)
    # (h^2/6)*2*lam*r^2 scale
    assert np.max(omega_fd_residuals(c)) <= 1e-6
