"""Angle chart on the unit 3-sphere.

A point is written with three angles (phi, psi, theta) through the
half-angle combinations alpha = (phi+psi)/2, beta = (phi-psi)/2:

    x1 = cos(alpha) cos(theta/2)      y1 = cos(beta) sin(theta/2)
    x2 = sin(alpha) cos(theta/2)      y2 = sin(beta) sin(theta/2)

with theta in [0, pi].  Restricted to the sphere the one-form omega
becomes (sin(theta) sin(psi) dphi + cos(psi) dtheta) / 2, so a curve in
chart coordinates is horizontal exactly when

    sin(theta) sin(psi) phi' + cos(psi) theta' = 0.

phi and psi are stored unnormalized (curves may wind); the chart is
singular on the circles theta = 0 and theta = pi, where one of alpha,
beta is undefined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quaternions import UNIT_TOL, check_unit

__all__ = [
    "EulerAngles",
    "to_cartesian",
    "from_cartesian",
    "chart_velocity",
    "omega_euler",
    "horizontality_residual_euler",
    "euler_ab",
    "wrap_angle",
]

# hypot(y1, y2) (or hypot(x1, x2)) below this flags a pole point
_POLE_EPS = 1e-9


@dataclass(frozen=True)
class EulerAngles:
    """Chart coordinates (phi, psi, theta), radians.

    ``pole`` is set by :func:`from_cartesian` when the input sits on a
    chart singularity and one angle had to be fixed arbitrarily.
    """

    phi: float
    psi: float
    theta: float
    pole: str | None = None

    @property
    def alpha(self) -> float:
        return 0.5 * (self.phi + self.psi)

    @property
    def beta(self) -> float:
        return 0.5 * (self.phi - self.psi)


def wrap_angle(x):
    """Wrap into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x), 2.0 * np.pi)


def _point_arrays(phi, psi, theta):
    """Vectorized chart map; returns an (..., 4) array."""
    alpha = 0.5 * (np.asarray(phi) + np.asarray(psi))
    beta = 0.5 * (np.asarray(phi) - np.asarray(psi))
    c = np.cos(0.5 * np.asarray(theta))
    s = np.sin(0.5 * np.asarray(theta))
    return np.stack(
        [np.cos(alpha) * c, np.sin(alpha) * c, np.cos(beta) * s, np.sin(beta) * s],
        axis=-1,
    )


def to_cartesian(e: EulerAngles) -> np.ndarray:
    """Cartesian point of the chart triple.  theta must lie in [0, pi]."""
    if not 0.0 <= e.theta <= np.pi:
        raise ValueError(f"theta must lie in [0, pi], got {e.theta}")
    return _point_arrays(e.phi, e.psi, e.theta)


def from_cartesian(q, tol=UNIT_TOL) -> EulerAngles:
    """Invert the chart at a unit point.

    theta = 2*atan2(hypot(y1,y2), hypot(x1,x2)) is always well defined;
    at theta in {0, pi} one of the half-angle sums is undefined and is
    set to 0, with ``pole`` marking which circle was hit.
    """
    q = check_unit(np.asarray(q, dtype=float), tol, "chart point")
    x1, x2, y1, y2 = q
    rx = float(np.hypot(x1, x2))
    ry = float(np.hypot(y1, y2))
    theta = 2.0 * float(np.arctan2(ry, rx))
    pole = None
    if ry < _POLE_EPS:
        alpha = float(np.arctan2(x2, x1))
        beta = 0.0
        pole = "theta=0"
    elif rx < _POLE_EPS:
        alpha = 0.0
        beta = float(np.arctan2(y2, y1))
        pole = "theta=pi"
    else:
        alpha = float(np.arctan2(x2, x1))
        beta = float(np.arctan2(y2, y1))
    return EulerAngles(phi=alpha + beta, psi=alpha - beta, theta=theta, pole=pole)


def _velocity_arrays(phi, psi, theta, dphi, dpsi, dtheta):
    """Vectorized pushforward of chart rates; returns (..., 4)."""
    alpha = 0.5 * (np.asarray(phi) + np.asarray(psi))
    beta = 0.5 * (np.asarray(phi) - np.asarray(psi))
    c = np.cos(0.5 * np.asarray(theta))
    s = np.sin(0.5 * np.asarray(theta))
    da = 0.5 * (np.asarray(dphi) + np.asarray(dpsi))
    db = 0.5 * (np.asarray(dphi) - np.asarray(dpsi))
    dt = 0.5 * np.asarray(dtheta)
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    return np.stack(
        [
            -sa * c * da - ca * s * dt,
            ca * c * da - sa * s * dt,
            -sb * s * db + cb * c * dt,
            cb * s * db + sb * c * dt,
        ],
        axis=-1,
    )


def chart_velocity(e: EulerAngles, rates) -> np.ndarray:
    """Cartesian velocity of a chart curve with rates (phi', psi', theta')."""
    dphi, dpsi, dtheta = rates
    return _velocity_arrays(e.phi, e.psi, e.theta, dphi, dpsi, dtheta)


def omega_euler(e: EulerAngles, rates) -> float:
    """The restricted one-form on chart rates: (sin th sin psi phi' + cos psi th')/2."""
    dphi, _, dtheta = rates
    return 0.5 * (np.sin(e.theta) * np.sin(e.psi) * dphi + np.cos(e.psi) * dtheta)


def horizontality_residual_euler(e: EulerAngles, rates) -> float:
    """|sin(theta) sin(psi) phi' + cos(psi) theta'|; zero iff horizontal."""
    dphi, _, dtheta = rates
    return float(abs(np.sin(e.theta) * np.sin(e.psi) * dphi + np.cos(e.psi) * dtheta))


def euler_ab(e: EulerAngles, rates):
    """Horizontal frame components (a, b) of the pushforward of chart rates.

    a = -(cos(theta) phi' + psi')/2,
    b = -(sin(theta) cos(psi) phi' - sin(psi) theta')/2.
    """
    dphi, dpsi, dtheta = rates
    a = -0.5 * (np.cos(e.theta) * dphi + dpsi)
    b = -0.5 * (np.sin(e.theta) * np.cos(e.psi) * dphi - np.sin(e.psi) * dtheta)
    return float(a), float(b)
