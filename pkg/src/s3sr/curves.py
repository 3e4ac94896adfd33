"""Discretized curves on the sphere and their residual diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .frames import omega_eval

__all__ = [
    "SampledCurve",
    "fd_velocities",
    "omega_fd_residuals",
    "unit_norm_error",
    "tangency_error",
]


@dataclass
class SampledCurve:
    """A sampled path on the sphere.

    s           : (n,) non-decreasing parameter grid
    points      : (n, 4) samples, each unit to curve tolerance
    velocities  : optional (n, 4) tangent vectors at the samples
    meta        : construction tag and parameters
    """

    s: np.ndarray
    points: np.ndarray
    velocities: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.s = np.atleast_1d(np.asarray(self.s, dtype=float))
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.velocities is not None:
            self.velocities = np.atleast_2d(np.asarray(self.velocities, dtype=float))
        if self.points.shape != (len(self.s), 4):
            raise ValueError("points must have shape (len(s), 4)")
        if self.velocities is not None and self.velocities.shape != self.points.shape:
            raise ValueError("velocities must match points in shape")
        if np.any(np.diff(self.s) < 0.0):
            raise ValueError("parameter grid must be non-decreasing")

    @property
    def n(self) -> int:
        return len(self.s)

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    def validate(self, unit_tol=1e-10, tangent_tol=1e-8):
        """Enforce the curve invariants; raises ValueError on violation."""
        dev = unit_norm_error(self)
        if dev > unit_tol:
            raise ValueError(f"curve points leave the sphere by {dev:.3e}")
        if self.velocities is not None:
            dev = tangency_error(self)
            if dev > tangent_tol:
                raise ValueError(f"curve velocities are not tangent by {dev:.3e}")
        return self


def fd_velocities(curve: SampledCurve) -> np.ndarray:
    """Finite-difference velocities at the grid scale.

    Central differences in the interior, one-sided at the two ends.
    Requires at least two samples and a strictly increasing grid.
    """
    s, p = curve.s, curve.points
    if curve.n < 2:
        raise ValueError("need at least 2 samples to difference")
    if np.any(np.diff(s) <= 0.0):
        raise ValueError("finite differences need a strictly increasing grid")
    v = np.empty_like(p)
    v[1:-1] = (p[2:] - p[:-2]) / (s[2:] - s[:-2])[:, None]
    v[0] = (p[1] - p[0]) / (s[1] - s[0])
    v[-1] = (p[-1] - p[-2]) / (s[-1] - s[-2])
    return v


def omega_fd_residuals(curve: SampledCurve) -> np.ndarray:
    """|omega| applied to the finite-difference velocities, per sample."""
    v = fd_velocities(curve)
    return np.abs(omega_eval(curve.points, v))


def unit_norm_error(curve: SampledCurve) -> float:
    """max | |point| - 1 | over the samples."""
    return float(np.max(np.abs(np.linalg.norm(curve.points, axis=1) - 1.0)))


def tangency_error(curve: SampledCurve) -> float:
    """max |<velocity, point>| over the samples (0 when no velocities)."""
    if curve.velocities is None:
        return 0.0
    return float(np.max(np.abs(np.sum(curve.velocities * curve.points, axis=1))))
