"""Left-invariant orthonormal frame on the unit 3-sphere.

At a point q the frame is

    X = -q*i,   Y = -q*k,   T = -q*j,   N = q

(right quaternion multiplication), or in coordinates (x1, x2, y1, y2):

    X = (x2, -x1, -y2,  y1)
    Y = (y2, -y1,  x2, -x1)
    T = (y1,  y2, -x1, -x2)

The horizontal distribution is span{X, Y}; T is the missing direction
produced by the bracket [X, Y] = 2T, and the one-form

    omega = x1 dy1 - y1 dx1 + x2 dy2 - y2 dx2

vanishes exactly on horizontal vectors (omega(T) = -1).

I1, I2, I3 are the 4x4 matrices of right multiplication by i, j, k
acting on row vectors: q @ I1 == qmul(q, i) and so on.  Each is
skew-orthogonal with Im @ Im = -U.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .quaternions import UNIT_TOL, check_unit

__all__ = [
    "I1",
    "I2",
    "I3",
    "U",
    "Frame",
    "FrameComponents",
    "LinearField",
    "X_FIELD",
    "Y_FIELD",
    "T_FIELD",
    "frame_at",
    "components",
    "omega_eval",
    "is_horizontal",
    "bracket",
    "TANGENT_TOL",
]

# q @ I1 = q*i, q @ I2 = q*j, q @ I3 = q*k  (row-vector convention)
I1 = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)
I2 = np.array(
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]
)
I3 = np.array(
    [
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)
U = np.eye(4)

TANGENT_TOL = 1e-10


class Frame(NamedTuple):
    X: np.ndarray
    Y: np.ndarray
    T: np.ndarray
    N: np.ndarray


class FrameComponents(NamedTuple):
    a: float
    b: float
    c: float


def frame_at(q, tol=UNIT_TOL):
    """Orthonormal frame (X, Y, T, N) at a unit point q.

    Pass tol=None to skip the unit check (used by diagnostics that
    probe behaviour off the sphere).
    """
    q = np.asarray(q, dtype=float)
    if tol is not None:
        check_unit(q, tol, "frame base point")
    return Frame(X=-(q @ I1), Y=-(q @ I3), T=-(q @ I2), N=q.copy())


def components(q, v, tol=TANGENT_TOL):
    """Frame components (a, b, c) = (<v,X>, <v,Y>, <v,T>) of a tangent vector.

    Raises ValueError when v is not tangent at q (|<v, q>| beyond tol,
    scaled by |v| for large vectors).
    """
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    radial = abs(float(np.dot(v, q)))
    scale = max(1.0, float(np.linalg.norm(v)))
    if radial > tol * scale:
        raise ValueError(f"vector is not tangent: |<v, q>| = {radial:.3e}")
    f = frame_at(q, tol=None)
    return FrameComponents(float(np.dot(v, f.X)), float(np.dot(v, f.Y)), float(np.dot(v, f.T)))


def omega_eval(q, v):
    """The one-form omega = x1 dy1 - y1 dx1 + x2 dy2 - y2 dx2 applied to v."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    x1, x2, y1, y2 = np.moveaxis(q, -1, 0)
    vx1, vx2, vy1, vy2 = np.moveaxis(v, -1, 0)
    return x1 * vy1 - y1 * vx1 + x2 * vy2 - y2 * vx2


def is_horizontal(q, v, tol):
    """Horizontality test <v_x, y> == <x, v_y> within tol.

    The residual equals the T-component of v (and minus omega(v)).
    """
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    residual = (v[0] * q[2] + v[1] * q[3]) - (q[0] * v[2] + q[1] * v[3])
    return bool(abs(residual) <= tol)


@dataclass(frozen=True)
class LinearField:
    """Vector field of the form q -> q @ matrix (linear in q)."""

    matrix: np.ndarray

    def __call__(self, q):
        return np.asarray(q, dtype=float) @ self.matrix


X_FIELD = LinearField(-I1)
Y_FIELD = LinearField(-I3)
T_FIELD = LinearField(-I2)

_FIELDS = {"X": X_FIELD, "Y": Y_FIELD, "T": T_FIELD}


def _as_field(f) -> LinearField:
    if isinstance(f, LinearField):
        return f
    try:
        return _FIELDS[f]
    except (KeyError, TypeError):
        raise ValueError(f"unsupported field {f!r}; expected 'X', 'Y', 'T' or a LinearField") from None


def bracket(field_u, field_v) -> LinearField:
    """Commutator [U, V] of two linear fields, computed exactly.

    For fields q -> q@A and q -> q@B the bracket is q -> q@(AB - BA).
    """
    a = _as_field(field_u).matrix
    b = _as_field(field_v).matrix
    return LinearField(a @ b - b @ a)
