"""Coordinates of the two-center plane.

The centers sit at ``(+1, 0)`` (strength 1, distance ``r1``) and ``(-1, 0)``
(strength ``delta``, distance ``r2``).  Elliptic coordinates are
``u = (r1 + r2)/2 >= 1`` and ``v = (r2 - r1)/2 in [-1, 1]``; the map is
two-to-one, so the sign of ``x2`` is carried as ``branch``.

All functions broadcast over numpy arrays stored in the point fields.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegeneracyError

__all__ = [
    "CartesianPoint",
    "EllipticPoint",
    "MetricData",
    "Christoffel",
    "distances",
    "to_elliptic",
    "to_cartesian",
    "metric",
    "christoffel",
    "s_matrix",
    "elliptic_derivatives",
]


@dataclass(frozen=True)
class CartesianPoint:
    x1: np.ndarray | float
    x2: np.ndarray | float


@dataclass(frozen=True)
class EllipticPoint:
    u: np.ndarray | float
    v: np.ndarray | float
    branch: np.ndarray | int = 1


class MetricData(NamedTuple):
    g_uu: np.ndarray
    g_vv: np.ndarray
    e_u1: np.ndarray
    e_v2: np.ndarray
    jacobian_weight: np.ndarray


class Christoffel(NamedTuple):
    """The six independent symbols; ``u_uv`` is Gamma^u_{uv}, etc."""

    u_uu: np.ndarray
    v_vv: np.ndarray
    u_uv: np.ndarray
    v_uu: np.ndarray
    u_vv: np.ndarray
    v_uv: np.ndarray


def distances(p: CartesianPoint):
    """Distances ``(r1, r2)`` to the centers at ``(1, 0)`` and ``(-1, 0)``."""
    x1 = np.asarray(p.x1, dtype=float)
    x2 = np.asarray(p.x2, dtype=float)
    return np.hypot(x1 - 1.0, x2), np.hypot(x1 + 1.0, x2)


def to_elliptic(p: CartesianPoint) -> EllipticPoint:
    r1, r2 = distances(p)
    u = np.maximum(0.5 * (r1 + r2), 1.0)
    v = np.clip(0.5 * (r2 - r1), -1.0, 1.0)
    branch = np.where(np.asarray(p.x2) < 0, -1, 1)
    if np.ndim(u) == 0:
        return EllipticPoint(float(u), float(v), int(branch))
    return EllipticPoint(u, v, branch)


def to_cartesian(e: EllipticPoint) -> CartesianPoint:
    u = np.asarray(e.u, dtype=float)
    v = np.asarray(e.v, dtype=float)
    x1 = u * v
    x2 = np.asarray(e.branch) * np.sqrt(np.maximum((u * u - 1.0) * (1.0 - v * v), 0.0))
    if np.ndim(x1) == 0:
        return CartesianPoint(float(x1), float(x2))
    return CartesianPoint(x1, x2)


def _interior(e: EllipticPoint):
    u = np.asarray(e.u, dtype=float)
    v = np.asarray(e.v, dtype=float)
    if np.any(u <= 1.0) or np.any(np.abs(v) >= 1.0):
        raise DegeneracyError("metric data is degenerate on u = 1 or |v| = 1")
    return u, v


def metric(e: EllipticPoint) -> MetricData:
    """Metric ``diag(g_uu, g_vv)``, zweibein and area weight at interior points."""
    u, v = _interior(e)
    s = u * u - v * v
    a = u * u - 1.0
    b = 1.0 - v * v
    return MetricData(
        g_uu=s / a,
        g_vv=s / b,
        e_u1=np.sqrt(a / s),
        e_v2=np.sqrt(b / s),
        jacobian_weight=s / np.sqrt(a * b),
    )


def christoffel(e: EllipticPoint) -> Christoffel:
    u, v = _interior(e)
    s = u * u - v * v
    a = u * u - 1.0
    b = 1.0 - v * v
    return Christoffel(
        u_uu=-u * b / (s * a),
        v_vv=v * a / (s * b),
        u_uv=-v / s,
        v_uu=v * b / (s * a),
        u_vv=-u * a / (s * b),
        v_uv=u / s,
    )


def s_matrix(e: EllipticPoint) -> np.ndarray:
    """The symmetric involution relating elliptic and Cartesian spinor frames.

    Returns an array of shape ``(..., 4, 4)``.  Its middle block maps the
    orthonormal elliptic frame of the ``x2 > 0`` sheet onto the Cartesian
    one; it does not depend on ``branch``.
    """
    u, v = _interior(e)
    md = metric(e)
    S = np.zeros(np.shape(u) + (4, 4))
    S[..., 0, 0] = 1.0
    S[..., 1, 1] = -v * md.e_u1
    S[..., 1, 2] = -u * md.e_v2
    S[..., 2, 1] = -u * md.e_v2
    S[..., 2, 2] = v * md.e_u1
    S[..., 3, 3] = -1.0
    return S


def elliptic_derivatives(x1, x2):
    """Cartesian first and second derivatives of ``u`` and ``v``.

    Returns
    -------
    grad_u, grad_v : ndarray, shape (2, ...)
    hess_u, hess_v : ndarray, shape (2, 2, ...)
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    d1 = np.stack([x1 - 1.0, x2])
    d2 = np.stack([x1 + 1.0, x2])
    r1 = np.hypot(d1[0], d1[1])
    r2 = np.hypot(d2[0], d2[1])
    n1 = d1 / r1
    n2 = d2 / r2
    eye = np.eye(2).reshape((2, 2) + (1,) * x1.ndim)
    h1 = (eye - n1[:, None] * n1[None, :]) / r1
    h2 = (eye - n2[:, None] * n2[None, :]) / r2
    return 0.5 * (n1 + n2), 0.5 * (n2 - n1), 0.5 * (h1 + h2), 0.5 * (h2 - h1)
