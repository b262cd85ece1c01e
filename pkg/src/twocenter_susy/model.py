"""Superpotentials, sector potentials, supercharges and Hamiltonians.

Spinors are numpy arrays whose leading axis has length 4, ordered by Fermi
number: ``(F=0, F=1 first, F=1 second, F=2)``.  Spinor *fields* are callables
``field(x1, x2) -> array of shape (4, ...)``.

Two families of superpotential are provided:

* Type I solves the Poisson equation ``(hbar/2) lap W = -1/r1 - delta/r2``;
  the general separable solution has three parameters ``kappa, c1, c2``.
* Type II solves the zero-energy Hamilton-Jacobi equation
  ``|grad W|^2 / 2 = 1/r1 + delta/r2`` and is labelled by two sign bits
  ``a, b`` (IIa: ``a == b``, IIb: ``a != b``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import geometry
from .errors import DomainError, SingularityError

__all__ = [
    "EXCLUSION_RADIUS",
    "DEFAULT_FD_STEP",
    "ModelParams",
    "TypeISuperpotential",
    "TypeIISuperpotential",
    "superpotential",
    "nondimensionalize",
    "superpotential_I",
    "superpotential_II",
    "hj_u_part",
    "hj_v_part",
    "hj_parts_closed_form",
    "potential",
    "matrix_potential",
    "apply_supercharge",
    "apply_elliptic_supercharge",
    "apply_hamiltonian",
    "apply_anticommutator",
]

EXCLUSION_RADIUS = 0.05
DEFAULT_FD_STEP = 1e-3

_WTYPES = ("I", "IIa", "IIb")


@dataclass(frozen=True)
class ModelParams:
    """Non-dimensional model parameters.

    Parameters
    ----------
    hbar : float
        ``hbar / sqrt(m d alpha)``, must be positive.
    delta : float
        Strength ratio of the left center, ``0 < delta <= 1``.
    wtype : {"I", "IIa", "IIb"}
    kappa : float
        Separation constant.  For Type II it must satisfy
        ``2(1 - delta) <= kappa <= 2(1 + delta)``.
    c1, c2 : float
        Integration constants of the Type I family.
    a, b : {0, 1}
        Type II sign bits.  ``b`` defaults to ``a`` for IIa and ``1 - a``
        for IIb.
    """

    hbar: float = 1.0
    delta: float = 0.5
    wtype: str = "I"
    kappa: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    a: int = 1
    b: int | None = None

    def __post_init__(self):
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise DomainError(f"hbar must be positive, got {self.hbar}")
        if not (0 < self.delta <= 1):
            raise DomainError(f"delta must lie in (0, 1], got {self.delta}")
        if self.wtype not in _WTYPES:
            raise DomainError(f"wtype must be one of {_WTYPES}, got {self.wtype!r}")
        if self.a not in (0, 1):
            raise DomainError("sign bit a must be 0 or 1")
        if self.b is None:
            object.__setattr__(self, "b", 1 - self.a if self.wtype == "IIb" else self.a)
        if self.b not in (0, 1):
            raise DomainError("sign bit b must be 0 or 1")
        if self.wtype != "I":
            if (self.wtype == "IIa") != (self.a == self.b):
                raise DomainError(f"{self.wtype} is inconsistent with a={self.a}, b={self.b}")
            lo, hi = 2 * (1 - self.delta), 2 * (1 + self.delta)
            if not (lo <= self.kappa <= hi):
                raise DomainError(
                    f"kappa={self.kappa} outside the real window [{lo}, {hi}] for Type II")

    @property
    def is_simple(self) -> bool:
        """Type I with ``kappa = c1 = c2 = 0``."""
        return self.wtype == "I" and self.kappa == 0 and self.c1 == 0 and self.c2 == 0


def nondimensionalize(hbar_si, m, d, alpha):
    """``hbar / sqrt(m d alpha)`` from SI inputs (all positive)."""
    for name, val in (("hbar_si", hbar_si), ("m", m), ("d", d), ("alpha", alpha)):
        if not val > 0:
            raise DomainError(f"{name} must be positive, got {val}")
    return hbar_si / math.sqrt(m * d * alpha)


# ---------------------------------------------------------------------------
# Superpotentials
# ---------------------------------------------------------------------------

class _Superpotential:
    """``W(u, v) = F(u) + G(v)`` with Cartesian derivatives by chain rule."""

    def __init__(self, params: ModelParams):
        self.params = params

    def F(self, u):
        raise NotImplementedError

    def G(self, v):
        raise NotImplementedError

    def F_of_mu(self, mu):
        """``F(cosh mu)``."""
        return self.F(np.cosh(mu))

    def G_of_theta(self, theta):
        """``G(cos theta)``."""
        return self.G(np.cos(theta))

    def value_uv(self, u, v):
        return self.F(u) + self.G(v)

    def value(self, x1, x2):
        e = geometry.to_elliptic(geometry.CartesianPoint(x1, x2))
        return self.value_uv(e.u, e.v)

    def grad(self, x1, x2):
        """Cartesian gradient, shape ``(2, ...)``."""
        e = geometry.to_elliptic(geometry.CartesianPoint(x1, x2))
        gu, gv, _, _ = geometry.elliptic_derivatives(x1, x2)
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.dF(e.u) * gu + self.dG(e.v) * gv

    def hess(self, x1, x2):
        """Cartesian Hessian, shape ``(2, 2, ...)``."""
        e = geometry.to_elliptic(geometry.CartesianPoint(x1, x2))
        gu, gv, hu, hv = geometry.elliptic_derivatives(x1, x2)
        with np.errstate(invalid="ignore", divide="ignore"):
            return (self.d2F(e.u) * gu[:, None] * gu[None, :] + self.dF(e.u) * hu
                    + self.d2G(e.v) * gv[:, None] * gv[None, :] + self.dG(e.v) * hv)

    def laplacian(self, x1, x2):
        h = self.hess(x1, x2)
        return h[0, 0] + h[1, 1]


class TypeISuperpotential(_Superpotential):
    """Poisson superpotential, including the ``(kappa, c1, c2)`` family."""

    def F(self, u):
        p = self.params
        u = np.asarray(u, dtype=float)
        out = -2 * (1 + p.delta) * u
        if p.c1 or p.kappa:
            L = np.arccosh(u)
            out = out + p.c1 * L + 0.5 * p.kappa * L * L
        return out / p.hbar

    def dF(self, u):
        p = self.params
        u = np.asarray(u, dtype=float)
        out = np.full(u.shape, -2 * (1 + p.delta))
        if p.c1 or p.kappa:
            out = out + (p.c1 + p.kappa * np.arccosh(u)) / np.sqrt(u * u - 1)
        return out / p.hbar

    def d2F(self, u):
        p = self.params
        u = np.asarray(u, dtype=float)
        if not (p.c1 or p.kappa):
            return np.zeros(u.shape)
        a = u * u - 1
        return (p.kappa / a - (p.c1 + p.kappa * np.arccosh(u)) * u / a ** 1.5) / p.hbar

    def G(self, v):
        p = self.params
        v = np.asarray(v, dtype=float)
        out = 2 * (1 - p.delta) * v
        if p.c2 or p.kappa:
            A = np.arcsin(v)
            out = out + p.c2 * A - 0.5 * p.kappa * A * A
        return out / p.hbar

    def dG(self, v):
        p = self.params
        v = np.asarray(v, dtype=float)
        out = np.full(v.shape, 2 * (1 - p.delta))
        if p.c2 or p.kappa:
            out = out + (p.c2 - p.kappa * np.arcsin(v)) / np.sqrt(1 - v * v)
        return out / p.hbar

    def d2G(self, v):
        p = self.params
        v = np.asarray(v, dtype=float)
        if not (p.c2 or p.kappa):
            return np.zeros(v.shape)
        b = 1 - v * v
        return (-p.kappa / b + (p.c2 - p.kappa * np.arcsin(v)) * v / b ** 1.5) / p.hbar

    def value(self, x1, x2):
        if self.params.is_simple:
            r1, r2 = geometry.distances(geometry.CartesianPoint(x1, x2))
            return -2 * (r1 + self.params.delta * r2) / self.params.hbar
        return super().value(x1, x2)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _cumulative_integral(g, t, width=0.25):
    """``int_0^t g(s) ds`` for every entry of ``t >= 0`` (smooth ``g``)."""
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    tmax = float(flat.max()) if flat.size else 0.0
    breaks = np.unique(np.concatenate([[0.0], flat, np.arange(0.0, tmax, width)]))
    lo, hi = breaks[:-1], breaks[1:]
    c = 0.5 * (lo + hi)
    r = 0.5 * (hi - lo)
    nodes = c[:, None] + r[:, None] * _GL_X[None, :]
    panels = r * (g(nodes) @ _GL_W)
    cum = np.concatenate([[0.0], np.cumsum(panels)])
    return cum[np.searchsorted(breaks, flat)].reshape(t.shape)


class TypeIISuperpotential(_Superpotential):
    """Hamilton-Jacobi superpotential ``W = F_a(u) + G_b(v)``.

    Both parts are evaluated by Gauss-Legendre quadrature after the
    substitutions ``u = cosh(mu)`` and ``v = cos(theta)``, which turn the
    inverse-square-root endpoint singularities into smooth integrands.
    """

    @cached_property
    def _sa(self):
        return -1.0 if self.params.a else 1.0

    @cached_property
    def _sb(self):
        return -1.0 if self.params.b else 1.0

    def _pu(self, u):
        p = self.params
        return np.maximum(2 * (1 + p.delta) * u - p.kappa, 0.0)

    def _pv(self, v):
        p = self.params
        return np.maximum(2 * (1 - p.delta) * v + p.kappa, 0.0)

    def F_of_mu(self, mu):
        mu = np.asarray(mu, dtype=float)
        if np.any(mu < 0):
            raise DomainError("mu must be >= 0")
        p = self.params
        g = lambda m: np.sqrt(np.maximum(2 * (1 + p.delta) * np.cosh(m) - p.kappa, 0.0))
        return self._sa * _cumulative_integral(g, mu)

    def G_of_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < 0) or np.any(theta > math.pi):
            raise DomainError("theta must lie in [0, pi]")
        p = self.params
        g = lambda s: np.sqrt(np.maximum(2 * (1 - p.delta) * np.cos(s) + p.kappa, 0.0))
        # accumulate from theta = pi, where G vanishes
        h = lambda s: g(math.pi - s)
        return self._sb * _cumulative_integral(h, math.pi - theta)

    def F(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 1):
            raise DomainError("u must be >= 1")
        return self.F_of_mu(np.arccosh(u))

    def G(self, v):
        v = np.asarray(v, dtype=float)
        if np.any(np.abs(v) > 1):
            raise DomainError("|v| must be <= 1")
        return self.G_of_theta(np.arccos(v))

    def dF(self, u):
        u = np.asarray(u, dtype=float)
        return self._sa * np.sqrt(self._pu(u) / (u * u - 1))

    def d2F(self, u):
        u = np.asarray(u, dtype=float)
        p = self.params
        a = u * u - 1
        pu = self._pu(u)
        return self._sa * ((1 + p.delta) / np.sqrt(pu * a) - np.sqrt(pu) * u / a ** 1.5)

    def dG(self, v):
        v = np.asarray(v, dtype=float)
        return self._sb * np.sqrt(self._pv(v) / (1 - v * v))

    def d2G(self, v):
        v = np.asarray(v, dtype=float)
        p = self.params
        b = 1 - v * v
        pv = self._pv(v)
        return self._sb * ((1 - p.delta) / np.sqrt(pv * b) + np.sqrt(pv) * v / b ** 1.5)


def superpotential(params: ModelParams) -> _Superpotential:
    if params.wtype == "I":
        return TypeISuperpotential(params)
    return TypeIISuperpotential(params)


def superpotential_I(e: geometry.EllipticPoint, params: ModelParams):
    """Type I superpotential at an elliptic point."""
    if params.wtype != "I":
        raise DomainError("superpotential_I needs wtype='I'")
    return TypeISuperpotential(params).value_uv(e.u, e.v)


def superpotential_II(e: geometry.EllipticPoint, params: ModelParams):
    """Type II superpotential ``F_a(u) + G_b(v)`` at an elliptic point."""
    if params.wtype == "I":
        raise DomainError("superpotential_II needs wtype 'IIa' or 'IIb'")
    return TypeIISuperpotential(params).value_uv(e.u, e.v)


def hj_u_part(u, params: ModelParams):
    """``F_a(u; kappa) = (-1)^a int_1^u sqrt(2(1+delta)t - kappa)/sqrt(t^2-1) dt``."""
    return TypeIISuperpotential(params).F(u)


def hj_v_part(v, params: ModelParams):
    """``G_b(v; kappa) = (-1)^b int_{-1}^v sqrt(2(1-delta)t + kappa)/sqrt(1-t^2) dt``."""
    return TypeIISuperpotential(params).G(v)


def hj_parts_closed_form(u, v, params: ModelParams, dps=30):
    """``(F_a(u), G_b(v))`` from the complex-argument elliptic closed forms.

    Optional cross-check of the quadrature path; needs ``mpmath`` and a
    separation constant strictly inside the admissible window.  Elliptic
    second arguments are parameters ``m = k**2``.  Returns the complex values
    so callers can confirm the imaginary parts vanish.
    """
    import mpmath as mp

    p = params
    lo, hi = 2 * (1 - p.delta), 2 * (1 + p.delta)
    if not lo < p.kappa < hi:
        raise DomainError("closed forms need kappa strictly inside the window")
    with mp.workdps(dps):
        k = mp.mpf(p.kappa)
        pu = 2 * (1 + mp.mpf(p.delta))
        pv = 2 * (1 - mp.mpf(p.delta))
        mu = (k - pu) / (k + pu)
        phi_u = mp.asin(mp.sqrt((k - pu * u) / (k - pu)))
        F = 2j * mp.sqrt(k + pu) * (mp.ellipe(phi_u, mu) - mp.ellipe(mp.pi / 2, mu)
                                    - mp.ellipf(phi_u, mu) + mp.ellipf(mp.pi / 2, mu))
        mv = (k + pv) / (k - pv)
        phi_v = mp.asin(mp.sqrt((k + pv * v) / (k + pv)))
        phi_0 = mp.asin(mp.sqrt((k - pv) / (k + pv)))
        G = 2j * mp.sqrt(k - pv) * (-mp.ellipe(phi_v, mv) + mp.ellipe(phi_0, mv)
                                    + mp.ellipf(phi_v, mv) - mp.ellipf(phi_0, mv))
        sa = -1 if p.a else 1
        sb = -1 if p.b else 1
        return complex(sa * F), complex(sb * G)


# ---------------------------------------------------------------------------
# Potentials
# ---------------------------------------------------------------------------

def _check_centers(x1, x2, radius=0.0):
    r1, r2 = geometry.distances(geometry.CartesianPoint(x1, x2))
    rmin = np.minimum(r1, r2)
    if np.any(rmin <= radius):
        raise SingularityError(
            f"evaluation within {radius} of a Coulomb center (min distance {float(rmin.min()):.3g})")
    return r1, r2


def potential(sector, p: geometry.CartesianPoint, params: ModelParams):
    """Closed-form scalar potential ``V^(0)`` (sector 0) or ``V^(2)`` (sector 2)."""
    x1, x2 = p.x1, p.x2
    if sector not in (0, 2):
        raise DomainError("scalar potentials exist for sectors 0 and 2")
    r1, r2 = _check_centers(x1, x2)
    pr = params
    d, h = pr.delta, pr.hbar
    sgn = 1.0 if sector == 0 else -1.0
    coulomb = 1 / r1 + d / r2
    if pr.wtype == "I":
        out = (2 / h**2) * (1 + d * d + d * (r1 / r2 + r2 / r1 - 4 / (r1 * r2))) - sgn * coulomb
        if not pr.is_simple:
            s = r1 + r2
            root_u = np.sqrt(np.maximum(s * s - 4, 0.0))
            root_v = np.sqrt(np.maximum(4 - (r2 - r1) ** 2, 0.0))
            cu = pr.c1 + pr.kappa * np.log(0.5 * (s + root_u))
            cv = pr.c2 - pr.kappa * np.arcsin(np.clip(0.5 * (r2 - r1), -1, 1))
            out = out + (cu * cu + cv * cv - 2 * (1 + d) * root_u * cu
                         + 2 * (1 - d) * root_v * cv) / (2 * h**2 * r1 * r2)
        return out
    sa = -1.0 if pr.a else 1.0
    sb = -1.0 if pr.b else 1.0
    s = r1 + r2
    with np.errstate(invalid="ignore", divide="ignore"):
        tu = sa * (1 + d) * np.sqrt(np.maximum(s * s - 4, 0)) / np.sqrt((1 + d) * s - pr.kappa)
        tv = sb * (1 - d) * np.sqrt(np.maximum(4 - (r1 - r2) ** 2, 0)) / np.sqrt(pr.kappa - (1 - d) * (r1 - r2))
    return coulomb + sgn * h / (4 * r1 * r2) * (tu + tv)


def matrix_potential(p: geometry.CartesianPoint, params: ModelParams):
    """Potential part ``(V11, V12, V22)`` of the Fermi-number-one Hamiltonian.

    Closed form for the simple Type I model; otherwise
    ``|grad W|^2/2 -/+ (hbar/2)(W_11 - W_22)`` on the diagonal and
    ``-hbar W_12`` off it.
    """
    x1 = np.asarray(p.x1, dtype=float)
    x2 = np.asarray(p.x2, dtype=float)
    r1, r2 = _check_centers(x1, x2)
    pr = params
    d, h = pr.delta, pr.hbar
    if pr.is_simple:
        base = (2 / h**2) * (1 + d * d + d * (r1 / r2 + r2 / r1 - 4 / (r1 * r2)))
        box = ((x1 - 1) ** 2 - x2**2) / r1**3 + d * ((x1 + 1) ** 2 - x2**2) / r2**3
        off = -2 * (x2 * (x1 - 1) / r1**3 + d * x2 * (x1 + 1) / r2**3)
        return base - box, off, base + box
    W = superpotential(pr)
    g = W.grad(x1, x2)
    H = W.hess(x1, x2)
    half_sq = 0.5 * (g[0] ** 2 + g[1] ** 2)
    box = 0.5 * h * (H[0, 0] - H[1, 1])
    return half_sq - box, -h * H[0, 1], half_sq + box


# ---------------------------------------------------------------------------
# Supercharges and Hamiltonians
# ---------------------------------------------------------------------------

def _central_gradient(field, x1, x2, h):
    d1 = (field(x1 + h, x2) - field(x1 - h, x2)) / (2 * h)
    d2 = (field(x1, x2 + h) - field(x1, x2 - h)) / (2 * h)
    return d1, d2


def apply_supercharge(which, field, p: geometry.CartesianPoint, params: ModelParams, grad=None,
                      h=DEFAULT_FD_STEP):
    """Apply ``Q+`` or ``Q-`` to a spinor field at Cartesian points.

    Parameters
    ----------
    which : {"Q+", "Q-"}
    field : callable
        ``field(x1, x2) -> (4, ...)`` array.
    grad : callable, optional
        ``grad(x1, x2) -> (d/dx1, d/dx2)`` of the field.  Central differences
        with step `h` are used when omitted.

    Returns
    -------
    ndarray of complex, shape (4, ...)
    """
    if which not in ("Q+", "Q-"):
        raise DomainError("which must be 'Q+' or 'Q-'")
    x1 = np.asarray(p.x1, dtype=float)
    x2 = np.asarray(p.x2, dtype=float)
    _check_centers(x1, x2, 0.0 if grad is not None else h)
    hb = params.hbar
    psi = np.asarray(field(x1, x2))
    d1, d2 = grad(x1, x2) if grad is not None else _central_gradient(field, x1, x2, h)
    W1, W2 = superpotential(params).grad(x1, x2)
    out = np.zeros(psi.shape, dtype=complex)
    if which == "Q+":
        out[1] = hb * d1[0] - W1 * psi[0]
        out[2] = hb * d2[0] - W2 * psi[0]
        out[3] = -(hb * d2[1] - W2 * psi[1]) + (hb * d1[2] - W1 * psi[2])
    else:
        out[0] = (hb * d1[1] + W1 * psi[1]) + (hb * d2[2] + W2 * psi[2])
        out[1] = -(hb * d2[3] + W2 * psi[3])
        out[2] = hb * d1[3] + W1 * psi[3]
    return 1j * math.sqrt(hb) * out


def apply_elliptic_supercharge(which, field_uv, e: geometry.EllipticPoint, params: ModelParams,
                               grad=None, h=1e-5):
    """Apply the elliptic-frame supercharges ``C+`` / ``C-``.

    ``field_uv(u, v) -> (4, ...)`` is given in the orthonormal elliptic frame;
    ``grad(u, v) -> (d/du, d/dv)`` may be supplied, otherwise central
    differences with step `h` in ``u`` and ``v`` are used.
    """
    if which not in ("C+", "C-"):
        raise DomainError("which must be 'C+' or 'C-'")
    u = np.asarray(e.u, dtype=float)
    v = np.asarray(e.v, dtype=float)
    md = geometry.metric(e)
    hb = params.hbar
    W = superpotential(params)
    Fp, Gp = W.dF(u), W.dG(v)
    s = u * u - v * v
    cu, cv = hb * u / s, hb * v / s
    phi = np.asarray(field_uv(u, v))
    if grad is not None:
        du, dv = grad(u, v)
    else:
        du = (field_uv(u + h, v) - field_uv(u - h, v)) / (2 * h)
        dv = (field_uv(u, v + h) - field_uv(u, v - h)) / (2 * h)
    eu, ev = md.e_u1, md.e_v2
    out = np.zeros(phi.shape, dtype=complex)
    if which == "C+":
        out[1] = eu * (hb * du[0] - Fp * phi[0])
        out[2] = ev * (hb * dv[0] - Gp * phi[0])
        out[3] = (-ev * (hb * dv[1] - Gp * phi[1] - cv * phi[1])
                  + eu * (hb * du[2] - Fp * phi[2] + cu * phi[2]))
    else:
        out[0] = (eu * (hb * du[1] + Fp * phi[1] + cu * phi[1])
                  + ev * (hb * dv[2] + Gp * phi[2] - cv * phi[2]))
        out[1] = -ev * (hb * dv[3] + Gp * phi[3])
        out[2] = eu * (hb * du[3] + Fp * phi[3])
    return -1j * math.sqrt(hb) * out


def _laplacian(field, x1, x2, h):
    return (field(x1 + h, x2) + field(x1 - h, x2) + field(x1, x2 + h) + field(x1, x2 - h)
            - 4 * field(x1, x2)) / (h * h)


def apply_hamiltonian(sector, field, p: geometry.CartesianPoint, params: ModelParams,
                      h=DEFAULT_FD_STEP):
    """Apply the sector Hamiltonian with a 5-point Laplacian.

    Returns the F=0 (sector 0) or F=2 (sector 2) component, or the F=1
    doublet (sector 1) with shape ``(2, ...)``.

    Raises
    ------
    SingularityError
        If the stencil reaches into the exclusion disk around a center.
    """
    if sector not in (0, 1, 2):
        raise DomainError("sector must be 0, 1 or 2")
    x1 = np.asarray(p.x1, dtype=float)
    x2 = np.asarray(p.x2, dtype=float)
    _check_centers(x1, x2, EXCLUSION_RADIUS + h)
    psi = np.asarray(field(x1, x2))
    kinetic = -0.5 * params.hbar**2 * _laplacian(field, x1, x2, h)
    if sector == 0:
        return kinetic[0] + potential(0, p, params) * psi[0]
    if sector == 2:
        return kinetic[3] + potential(2, p, params) * psi[3]
    v11, v12, v22 = matrix_potential(p, params)
    return np.stack([kinetic[1] + v11 * psi[1] + v12 * psi[2],
                     kinetic[2] + v12 * psi[1] + v22 * psi[2]])


def apply_anticommutator(field, p: geometry.CartesianPoint, params: ModelParams, h=DEFAULT_FD_STEP):
    """``{Q+, Q-} psi / (2 hbar)``, i.e. the SUSY Hamiltonian via the algebra.

    Both supercharges use central differences, so the result carries an
    ``O(h**2)`` discretization error.
    """
    _check_centers(p.x1, p.x2, 2 * h)
    P = geometry.CartesianPoint
    qm = lambda a, b: apply_supercharge("Q-", field, P(a, b), params, h=h)
    qp = lambda a, b: apply_supercharge("Q+", field, P(a, b), params, h=h)
    total = (apply_supercharge("Q+", qm, p, params, h=h)
             + apply_supercharge("Q-", qp, p, params, h=h))
    return total / (2 * params.hbar)
