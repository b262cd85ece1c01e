"""Quasi-exactly-solvable bound states.

The scalar eigenproblems separate in elliptic coordinates into a
hyperbolic (``u``) and a trigonometric (``v``) equation coupled through the
energy ``E`` and the eigenvalue ``I`` of the second conserved quantity:

    -hbar^2 (u^2-1) eta'' - hbar^2 u eta' + (4(1+d)^2/hbar^2 (u^2-1) -/+ 2(1+d) u - 2 E u^2) eta = I eta
    -hbar^2 (1-v^2) xi''  + hbar^2 v xi'  + (4(1-d)^2/hbar^2 (1-v^2) -/+ 2(1-d) v + 2 E v^2) xi = -I xi

(upper sign: sector 0, lower sign: sector 2).  With ``u = cosh 2x`` the
first becomes the Razavy equation; with ``v = cos 2y`` the second becomes a
Whittaker-Hill equation, which degenerates to the Mathieu equation for equal
strengths.  Closed-form eigenfunctions are provided for ``delta = 1`` and
the three lowest levels.

Sector signs are ``+1`` (F=0) and ``-1`` (F=2); the strings ``"+"`` and
``"-"`` are accepted too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import geometry, model, specfun
from .errors import DivergenceError, DomainError
from .model import ModelParams

__all__ = [
    "RazavyParams",
    "WhittakerHillParams",
    "MathieuParams",
    "SpectrumEntry",
    "BoundState",
    "PartnerField",
    "qes_energy",
    "qes_energy_exact",
    "razavy_params",
    "wh_params",
    "razavy_eigenfunction",
    "symmetry_eigenvalue",
    "symmetry_eigenvalue_from_lambda",
    "mathieu_params",
    "mathieu_params_from_levels",
    "xi_factor",
    "u_ode_residual",
    "v_ode_residual",
    "razavy_residual",
    "spectrum_entry",
    "spectrum_table",
    "assemble_bound_state",
    "fermionic_partner",
]

MAX_LEVEL = 2


class RazavyParams(NamedTuple):
    zeta: float
    M: float
    lam: float


class WhittakerHillParams(NamedTuple):
    """``beta`` and ``N`` are complex when below-threshold reality fails.

    ``mathieu_limit`` is set for equal strengths, where the map degenerates
    and the Mathieu parameters apply instead (all other fields are nan).
    """

    beta: complex
    N: complex
    mu: float
    mathieu_limit: bool
    complex_N: bool


class MathieuParams(NamedTuple):
    a: float
    q: float


def _sign(sector_sign) -> int:
    if sector_sign in (1, "+", "+1"):
        return 1
    if sector_sign in (-1, "-", "-1"):
        return -1
    raise DomainError(f"sector sign must be +1/-1 or '+'/'-', got {sector_sign!r}")


def _check_nm(n, m):
    if not (isinstance(n, (int, np.integer)) and 0 <= n <= MAX_LEVEL):
        raise DomainError(f"closed forms exist for n = 0..{MAX_LEVEL}, got n={n}")
    if not (isinstance(m, (int, np.integer)) and 1 <= m <= n + 1):
        raise DomainError(f"m must lie in 1..{n + 1}, got m={m}")


def _check_equal(params: ModelParams):
    if params.delta != 1.0:
        raise DomainError("closed-form eigenfunctions need delta = 1")
    if not params.is_simple:
        raise DomainError("bound states are built for the simple Type I superpotential")


# ---------------------------------------------------------------------------
# Parameter maps
# ---------------------------------------------------------------------------

def qes_energy(branch: str, n: int, params: ModelParams) -> float:
    """``E_n = 2(1 +/- d)^2 / hbar^2 (1 - 1/(n+1)^2)``.

    ``branch="razavy_u"`` takes ``+``, ``branch="wh_v"`` takes ``-``.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if branch == "razavy_u":
        s = 1 + params.delta
    elif branch == "wh_v":
        s = 1 - params.delta
    else:
        raise DomainError("branch must be 'razavy_u' or 'wh_v'")
    return 2 * s * s / params.hbar**2 * (1 - 1 / (n + 1) ** 2)


def qes_energy_exact(branch: str, n: int, delta: Fraction, hbar: Fraction) -> Fraction:
    """Rational-arithmetic version of :func:`qes_energy`."""
    s = 1 + delta if branch == "razavy_u" else 1 - delta
    return 2 * s * s / hbar**2 * (1 - Fraction(1, (n + 1) ** 2))


def razavy_params(E, I, sector_sign, params: ModelParams) -> RazavyParams:
    """Parameters of ``-eta_xx + (zeta cosh 2x - M)^2 eta = lam eta``."""
    s = _sign(sector_sign)
    d, h = params.delta, params.hbar
    c = 2 * (1 + d) ** 2
    if not c - h * h * E > 0:
        raise DomainError("energy at or above the ionization threshold")
    zeta = s * (2 / h) * math.sqrt(4 * (1 + d) ** 2 / h**2 - 2 * E)
    M2 = c / (c - h * h * E)
    lam = M2 + (4 / h**2) * (I + 4 * (1 + d) ** 2 / h**2)
    return RazavyParams(zeta, math.sqrt(M2), lam)


def wh_params(E, I, sector_sign, params: ModelParams) -> WhittakerHillParams:
    """Parameters of ``xi_yy + (beta cos 2y - N)^2 xi = mu xi``."""
    s = _sign(sector_sign)
    d, h = params.delta, params.hbar
    if d == 1.0:
        nan = float("nan")
        return WhittakerHillParams(nan, nan, nan, True, False)
    c = 2 * (1 - d) ** 2
    beta = -s * (2 / h) * np.sqrt(complex(4 * (1 - d) ** 2 / h**2 - 2 * E))
    denom = c - h * h * E
    N2 = c / denom if denom != 0 else complex("inf")
    N = np.sqrt(complex(N2))
    mu = (N2 + (4 / h**2) * (I + 4 * (1 - d) ** 2 / h**2))
    is_complex = not denom > 0
    if not is_complex:
        beta, N, mu = float(beta.real), float(N.real), float(np.real(mu))
    return WhittakerHillParams(beta, N, mu, False, is_complex)


def symmetry_eigenvalue(n, m, sector_sign, hbar) -> float:
    """Listed eigenvalues ``I^{nm}`` of the symmetry operator (equal strengths)."""
    _check_nm(n, m)
    s = _sign(sector_sign)
    h2 = hbar * hbar
    root = math.sqrt(256 + 9 * h2 * h2)
    table = {
        (0, 1): 0.0,
        (1, 1): -h2 / 4 - 12 / h2 - 2 * s,
        (1, 2): -h2 / 4 - 12 / h2 + 2 * s,
        (2, 1): -h2 - 128 / (9 * h2),
        (2, 2): -h2 / 2 - 128 / (9 * h2) - root / 6,
        (2, 3): -h2 / 2 - 128 / (9 * h2) + root / 6,
    }
    return table[(n, m)]


def symmetry_eigenvalue_from_lambda(lam, n, hbar) -> float:
    """Invert the Razavy eigenvalue: ``I = hbar^2/4 (lam - (n+1)^2) - 16/hbar^2``."""
    return hbar**2 / 4 * (lam - (n + 1) ** 2) - 16 / hbar**2


def mathieu_params(n, m, sector_sign, hbar) -> MathieuParams:
    """Listed Mathieu parameters ``(a^{nm}, q_n)`` (equal strengths)."""
    _check_nm(n, m)
    s = _sign(sector_sign)
    h2 = hbar * hbar
    h4 = h2 * h2
    root = math.sqrt(256 + 9 * h4)
    q = (0.0, 3 / h4, 32 / (9 * h4))[n]
    table = {
        (0, 1): 0.0,
        (1, 1): 6 / h4 + 2 * s / h2 + 0.25,
        (1, 2): 6 / h4 - 2 * s / h2 + 0.25,
        (2, 1): 1 + 64 / (9 * h4),
        (2, 2): 0.5 + 64 / (9 * h4) + root / (6 * h2),
        (2, 3): 0.5 + 64 / (9 * h4) - root / (6 * h2),
    }
    return MathieuParams(table[(n, m)], q)


def mathieu_params_from_levels(E, I, hbar) -> MathieuParams:
    """``a = -(E + I)/hbar^2`` and ``q = E/(2 hbar^2)``."""
    return MathieuParams(-(E + I) / hbar**2, E / (2 * hbar**2))


# ---------------------------------------------------------------------------
# Eigenfunctions
# ---------------------------------------------------------------------------

def _eta_parts(n, m, s, u, hbar):
    """``(k, g, g', g'')`` with ``eta = exp(k u) g(u)``."""
    h2 = hbar * hbar
    k = -s * 4 / ((n + 1) * h2)
    one = np.ones_like(u)
    zero = np.zeros_like(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        if n == 0:
            return k, one, zero, zero
        if (n, m) == (1, 1):
            w = np.sqrt(2 * (u + 1))
            return k, w, 1 / w, -1 / w**3
        if (n, m) == (1, 2):
            w = np.sqrt(2 * (u - 1))
            return k, -w, -1 / w, 1 / w**3
        if (n, m) == (2, 1):
            w = np.sqrt(u * u - 1)
            return k, -2 * w, -2 * u / w, 2 / w**3
        root = math.sqrt(1 + 256 / (9 * h2 * h2))
        c = root if m == 2 else -root
        g = s * (3 * h2 / 8) * (s * 16 * u / (3 * h2) - 1 + c)
        return k, g, 2.0 * one, zero


def razavy_eigenfunction(n, m, sector_sign, u, params: ModelParams, derivatives: int = 0):
    """Closed-form ``eta^{nm}(u)`` for equal strengths.

    Parameters
    ----------
    derivatives : {0, 1, 2}
        Return ``eta`` alone (0) or the tuple ``(eta, eta', ...)`` up to
        that order in ``u``.
    """
    _check_equal(params)
    _check_nm(n, m)
    s = _sign(sector_sign)
    u = np.asarray(u, dtype=float)
    if np.any(u < 1):
        raise DomainError("u must be >= 1")
    k, g, g1, g2 = _eta_parts(n, m, s, u, params.hbar)
    e = np.exp(k * u)
    vals = (e * g, e * (k * g + g1), e * (k * k * g + 2 * k * g1 + g2))
    if derivatives == 0:
        return vals[0]
    return vals[: derivatives + 1]


def xi_factor(n, m, sector_sign, parity, v, coeffs=(1.0, 0.0), params: ModelParams | None = None,
              derivative: bool = False):
    """Even/odd Mathieu combination in ``v`` for the level ``(n, m)``.

    ``coeffs`` are ``(c1, c2)`` for even and ``(d1, d2)`` for odd parity:

        even: c1/2 (C(z) + C(pi - z)) + c2/2 (S(z) + S(pi - z))
        odd:  d1/2 (C(z) - C(pi - z)) + d2/2 (S(z) - S(pi - z))

    with ``z = arccos v`` and ``C``, ``S`` the even/odd Mathieu solutions.
    With ``derivative=True`` also returns ``d xi / dv`` (singular at
    ``|v| = 1``).
    """
    if params is None:
        params = ModelParams(delta=1.0)
    _check_equal(params)
    if parity not in ("even", "odd"):
        raise DomainError("parity must be 'even' or 'odd'")
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) > 1):
        raise DomainError("|v| must be <= 1")
    # evaluate at |v| and reflect, so the parity holds bit for bit
    z = np.arccos(np.abs(v))
    val, dz = _xi_of_z(n, m, sector_sign, parity, z, coeffs, params)
    sg = 1.0 if parity == "even" else -1.0
    neg = v < 0
    val = np.where(neg, sg * val, val)
    if not derivative:
        return val
    with np.errstate(divide="ignore"):
        dv = -dz / np.sqrt(1 - v * v)
    return val, np.where(neg, -sg * dv, dv)


def _xi_of_z(n, m, sector_sign, parity, z, coeffs, params):
    """``xi`` and ``d xi / dz`` as functions of ``z = arccos v``."""
    a, q = mathieu_params(n, m, sector_sign, params.hbar)
    c1, c2 = coeffs
    sg = 1.0 if parity == "even" else -1.0
    w = np.pi - z
    val = np.zeros_like(z)
    dz = np.zeros_like(z)
    if c1:
        f, df = specfun.mathieu("even", a, q, z)
        g, dg = specfun.mathieu("even", a, q, w)
        val = val + 0.5 * c1 * (f + sg * g)
        dz = dz + 0.5 * c1 * (df - sg * dg)
    if c2:
        f, df = specfun.mathieu("odd", a, q, z)
        g, dg = specfun.mathieu("odd", a, q, w)
        val = val + 0.5 * c2 * (f + sg * g)
        dz = dz + 0.5 * c2 * (df - sg * dg)
    return val, dz


# ---------------------------------------------------------------------------
# Residuals of the separated equations
# ---------------------------------------------------------------------------

def _relative(res, terms):
    scale = np.max(np.sum(np.abs(terms), axis=0))
    return float(np.max(np.abs(res)) / scale) if scale > 0 else float(np.max(np.abs(res)))


def u_ode_residual(n, m, sector_sign, u, params: ModelParams) -> float:
    """Scaled residual of the ``u`` equation with the listed ``E`` and ``I``."""
    s = _sign(sector_sign)
    h2 = params.hbar**2
    E = qes_energy("razavy_u", n, params)
    I = symmetry_eigenvalue(n, m, s, params.hbar)
    u = np.asarray(u, dtype=float)
    eta, d1, d2 = razavy_eigenfunction(n, m, s, u, params, derivatives=2)
    terms = np.stack([
        -h2 * (u * u - 1) * d2,
        -h2 * u * d1,
        (16 / h2 * (u * u - 1) - s * 4 * u - 2 * E * u * u) * eta,
        -I * eta,
    ])
    return _relative(terms.sum(axis=0), terms)


def razavy_residual(n, m, sector_sign, x, params: ModelParams) -> float:
    """Scaled residual of ``-eta_xx + (zeta cosh 2x - M)^2 eta - lam eta``.

    ``zeta, M, lam`` come from :func:`razavy_params` with the listed energy
    and symmetry eigenvalue; ``eta_xx`` is assembled from the ``u``
    derivatives with ``u = cosh 2x``.
    """
    s = _sign(sector_sign)
    E = qes_energy("razavy_u", n, params)
    I = symmetry_eigenvalue(n, m, s, params.hbar)
    zeta, M, lam = razavy_params(E, I, s, params)
    x = np.asarray(x, dtype=float)
    u = np.cosh(2 * x)
    eta, d1, d2 = razavy_eigenfunction(n, m, s, u, params, derivatives=2)
    eta_xx = 4 * np.sinh(2 * x) ** 2 * d2 + 4 * u * d1
    terms = np.stack([-eta_xx, (zeta * u - M) ** 2 * eta, -lam * eta])
    return _relative(terms.sum(axis=0), terms)


def v_ode_residual(n, m, sector_sign, parity, v, params: ModelParams, coeffs=(1.0, 0.0),
                   step: float = 1e-3) -> float:
    """Scaled residual of the ``v`` equation.

    With ``z = arccos v`` and ``xi(v) = w(z)``, ``xi'`` and ``xi''`` follow
    from the chain rule.  ``w'`` comes from the Mathieu solver and ``w''`` is
    a Richardson-extrapolated central difference of ``w'`` (steps `step` and
    ``step/2``), so the check does not reuse the Mathieu equation itself.
    """
    s = _sign(sector_sign)
    h2 = params.hbar**2
    E = qes_energy("razavy_u", n, params)
    I = symmetry_eigenvalue(n, m, s, params.hbar)
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) >= 1):
        raise DomainError("v must lie inside (-1, 1)")
    z = np.arccos(v)
    xi, wz = _xi_of_z(n, m, s, parity, z, coeffs, params)

    def central(h):
        return (_xi_of_z(n, m, s, parity, z + h, coeffs, params)[1]
                - _xi_of_z(n, m, s, parity, z - h, coeffs, params)[1]) / (2 * h)

    wzz = (4 * central(step / 2) - central(step)) / 3
    b = 1 - v * v
    d1 = -wz / np.sqrt(b)
    d2 = wzz / b - wz * v / b**1.5
    terms = np.stack([
        -h2 * b * d2,
        h2 * v * d1,
        2 * E * v * v * xi,
        I * xi,
    ])
    return _relative(terms.sum(axis=0), terms)


# ---------------------------------------------------------------------------
# Spectrum entries and bound states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumEntry:
    n: int
    m: int
    sector_sign: int
    parity: str
    E: float
    I: float
    razavy: RazavyParams
    mathieu: MathieuParams

    @property
    def sector(self) -> int:
        return 0 if self.sector_sign > 0 else 2


def spectrum_entry(n, m, sector_sign, parity, params: ModelParams) -> SpectrumEntry:
    _check_equal(params)
    _check_nm(n, m)
    if parity not in ("even", "odd"):
        raise DomainError("parity must be 'even' or 'odd'")
    s = _sign(sector_sign)
    E = qes_energy("razavy_u", n, params)
    I = symmetry_eigenvalue(n, m, s, params.hbar)
    return SpectrumEntry(n, m, s, parity, E, I, razavy_params(E, I, s, params),
                         mathieu_params(n, m, s, params.hbar))


def spectrum_table(params: ModelParams, nmax: int = MAX_LEVEL):
    """Every ``(n, m, sector, parity)`` entry with ``n <= nmax``."""
    return [spectrum_entry(n, m, s, par, params)
            for n in range(nmax + 1)
            for m in range(1, n + 2)
            for s in (1, -1)
            for par in ("even", "odd")]


@dataclass(frozen=True)
class BoundState:
    """``psi = eta(u) xi(v)`` placed in the F=0 (sector +) or F=2 (sector -)
    component."""

    entry: SpectrumEntry
    params: ModelParams
    coeffs: tuple = (1.0, 0.0)

    @property
    def component(self) -> int:
        return 0 if self.entry.sector_sign > 0 else 3

    @property
    def energy(self) -> float:
        return self.entry.E

    def eta(self, u, derivatives=0):
        e = self.entry
        return razavy_eigenfunction(e.n, e.m, e.sector_sign, u, self.params, derivatives)

    def xi(self, v, derivative=False):
        e = self.entry
        return xi_factor(e.n, e.m, e.sector_sign, e.parity, v, self.coeffs, self.params, derivative)

    def spinor_uv(self, u, v):
        u = np.asarray(u, dtype=float)
        out = np.zeros((4,) + u.shape)
        out[self.component] = self.eta(u) * self.xi(v)
        return out

    def spinor(self, p: geometry.CartesianPoint):
        e = geometry.to_elliptic(p)
        return self.spinor_uv(e.u, e.v)

    def gradient(self, p: geometry.CartesianPoint):
        """Analytic Cartesian gradient; singular on the axis where the chain
        rule through ``u`` and ``v`` breaks down."""
        x1 = np.asarray(p.x1, dtype=float)
        x2 = np.asarray(p.x2, dtype=float)
        e = geometry.to_elliptic(geometry.CartesianPoint(x1, x2))
        eta, deta = self.eta(e.u, derivatives=1)
        xi, dxi = self.xi(e.v, derivative=True)
        gu, gv, _, _ = geometry.elliptic_derivatives(x1, x2)
        d = deta * xi * gu + eta * dxi * gv
        shape = (4,) + np.shape(x1)
        d1 = np.zeros(shape)
        d2 = np.zeros(shape)
        d1[self.component] = d[0]
        d2[self.component] = d[1]
        return d1, d2

    def field(self):
        return lambda x1, x2: self.spinor(geometry.CartesianPoint(x1, x2))

    def density(self, p: geometry.CartesianPoint):
        return self.spinor(p)[self.component] ** 2

    def is_null(self, samples: int = 257) -> bool:
        """True when the chosen ``xi`` combination vanishes identically."""
        z = np.linspace(0.0, np.pi, samples)
        e = self.entry
        val, _ = _xi_of_z(e.n, e.m, e.sector_sign, e.parity, z, self.coeffs, self.params)
        ref = max(abs(c) for c in self.coeffs)
        return bool(np.max(np.abs(val)) <= 1e-12 * max(ref, 1e-300))

    def norm(self, rtol: float = 1e-10) -> specfun.QuadratureResult:
        """``int psi^2`` over the plane by separable log-domain quadrature.

        Raises
        ------
        DivergenceError
            For growing (non-normalizable) states.
        """
        e = self.entry
        with np.errstate(divide="ignore"):
            le = lambda mu: 2 * np.log(np.abs(self.eta(np.cosh(mu))))
            lx = lambda th: 2 * np.log(np.abs(_xi_of_z(e.n, e.m, e.sector_sign, e.parity, th,
                                                       self.coeffs, self.params)[0]))
            A0 = specfun.integrate(le, 0.0, math.inf, log_integrand=True, rtol=rtol)
            A2 = specfun.integrate(lambda mu: le(mu) + 2 * np.log(np.sinh(mu)), 0.0, math.inf,
                                   log_integrand=True, rtol=rtol)
            B0 = specfun.integrate(lx, 0.0, math.pi, log_integrand=True, rtol=rtol)
            B2 = specfun.integrate(lambda th: lx(th) + 2 * np.log(np.sin(th)), 0.0, math.pi,
                                   log_integrand=True, rtol=rtol)
        if B0.sign == 0:
            return specfun.QuadratureResult(-math.inf, 0, -math.inf, 0)
        logs = [A2.log_magnitude + B0.log_magnitude, A0.log_magnitude + B2.log_magnitude]
        total = float(np.logaddexp(*logs)) + math.log(2.0)
        rel = max(A0.relative_error, A2.relative_error, B0.relative_error, B2.relative_error)
        return specfun.QuadratureResult(total, 1, total + math.log(2 * rel) if rel > 0 else -math.inf,
                                        A0.evaluations + A2.evaluations + B0.evaluations + B2.evaluations)

    @property
    def normalizable(self) -> bool:
        try:
            self.norm()
        except DivergenceError:
            return False
        return True


def assemble_bound_state(n, m, sector_sign, parity, coeffs=(1.0, 0.0),
                         params: ModelParams | None = None) -> BoundState:
    """Bound state ``eta^{nm}(u) xi^{nm}(v)``; default ``c1 = d1 = 1, c2 = d2 = 0``."""
    if params is None:
        params = ModelParams(delta=1.0)
    entry = spectrum_entry(n, m, sector_sign, parity, params)
    return BoundState(entry, params, tuple(float(c) for c in coeffs))


@dataclass(frozen=True)
class PartnerField:
    """Fermionic partner ``Q+ psi`` (sector +) or ``Q- psi`` (sector -).

    Callable as ``field(x1, x2)``; ``zero`` marks zero-energy inputs, for
    which the partner vanishes identically.
    """

    state: BoundState
    zero: bool

    @property
    def energy(self) -> float:
        return self.state.energy

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if self.zero:
            return np.zeros((4,) + np.broadcast(x1, x2).shape, dtype=complex)
        bs = self.state
        which = "Q+" if bs.entry.sector_sign > 0 else "Q-"
        return model.apply_supercharge(
            which, bs.field(), geometry.CartesianPoint(x1, x2), bs.params,
            grad=lambda a, b: bs.gradient(geometry.CartesianPoint(a, b)))


def fermionic_partner(bs: BoundState) -> PartnerField:
    """The F=1 partner of a bound state, built with analytic derivatives."""
    return PartnerField(bs, bs.energy == 0.0)
