"""Zero-energy ground states, their norms and probability-density grids.

Every zero mode has a single nonzero spinor component of the form

    A * pref(u, v) * exp((sF * F(u) + sG * G(v)) / hbar)

where ``W = F + G`` is the superpotential, ``pref = 1`` for the bosonic
states and ``pref = 1 / sqrt(u**2 - v**2)`` for the fermionic ones (the
latter live in the F=1 doublet of the orthonormal elliptic frame).  Norms
integrate over the whole plane; in ``u = cosh(mu)``, ``v = cos(theta)`` the
area element is ``2 (u**2 - v**2) dmu dtheta`` once both half-planes are
counted.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry, specfun
from .errors import DomainError, SingularityError
from .model import ModelParams, superpotential

__all__ = [
    "KINDS",
    "GroundState",
    "Grid",
    "DensityGrid",
    "bosonic_zero_mode_I",
    "fermionic_zero_mode_I",
    "zero_mode_II",
    "ground_state",
    "normalizable_kinds_II",
    "norm_bosonic_I",
    "log_norm_bosonic_I",
    "norm_fermionic_I",
    "log_norm_fermionic_I",
    "norm_II",
    "norm_quadrature",
    "density_grid",
]

KINDS = (
    "bosonic_I",
    "fermionic_I",
    "bosonic_II_sector0",
    "bosonic_II_sector2",
    "fermionic_II_comp1",
    "fermionic_II_comp2",
)

# (spinor component, sign of F, sign of G, fermionic prefactor)
_LAYOUT = {
    "sector0": (0, 1.0, 1.0, False),
    "sector2": (3, -1.0, -1.0, False),
    "comp1": (1, -1.0, 1.0, True),
    "comp2": (2, 1.0, -1.0, True),
}


@dataclass(frozen=True)
class GroundState:
    """An unnormalized zero mode.

    Parameters
    ----------
    kind : str
        One of :data:`KINDS`.
    params : ModelParams
    layout : str
        ``"sector0"``, ``"sector2"``, ``"comp1"`` or ``"comp2"``; fixed by
        `kind` except for the non-normalizable Type I candidates.
    amplitude : float
        Constant prefactor (``A1`` or ``A2`` for fermionic Type II modes).
    """

    kind: str
    params: ModelParams
    layout: str
    amplitude: float = 1.0
    _W: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown ground-state kind {self.kind!r}")
        if self.layout not in _LAYOUT:
            raise DomainError(f"unknown layout {self.layout!r}")
        object.__setattr__(self, "_W", superpotential(self.params))

    @property
    def component(self) -> int:
        return _LAYOUT[self.layout][0]

    @property
    def is_fermionic(self) -> bool:
        return _LAYOUT[self.layout][3]

    @property
    def normalizable(self) -> bool:
        """Whether the u-factor decays; the v-factor is always bounded."""
        p = self.params
        s_f = _LAYOUT[self.layout][1]
        if p.wtype == "I":
            # F = -2(1 + delta) u / hbar decreases
            return s_f > 0
        # F_a decreases for a = 1 and increases for a = 0
        return (s_f > 0) == (p.a == 1)

    # -- elliptic-frame evaluation ------------------------------------------

    def _exponent(self, u, v):
        _, s_f, s_g, _ = _LAYOUT[self.layout]
        return (s_f * self._W.F(u) + s_g * self._W.G(v)) / self.params.hbar

    def _check_foci(self, u, v):
        if self.is_fermionic and np.any(u * u - v * v <= 0):
            raise SingularityError("fermionic zero modes are singular at the centers")

    def spinor_elliptic(self, e: geometry.EllipticPoint) -> np.ndarray:
        """Spinor in the orthonormal elliptic frame, shape ``(4, ...)``."""
        u = np.asarray(e.u, dtype=float)
        v = np.asarray(e.v, dtype=float)
        self._check_foci(u, v)
        out = np.zeros((4,) + u.shape)
        val = self.amplitude * np.exp(self._exponent(u, v))
        if self.is_fermionic:
            val = val / np.sqrt(u * u - v * v)
        out[self.component] = val
        return out

    def elliptic_gradient(self, e: geometry.EllipticPoint):
        """Analytic ``(d/du, d/dv)`` of :meth:`spinor_elliptic`."""
        u = np.asarray(e.u, dtype=float)
        v = np.asarray(e.v, dtype=float)
        psi = self.spinor_elliptic(e)
        _, s_f, s_g, ferm = _LAYOUT[self.layout]
        hb = self.params.hbar
        gu = s_f * self._W.dF(u) / hb
        gv = s_g * self._W.dG(v) / hb
        if ferm:
            s = u * u - v * v
            gu = gu - u / s
            gv = gv + v / s
        return psi * gu, psi * gv

    # -- Cartesian evaluation -----------------------------------------------

    def spinor(self, p: geometry.CartesianPoint, frame: str = "reflected") -> np.ndarray:
        """Spinor in the Cartesian frame, shape ``(4, ...)``.

        Fermionic modes are mapped with the S matrix.  S conjugates the
        elliptic supercharges into the Cartesian ones on the upper half-plane
        only.  With ``frame="reflected"`` (default) the lower half-plane
        value is the mirror image ``(psi1, -psi2)(x1, -x2)``, which solves
        the zero-mode equations there as well.  ``frame="branch_even"``
        applies S on both half-planes unchanged.
        """
        x1 = np.asarray(p.x1, dtype=float)
        x2 = np.asarray(p.x2, dtype=float)
        if frame not in ("reflected", "branch_even"):
            raise DomainError("frame must be 'reflected' or 'branch_even'")
        e = geometry.to_elliptic(geometry.CartesianPoint(x1, x2))
        phi = self.spinor_elliptic(e)
        if not self.is_fermionic:
            return phi
        S = geometry.s_matrix(e)
        out = np.einsum("...ij,j...->i...", S, phi)
        if frame == "reflected":
            out[2] = np.where(x2 < 0, -out[2], out[2])
        return out

    def gradient(self, p: geometry.CartesianPoint):
        """Analytic Cartesian gradient ``(d/dx1, d/dx2)`` of a bosonic mode."""
        if self.is_fermionic:
            raise DomainError("analytic Cartesian gradients are provided for bosonic modes only")
        x1 = np.asarray(p.x1, dtype=float)
        x2 = np.asarray(p.x2, dtype=float)
        psi = self.spinor(geometry.CartesianPoint(x1, x2))
        s_f = _LAYOUT[self.layout][1]
        g = self._W.grad(x1, x2) * (s_f / self.params.hbar)
        return psi * g[0], psi * g[1]

    def field(self, frame: str = "reflected"):
        """``field(x1, x2)`` callable for the supercharge/Hamiltonian operators."""
        return lambda x1, x2: self.spinor(geometry.CartesianPoint(x1, x2), frame=frame)

    def log_density_uv(self, u, v):
        """``log |Psi|^2`` (frame independent)."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        out = 2.0 * (self._exponent(u, v) + math.log(abs(self.amplitude)))
        if self.is_fermionic:
            with np.errstate(divide="ignore"):
                out = out - np.log(u * u - v * v)
        return out

    def density(self, p: geometry.CartesianPoint):
        e = geometry.to_elliptic(p)
        return np.exp(self.log_density_uv(e.u, e.v))

    def log_area_integrand(self, mu, theta):
        """Log of ``|Psi|^2 (u^2 - v^2)`` in ``(mu, theta)``, one half-plane."""
        _, s_f, s_g, ferm = _LAYOUT[self.layout]
        mu = np.asarray(mu, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = (2.0 * (s_f * self._W.F_of_mu(mu) + s_g * self._W.G_of_theta(theta)) / self.params.hbar
               + 2.0 * math.log(abs(self.amplitude)))
        if not ferm:
            s = np.sinh(mu) ** 2 + np.sin(theta) ** 2
            with np.errstate(divide="ignore"):
                out = out + np.log(s)
        return out

    def norm(self) -> specfun.QuadratureResult:
        """``int |Psi|^2 dx1 dx2``; analytic for Type I, separable quadrature for Type II."""
        p = self.params
        if p.wtype == "I" and p.is_simple and self.normalizable:
            scale = 2.0 * math.log(abs(self.amplitude))
            if self.is_fermionic:
                return specfun.QuadratureResult(log_norm_fermionic_I(p) + scale, 1, -math.inf, 0)
            return specfun.QuadratureResult(log_norm_bosonic_I(p) + scale, 1, -math.inf, 0)
        return _separable_norm(self)


def _require_simple_I(params):
    if params.wtype != "I":
        raise DomainError("Type I zero modes need wtype='I'")
    if not params.is_simple:
        raise DomainError("Type I zero modes are built for kappa = c1 = c2 = 0")


def bosonic_zero_mode_I(params: ModelParams, sector: int = 0) -> GroundState:
    """``exp(-2(r1 + delta r2)/hbar^2)`` in the F=0 component.

    ``sector=2`` returns the F=2 candidate ``exp(+2(r1 + delta r2)/hbar^2)``,
    which solves the zero-mode equations but is not normalizable.
    """
    _require_simple_I(params)
    if sector not in (0, 2):
        raise DomainError("sector must be 0 or 2")
    return GroundState("bosonic_I", params, "sector0" if sector == 0 else "sector2")


def fermionic_zero_mode_I(params: ModelParams) -> GroundState:
    """``exp(-(2(1+delta)u + 2(1-delta)v)/hbar^2) / sqrt(u^2 - v^2)`` in the
    second F=1 component of the elliptic frame."""
    _require_simple_I(params)
    return GroundState("fermionic_I", params, "comp2")


def zero_mode_II(kind: str, params: ModelParams, amplitude: float = 1.0) -> GroundState:
    """Type II zero modes.

    ``bosonic_II_sector0`` is ``exp((F_a + G_b)/hbar)`` in F=0,
    ``bosonic_II_sector2`` is ``exp(-(F_a + G_b)/hbar)`` in F=2,
    ``fermionic_II_comp1`` is ``A1 exp(-(F_a - G_b)/hbar)/sqrt(u^2 - v^2)``
    and ``fermionic_II_comp2`` is ``A2 exp((F_a - G_b)/hbar)/sqrt(u^2 - v^2)``.
    Which of each pair is normalizable depends on ``a``; see
    :attr:`GroundState.normalizable`.
    """
    if params.wtype == "I":
        raise DomainError("Type II zero modes need wtype 'IIa' or 'IIb'")
    layouts = {
        "bosonic_II_sector0": "sector0",
        "bosonic_II_sector2": "sector2",
        "fermionic_II_comp1": "comp1",
        "fermionic_II_comp2": "comp2",
    }
    if kind not in layouts:
        raise DomainError(f"{kind!r} is not a Type II kind")
    return GroundState(kind, params, layouts[kind], amplitude)


def ground_state(kind: str, params: ModelParams) -> GroundState:
    """Build any of :data:`KINDS` with unit amplitude."""
    if kind == "bosonic_I":
        return bosonic_zero_mode_I(params)
    if kind == "fermionic_I":
        return fermionic_zero_mode_I(params)
    return zero_mode_II(kind, params)


def normalizable_kinds_II(params: ModelParams):
    """The normalizable (bosonic, fermionic) Type II kinds for the sign bit ``a``."""
    if params.a == 1:
        return "bosonic_II_sector0", "fermionic_II_comp2"
    return "bosonic_II_sector2", "fermionic_II_comp1"


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

def _bessel_args(params):
    h2 = params.hbar**2
    return 4 * (1 - params.delta) / h2, 4 * (1 + params.delta) / h2


def log_norm_bosonic_I(params: ModelParams) -> float:
    """Natural log of the bosonic Type I norm (see :func:`norm_bosonic_I`)."""
    _require_simple_I(params)
    x, y = _bessel_args(params)
    t1 = -math.log(y) + specfun.log_bessel_i(0, x) + specfun.log_bessel_k(1, y)
    if x == 0.0:
        # equal strengths: I1(x)/x -> 1/2
        t2 = math.log(0.5)
    else:
        t2 = specfun.log_bessel_i(1, x) - math.log(x)
    t2 += specfun.log_bessel_k(0, y)
    return math.log(2 * math.pi) + float(np.logaddexp(t1, t2))


def norm_bosonic_I(params: ModelParams) -> float:
    """``2 pi [hbar^2/(4(1+d)) I0(x) K1(y) + hbar^2/(4(1-d)) I1(x) K0(y)]``

    with ``x = 4(1-d)/hbar^2`` and ``y = 4(1+d)/hbar^2``.  At ``d = 1`` the
    second term is evaluated as its limit ``K0(y)/2``.  May underflow for
    very small ``hbar``; use :func:`log_norm_bosonic_I` there.
    """
    return math.exp(log_norm_bosonic_I(params))


def log_norm_fermionic_I(params: ModelParams) -> float:
    _require_simple_I(params)
    x, y = _bessel_args(params)
    return math.log(2 * math.pi) + specfun.log_bessel_k(0, y) + specfun.log_bessel_i(0, x)


def norm_fermionic_I(params: ModelParams) -> float:
    """``2 pi K0(4(1+d)/hbar^2) I0(4(1-d)/hbar^2)``."""
    return math.exp(log_norm_fermionic_I(params))


def _log_int(logf, a, b, rtol):
    return specfun.integrate(logf, a, b, log_integrand=True, rtol=rtol)


def _combine(*terms):
    """Sum of products of QuadratureResults, with relative errors added."""
    logs, rels, evals = [], [], 0
    for factors in terms:
        logs.append(sum(f.log_magnitude for f in factors))
        rels.append(sum(f.relative_error for f in factors))
        evals += sum(f.evaluations for f in factors)
    log_total = float(np.logaddexp.reduce(logs))
    abs_err = sum(math.exp(lg - log_total) * r for lg, r in zip(logs, rels))
    log_err = math.log(abs_err) + log_total if abs_err > 0 else -math.inf
    return specfun.QuadratureResult(log_total, 1, log_err, evals)


def _separable_norm(state: GroundState, rtol: float = 1e-11) -> specfun.QuadratureResult:
    _, s_f, s_g, ferm = _LAYOUT[state.layout]
    W, hb = state._W, state.params.hbar
    lf = lambda mu: 2.0 * s_f * W.F_of_mu(mu) / hb
    lg = lambda th: 2.0 * s_g * W.G_of_theta(th) / hb
    A0 = _log_int(lf, 0.0, math.inf, rtol)
    B0 = _log_int(lg, 0.0, math.pi, rtol)
    if ferm:
        res = _combine((A0, B0))
    else:
        # u^2 - v^2 = sinh^2(mu) + sin^2(theta): two positive separable terms
        with np.errstate(divide="ignore"):
            A2 = _log_int(lambda mu: lf(mu) + 2 * np.log(np.sinh(mu)), 0.0, math.inf, rtol)
            B2 = _log_int(lambda th: lg(th) + 2 * np.log(np.sin(th)), 0.0, math.pi, rtol)
        res = _combine((A2, B0), (A0, B2))
    return res.scaled(math.log(2.0) + 2.0 * math.log(abs(state.amplitude)))


def norm_II(kind: str, params: ModelParams, amplitude: float = 1.0) -> specfun.QuadratureResult:
    """Numerical norm of a Type II zero mode in the log domain.

    The integrand separates in ``(mu, theta)``, so the plane integral is a
    short sum of products of 1D adaptive integrals; the ``mu`` range is cut
    once the integrand is 40 decades below its running maximum.

    Raises
    ------
    DivergenceError
        For the non-normalizable member of each pair.
    """
    return _separable_norm(zero_mode_II(kind, params, amplitude))


def norm_quadrature(state: GroundState, rtol: float = 1e-9) -> specfun.QuadratureResult:
    """Direct iterated 2D quadrature of ``|Psi|^2`` over the plane.

    Independent of the analytic and separable paths; used to cross-check
    them.
    """
    res = specfun.integrate_2d(state.log_area_integrand, (0.0, math.inf), (0.0, math.pi), rtol=rtol)
    return res.scaled(math.log(2.0))


# ---------------------------------------------------------------------------
# Density grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    x1_min: float = -3.0
    x1_max: float = 3.0
    x2_min: float = -3.0
    x2_max: float = 3.0
    nx: int = 121
    ny: int = 121

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise DomainError("grid needs nx, ny >= 2")
        if not (self.x1_min < self.x1_max and self.x2_min < self.x2_max):
            raise DomainError("grid bounds must be increasing")

    @property
    def x1(self):
        return np.linspace(self.x1_min, self.x1_max, self.nx)

    @property
    def x2(self):
        return np.linspace(self.x2_min, self.x2_max, self.ny)

    @property
    def cell_area(self):
        return ((self.x1_max - self.x1_min) / (self.nx - 1)) * ((self.x2_max - self.x2_min) / (self.ny - 1))


@dataclass(frozen=True)
class DensityGrid:
    """Row-major ``|Psi|^2`` samples: ``values[j, i]`` is at ``(x1[i], x2[j])``.

    Cells sitting on a center are flagged and hold ``nan``.
    """

    grid: Grid
    values: np.ndarray
    flagged: np.ndarray
    normalized: bool

    def riemann_sum(self) -> float:
        return float(np.nansum(self.values) * self.grid.cell_area)


def _workers(workers):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("TWOCENTER_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def density_grid(state, grid: Grid, normalize: bool = False, workers: int | None = None,
                 center_tol: float = 1e-12) -> DensityGrid:
    """Sample ``|Psi|^2`` of a ground state or bound state on a grid.

    Parameters
    ----------
    state : object
        Anything with ``density(CartesianPoint)`` (and ``norm()`` when
        `normalize` is set).
    workers : int, optional
        Thread count for row evaluation; defaults to ``$TWOCENTER_WORKERS``
        or the CPU count.  The result does not depend on it.
    """
    x1 = grid.x1
    x2 = grid.x2

    def row(x2j):
        xx2 = np.full_like(x1, x2j)
        r1, r2 = geometry.distances(geometry.CartesianPoint(x1, xx2))
        bad = np.minimum(r1, r2) <= center_tol
        out = np.full(x1.shape, np.nan)
        ok = ~bad
        if np.any(ok):
            out[ok] = state.density(geometry.CartesianPoint(x1[ok], xx2[ok]))
        return out, bad

    n = _workers(workers)
    if n == 1:
        rows = [row(v) for v in x2]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(row, x2))
    values = np.vstack([r[0] for r in rows])
    flagged = np.vstack([r[1] for r in rows])
    if normalize:
        values = values / state.norm().value
    return DensityGrid(grid, values, flagged, normalize)
