"""Special functions and quadrature kernels.

Modified Bessel functions ``I_0, I_1, K_0, K_1`` (with log-domain variants),
incomplete elliptic integrals in the *parameter* convention ``m = k**2``,
Mathieu functions normalized by their initial values at ``z = 0``, and an
adaptive Gauss-Kronrod integrator that can work with log-integrands so that
results anywhere between 1e-300 and 1e+300 (and beyond) are representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special
from scipy.integrate import solve_ivp

from .errors import DivergenceError, DomainError, NumericalError

__all__ = [
    "QuadratureResult",
    "bessel_i",
    "bessel_k",
    "log_bessel_i",
    "log_bessel_k",
    "elliptic_f",
    "elliptic_e",
    "mathieu",
    "integrate",
    "integrate_2d",
]

LN10 = math.log(10.0)
EPS = float(np.finfo(float).eps)


# ---------------------------------------------------------------------------
# Modified Bessel functions
# ---------------------------------------------------------------------------

def _check_order(order):
    if order not in (0, 1):
        raise DomainError(f"only orders 0 and 1 are supported, got {order!r}")


def bessel_i(order, x):
    """Modified Bessel function of the first kind, ``I_0`` or ``I_1``.

    Overflows to ``inf`` for ``x`` beyond ~713; use :func:`log_bessel_i`
    there.
    """
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("bessel_i requires finite x >= 0")
    out = special.i0(x) if order == 0 else special.i1(x)
    return out[()] if out.ndim == 0 else out


def log_bessel_i(order, x):
    """``log I_order(x)``, computed from the exponentially scaled function."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("log_bessel_i requires finite x >= 0")
    scaled = special.i0e(x) if order == 0 else special.i1e(x)
    with np.errstate(divide="ignore"):
        out = np.log(scaled) + x
    return out[()] if out.ndim == 0 else out


def bessel_k(order, x):
    """Modified Bessel function of the second kind, ``K_0`` or ``K_1``."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise DomainError("bessel_k requires finite x > 0 (K diverges at 0)")
    out = special.k0(x) if order == 0 else special.k1(x)
    return out[()] if out.ndim == 0 else out


def log_bessel_k(order, x):
    """``log K_order(x)``; stays finite long after ``K`` itself underflows."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise DomainError("log_bessel_k requires finite x > 0")
    scaled = special.k0e(x) if order == 0 else special.k1e(x)
    out = np.log(scaled) - x
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Incomplete elliptic integrals, parameter convention m = k^2
# ---------------------------------------------------------------------------

def _elliptic_args(phi, m):
    phi = np.asarray(phi, dtype=float)
    m = np.asarray(m, dtype=float)
    phi, m = np.broadcast_arrays(phi, m)
    big = m > 1.0
    if np.any(big):
        limit = np.arcsin(1.0 / np.sqrt(m[big]))
        if np.any(np.abs(phi[big]) > limit * (1.0 + 1e-14)):
            raise DomainError("m*sin(phi)**2 > 1: elliptic integral is complex")
    return phi, m, big


def elliptic_f(phi, m):
    """Incomplete elliptic integral of the first kind ``F(phi | m)``.

    ``m`` is the *parameter* (``m = k**2``), as in
    ``scipy.special.ellipkinc``.  For ``m > 1`` the
    reciprocal-modulus transformation is applied, which scipy does not do.
    """
    phi, m, big = _elliptic_args(phi, m)
    out = np.empty(phi.shape)
    small = ~big
    out[small] = special.ellipkinc(phi[small], m[small])
    if np.any(big):
        mb = m[big]
        sb = np.sqrt(mb)
        beta = np.arcsin(np.clip(sb * np.sin(phi[big]), -1.0, 1.0))
        out[big] = special.ellipkinc(beta, 1.0 / mb) / sb
    return out[()] if out.ndim == 0 else out


def elliptic_e(phi, m):
    """Incomplete elliptic integral of the second kind ``E(phi | m)``."""
    phi, m, big = _elliptic_args(phi, m)
    out = np.empty(phi.shape)
    small = ~big
    out[small] = special.ellipeinc(phi[small], m[small])
    if np.any(big):
        mb = m[big]
        sb = np.sqrt(mb)
        beta = np.arcsin(np.clip(sb * np.sin(phi[big]), -1.0, 1.0))
        inv = 1.0 / mb
        out[big] = sb * special.ellipeinc(beta, inv) + (1.0 - mb) / sb * special.ellipkinc(beta, inv)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Mathieu functions by initial-value integration
# ---------------------------------------------------------------------------

_MATHIEU_RTOL = 1e-13
_MATHIEU_ATOL = 1e-15


def _mathieu_rhs(z, y, a, q):
    return (y[1], -(a - 2.0 * q * math.cos(2.0 * z)) * y[0])


@lru_cache(maxsize=256)
def _mathieu_solution(parity, a, q, span):
    y0 = (1.0, 0.0) if parity == "even" else (0.0, 1.0)
    # a = q = 0 makes the step-size estimator divide 0 by 0; harmless
    with np.errstate(invalid="ignore", divide="ignore"):
        sol = solve_ivp(
            _mathieu_rhs, (0.0, span), y0, method="DOP853",
            rtol=_MATHIEU_RTOL, atol=_MATHIEU_ATOL, dense_output=True, args=(a, q),
        )
    if not sol.success:
        raise NumericalError(
            "Mathieu integration failed", message=sol.message, nfev=sol.nfev,
            parity=parity, a=a, q=q, span=span,
        )
    return sol.sol


def mathieu(parity, a, q, z):
    """Solution of ``w'' + (a - 2 q cos 2z) w = 0`` and its derivative.

    The even solution has ``w(0) = 1, w'(0) = 0``; the odd one has
    ``w(0) = 0, w'(0) = 1``.  No Floquet normalization is applied.

    Parameters
    ----------
    parity : {"even", "odd"}
    a, q : float
    z : float or array_like

    Returns
    -------
    value, derivative : float or ndarray
    """
    if parity not in ("even", "odd"):
        raise DomainError(f"parity must be 'even' or 'odd', got {parity!r}")
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError("mathieu requires finite z")
    az = np.abs(z)
    zmax = float(az.max()) if az.size else 0.0
    # quantized span keeps the cache small; pi covers every arccos argument
    span = math.pi * max(1, math.ceil(zmax / math.pi))
    sol = _mathieu_solution(parity, float(a), float(q), span)
    w, dw = sol(az.ravel())
    w = w.reshape(az.shape)
    dw = dw.reshape(az.shape)
    neg = z < 0
    if parity == "even":
        dw = np.where(neg, -dw, dw)
    else:
        w = np.where(neg, -w, w)
    if w.ndim == 0:
        return float(w), float(dw)
    return w, dw


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod quadrature with log-domain bookkeeping
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
# symmetric 15-point layout: -x0..-x6, 0, x6..x0
_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[:7][::-1]])
_W15 = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[:7][::-1]])
_W7 = np.zeros(15)
_W7[[1, 3, 5]] = _WG[:3]
_W7[[13, 11, 9]] = _WG[:3]
_W7[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureResult:
    """Integral stored as ``sign * exp(log_magnitude)``.

    ``log_abs_error`` follows the same convention for the absolute error
    estimate, so the estimate itself is ``exp(log_abs_error) >= 0``.
    """

    log_magnitude: float
    sign: int
    log_abs_error: float
    evaluations: int

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude) if self.log_magnitude < 709.7 else self.sign * math.inf

    @property
    def abs_error_estimate(self) -> float:
        return math.exp(self.log_abs_error) if self.log_abs_error < 709.7 else math.inf

    @property
    def log10_magnitude(self) -> float:
        return self.log_magnitude / LN10

    @property
    def relative_error(self) -> float:
        if self.sign == 0:
            return 0.0 if self.log_abs_error == -math.inf else math.inf
        return math.exp(self.log_abs_error - self.log_magnitude)

    @classmethod
    def from_value(cls, value, abs_error=0.0, evaluations=0):
        sign = int(np.sign(value))
        logm = math.log(abs(value)) if value != 0 else -math.inf
        loge = math.log(abs_error) if abs_error > 0 else -math.inf
        return cls(logm, sign, loge, evaluations)

    def scaled(self, log_factor: float) -> "QuadratureResult":
        """Multiply by ``exp(log_factor)``."""
        return QuadratureResult(self.log_magnitude + log_factor, self.sign,
                                self.log_abs_error + log_factor, self.evaluations)


def _transform(a, b, singular):
    """Return (lo, hi, x_of_t, log_jacobian_of_t) for the singularity flags."""
    left, right = singular
    if left and right:
        if not math.isfinite(b):
            raise DomainError("a right-endpoint singularity needs a finite endpoint")
        c, r = 0.5 * (a + b), 0.5 * (b - a)
        return 0.0, math.pi, (lambda t: c - r * np.cos(t)), (lambda t: np.log(r * np.sin(t)))
    if left:
        if a == 1.0:
            hi = math.inf if not math.isfinite(b) else math.acosh(b)
            return 0.0, hi, np.cosh, (lambda t: np.log(np.sinh(t)))
        hi = math.inf if not math.isfinite(b) else math.sqrt(b - a)
        return 0.0, hi, (lambda t: a + t * t), (lambda t: np.log(2.0 * t))
    if right:
        if not math.isfinite(b):
            raise DomainError("a right-endpoint singularity needs a finite endpoint")
        return 0.0, math.sqrt(b - a), (lambda t: b - t * t), (lambda t: np.log(2.0 * t))
    return a, b, (lambda t: t), None


def _find_cutoff(logg, lo, decades):
    """Scan outward until ``logg`` has dropped `decades` below its maximum."""
    drop = decades * LN10
    running = -math.inf
    small_run = 0
    last = None
    for k in range(64):
        t = lo + 0.125 * 2.0 ** k
        val = float(logg(np.array([t]))[0])
        if math.isnan(val) or val == math.inf:
            raise DivergenceError("integrand grows without bound: integral diverges", t=t)
        running = max(running, val)
        decreasing = last is None or val <= last
        if val < running - drop and decreasing:
            small_run += 1
            if small_run == 2:
                return t
        else:
            small_run = 0
        last = val
    raise DivergenceError("integrand does not decay: integral diverges", running_max=running)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    singular: Sequence[bool] = (False, False),
    *,
    log_integrand: bool = False,
    rtol: float = 1e-9,
    atol: float = 0.0,
    max_levels: int = 60,
    decades: float = 40.0,
    max_evaluations: int = 2_000_000,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod (7/15) quadrature of ``f`` over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorized integrand.  With ``log_integrand=True`` it must return
        ``log f(x)`` (the integrand is then assumed positive).
    a, b : float
        Endpoints, ``a < b``; ``b`` may be ``inf``.
    singular : (bool, bool)
        Inverse-square-root singularities at the left/right endpoint.  They
        are removed by substitution: ``x = cosh(mu)`` when ``a == 1`` and only
        the left end is flagged, ``x = (a+b)/2 - (b-a)/2 cos(theta)`` when
        both ends are flagged, and ``x = a + t**2`` (``b - t**2``) otherwise.
    rtol, atol : float
        Target accuracy: ``error <= max(atol, rtol * |integral|)``.
    max_levels : int
        Maximum number of bisections of any sub-interval.
    decades : float
        For infinite ranges, the range is truncated where the integrand has
        fallen this many decades below its running maximum.

    Returns
    -------
    QuadratureResult

    Raises
    ------
    DivergenceError
        If an infinite range is requested and the integrand does not decay.
    NumericalError
        If the tolerance is not reached within ``max_levels`` bisections.
    """
    a = float(a)
    b = float(b)
    if not math.isfinite(a) or not b > a:
        raise DomainError("integrate needs finite a and b > a")
    lo, hi, x_of_t, logjac = _transform(a, b, tuple(bool(s) for s in singular))

    def logg(t):
        x = x_of_t(t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if log_integrand:
                val = np.asarray(f(x), dtype=float)
            else:
                val = np.log(np.abs(np.asarray(f(x), dtype=float)))
            if logjac is not None:
                val = val + logjac(t)
        return val

    def signed(t):
        x = x_of_t(t)
        val = np.asarray(f(x), dtype=float)
        if logjac is not None:
            with np.errstate(divide="ignore"):
                val = val * np.exp(logjac(t))
        return val

    evaluations = 0
    if not math.isfinite(hi):
        hi = _find_cutoff(logg, lo, decades)

    total_len = hi - lo

    def evaluate(los, his):
        nonlocal evaluations
        c = 0.5 * (los + his)
        r = 0.5 * (his - los)
        t = c[:, None] + r[:, None] * _NODES[None, :]
        evaluations += t.size
        if log_integrand:
            lv = logg(t.ravel()).reshape(t.shape)
            if np.any(np.isnan(lv)) or np.any(lv == math.inf):
                raise NumericalError("log-integrand returned nan/+inf", evaluations=evaluations)
            s = lv.max(axis=1)
            amp = np.where(np.isfinite(lv), np.abs(lv), 0.0).max(axis=1)
            safe = np.where(np.isfinite(s), s, 0.0)
            vals = np.exp(lv - safe[:, None])
            s = np.where(np.isfinite(s), s, -math.inf)
        else:
            vals = signed(t.ravel()).reshape(t.shape)
            if not np.all(np.isfinite(vals)):
                raise NumericalError("integrand returned a non-finite value", evaluations=evaluations)
            s = np.zeros(len(los))
            amp = np.zeros(len(los))
        k15 = r * (vals @ _W15)
        err = np.abs(k15 - r * (vals @ _W7))
        return s, k15, err, amp

    los = np.array([lo])
    his = np.array([hi])
    levels = np.array([0])
    scales, ks, errs, amps = evaluate(los, his)
    while True:
        ref = scales.max()
        if ref == -math.inf:
            return QuadratureResult(-math.inf, 0, -math.inf, evaluations)
        w = np.exp(scales - ref)
        total = float(np.sum(w * ks))
        tot_err = float(np.sum(w * errs))
        # a log-integrand of size L carries an absolute error ~ eps * L, so
        # each interval has a relative noise floor it cannot be refined below
        noise = 16 * EPS * float(np.sum(w * np.abs(ks) * amps))
        tol = max(rtol * abs(total), noise)
        if atol > 0:
            tol = max(tol, math.exp(math.log(atol) - ref))
        if tot_err <= tol:
            break
        # local criterion: each interval is entitled to its share of the tolerance
        split = w * errs > np.maximum(tol * (his - los) / total_len, 16 * EPS * w * np.abs(ks) * amps)
        if not np.any(split):
            split = w * errs >= (w * errs).max()
        if np.any(levels[split] >= max_levels) or evaluations > max_evaluations:
            raise NumericalError(
                "adaptive quadrature did not converge", evaluations=evaluations,
                error_estimate=tot_err * math.exp(ref), integral=total * math.exp(ref),
            )
        mids = 0.5 * (los[split] + his[split])
        new_lo = np.concatenate([los[split], mids])
        new_hi = np.concatenate([mids, his[split]])
        new_s, new_k, new_e, new_a = evaluate(new_lo, new_hi)
        keep = ~split
        los = np.concatenate([los[keep], new_lo])
        his = np.concatenate([his[keep], new_hi])
        levels = np.concatenate([levels[keep], levels[split] + 1, levels[split] + 1])
        scales = np.concatenate([scales[keep], new_s])
        ks = np.concatenate([ks[keep], new_k])
        errs = np.concatenate([errs[keep], new_e])
        amps = np.concatenate([amps[keep], new_a])

    ref = float(ref)
    log_err = math.log(tot_err) + ref if tot_err > 0 else -math.inf
    if total == 0.0:
        return QuadratureResult(-math.inf, 0, log_err, evaluations)
    sign = 1 if total > 0 else -1
    return QuadratureResult(math.log(abs(total)) + ref, sign, log_err, evaluations)


def integrate_2d(
    logf: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    x_singular: Sequence[bool] = (False, False),
    y_singular: Sequence[bool] = (False, False),
    *,
    rtol: float = 1e-9,
    decades: float = 40.0,
) -> QuadratureResult:
    """Iterated adaptive quadrature of a positive integrand given as a log.

    ``logf(x, y)`` receives broadcastable arrays.  The inner (``y``)
    integral is computed to ``rtol / 10`` for every outer node.
    """
    evaluations = 0

    def outer(xs):
        nonlocal evaluations
        out = np.empty(len(xs))
        for i, x in enumerate(xs):
            res = integrate(lambda y, x=x: logf(np.full_like(y, x), y), *y_range, y_singular,
                            log_integrand=True, rtol=rtol / 10.0, decades=decades)
            evaluations += res.evaluations
            out[i] = res.log_magnitude if res.sign > 0 else -math.inf
        return out

    res = integrate(outer, *x_range, x_singular, log_integrand=True, rtol=rtol, decades=decades)
    return QuadratureResult(res.log_magnitude, res.sign, res.log_abs_error, evaluations)
