"""Self-checks of the library's identities, with measured values.

Each check returns a :class:`CheckResult`; :func:`run_all` collects them.
The same checks back the ``verify`` command line report and the acceptance
tests.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import geometry, groundstates, model, spectrum, specfun
from .model import ModelParams

__all__ = ["CheckResult", "sample_points", "test_spinor", "CHECKS", "run_all"]

P = geometry.CartesianPoint


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0

    def to_dict(self):
        return asdict(self)


def _result(name, measured, tol, detail="", t0=None, le=True):
    ok = bool(measured <= tol) if le else bool(measured >= tol)
    return CheckResult(name, ok, float(measured), float(tol), detail,
                       0.0 if t0 is None else time.perf_counter() - t0)


def sample_points(n, rng, box=2.5, center_gap=0.1, axis_gap=0.1):
    """Random points in ``[-box, box]^2`` away from the centers and the axis."""
    xs, ys = [], []
    while len(xs) < n:
        x1 = rng.uniform(-box, box, 4 * n)
        x2 = rng.uniform(-box, box, 4 * n)
        r1, r2 = geometry.distances(P(x1, x2))
        ok = (np.minimum(r1, r2) > center_gap) & (np.abs(x2) > axis_gap)
        xs.extend(x1[ok])
        ys.extend(x2[ok])
    return P(np.array(xs[:n]), np.array(ys[:n]))


def test_spinor(x1, x2):
    """Smooth, rapidly decaying four-component test field."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    g = np.exp(-0.5 * ((x1 - 0.2) ** 2 + (x2 - 0.3) ** 2))
    return np.stack([(1 + x1 * x2) * g, (x1 - x2**2) * g, (0.5 + x2) * g, (x1**2 - 0.3) * g])


def _rel_norm(a, b):
    """``||a|| / ||b||`` over all components and sample points."""
    return float(np.linalg.norm(np.asarray(a)) / np.linalg.norm(np.asarray(b)))


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------

def check_round_trip(rng, n=1000):
    t0 = time.perf_counter()
    u = rng.uniform(1.001, 20, n)
    v = rng.uniform(-0.999, 0.999, n)
    br = rng.choice([-1, 1], n)
    e = geometry.to_elliptic(geometry.to_cartesian(geometry.EllipticPoint(u, v, br)))
    err = max(np.max(np.abs(e.u - u) / u), np.max(np.abs(e.v - v)), float(np.any(e.branch != br)))
    c = geometry.to_cartesian(geometry.EllipticPoint(u, v, br))
    c2 = geometry.to_cartesian(geometry.to_elliptic(c))
    scale = np.maximum(1.0, np.hypot(c.x1, c.x2))
    err = max(err, np.max(np.hypot(c2.x1 - c.x1, c2.x2 - c.x2) / scale))
    return _result("geometry.round_trip", err, 1e-12, f"{n} points, both branches", t0)


def check_s_matrix(rng, n=200):
    t0 = time.perf_counter()
    e = geometry.EllipticPoint(rng.uniform(1.001, 20, n), rng.uniform(-0.999, 0.999, n))
    S = geometry.s_matrix(e)
    err = max(np.abs(S @ S - np.eye(4)).max(), np.abs(S - np.swapaxes(S, -1, -2)).max())
    return _result("geometry.s_matrix_involution", err, 1e-13, "S^2 = I and S^T = S", t0)


def check_metric_identities(rng, n=200):
    t0 = time.perf_counter()
    u = rng.uniform(1.001, 20, n)
    v = rng.uniform(-0.999, 0.999, n)
    md = geometry.metric(geometry.EllipticPoint(u, v))
    r1, r2 = geometry.distances(geometry.to_cartesian(geometry.EllipticPoint(u, v)))
    err = max(
        np.abs(md.e_u1**2 * md.g_uu - 1).max(),
        np.abs(md.e_v2**2 * md.g_vv - 1).max(),
        np.abs(md.jacobian_weight / np.sqrt(md.g_uu * md.g_vv) - 1).max(),
        np.abs(r1 * r2 / (u * u - v * v) - 1).max(),
    )
    return _result("geometry.metric_identities", err, 1e-12,
                   "zweibein, area weight and r1 r2 = u^2 - v^2", t0)


def check_christoffel(rng, n=20, h=1e-5):
    t0 = time.perf_counter()
    u = rng.uniform(1.2, 5, n)
    v = rng.uniform(-0.8, 0.8, n)
    E = geometry.EllipticPoint
    g = geometry.metric(E(u, v))
    G = geometry.christoffel(E(u, v))
    du = lambda f: (f(E(u + h, v)) - f(E(u - h, v))) / (2 * h)
    dv = lambda f: (f(E(u, v + h)) - f(E(u, v - h))) / (2 * h)
    guu = lambda e: geometry.metric(e).g_uu
    gvv = lambda e: geometry.metric(e).g_vv
    res = [
        (du(guu) - 2 * G.u_uu * g.g_uu) / g.g_uu,
        (dv(guu) - 2 * G.u_uv * g.g_uu) / g.g_uu,
        (du(gvv) - 2 * G.v_uv * g.g_vv) / g.g_vv,
        (dv(gvv) - 2 * G.v_vv * g.g_vv) / g.g_vv,
        (G.v_uu * g.g_vv + G.u_uv * g.g_uu) / g.g_uu,
        (G.v_uv * g.g_vv + G.u_vv * g.g_uu) / g.g_vv,
    ]
    return _result("geometry.christoffel_compatibility", max(np.abs(r).max() for r in res), 1e-6,
                   "metric compatibility against central differences", t0)


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

def check_bessel_wronskian(rng, n=100):
    t0 = time.perf_counter()
    x = rng.uniform(0.1, 30, n)
    w = (specfun.bessel_i(0, x) * specfun.bessel_k(1, x) + specfun.bessel_i(1, x) * specfun.bessel_k(0, x))
    return _result("specfun.bessel_wronskian", np.abs(w * x - 1).max(), 1e-11, "I0 K1 + I1 K0 = 1/x", t0)


def check_legendre_relation(rng, n=50):
    t0 = time.perf_counter()
    m = rng.uniform(0.01, 0.99, n)
    h = math.pi / 2
    K, Kp = specfun.elliptic_f(h, m), specfun.elliptic_f(h, 1 - m)
    Ev, Ep = specfun.elliptic_e(h, m), specfun.elliptic_e(h, 1 - m)
    err = np.abs(Ev * Kp + Ep * K - K * Kp - math.pi / 2).max()
    return _result("specfun.legendre_relation", err, 1e-10, "complete elliptic integrals", t0)


def check_mathieu_wronskian(rng, n=40):
    t0 = time.perf_counter()
    err = 0.0
    for a, q in ((1.0, 0.5), (8.25, 3.0), (-2.0, 1.5)):
        z = rng.uniform(0, math.pi, n)
        c, dc = specfun.mathieu("even", a, q, z)
        s, ds = specfun.mathieu("odd", a, q, z)
        err = max(err, np.abs(c * ds - dc * s - 1).max())
    return _result("specfun.mathieu_wronskian", err, 1e-9, "C S' - C' S = 1", t0)


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------

def check_riccati(params: ModelParams, rng, n=100):
    """``|grad W|^2/2 +/- (hbar/2) lap W = V`` using the analytic derivatives of W."""
    t0 = time.perf_counter()
    p = sample_points(n, rng)
    W = model.superpotential(params)
    g = W.grad(p.x1, p.x2)
    lap = W.laplacian(p.x1, p.x2)
    err = 0.0
    for sector, sgn in ((0, 1), (2, -1)):
        V = model.potential(sector, p, params)
        r = 0.5 * (g[0] ** 2 + g[1] ** 2) + sgn * params.hbar / 2 * lap - V
        err = max(err, float(np.max(np.abs(r) / np.maximum(1.0, np.abs(V)))))
    return _result(f"model.riccati[{params.wtype}]", err, 1e-8, f"{n} points, both sectors", t0)


def check_superpotential_derivatives(params: ModelParams, rng, n=100, h=1e-3):
    """Analytic gradient and Laplacian of W against Richardson-extrapolated differences."""
    t0 = time.perf_counter()
    p = sample_points(n, rng)
    W = model.superpotential(params)
    f = W.value
    x1, x2 = p.x1, p.x2

    def fd(s):
        g1 = (f(x1 + s, x2) - f(x1 - s, x2)) / (2 * s)
        g2 = (f(x1, x2 + s) - f(x1, x2 - s)) / (2 * s)
        lap = (f(x1 + s, x2) + f(x1 - s, x2) + f(x1, x2 + s) + f(x1, x2 - s) - 4 * f(x1, x2)) / s**2
        return np.stack([g1, g2, lap])

    est = (4 * fd(h / 2) - fd(h)) / 3
    g = W.grad(x1, x2)
    exact = np.stack([g[0], g[1], W.laplacian(x1, x2)])
    err = float(np.max(np.abs(est - exact) / np.maximum(1.0, np.abs(exact))))
    return _result(f"model.superpotential_derivatives[{params.wtype}]", err, 1e-5,
                   f"Richardson from h={h} and h/2", t0)


def check_hj_separation(params: ModelParams, rng, n=200):
    t0 = time.perf_counter()
    W = model.TypeIISuperpotential(params)
    d, k = params.delta, params.kappa
    u = rng.uniform(1.001, 20, n)
    v = rng.uniform(-0.999, 0.999, n)
    ku = -(u * u - 1) * W.dF(u) ** 2 + 2 * (1 + d) * u
    kv = (1 - v * v) * W.dG(v) ** 2 + 2 * (d - 1) * v
    err = max(np.abs(ku - k).max(), np.abs(kv - k).max()) / max(1.0, abs(k))
    return _result(f"model.hj_separation[{params.wtype}]", err, 1e-10, "both separation constants", t0)


def _algebra_errors(params, p, h):
    ac = model.apply_anticommutator(test_spinor, p, params, h=h)
    H = np.zeros_like(ac)
    H[0] = model.apply_hamiltonian(0, test_spinor, p, params, h=h)
    H[1:3] = model.apply_hamiltonian(1, test_spinor, p, params, h=h)
    H[3] = model.apply_hamiltonian(2, test_spinor, p, params, h=h)
    psi = test_spinor(p.x1, p.x2)
    return ac - H, psi


def _nested(params, p, h):
    field = lambda which: (lambda a, b: model.apply_supercharge(which, test_spinor, P(a, b), params, h=h))
    return [model.apply_supercharge(w, field(w), p, params, h=h) for w in ("Q+", "Q-")]


def check_susy_algebra(params: ModelParams, rng, n=20, h=1e-3):
    """``{Q+, Q-} = 2 hbar H`` and ``Q^2 = 0`` with second-order convergence.

    Nilpotency nests two difference stencils, so its O(h^2) term is large
    next to the centers; the checked value is the Richardson combination of
    steps `h` and `h/2`, with the single-step value in the detail.
    """
    t0 = time.perf_counter()
    p = sample_points(n, rng, box=2.0)
    r1, psi = _algebra_errors(params, p, h)
    r2, _ = _algebra_errors(params, p, h / 2)
    e1, e2 = _rel_norm(r1, psi), _rel_norm(r2, psi)
    q1, q2 = _nested(params, p, h), _nested(params, p, h / 2)
    n1 = max(_rel_norm(a, psi) for a in q1)
    n2 = max(_rel_norm(b, psi) for b in q2)
    nr = max(_rel_norm((4 * b - a) / 3, psi) for a, b in zip(q1, q2))
    order = min(math.log2(e1 / e2), math.log2(n1 / n2))
    out = [
        _result(f"model.anticommutator[{params.wtype}]", e1, 5e-4, f"h={h}, {n} points", t0),
        _result(f"model.nilpotency[{params.wtype}]", nr, 1e-6,
                f"Richardson from h={h} and h/2, {n} points; single step {n1:.3e}", t0),
        _result(f"model.fd_convergence_order[{params.wtype}]", order, 1.8,
                f"errors {e1:.3e} -> {e2:.3e}, {n1:.3e} -> {n2:.3e} under halving", t0, le=False),
    ]
    return out


def check_s_conjugation(params: ModelParams, rng, n=20):
    """``S C S = Q`` on the upper half-plane for a smooth elliptic test field."""
    t0 = time.perf_counter()
    p = sample_points(n, rng, box=2.0)
    p = P(p.x1, np.abs(p.x2))
    e = geometry.to_elliptic(p)
    S = geometry.s_matrix(e)

    def phi(u, v):
        g = np.exp(-0.4 * u * u)
        return np.stack([g * (1 + v), g * u * v, g * (u - v * v), g * np.cos(v)])

    def cart(a, b):
        ee = geometry.to_elliptic(P(a, b))
        return np.einsum("...ij,j...->i...", geometry.s_matrix(ee), phi(ee.u, ee.v))

    err = 0.0
    for q, c in (("Q+", "C+"), ("Q-", "C-")):
        lhs = model.apply_supercharge(q, cart, p, params, h=1e-4)
        rhs = np.einsum("...ij,j...->i...", S, model.apply_elliptic_supercharge(c, phi, e, params))
        err = max(err, float(np.abs(lhs - rhs).max() / np.abs(lhs).max()))
    return _result(f"model.s_conjugation[{params.wtype}]", err, 1e-6, "upper half-plane", t0)


# ---------------------------------------------------------------------------
# ground states
# ---------------------------------------------------------------------------

def _zero_modes(params: ModelParams):
    if params.wtype == "I":
        return [groundstates.bosonic_zero_mode_I(params), groundstates.bosonic_zero_mode_I(params, 2),
                groundstates.fermionic_zero_mode_I(params)]
    return [groundstates.zero_mode_II(k, params) for k in groundstates.KINDS[2:]]


def check_annihilation(params: ModelParams, rng, n=50):
    """Both supercharges annihilate every zero mode (Cartesian frame)."""
    t0 = time.perf_counter()
    p = sample_points(n, rng)
    worst, detail = 0.0, []
    for st in _zero_modes(params):
        psi = st.spinor(p)
        for which in ("Q+", "Q-"):
            if st.is_fermionic:
                # Richardson on the central differences removes the O(h^2) term
                r1 = model.apply_supercharge(which, st.field(), p, params, h=1e-3)
                r2 = model.apply_supercharge(which, st.field(), p, params, h=5e-4)
                r = (4 * r2 - r1) / 3
            else:
                r = model.apply_supercharge(which, st.field(), p, params,
                                            grad=lambda a, b, st=st: st.gradient(P(a, b)))
            rel = float(np.abs(r).max() / np.abs(psi).max())
            worst = max(worst, rel)
            detail.append(f"{st.kind}/{st.layout}/{which}={rel:.1e}")
    return _result(f"groundstates.annihilation[{params.wtype}]", worst, 1e-6, "; ".join(detail), t0)


def check_elliptic_annihilation(params: ModelParams, rng, n=50):
    t0 = time.perf_counter()
    e = geometry.EllipticPoint(rng.uniform(1.01, 4, n), rng.uniform(-0.99, 0.99, n))
    worst = 0.0
    for st in _zero_modes(params):
        f = lambda u, v, st=st: st.spinor_elliptic(geometry.EllipticPoint(u, v))
        g = lambda u, v, st=st: st.elliptic_gradient(geometry.EllipticPoint(u, v))
        ref = np.abs(st.spinor_elliptic(e)).max()
        for which in ("C+", "C-"):
            r = model.apply_elliptic_supercharge(which, f, e, params, grad=g)
            worst = max(worst, float(np.abs(r).max() / ref))
    return _result(f"groundstates.elliptic_annihilation[{params.wtype}]", worst, 1e-8,
                   "analytic derivatives", t0)


def check_zero_energy(params: ModelParams, rng, n=50, h=1e-3):
    """Hamiltonian residual of every zero mode, Richardson-extrapolated."""
    t0 = time.perf_counter()
    p = sample_points(n, rng)
    worst = 0.0
    for st in _zero_modes(params):
        c = st.component
        sector = 0 if c == 0 else 2 if c == 3 else 1
        psi = st.spinor(p)
        ref = psi[c] if sector != 1 else psi[1:3]
        H = [model.apply_hamiltonian(sector, st.field(), p, params, h=s) for s in (h, h / 2)]
        r = (4 * H[1] - H[0]) / 3
        worst = max(worst, float(np.abs(r).max() / np.abs(ref).max()))
    return _result(f"groundstates.zero_energy[{params.wtype}]", worst, 1e-5,
                   f"Richardson from h={h} and h/2", t0)


def check_norm_cross(hbars=(1, 4, 10), deltas=(0.5, 1.0), rtol=1e-6):
    t0 = time.perf_counter()
    worst, detail = 0.0, []
    for d in deltas:
        for hb in hbars:
            prm = ModelParams(hbar=hb, delta=d)
            for st in (groundstates.bosonic_zero_mode_I(prm), groundstates.fermionic_zero_mode_I(prm)):
                an = st.norm().log_magnitude
                q = groundstates.norm_quadrature(st).log_magnitude
                rel = abs(math.expm1(q - an))
                worst = max(worst, rel)
                detail.append(f"{st.kind} d={d} hbar={hb}: {rel:.1e}")
    return _result("groundstates.analytic_vs_quadrature", worst, rtol, "; ".join(detail), t0)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def _bound_states(params):
    for n in range(3):
        for m in range(1, n + 2):
            for s in (1, -1):
                for parity in ("even", "odd"):
                    for coeffs in ((1.0, 0.0), (0.0, 1.0)):
                        bs = spectrum.assemble_bound_state(n, m, s, parity, coeffs, params)
                        if not bs.is_null():
                            yield bs


def check_separated_odes(hbar=1.0):
    t0 = time.perf_counter()
    params = ModelParams(hbar=hbar, delta=1.0)
    u = np.linspace(1.05, 6.0, 30)
    v = np.linspace(-0.95, 0.95, 30)
    x = 0.5 * np.arccosh(u)
    worst = 0.0
    for n in range(3):
        for m in range(1, n + 2):
            for s in (1, -1):
                worst = max(worst, spectrum.u_ode_residual(n, m, s, u, params),
                            spectrum.razavy_residual(n, m, s, x, params))
                for parity in ("even", "odd"):
                    for coeffs in ((1.0, 0.0), (0.0, 1.0)):
                        bs = spectrum.BoundState(spectrum.spectrum_entry(n, m, s, parity, params),
                                                 params, coeffs)
                        if bs.is_null():
                            continue
                        worst = max(worst, spectrum.v_ode_residual(n, m, s, parity, v, params, coeffs))
    return _result("spectrum.separated_ode_residuals", worst, 1e-7,
                   "u, Razavy and v equations for n <= 2, both sectors and parities", t0)


def check_bound_state_energy(rng, hbar=1.0, n=40, h=1e-3):
    """2D stencil residual of every bound state, Richardson-extrapolated."""
    t0 = time.perf_counter()
    params = ModelParams(hbar=hbar, delta=1.0)
    p = sample_points(n, rng, center_gap=0.05)
    worst, count = 0.0, 0
    for bs in _bound_states(params):
        sector = 0 if bs.entry.sector_sign > 0 else 2
        psi = bs.spinor(p)[bs.component]
        H1, H2 = (model.apply_hamiltonian(sector, bs.field(), p, params, h=s) for s in (h, h / 2))
        H = (4 * H2 - H1) / 3
        worst = max(worst, float(np.abs(H - bs.energy * psi).max() / np.abs(psi).max()))
        count += 1
    return _result("spectrum.hamiltonian_residual", worst, 1e-4,
                   f"{count} non-null states, Richardson from h={h} and h/2, r > 0.05, |x2| > 0.1", t0)


def check_partner_energy(rng, hbar=1.0, n=40, h=1e-3):
    t0 = time.perf_counter()
    params = ModelParams(hbar=hbar, delta=1.0)
    p = sample_points(n, rng, center_gap=0.05)
    worst = 0.0
    for bs in _bound_states(params):
        if bs.energy == 0 or bs.coeffs != (1.0, 0.0):
            continue
        pf = spectrum.fermionic_partner(bs)
        chi = pf(p.x1, p.x2)[1:3]
        H1 = model.apply_hamiltonian(1, pf, p, params, h=h)
        H2 = model.apply_hamiltonian(1, pf, p, params, h=h / 2)
        H = (4 * H2 - H1) / 3
        worst = max(worst, float(np.abs(H - bs.energy * chi).max() / np.abs(chi).max()))
    return _result("spectrum.partner_residual", worst, 1e-3,
                   f"sector-1 Hamiltonian on Q psi, Richardson from h={h} and h/2", t0)


def check_parameter_maps(nmax=10):
    t0 = time.perf_counter()
    err = 0.0
    for hb in (0.5, 1.0, 2.0):
        for d in (0.3, 1.0):
            prm = ModelParams(hbar=hb, delta=d)
            for n in range(nmax + 1):
                E = spectrum.qes_energy("razavy_u", n, prm)
                err = max(err, abs(spectrum.razavy_params(E, 0.0, 1, prm).M - (n + 1)) / (n + 1))
    return _result("spectrum.razavy_M_integer", err, 1e-12, "M = n + 1 at the QES energies", t0)


# ---------------------------------------------------------------------------

def run_all(params: ModelParams | None = None, seed: int = 12345, quick: bool = False):
    """Run every check; `params` selects the superpotential-specific ones."""
    if params is None:
        params = ModelParams()
    rng = np.random.default_rng(seed)
    out = [
        check_round_trip(rng),
        check_s_matrix(rng),
        check_metric_identities(rng),
        check_christoffel(rng),
        check_bessel_wronskian(rng),
        check_legendre_relation(rng),
        check_mathieu_wronskian(rng),
        check_riccati(params, rng),
        check_superpotential_derivatives(params, rng),
    ]
    if params.wtype != "I":
        out.append(check_hj_separation(params, rng))
    out.extend(check_susy_algebra(params, rng))
    out.append(check_s_conjugation(params, rng))
    if params.wtype != "I" or params.is_simple:
        out.append(check_annihilation(params, rng))
        out.append(check_elliptic_annihilation(params, rng))
        out.append(check_zero_energy(params, rng))
    if not quick:
        out.append(check_norm_cross())
        out.append(check_separated_odes(params.hbar))
        out.append(check_bound_state_energy(rng, params.hbar))
        out.append(check_partner_energy(rng, params.hbar))
    out.append(check_parameter_maps())
    return out


CHECKS = [name for name in dir() if name.startswith("check_")]
