import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twocenter_susy import groundstates, model, spectrum
from twocenter_susy.errors import DomainError
from twocenter_susy.geometry import CartesianPoint as P
from twocenter_susy.model import ModelParams
from twocenter_susy.verify import sample_points

EQ = ModelParams(hbar=1.0, delta=1.0)
LEVELS = [(n, m) for n in range(3) for m in range(1, n + 2)]


# -- energies ----------------------------------------------------------------

@pytest.mark.parametrize("branch", ["razavy_u", "wh_v"])
def test_ground_level_is_zero(branch):
    assert spectrum.qes_energy(branch, 0, ModelParams(hbar=0.7, delta=0.4)) == 0.0


def test_equal_strength_levels_exact():
    E = [spectrum.qes_energy_exact("razavy_u", n, Fraction(1), Fraction(1)) for n in range(3)]
    assert E == [Fraction(0), Fraction(6), Fraction(64, 9)]
    assert [spectrum.qes_energy("razavy_u", n, EQ) for n in range(3)] == pytest.approx([0, 6, 64 / 9], rel=1e-15)


def test_energy_scales_with_hbar():
    for h in (Fraction(1, 2), Fraction(3)):
        assert spectrum.qes_energy_exact("razavy_u", 1, Fraction(1), h) == Fraction(6) / h**2


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0.05, 1.0))
def test_threshold_monotone(hbar, delta):
    p = ModelParams(hbar=hbar, delta=delta)
    limit = 2 * (1 + delta) ** 2 / hbar**2
    E = [spectrum.qes_energy("razavy_u", n, p) for n in range(51)]
    assert all(b > a for a, b in zip(E, E[1:]))
    assert E[-1] < limit
    assert E[-1] == pytest.approx(limit * (1 - 1 / 51**2), rel=1e-14)


def test_threshold_limit_exact():
    d, h = Fraction(1, 2), Fraction(1)
    limit = 2 * (1 + d) ** 2 / h**2
    assert limit - spectrum.qes_energy_exact("razavy_u", 10**6, d, h) == limit / (10**6 + 1) ** 2


def test_bad_branch_and_level():
    with pytest.raises(DomainError):
        spectrum.qes_energy("other", 1, EQ)
    with pytest.raises(DomainError):
        spectrum.qes_energy("razavy_u", -1, EQ)


# -- parameter maps ----------------------------------------------------------

def test_razavy_params_examples():
    assert spectrum.razavy_params(0.0, 0.0, 1, EQ).M == 1.0
    assert spectrum.razavy_params(6.0, 0.0, "+", EQ).M == pytest.approx(2.0, rel=1e-15)
    assert spectrum.razavy_params(0.0, 0.0, 1, EQ).lam == pytest.approx(65.0, rel=1e-15)
    assert spectrum.razavy_params(0.0, 0.0, -1, EQ).zeta == pytest.approx(-8.0, rel=1e-15)


def test_razavy_params_threshold():
    with pytest.raises(DomainError):
        spectrum.razavy_params(8.0, 0.0, 1, EQ)


@pytest.mark.parametrize("delta", [0.3, 0.5, 1.0])
@pytest.mark.parametrize("hbar", [0.5, 1.0, 2.0])
def test_razavy_m_integer(hbar, delta):
    p = ModelParams(hbar=hbar, delta=delta)
    for n in range(11):
        E = spectrum.qes_energy("razavy_u", n, p)
        assert spectrum.razavy_params(E, 0.0, 1, p).M == pytest.approx(n + 1, rel=1e-12)


def test_wh_params_examples():
    p = ModelParams(hbar=1.0, delta=0.5)
    w = spectrum.wh_params(0.0, 0.0, 1, p)
    assert w.N == pytest.approx(1.0) and w.mu == pytest.approx(5.0)
    assert not w.mathieu_limit and not w.complex_N
    assert spectrum.wh_params(0.0, 0.0, 1, EQ).mathieu_limit


def test_wh_params_between_thresholds_flagged():
    p = ModelParams(hbar=1.0, delta=0.5)
    # 2(1-d)^2 = 0.5 is the lower threshold
    w = spectrum.wh_params(1.0, 0.0, 1, p)
    assert w.complex_N
    assert isinstance(w.N, complex)


def test_sector_sign_spellings():
    a = spectrum.razavy_params(1.0, 0.3, "-", EQ)
    assert a == spectrum.razavy_params(1.0, 0.3, -1, EQ)
    with pytest.raises(DomainError):
        spectrum.razavy_params(1.0, 0.3, 0, EQ)


# -- symmetry eigenvalues and Mathieu parameters -------------------------------

def test_symmetry_eigenvalue_examples():
    assert spectrum.symmetry_eigenvalue(0, 1, 1, 1.7) == 0.0
    assert spectrum.symmetry_eigenvalue(0, 1, -1, 1.7) == 0.0
    h = 1.3
    assert spectrum.symmetry_eigenvalue(1, 1, 1, h) == pytest.approx(-h * h / 4 - 12 / h**2 - 2)
    assert spectrum.symmetry_eigenvalue(2, 3, 1, 1.0) == pytest.approx(-0.5 - 128 / 9 + math.sqrt(265) / 6,
                                                                      rel=1e-15)


@pytest.mark.parametrize("hbar", [1.0, 2.0, 4.0])
@pytest.mark.parametrize("s", [1, -1])
def test_symmetry_eigenvalues_distinct(hbar, s):
    for n in range(3):
        vals = [spectrum.symmetry_eigenvalue(n, m, s, hbar) for m in range(1, n + 2)]
        assert len(vals) == n + 1
        for a, b in itertools.combinations(vals, 2):
            assert abs(a - b) > 1e-8


@pytest.mark.parametrize("n,m", LEVELS)
@pytest.mark.parametrize("hbar", [0.8, 1.0, 2.0])
def test_symmetry_eigenvalue_from_razavy(n, m, hbar):
    # inverting the Razavy eigenvalue recovers the listed value
    p = ModelParams(hbar=hbar, delta=1.0)
    for s in (1, -1):
        E = spectrum.qes_energy("razavy_u", n, p)
        I = spectrum.symmetry_eigenvalue(n, m, s, hbar)
        lam = spectrum.razavy_params(E, I, s, p).lam
        assert spectrum.symmetry_eigenvalue_from_lambda(lam, n, hbar) == pytest.approx(I, abs=1e-10)


def test_indices_checked():
    for n, m in ((3, 1), (1, 3), (0, 0), (-1, 1)):
        with pytest.raises(DomainError):
            spectrum.symmetry_eigenvalue(n, m, 1, 1.0)


def test_mathieu_params_examples():
    assert spectrum.mathieu_params(0, 1, 1, 1.0) == (0.0, 0.0)
    assert spectrum.mathieu_params(0, 1, -1, 2.0) == (0.0, 0.0)
    assert spectrum.mathieu_params(1, 1, 1, 1.0).a == pytest.approx(8.25, rel=1e-15)
    assert spectrum.mathieu_params(1, 1, 1, 1.0).q == pytest.approx(3.0)
    assert spectrum.mathieu_params(2, 1, 1, 1.0).q == pytest.approx(32 / 9)


@pytest.mark.parametrize("hbar", [1.0, 2.0])
@pytest.mark.parametrize("n,m", LEVELS)
def test_mathieu_params_consistency(hbar, n, m):
    p = ModelParams(hbar=hbar, delta=1.0)
    for s in (1, -1):
        listed = spectrum.mathieu_params(n, m, s, hbar)
        E = spectrum.qes_energy("razavy_u", n, p)
        I = spectrum.symmetry_eigenvalue(n, m, s, hbar)
        derived = spectrum.mathieu_params_from_levels(E, I, hbar)
        assert listed.a == pytest.approx(derived.a, rel=1e-13, abs=1e-13)
        assert listed.q == pytest.approx(derived.q, rel=1e-13, abs=1e-15)


# -- eigenfunctions ----------------------------------------------------------

def test_eta_examples():
    p = ModelParams(hbar=2.0, delta=1.0)
    assert spectrum.razavy_eigenfunction(0, 1, 1, 1.0, p) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert spectrum.razavy_eigenfunction(2, 1, 1, 1.0, p) == 0.0
    with pytest.raises(DomainError):
        spectrum.razavy_eigenfunction(0, 1, 1, 0.5, p)
    with pytest.raises(DomainError):
        spectrum.razavy_eigenfunction(0, 1, 1, 2.0, ModelParams(hbar=2.0, delta=0.5))


@pytest.mark.parametrize("n,m", LEVELS)
def test_eta_derivatives_against_fd(n, m):
    u = np.linspace(1.3, 4.0, 12)
    h = 1e-5
    for s in (1, -1):
        f = lambda x: spectrum.razavy_eigenfunction(n, m, s, x, EQ)
        _, d1, d2 = spectrum.razavy_eigenfunction(n, m, s, u, EQ, derivatives=2)
        scale = np.abs(f(u)).max() + np.abs(d1).max()
        np.testing.assert_allclose((f(u + h) - f(u - h)) / (2 * h), d1, atol=1e-8 * scale)
        np.testing.assert_allclose((f(u + h) - 2 * f(u) + f(u - h)) / h**2, d2, atol=1e-4 * scale)


def test_xi_examples():
    assert spectrum.xi_factor(1, 1, 1, "odd", 0.0, (1.0, 0.0), EQ) == pytest.approx(0.0, abs=1e-15)
    a, q = spectrum.mathieu_params(1, 1, 1, 1.0)
    from twocenter_susy import specfun

    even = spectrum.xi_factor(1, 1, 1, "even", 0.0, (1.0, 0.0), EQ)
    assert even == pytest.approx(specfun.mathieu("even", a, q, math.pi / 2)[0], rel=1e-14)
    with pytest.raises(DomainError):
        spectrum.xi_factor(1, 1, 1, "even", 1.2, (1.0, 0.0), EQ)


@pytest.mark.parametrize("parity,sign", [("even", 1), ("odd", -1)])
def test_xi_parity_exact(parity, sign):
    v = np.linspace(0.05, 0.95, 10)
    for coeffs in ((1.0, 0.0), (0.0, 1.0), (0.7, -0.4)):
        a = spectrum.xi_factor(2, 2, 1, parity, v, coeffs, EQ)
        b = spectrum.xi_factor(2, 2, 1, parity, -v, coeffs, EQ)
        np.testing.assert_array_equal(b, sign * a)


@pytest.mark.parametrize("n,m", LEVELS)
@pytest.mark.parametrize("hbar", [1.0, 1.7])
def test_separated_ode_residuals(n, m, hbar):
    p = ModelParams(hbar=hbar, delta=1.0)
    u = np.linspace(1.05, 5.0, 30)
    x = np.arccosh(u) / 2
    v = np.linspace(-0.95, 0.95, 30)
    for s in (1, -1):
        assert spectrum.u_ode_residual(n, m, s, u, p) <= 1e-9
        assert spectrum.razavy_residual(n, m, s, x, p) <= 1e-9
        for parity in ("even", "odd"):
            for coeffs in ((1.0, 0.0), (0.0, 1.0)):
                if (n, parity, coeffs) == (0, "odd", (1.0, 0.0)):
                    continue  # identically zero, see test_null_state
                assert spectrum.v_ode_residual(n, m, s, parity, v, p, coeffs) <= 1e-7


def test_spectrum_table_entries():
    table = spectrum.spectrum_table(EQ)
    assert len(table) == 6 * 2 * 2
    assert {round(e.E, 12) for e in table} == {0.0, 6.0, round(64 / 9, 12)}
    for e in table:
        assert e.razavy.M == pytest.approx(e.n + 1, rel=1e-12)
        assert e.sector == (0 if e.sector_sign > 0 else 2)
    with pytest.raises(DomainError):
        spectrum.spectrum_table(ModelParams(hbar=1.0, delta=0.5))


# -- bound states ------------------------------------------------------------

def test_null_state():
    bs = spectrum.assemble_bound_state(0, 1, 1, "odd", params=EQ)
    assert bs.is_null()
    assert not spectrum.assemble_bound_state(0, 1, 1, "even", params=EQ).is_null()
    assert not spectrum.assemble_bound_state(1, 1, 1, "odd", params=EQ).is_null()


def test_ground_bound_state_is_zero_mode():
    bs = spectrum.assemble_bound_state(0, 1, 1, "even", params=EQ)
    zm = groundstates.bosonic_zero_mode_I(EQ)
    rng = np.random.default_rng(1)
    pts = P(rng.uniform(-3, 3, 100), rng.uniform(-3, 3, 100))
    ratio = bs.spinor(pts)[0] / zm.spinor(pts)[0]
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-10)


def test_bound_state_components():
    pts = P(np.array([0.3]), np.array([0.8]))
    plus = spectrum.assemble_bound_state(1, 1, 1, "even", params=EQ).spinor(pts)
    minus = spectrum.assemble_bound_state(1, 1, -1, "even", params=EQ).spinor(pts)
    assert plus[0, 0] != 0 and not plus[1:].any()
    assert minus[3, 0] != 0 and not minus[:3].any()


@pytest.mark.parametrize("parity,sign", [("even", 1), ("odd", -1)])
def test_bound_state_parity(parity, sign):
    rng = np.random.default_rng(6)
    x1, x2 = rng.uniform(0.05, 3, 40), rng.uniform(-3, 3, 40)
    bs = spectrum.assemble_bound_state(2, 2, 1, parity, params=EQ)
    a = bs.spinor(P(x1, x2))[0]
    b = bs.spinor(P(-x1, x2))[0]
    np.testing.assert_allclose(b, sign * a, rtol=1e-12, atol=1e-300)


@pytest.mark.parametrize("n,m", [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3)])
@pytest.mark.parametrize("parity", ["even", "odd"])
def test_hamiltonian_residual(n, m, parity):
    rng = np.random.default_rng(n * 10 + m)
    pts = sample_points(40, rng)
    for s in (1, -1):
        bs = spectrum.assemble_bound_state(n, m, s, parity, params=EQ)
        psi = bs.spinor(pts)[bs.component]
        H = model.apply_hamiltonian(0 if s > 0 else 2, bs.field(), pts, EQ, h=1e-3)
        assert np.abs(H - bs.energy * psi).max() / np.abs(psi).max() <= 1e-4


def test_hamiltonian_residual_detects_wrong_energy():
    rng = np.random.default_rng(3)
    pts = sample_points(20, rng)
    bs = spectrum.assemble_bound_state(1, 1, 1, "even", params=EQ)
    psi = bs.spinor(pts)[0]
    H = model.apply_hamiltonian(0, bs.field(), pts, EQ)
    assert np.abs(H - (bs.energy + 0.1) * psi).max() / np.abs(psi).max() > 1e-2


def test_gradient_matches_fd():
    bs = spectrum.assemble_bound_state(2, 3, 1, "even", params=EQ)
    rng = np.random.default_rng(9)
    pts = sample_points(20, rng)
    g1, g2 = bs.gradient(pts)
    h = 1e-5
    f = lambda a, b: bs.spinor(P(a, b))[0]
    np.testing.assert_allclose(g1[0], (f(pts.x1 + h, pts.x2) - f(pts.x1 - h, pts.x2)) / (2 * h),
                               atol=1e-7 * np.abs(g1[0]).max())
    np.testing.assert_allclose(g2[0], (f(pts.x1, pts.x2 + h) - f(pts.x1, pts.x2 - h)) / (2 * h),
                               atol=1e-7 * np.abs(g2[0]).max())


def test_normalizability_reported():
    assert spectrum.assemble_bound_state(1, 1, 1, "even", params=EQ).normalizable
    # sector 2 carries exp(+4u/((n+1) hbar^2)) and grows
    assert not spectrum.assemble_bound_state(1, 1, -1, "even", params=EQ).normalizable


def test_ground_bound_state_norm_matches_zero_mode():
    bs = spectrum.assemble_bound_state(0, 1, 1, "even", params=EQ)
    zm = groundstates.bosonic_zero_mode_I(EQ)
    pts = P(np.array([0.0]), np.array([0.5]))
    scale = (bs.spinor(pts)[0] / zm.spinor(pts)[0])[0]
    assert bs.norm().value == pytest.approx(scale**2 * zm.norm().value, rel=1e-8)


# -- fermionic partners ------------------------------------------------------

def test_partner_of_zero_mode_vanishes():
    pf = spectrum.fermionic_partner(spectrum.assemble_bound_state(0, 1, 1, "even", params=EQ))
    assert pf.zero
    assert not np.any(pf(np.array([0.3, 1.2]), np.array([0.4, -0.7])))


@pytest.mark.parametrize("n,m,s", [(1, 1, 1), (1, 2, 1), (2, 1, 1), (1, 1, -1)])
def test_partner_energy(n, m, s):
    bs = spectrum.assemble_bound_state(n, m, s, "even", params=EQ)
    pf = spectrum.fermionic_partner(bs)
    rng = np.random.default_rng(5)
    pts = sample_points(40, rng)
    chi = pf(pts.x1, pts.x2)
    assert not chi[0].any() and not chi[3].any()
    assert np.abs(chi[1:3]).max() > 0
    H = model.apply_hamiltonian(1, pf, pts, EQ)
    rel = np.abs(H - bs.energy * chi[1:3]).max() / np.abs(chi[1:3]).max()
    assert rel <= 1e-3
    assert pf.energy == bs.energy


def test_partner_analytic_equals_fd():
    bs = spectrum.assemble_bound_state(1, 1, 1, "even", params=EQ)
    pf = spectrum.fermionic_partner(bs)
    rng = np.random.default_rng(12)
    pts = sample_points(20, rng)
    fd = model.apply_supercharge("Q+", bs.field(), pts, EQ, h=1e-4)
    np.testing.assert_allclose(pf(pts.x1, pts.x2), fd, atol=1e-6 * np.abs(fd).max())
