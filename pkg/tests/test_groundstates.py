import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twocenter_susy import geometry, groundstates as gs, model
from twocenter_susy.errors import DivergenceError, DomainError, SingularityError
from twocenter_susy.geometry import CartesianPoint as P, EllipticPoint as E
from twocenter_susy.model import ModelParams
from twocenter_susy.verify import check_annihilation, check_elliptic_annihilation, check_zero_energy

IIA = dict(delta=0.5, wtype="IIa", kappa=3.0, a=1, b=1)
IIB = dict(delta=0.5, wtype="IIb", kappa=3.0, a=1, b=0)


def _rel(x, y):
    return abs(x - y) / abs(y)


# -- construction ------------------------------------------------------------

def test_kinds_and_components():
    p = ModelParams(hbar=1.0, delta=0.5)
    assert gs.ground_state("bosonic_I", p).component == 0
    assert gs.ground_state("fermionic_I", p).component == 2
    assert gs.bosonic_zero_mode_I(p, sector=2).component == 3
    q = ModelParams(hbar=1.0, **IIA)
    assert [gs.ground_state(k, q).component for k in gs.KINDS[2:]] == [0, 3, 1, 2]


def test_single_nonzero_block():
    pts = P(np.array([0.3, -1.7]), np.array([0.4, -0.9]))
    for kind in gs.KINDS[2:]:
        psi = gs.ground_state(kind, ModelParams(hbar=2.0, **IIA)).spinor(pts)
        nz = np.flatnonzero(np.abs(psi).max(axis=1) > 0)
        if "bosonic" in kind:
            assert len(nz) == 1 and nz[0] in (0, 3)
        else:
            assert set(nz) <= {1, 2}


def test_bad_inputs():
    p = ModelParams(hbar=1.0, delta=0.5)
    with pytest.raises(DomainError):
        gs.ground_state("bosonic_III", p)
    with pytest.raises(DomainError):
        gs.zero_mode_II("bosonic_II_sector0", p)
    with pytest.raises(DomainError):
        gs.bosonic_zero_mode_I(ModelParams(hbar=1.0, **IIA))
    with pytest.raises(DomainError):
        gs.bosonic_zero_mode_I(p, sector=1)
    with pytest.raises(DomainError):
        gs.fermionic_zero_mode_I(ModelParams(hbar=1.0, delta=0.5, kappa=1.0))


@pytest.mark.parametrize("hbar,delta", [(1.0, 0.5), (2.0, 0.3), (0.7, 1.0)])
def test_bosonic_value_at_right_center(hbar, delta):
    # r1 = 0 and r2 = 2 there
    psi = gs.bosonic_zero_mode_I(ModelParams(hbar=hbar, delta=delta)).spinor(P(1.0, 0.0))
    assert psi[0] == pytest.approx(math.exp(-4 * delta / hbar**2), rel=1e-14)


def test_bosonic_ratio_example():
    st_ = gs.bosonic_zero_mode_I(ModelParams(hbar=1.0, delta=0.5))
    a = st_.spinor(P(0.0, 0.0))[0]
    b = st_.spinor(P(0.0, 1.0))[0]
    # r1 = r2 = 1 at the origin and sqrt(2) at (0, 1)
    assert a / b == pytest.approx(math.exp(2 * 1.5 * (math.sqrt(2) - 1) * 2 / 2), rel=1e-14)
    assert a == pytest.approx(math.exp(-3.0), rel=1e-14)


def test_sector2_candidate_not_normalizable():
    st_ = gs.bosonic_zero_mode_I(ModelParams(hbar=1.0, delta=0.5), sector=2)
    assert not st_.normalizable
    with pytest.raises(DivergenceError):
        st_.norm()


def test_fermionic_exponent_identity():
    rng = np.random.default_rng(4)
    x1, x2 = rng.uniform(-4, 4, 100), rng.uniform(-4, 4, 100)
    r1, r2 = geometry.distances(P(x1, x2))
    e = geometry.to_elliptic(P(x1, x2))
    d = 0.37
    np.testing.assert_allclose(2 * (1 + d) * e.u + 2 * (1 - d) * e.v, 2 * d * r1 + 2 * r2, rtol=1e-13)


def test_fermionic_singular_at_centers():
    st_ = gs.fermionic_zero_mode_I(ModelParams(hbar=1.0, delta=0.5))
    with pytest.raises(SingularityError):
        st_.spinor_elliptic(E(1.0, 1.0))


@pytest.mark.parametrize("frame", ["reflected", "branch_even"])
def test_frame_norms_agree(frame):
    # S is orthogonal, so |Psi|^2 is the same in both frames
    rng = np.random.default_rng(8)
    pts = P(rng.uniform(-3, 3, 200), rng.uniform(-3, 3, 200))
    for p in (ModelParams(hbar=1.0, delta=0.5), ModelParams(hbar=2.0, **IIB)):
        kind = "fermionic_I" if p.wtype == "I" else "fermionic_II_comp2"
        st_ = gs.ground_state(kind, p)
        cart = (st_.spinor(pts, frame=frame) ** 2).sum(axis=0)
        ell = (st_.spinor_elliptic(geometry.to_elliptic(pts)) ** 2).sum(axis=0)
        np.testing.assert_allclose(cart, ell, rtol=1e-12)
        np.testing.assert_allclose(st_.density(pts), ell, rtol=1e-12)


def test_type_ii_value_at_start():
    st_ = gs.zero_mode_II("bosonic_II_sector0", ModelParams(hbar=1.0, **IIA))
    assert st_.spinor_elliptic(E(1.0, -1.0))[0] == pytest.approx(1.0, abs=1e-15)


# -- annihilation and zero energy --------------------------------------------

@pytest.mark.parametrize("params", [
    ModelParams(hbar=1.0, delta=0.5),
    ModelParams(hbar=0.6, delta=1.0),
    ModelParams(hbar=2.0, **IIA),
    ModelParams(hbar=1.0, **IIB),
    ModelParams(hbar=1.5, delta=0.5, wtype="IIb", kappa=3.0, a=0, b=1),
], ids=["I", "I-equal", "IIa", "IIb", "IIb-a0"])
def test_annihilation_and_energy(params):
    rng = np.random.default_rng(17)
    for res in (check_annihilation(params, rng), check_elliptic_annihilation(params, rng),
                check_zero_energy(params, rng)):
        assert res.passed, res


def test_bosonic_type_i_annihilation_tight():
    p = ModelParams(hbar=1.0, delta=0.5)
    st_ = gs.bosonic_zero_mode_I(p)
    rng = np.random.default_rng(2)
    pts = P(rng.uniform(-2, 2, 50), rng.uniform(0.2, 2, 50))
    r = model.apply_supercharge("Q+", st_.field(), pts, p, grad=lambda a, b: st_.gradient(P(a, b)))
    assert np.abs(r).max() / np.abs(st_.spinor(pts)).max() <= 1e-10


def test_branch_even_frame_fails_below_axis():
    # S alone maps elliptic zero modes to Cartesian ones on the upper half-plane only
    p = ModelParams(hbar=1.0, delta=0.5)
    st_ = gs.fermionic_zero_mode_I(p)
    up = P(np.array([0.4, -1.6]), np.array([0.7, 0.5]))
    down = P(up.x1, -up.x2)
    res = {}
    for frame in ("reflected", "branch_even"):
        for name, pts in (("up", up), ("down", down)):
            r1 = model.apply_supercharge("Q+", st_.field(frame), pts, p, h=1e-3)
            r2 = model.apply_supercharge("Q+", st_.field(frame), pts, p, h=5e-4)
            res[frame, name] = np.abs((4 * r2 - r1) / 3).max() / np.abs(st_.spinor(pts)).max()
    assert res["reflected", "up"] < 1e-6 and res["reflected", "down"] < 1e-6
    assert res["branch_even", "up"] < 1e-6
    assert res["branch_even", "down"] > 1e-2


# -- norms -------------------------------------------------------------------

@pytest.mark.parametrize("hbar,expected", [(0.2, 3.5806e-47), (1.0, 0.00942), (10.0, 1743.94)])
def test_bosonic_norm_reference_values(hbar, expected):
    p = ModelParams(hbar=hbar, delta=0.5)
    assert gs.norm_bosonic_I(p) == pytest.approx(expected, rel=5e-3)
    assert gs.log_norm_bosonic_I(p) / math.log(10) == pytest.approx(math.log10(expected), abs=1e-3)


def test_bosonic_norm_frozen_values():
    # independent values from the Bessel formula at full precision
    for hb, ref in ((0.2, 3.5805815e-47), (0.4, 2.1057646e-13), (1.0, 0.0094245783), (10.0, 1743.9376)):
        assert gs.norm_bosonic_I(ModelParams(hbar=hb, delta=0.5)) == pytest.approx(ref, rel=1e-7)


@pytest.mark.parametrize("delta,hbar,expected", [
    (0.5, 0.2, 1.3518e-45), (0.5, 1.0, 0.0178), (0.5, 4.0, 7.3881), (0.5, 10.0, 18.4297),
    (1.0, 0.2, 7.7012e-88), (1.0, 4.0, 5.8083), (1.0, 10.0, 16.6347),
])
def test_fermionic_norm_reference_values(delta, hbar, expected):
    assert gs.norm_fermionic_I(ModelParams(hbar=hbar, delta=delta)) == pytest.approx(expected, rel=5e-3)


def test_fermionic_norm_equal_strengths_at_one():
    # 2 pi K0(8); printed with a single significant digit
    from scipy.special import k0

    val = gs.norm_fermionic_I(ModelParams(hbar=1.0, delta=1.0))
    assert val == pytest.approx(2 * math.pi * k0(8.0), rel=1e-13)
    assert round(val, 4) == 0.0009


def test_bosonic_norm_equal_strength_limit():
    # continuity of the closed form through delta = 1
    a = gs.norm_bosonic_I(ModelParams(hbar=1.0, delta=1.0))
    b = gs.norm_bosonic_I(ModelParams(hbar=1.0, delta=1.0 - 1e-7))
    assert a == pytest.approx(b, rel=1e-6)


@pytest.mark.parametrize("delta", [0.3, 0.5, 1.0])
@pytest.mark.parametrize("hbar", [1.0, 2.0, 4.0, 10.0])
def test_analytic_vs_quadrature(hbar, delta):
    p = ModelParams(hbar=hbar, delta=delta)
    for st_ in (gs.bosonic_zero_mode_I(p), gs.fermionic_zero_mode_I(p)):
        q = gs.norm_quadrature(st_)
        assert _rel(q.value, st_.norm().value) <= 1e-6


def test_type_ii_separable_vs_2d():
    for kw in (IIA, IIB):
        p = ModelParams(hbar=2.0, **kw)
        for kind in gs.normalizable_kinds_II(p):
            st_ = gs.zero_mode_II(kind, p)
            assert _rel(gs.norm_quadrature(st_).value, st_.norm().value) <= 1e-6


@pytest.mark.parametrize("kw,kind,values", [
    (IIA, "bosonic_II_sector0", (0.004914, 2.83912, 22.8914, 511.092)),
    (IIB, "bosonic_II_sector0", (9.61622e20, 473.903, 287.687, 1399.71)),
    (IIA, "fermionic_II_comp2", (1.03792e22, 251.908, 45.7495, 25.207)),
    (IIB, "fermionic_II_comp2", (0.05046, 1.46657, 3.62192, 9.20207)),
], ids=["IIa-bos", "IIb-bos", "IIa-ferm", "IIb-ferm"])
def test_type_ii_norm_reference_values(kw, kind, values):
    for hb, ref in zip((0.2, 2.0, 4.0, 10.0), values):
        r = gs.norm_II(kind, ModelParams(hbar=hb, **kw))
        # every printed digit: 6 significant figures, so 1e-4 relative with rounding slack
        assert r.log10_magnitude == pytest.approx(math.log10(ref), abs=1e-4 / math.log(10))
        assert r.relative_error < 1e-8


def test_type_ii_divergent_partners():
    for kw in (IIA, IIB, dict(IIB, a=0, b=1)):
        p = ModelParams(hbar=2.0, **kw)
        good = set(gs.normalizable_kinds_II(p))
        for kind in gs.KINDS[2:]:
            st_ = gs.zero_mode_II(kind, p)
            assert st_.normalizable == (kind in good)
            if kind not in good:
                with pytest.raises(DivergenceError):
                    gs.norm_II(kind, p)


def test_amplitude_scales_norm():
    p = ModelParams(hbar=2.0, **IIA)
    one = gs.norm_II("fermionic_II_comp2", p).value
    assert gs.norm_II("fermionic_II_comp2", p, amplitude=3.0).value == pytest.approx(9 * one, rel=1e-12)


@pytest.mark.parametrize("make", [
    lambda h: gs.norm_bosonic_I(ModelParams(hbar=h, delta=0.5)),
    lambda h: gs.norm_fermionic_I(ModelParams(hbar=h, delta=0.5)),
    lambda h: gs.norm_fermionic_I(ModelParams(hbar=h, delta=1.0)),
    lambda h: gs.norm_II("bosonic_II_sector0", ModelParams(hbar=h, **IIA)).value,
    lambda h: gs.norm_II("fermionic_II_comp2", ModelParams(hbar=h, **IIB)).value,
], ids=["bos-I", "ferm-I", "ferm-I-equal", "bos-IIa", "ferm-IIb"])
def test_norm_monotone_on_plotted_range(make):
    vals = [make(h) for h in np.linspace(1.0, 10.0, 10)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 30.0), st.floats(0.01, 1.0))
def test_log_norm_finite(hbar, delta):
    p = ModelParams(hbar=hbar, delta=delta)
    assert math.isfinite(gs.log_norm_bosonic_I(p))
    assert math.isfinite(gs.log_norm_fermionic_I(p))


# -- density grids -----------------------------------------------------------

def test_grid_shape_and_flags():
    g = gs.Grid(-2, 2, -1, 1, 41, 21)
    d = gs.density_grid(gs.bosonic_zero_mode_I(ModelParams(hbar=1.0, delta=0.5)), g, workers=1)
    assert d.values.shape == (21, 41)
    # both centers lie on grid nodes
    assert d.flagged.sum() == 2
    assert np.isnan(d.values[d.flagged]).all()
    assert np.isfinite(d.values[~d.flagged]).all()


def test_grid_validation():
    with pytest.raises(DomainError):
        gs.Grid(nx=1)
    with pytest.raises(DomainError):
        gs.Grid(x1_min=1.0, x1_max=0.0)


def test_grid_origin_value():
    g = gs.Grid(-1, 1, -1, 1, 3, 3)
    d = gs.density_grid(gs.bosonic_zero_mode_I(ModelParams(hbar=1.0, delta=0.5)), g)
    # (exp(-2 * 1.5))^2 at the origin
    assert d.values[1, 1] == pytest.approx(math.exp(-6.0), rel=1e-14)


def test_equal_strength_mirror_symmetry():
    g = gs.Grid(-3, 3, -2, 2, 61, 41)
    p = ModelParams(hbar=1.0, delta=1.0)
    for st_ in (gs.bosonic_zero_mode_I(p), gs.fermionic_zero_mode_I(p)):
        d = gs.density_grid(st_, g)
        np.testing.assert_array_equal(np.isnan(d.values), np.isnan(d.values[:, ::-1]))
        ok = ~np.isnan(d.values)
        np.testing.assert_allclose(d.values[ok], d.values[:, ::-1][ok], rtol=1e-13)


def test_exchange_symmetry_elliptic():
    p = ModelParams(hbar=1.3, delta=1.0)
    u = np.linspace(1.1, 3.0, 9)
    v = np.linspace(-0.9, 0.9, 9)
    for st_ in (gs.bosonic_zero_mode_I(p), gs.fermionic_zero_mode_I(p)):
        a = st_.spinor_elliptic(E(u, v))
        b = st_.spinor_elliptic(E(u, -v))
        np.testing.assert_allclose(a, b, rtol=1e-14)


def test_normalized_riemann_sum():
    # even node count keeps both centers off the grid
    g = gs.Grid(-8, 8, -8, 8, 640, 640)
    d = gs.density_grid(gs.bosonic_zero_mode_I(ModelParams(hbar=1.0, delta=0.5)), g, normalize=True)
    assert d.normalized
    assert d.riemann_sum() == pytest.approx(1.0, abs=1e-3)


def test_workers_do_not_change_result(monkeypatch):
    g = gs.Grid(-2.5, 2.5, -2, 2, 37, 29)
    st_ = gs.zero_mode_II("fermionic_II_comp2", ModelParams(hbar=2.0, **IIA))
    a = gs.density_grid(st_, g, workers=1)
    b = gs.density_grid(st_, g, workers=4)
    monkeypatch.setenv("TWOCENTER_WORKERS", "3")
    c = gs.density_grid(st_, g)
    np.testing.assert_array_equal(a.values, b.values)
    np.testing.assert_array_equal(a.values, c.values)
