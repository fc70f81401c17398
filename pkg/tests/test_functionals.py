import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gamma

from radial_inls.errors import (
    DegenerateInputError,
    InvalidFieldError,
    RegimeError,
    UnsupportedSingularityError,
)
from radial_inls.functionals import (
    Params,
    RadialField,
    RadialGrid,
    far_slope,
    gn_ratio,
    gradnorm_sq,
    mass,
    report,
    strauss_bound_check,
    weighted_norm,
)
from radial_inls.groundstate import bundle, explicit_Q

from conftest import gaussian


def radial_quad(f, kappa=0.0):
    """4 pi int_0^inf r^(2-kappa) f(r) dr by adaptive quadrature."""
    val = quad(lambda r: r ** (2 - kappa) * f(r), 0, 10, limit=400, epsabs=1e-14, epsrel=1e-13)[0]
    val += quad(lambda r: r ** (2 - kappa) * f(r), 10, np.inf, limit=400, epsabs=1e-14)[0]
    return 4 * math.pi * val


# ---------------------------------------------------------------- params


def test_params_standing_assumption():
    with pytest.raises(RegimeError, match="6-2a"):
        Params(1.5, 1.0, 3.5)
    with pytest.raises(RegimeError):
        Params(0.0, 1.0, 3.0)
    with pytest.raises(RegimeError):
        Params(1.0, 2.0, 3.0)
    with pytest.raises(RegimeError):
        Params(1.0, 1.0, 2.0)


def test_params_regimes_and_ordering():
    P = Params(1.2, 0.8, 3.6)
    assert P.double_critical and P.ordering == "b<a"
    assert any("blow-up" in s for s in P.blowup_violations())
    Ps = Params(0.5, 1.0, 4.0)
    assert Ps.scattering_regime and Ps.ordering == "a<b"
    assert Params(1.0, 0.5, 3.5).blowup_regime


@given(
    a=st.floats(0.05, 1.95),
    b=st.floats(0.05, 1.95),
    s=st.floats(0.01, 0.99),
)
def test_energy_splits_into_I_and_K(a, b, s):
    lo = 2 + (4 - 2 * a) / 3
    P = Params(a, b, lo + s * (6 - 2 * a - lo))
    from radial_inls.functionals import FunctionalReport

    rep = FunctionalReport.from_primitives(P, 1.0, 2.3, 0.7, 1.9)
    assert rep.energy == pytest.approx(rep.I + 2 / P.alpha * rep.K, rel=1e-12, abs=1e-12)
    c1, c2 = P.i_coeffs
    assert c1 + c2 == pytest.approx((2 - b) / (2 * (3 - b)), rel=1e-12)


# ---------------------------------------------------------------- fields


def test_field_rejects_bad_values(grid):
    v = np.ones(grid.n)
    v[5] = np.nan
    with pytest.raises(InvalidFieldError):
        RadialField(grid, v)
    with pytest.raises(InvalidFieldError):
        RadialField(grid, np.ones(grid.n - 1))
    with pytest.raises(InvalidFieldError):
        RadialField(grid, -np.ones(grid.n), real_nonneg=True)


def test_field_is_immutable(grid):
    u = gaussian(grid)
    with pytest.raises(ValueError):
        u.values[0] = 2.0


# ---------------------------------------------------------------- quadrature


def test_mass_gaussian(grid):
    assert mass(gaussian(grid)) == pytest.approx((math.pi / 2) ** 1.5, rel=1e-12)
    assert mass(grid.zeros()) == 0.0


@pytest.mark.parametrize("kappa", [0.25, 0.5, 0.8, 1.0, 1.2, 1.5, 1.9])
@pytest.mark.parametrize("q", [2.0, 3.0, 4.4])
def test_weighted_norm_gaussian_closed_form(grid, kappa, q):
    # 4 pi int r^(2-k) exp(-q r^2) dr = 2 pi Gamma((3-k)/2) q^(-(3-k)/2)
    exact = 2 * math.pi * gamma((3 - kappa) / 2) * q ** (-(3 - kappa) / 2)
    # the r^(4-k) term left by the endpoint correction costs O(h^(5-k))
    tol = 1e-6 if kappa <= 1.5 else 1e-5
    assert weighted_norm(gaussian(grid), kappa, q) == pytest.approx(exact, rel=tol)


def test_weighted_norm_kappa1_q2_is_pi(grid):
    assert weighted_norm(gaussian(grid), 1.0, 2.0) == pytest.approx(math.pi, rel=1e-8)


def test_weighted_norm_rejects_bad_exponents(grid):
    with pytest.raises(UnsupportedSingularityError):
        weighted_norm(gaussian(grid), 2.5, 3.0)
    with pytest.raises(ValueError):
        weighted_norm(gaussian(grid), 1.0, 0.5)


def test_gradnorm_gaussian_against_quad(grid):
    u = gaussian(grid, phase=0.3)
    # |u_r|^2 for exp(-r^2 + 0.3 i r^2)
    ex = radial_quad(lambda r: (4 * r * r + 0.36 * r * r) * np.exp(-2 * r * r))
    assert gradnorm_sq(u) == pytest.approx(ex, rel=2e-4)
    assert gradnorm_sq(grid.zeros()) == 0.0


def test_gradnorm_second_order(grid):
    ex = radial_quad(lambda r: 4 * r * r * np.exp(-2 * r * r))
    e1 = abs(gradnorm_sq(gaussian(RadialGrid(1500, 30.0))) / ex - 1)
    e2 = abs(gradnorm_sq(gaussian(RadialGrid(3000, 30.0))) / ex - 1)
    assert 3.5 < e1 / e2 < 4.5


def test_report_gaussian_against_quad(grid):
    P = Params(0.5, 1.0, 4.0)
    rep = report(gaussian(grid), P)
    f = lambda r: np.exp(-r * r)
    assert rep.mass == pytest.approx(radial_quad(lambda r: f(r) ** 2), rel=1e-6)
    assert rep.pot_a == pytest.approx(radial_quad(lambda r: f(r) ** 4, 0.5), rel=1e-6)
    assert rep.pot_b == pytest.approx(radial_quad(lambda r: f(r) ** 4, 1.0), rel=1e-6)
    assert rep.K == pytest.approx(rep.gradnorm_sq + P.k_coeff * rep.pot_a - rep.pot_b, rel=1e-14)


def test_report_zero(grid):
    rep = report(grid.zeros(), Params(0.5, 1.0, 4.0))
    assert rep.mass == rep.energy == rep.K == rep.K_c == rep.gradnorm_sq == 0.0


@settings(max_examples=30, deadline=None)
@given(theta=st.floats(0, 2 * math.pi), amp=st.floats(0.1, 3.0), width=st.floats(0.5, 3.0))
def test_report_phase_invariant(grid, theta, amp, width):
    P = Params(1.0, 0.5, 3.5)
    u = gaussian(grid, amp, width, phase=0.2)
    r1 = report(u, P)
    r2 = report(u * np.exp(1j * theta), P)
    for name in ("mass", "energy", "K", "K_c", "pot_a", "pot_b", "gradnorm_sq"):
        assert getattr(r2, name) == pytest.approx(getattr(r1, name), rel=1e-12, abs=1e-14)


def test_far_field_closure_for_slow_decay():
    # u = (1 + r^2)^-1 decays like r^-2; the closure recovers the tail of the mass
    g = RadialGrid(3000, 30.0)
    u = g.sample(lambda r: 1 / (1 + r * r))
    ex = radial_quad(lambda r: (1 + r * r) ** -2.0)
    assert far_slope(u) == pytest.approx(2 * 900 / 901, rel=1e-4)
    # the tail is 4% of the mass; the closure leaves an O(R^-2) share of it
    assert mass(u) == pytest.approx(ex, rel=2e-4)
    box = g.with_far_field(False)
    assert abs(mass(u.on(box)) / ex - 1) > 1e-2


def test_scaling_laws_exact_in_report(grid):
    P = Params(1.0, 0.5, 3.5)
    u = gaussian(grid, 1.3, 1.7)
    rep = report(u, P)
    s = rep.scaled_mass(P, 2.0)
    assert s.gradnorm_sq == pytest.approx(4 * rep.gradnorm_sq)
    assert s.pot_b == pytest.approx(2 ** (6 - 2 * P.b) * rep.pot_b)


# ---------------------------------------------------------------- inequalities


def test_gn_ratio_saturated_by_Q(grid):
    for b in (0.5, 1.0):
        gs = bundle(b, Params(1.9, b, 2.2), grid)
        ratio = gn_ratio(gs.Q, b, 6 - 2 * b)
        assert ratio == pytest.approx(gs.S_b ** -(6 - 2 * b), rel=1e-3)


@settings(max_examples=25, deadline=None)
@given(c=st.lists(st.floats(-2, 2), min_size=3, max_size=3), w=st.lists(st.floats(0.4, 4), min_size=3, max_size=3))
def test_gn_ratio_bounded_by_sharp_constant(grid, c, w):
    b = 1.0
    u = grid.sample(lambda r: sum(ci * np.exp(-((r / wi) ** 2)) for ci, wi in zip(c, w)))
    if u.is_zero() or mass(u) < 1e-8:
        return
    gs = bundle(b, Params(1.9, b, 2.2), grid)
    assert gn_ratio(u, b, 4.0) <= gs.S_b ** -4.0 * (1 + 1e-3)


def test_gn_ratio_gaussian_kappa1_q3(grid):
    u = gaussian(grid)
    num = radial_quad(lambda r: np.exp(-3 * r * r), 1.0)
    G = radial_quad(lambda r: 4 * r * r * np.exp(-2 * r * r))
    M = (math.pi / 2) ** 1.5
    ge, me = (4.5 + 1 - 3) / 2, (3 - 1 - 1.5) / 2
    assert gn_ratio(u, 1.0, 3.0) == pytest.approx(num / (G**ge * M**me), rel=1e-3)


def test_gn_ratio_zero_is_degenerate(grid):
    with pytest.raises(DegenerateInputError):
        gn_ratio(grid.zeros(), 1.0, 3.0)


def test_strauss(grid):
    assert strauss_bound_check(grid.zeros(), 1.0)
    Q = explicit_Q(1.0, grid)
    assert strauss_bound_check(Q, 1.0, C=2.0)
    bump = grid.sample(lambda r: np.where(r < 2, (1 - (r / 2) ** 2) ** 3, 0.0))
    assert strauss_bound_check(bump, 5.0)
