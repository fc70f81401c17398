import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radial_inls.classifier import (
    Verdict,
    bound_identity_sides,
    check_clem1,
    check_clem1_report,
    check_clem2,
    check_clem2_report,
    classify,
    classify_report,
    coercivity_margin,
    gradient_bound_coefficient,
    gradient_lower_bound,
    gradient_lower_bound_report,
)
from radial_inls.errors import PreconditionError, RegimeError
from radial_inls.functionals import Params, report
from radial_inls.groundstate import bundle, lambda_star_from_report, scale_half, scale_mass

from conftest import gaussian

PB = Params(1.2, 0.8, 3.6)


@pytest.fixture(scope="module")
def gsb(grid):
    return bundle(PB.b, PB, grid)


def random_field(rng, grid, k=3):
    c = rng.normal(size=k) + 1j * rng.normal(size=k)
    w = rng.uniform(0.4, 4.0, size=k)
    return grid.sample(lambda r: sum(ci * np.exp(-((r / wi) ** 2)) for ci, wi in zip(c, w)))


def test_small_Q_is_K_plus(gsb):
    res = classify(0.05 * gsb.Q, PB, gsb)
    assert res.verdict is Verdict.K_PLUS and res.consistent
    assert res.ordering == "b<a"


def test_scaled_Q_is_K_minus(gsb):
    lam = 3.0
    res = classify(scale_mass(gsb.Q, lam), PB, gsb)
    exact = report(gsb.Q, PB).scaled_mass(PB, lam)
    assert exact.energy < gsb.m and exact.K < 0 and exact.gradnorm_sq > gsb.gradnorm_sq_Q
    assert res.verdict is Verdict.K_MINUS and res.consistent


def test_above_threshold_and_zero(grid, gsb):
    big = classify(gsb.Q * 1.0, PB, gsb)
    assert big.energy >= gsb.m and big.verdict is Verdict.ABOVE_THRESHOLD
    assert classify(grid.zeros(), PB, gsb).verdict is Verdict.ZERO


def test_classify_rejects_foreign_bundle(grid, gsb):
    with pytest.raises(ValueError):
        classify(gaussian(grid), Params(1.2, 0.5, 3.6), gsb)


@settings(max_examples=20, deadline=None)
@given(theta=st.floats(0, 6.3), amp=st.floats(0.05, 4.0))
def test_classify_phase_invariant(grid, gsb, theta, amp):
    u = gaussian(grid, amp, 1.3, phase=0.1)
    a = classify(u, PB, gsb)
    b = classify(u * np.exp(1j * theta), PB, gsb)
    assert a.verdict is b.verdict and a.energy == pytest.approx(b.energy, rel=1e-12)


@pytest.mark.parametrize("P", [Params(1.0, 0.5, 3.5), Params(0.5, 1.0, 4.0), PB])
def test_sign_and_gradient_tests_agree_below_threshold(grid, P):
    rng = np.random.default_rng(11)
    gs = bundle(P.b, P, grid)
    n = 0
    while n < 200:
        rep0 = report(random_field(rng, grid), P)
        rep = rep0.scaled_amplitude(P, rng.uniform(0.05, 2.0)).scaled_mass(P, np.exp(rng.uniform(-1.5, 1.5)))
        if not rep.energy < gs.m:
            continue
        n += 1
        res = classify_report(rep, P, gs)
        if not res.consistent:
            assert abs(rep.gradnorm_sq - gs.gradnorm_sq_Q) <= 1e-3 * gs.gradnorm_sq_Q


# ---------------------------------------------------------------- variational checks

PV = Params(1.0, 0.5, 3.5)


@pytest.fixture(scope="module")
def gsv(grid):
    return bundle(PV.b, PV, grid)


def test_clem_vacuous_when_K_positive(grid, gsv):
    u = 0.1 * gaussian(grid)
    rep = report(u, PV)
    assert rep.K > 0 and rep.K_c > 0
    assert check_clem1(u, PV, gsv.m) and check_clem2(u, PV, gsv.m)


def test_clem1_on_projected_fields(grid, gsv):
    rng = np.random.default_rng(3)
    for _ in range(50):
        rep = report(random_field(rng, grid), PV)
        lam = lambda_star_from_report(rep, PV)
        on = rep.scaled_mass(PV, lam)
        assert abs(on.K) <= 1e-9 * on.gradnorm_sq
        assert on.energy == pytest.approx(on.I, rel=1e-9)
        assert on.I >= gsv.m * (1 - 1e-3)
        assert check_clem1_report(on, PV, gsv.m)


def test_clem2_equality_at_Q(gsv):
    rep = report(gsv.Q, PV)
    assert abs(rep.K_c) < 1e-4 * rep.gradnorm_sq
    assert rep.I == pytest.approx(gsv.m, rel=1e-3)
    assert check_clem2(gsv.Q, PV, gsv.m)


def test_clem2_predicate_constant_on_half_scaling(grid, gsv):
    u = gaussian(grid, 2.2, 1.5)
    base = check_clem2(u, PV, gsv.m)
    for lam in (0.6, 0.8, 1.25, 1.6):
        assert check_clem2(scale_half(u, lam), PV, gsv.m) == base


def test_clem_regime_gate(grid):
    P = Params(0.5, 1.0, 4.0)
    with pytest.raises(RegimeError, match="b<a"):
        check_clem1(gaussian(grid), P, 1.0)
    with pytest.raises(RegimeError):
        check_clem2(gaussian(grid), PB, 1.0)


def test_clem2_implies_on_K_nonpositive(grid, gsv):
    rng = np.random.default_rng(5)
    for _ in range(30):
        rep = report(random_field(rng, grid), PV)
        rep = rep.scaled_mass(PV, 1.5 * lambda_star_from_report(rep, PV))
        assert rep.K <= 0 and rep.K_c <= rep.K
        assert check_clem1_report(rep, PV, gsv.m) and check_clem2_report(rep, PV, gsv.m)


# ---------------------------------------------------------------- gradient bound


def test_gradient_bound_coefficient_gives_GQ(gsv):
    assert gradient_bound_coefficient(PV) * gsv.m == pytest.approx(gsv.gradnorm_sq_Q, rel=1e-12)


def test_gradient_lower_bound_on_scaled_Q(gsv):
    lam = 3.0
    exact = report(gsv.Q, PV).scaled_mass(PV, lam)
    assert exact.K < 0
    assert gradient_lower_bound(scale_mass(gsv.Q, lam), PV, gsv.m)


def test_gradient_lower_bound_precondition(grid, gsv):
    with pytest.raises(PreconditionError):
        gradient_lower_bound(0.1 * gaussian(grid), PV, gsv.m)


def test_gradient_bound_identity_random_triples():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a, b = rng.uniform(0.01, 1.99, size=2)
        p = rng.uniform(2.01, 6 - 2 * a)
        lhs, rhs = bound_identity_sides(a, b, p)
        assert abs(lhs - rhs) <= 4 * np.finfo(float).eps * abs(rhs)


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(1.0, 8.0), amp=st.floats(0.2, 3.0))
def test_gradient_bound_holds_whenever_K_negative(grid, gsv, lam, amp):
    rep = report(gaussian(grid, amp, 1.0), PV).scaled_mass(PV, lam)
    if rep.K < 0:
        assert gradient_lower_bound_report(rep, PV, gsv.m)


# ---------------------------------------------------------------- coercivity


def test_coercivity_margin_cases(grid, gsv):
    assert coercivity_margin(grid.zeros(), gsv, 0.3) == 0.0
    half = 0.5 * gsv.Q
    eps = 1 - report(half, PV).gradnorm_sq / gsv.gradnorm_sq_Q
    assert coercivity_margin(half, gsv, eps) >= -1e-4 * gsv.gradnorm_sq_Q
    assert abs(coercivity_margin(gsv.Q, gsv, 0.0)) < 1e-4 * gsv.gradnorm_sq_Q
    with pytest.raises(PreconditionError):
        coercivity_margin(gsv.Q, gsv, 0.2)


def test_coercivity_margin_nonnegative_below_Q(grid, gsv):
    rng = np.random.default_rng(9)
    for _ in range(40):
        u = random_field(rng, grid)
        G = report(u, PV).gradnorm_sq
        u = u * np.sqrt(rng.uniform(0.05, 0.95) * gsv.gradnorm_sq_Q / G)
        eps = 1 - report(u, PV).gradnorm_sq / gsv.gradnorm_sq_Q
        assert coercivity_margin(u, gsv, eps) >= -1e-6 * gsv.gradnorm_sq_Q
