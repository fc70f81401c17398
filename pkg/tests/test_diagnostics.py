import numpy as np
import pytest
from scipy.integrate import trapezoid

from radial_inls.diagnostics import (
    WeightKind,
    blowup_certificate,
    make_weight,
    morawetz_M,
    morawetz_action_bound,
    morawetz_timeavg,
    plain_quadratic,
    psi_R,
    second_difference,
    virial_records,
    virial_second_derivative,
    virial_second_derivative_discrete,
    virial_series,
    virial_V,
    zeta_weight,
)
from radial_inls.errors import PreconditionError
from radial_inls.evolution import EvolutionConfig, Outcome, evolve
from radial_inls.functionals import Params, RadialGrid, report

from conftest import gaussian

P = Params(0.5, 1.0, 4.0)


def random_field(rng, grid, k=3):
    c = rng.normal(size=k) + 1j * rng.normal(size=k)
    w = rng.uniform(0.4, 3.0, size=k)
    beta = rng.normal(size=k)
    return grid.sample(
        lambda r: sum(ci * np.exp(-((r / wi) ** 2) + 1j * bi * r * r) for ci, wi, bi in zip(c, w, beta))
    )


@pytest.mark.parametrize("R", [1.0, 4.0, 8.0])
def test_psi_R_shape(grid, R):
    w = psi_R(grid, R)
    r = grid.r
    inner = r <= R
    assert np.allclose(w.lap[inner], 6.0, atol=1e-12)
    assert np.allclose(w.bilap[inner], 0.0, atol=1e-12)
    assert np.all(w.psi[r >= 3 * R] == 0)
    assert np.all(w.d1 <= 2 * r + 1e-9 * R * R)
    assert np.all(w.d2 <= 2 + 1e-9)
    assert np.all(w.psi >= -1e-9 * R * R)
    # no jumps: consecutive samples differ by at most h times the next derivative
    for arr, nxt in ((w.psi, w.d1), (w.d1, w.d2), (w.d2, w.d3)):
        assert np.max(np.abs(np.diff(arr))) <= 1.01 * grid.h * np.max(np.abs(nxt))


def test_zeta_shape(grid):
    w = zeta_weight(grid, 4.0)
    r = grid.r
    assert np.allclose(w.psi[r <= 2.0], 0.5 * r[r <= 2.0] ** 2, atol=1e-12)
    assert np.allclose(w.d1[r >= 4.0], 4.0, atol=1e-12)
    assert np.all(w.d2 >= -1e-12)
    assert np.max(w.d1) == pytest.approx(4.0)


def test_make_weight_dispatch(grid):
    assert make_weight("PLAIN_QUADRATIC", grid).kind is WeightKind.PLAIN_QUADRATIC
    assert make_weight(WeightKind.MORAWETZ_ZETA, grid, 3.0).R == 3.0
    with pytest.raises(ValueError):
        make_weight("QUADRATIC_CUTOFF_PSI_R", grid)
    with pytest.raises(ValueError):
        psi_R(grid, 0.0)


def test_plain_weight_gives_eight_K(grid):
    rng = np.random.default_rng(2)
    w = plain_quadratic(grid)
    for _ in range(20):
        u = random_field(rng, grid)
        K = report(u, P).K
        scale = report(u, P).gradnorm_sq
        assert abs(virial_second_derivative(u, P, w) - 8 * K) <= 1e-9 * 8 * scale


def test_psi_R_equals_plain_inside_support(grid):
    u = gaussian(grid, 0.9, 1.0, phase=0.4)
    a = virial_second_derivative(u, P, psi_R(grid, 8.0))
    b = virial_second_derivative(u, P, plain_quadratic(grid))
    assert a == pytest.approx(b, rel=1e-12)
    assert virial_V(u, psi_R(grid, 8.0)) == pytest.approx(virial_V(u, plain_quadratic(grid)), rel=1e-12)


def test_virial_V_gaussian(grid):
    u = gaussian(grid, 1.0, 1.0)
    exact = 4 * np.pi * 3 * np.sqrt(np.pi) / (8 * 2**2.5)
    assert virial_V(u, plain_quadratic(grid)) == pytest.approx(exact, rel=1e-8)


@pytest.mark.parametrize("beta", [0.3, -1.1])
def test_morawetz_M_chirped_gaussian(grid, beta):
    # zeta' = r on the support; Im(conj u u_r) = 2 beta r |u|^2
    u = gaussian(grid, 1.0, 1.0, phase=beta)
    exact = 16 * np.pi * beta * 3 * np.sqrt(np.pi) / (8 * 2**2.5)
    assert morawetz_M(u, zeta_weight(grid, 20.0)) == pytest.approx(exact, rel=1e-6)


def test_morawetz_M_real_field_is_zero(grid):
    assert morawetz_M(gaussian(grid, 2.0, 1.7), zeta_weight(grid, 3.0)) == 0.0


def test_morawetz_action_bound(grid):
    rng = np.random.default_rng(4)
    for R in (1.0, 3.0, 10.0):
        w = zeta_weight(grid, R)
        for _ in range(10):
            assert morawetz_action_bound(random_field(rng, grid), w)


def test_weight_grid_mismatch(grid):
    other = RadialGrid(1000, 30.0)
    with pytest.raises(ValueError):
        virial_V(gaussian(other), plain_quadratic(grid))


def test_second_difference_exact_on_quadratics():
    t = np.array([0.0, 0.1, 0.25, 0.4, 0.7])
    d = second_difference(t, 3 * t**2 - t + 1)
    assert np.isnan(d[0]) and np.isnan(d[-1])
    assert np.allclose(d[1:-1], 6.0, rtol=1e-10)


def test_discrete_identity_matches_finite_difference(box):
    u0 = gaussian(box, 0.6, 1.2, phase=0.2)
    dt = 2e-5
    cfg = EvolutionConfig(dt=dt, t_max=20 * dt, record_every=5, keep_states=True, virial_R=6.0)
    ts = evolve(u0, P, cfg)
    recs = virial_series(ts, P, psi_R(box, 6.0))
    for rec in recs[1:-1]:
        assert rec.Vpp_fd == pytest.approx(rec.Vpp_discrete, rel=1e-4)
        assert rec.Vpp_identity == pytest.approx(rec.Vpp_discrete, rel=1e-2)


def test_discrete_and_continuum_identities_converge(box):
    diffs = []
    for n in (1500, 3000):
        g = RadialGrid(n, 30.0, far_field=False)
        u = gaussian(g, 0.6, 1.2, phase=0.2)
        w = psi_R(g, 6.0)
        diffs.append(abs(virial_second_derivative_discrete(u, P, w) - virial_second_derivative(u, P, w)))
    assert 3.0 < diffs[0] / diffs[1] < 5.0


def test_virial_records_length_check(box):
    with pytest.raises(ValueError):
        virial_records([0.0, 1.0], [gaussian(box)], P, plain_quadratic(box))


def test_virial_series_needs_states(box):
    ts = evolve(gaussian(box, 0.3), P, EvolutionConfig(dt=1e-3, t_max=0.005, record_every=1))
    with pytest.raises(PreconditionError):
        virial_series(ts, P, plain_quadratic(box))


def test_morawetz_timeavg_checks(box):
    cfg = EvolutionConfig(dt=1e-3, t_max=0.05, record_every=5, virial_R=8.0)
    ts = evolve(gaussian(box, 0.3), P, cfg)
    avg = morawetz_timeavg(ts, 8.0, 0.05, P)
    assert avg.lhs > 0 and avg.bound > 0
    assert avg.lhs == pytest.approx(trapezoid(ts.localized_pot, ts.t) / 0.05, rel=1e-12)
    with pytest.raises(ValueError):
        morawetz_timeavg(ts, 4.0, 0.05, P)
    with pytest.raises(ValueError):
        morawetz_timeavg(ts, 8.0, 1.0, P)
    with pytest.raises(ValueError):
        morawetz_timeavg(ts, 8.0, 0.0, P)


def test_blowup_certificate_checks(box):
    cfg = EvolutionConfig(dt=1e-3, t_max=0.01, record_every=2, virial_R=8.0)
    ts = evolve(gaussian(box, 0.3), P, cfg)
    assert ts.outcome is Outcome.COMPLETED
    assert not blowup_certificate(ts, P, 1.0, 0.5, 8.0)
    with pytest.raises(PreconditionError):
        blowup_certificate(ts, P, 1.0, 0.0, 8.0)
    with pytest.raises(ValueError):
        blowup_certificate(ts, P, 1.0, 0.5, 4.0)
    z = evolve(box.zeros(), P, cfg)
    with pytest.raises(PreconditionError):
        blowup_certificate(z, P, 1.0, 0.5, 8.0)
