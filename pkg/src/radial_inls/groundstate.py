"""Explicit critical ground state, sharp constants, scaling maps, the Pohozaev
rescaling root and a numerical minimizer for the double-critical case."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.linalg import lapack
from scipy.optimize import bisect, brentq
from scipy.special import beta as beta_fn

from .errors import BracketError, DegenerateInputError, RegimeError, ResolutionWarning
from .functionals import (
    FOUR_PI,
    FunctionalReport,
    Params,
    RadialField,
    RadialGrid,
    mass,
    report,
    weighted_norm,
    gradnorm_sq,
    far_slope,
    _tail,
)


def explicit_Q(b: float, grid: RadialGrid) -> RadialField:
    """Q(r) = (1 + r^(2-b)/(3-b))^(-1/(2-b)), the positive solution of
    -Delta Q = |x|^-b Q^(5-2b) with Q(0) = 1.  Q ~ (3-b)^(1/(2-b))/r at infinity."""
    if not 0 < b < 2:
        raise RegimeError(f"b={b} outside (0,2)")
    s = 2.0 - b
    vals = (1.0 + grid.r**s / (3.0 - b)) ** (-1.0 / s)
    return RadialField(grid, vals, real_nonneg=True)


def q_gradnorm_sq_exact(b: float) -> float:
    """Closed form of ||grad Q||^2 (a Beta integral)."""
    s = 2.0 - b
    c = 3.0 - b
    return float(FOUR_PI * c ** (1 + 1 / s) / s * beta_fn(1 + 1 / s, 2 * c / s - 1 / s - 1))


@dataclass(frozen=True)
class GroundStateBundle:
    b: float
    Q: RadialField
    gradnorm_sq_Q: float
    S_b: float
    C_star: float
    m: float
    m_formula_alt: float
    K_c_Q: float
    pot_b_Q: float


def threshold_alt(P: Params, b: float, C_star: float) -> float:
    """Threshold written through the sharp constant and (a, p)."""
    a, p = P.a, P.p
    coef = (3 * (p - 2) * (2 - b) + 2 * (2 - b) * a) / ((6 * (p - 2) + 4 * a) * (3 - b))
    return coef * C_star ** (-(6 - 2 * b) / (2 - b))


def bundle(b: float, P: Params, grid: RadialGrid | None = None) -> GroundStateBundle:
    """Q, its sharp constants and the threshold m = E^c(Q) on ``grid``.

    Q is not square integrable, so the far-field closure is always used for
    its integrals whatever the grid's flag.
    """
    if grid is None:
        grid = RadialGrid()
    if not 0 < b < 2:
        raise RegimeError(f"b={b} outside (0,2)")
    grid = grid.with_far_field(True)
    Q = explicit_Q(b, grid)
    G = gradnorm_sq(Q)
    B = weighted_norm(Q, b, 6 - 2 * b)
    C_star = G ** (-(2 - b) / (2 * (3 - b)))
    m = (0.5 - 1.0 / (6 - 2 * b)) * G
    return GroundStateBundle(
        b=float(b),
        Q=Q,
        gradnorm_sq_Q=G,
        S_b=1.0 / C_star,
        C_star=C_star,
        m=m,
        m_formula_alt=threshold_alt(P, b, C_star),
        K_c_Q=G - B,
        pot_b_Q=B,
    )


# ---------------------------------------------------------------- scaling maps


def _resample(u: RadialField, stretch: float, amp: float, mass_factor: float) -> RadialField:
    """amp * u(stretch * r) by monotone cubic interpolation.

    Beyond R_max the field is continued by the grid's power-law closure when
    it has one, and by zero otherwise.
    """
    if not (np.isfinite(stretch) and stretch > 0):
        raise ValueError("scale parameter must be positive")
    g = u.grid
    if stretch == 1.0 and amp == 1.0:
        return u
    x = stretch * g.r
    inside = x <= g.r_max * (1 + 1e-12)
    out = np.zeros(g.n, complex)
    if np.any(inside):
        # underflowed tails make PCHIP's harmonic slope mean overflow harmlessly
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            re = PchipInterpolator(g.r, u.values.real, extrapolate=True)(x[inside])
            im = PchipInterpolator(g.r, u.values.imag, extrapolate=True)(x[inside])
        out[inside] = amp * (re + 1j * im)
    sigma = far_slope(u) if g.far_field else None
    if sigma is not None and sigma > 0 and not np.all(inside):
        out[~inside] = amp * u.values[-1] * (g.r_max / x[~inside]) ** sigma
    res = RadialField(g, out, real_nonneg=u.real_nonneg and bool(np.all(out.real >= 0)))
    # a closure decaying no faster than r^-3/2 has no finite mass to compare
    m0 = mass(u) if sigma is None or 2 * sigma > 3 else 0.0
    if m0 > 0:
        m1 = mass(res)
        if abs(m1 / (mass_factor * m0) - 1.0) > 1e-4:
            warnings.warn(
                f"resampling changed the expected mass by {m1 / (mass_factor * m0) - 1:.2e}; "
                "support left the grid or is under-resolved",
                ResolutionWarning,
                stacklevel=3,
            )
    return res


def scale_mass(u: RadialField, lam: float) -> RadialField:
    """u_lam = lam^(3/2) u(lam x); mass preserving."""
    return _resample(u, lam, lam**1.5, 1.0)


def scale_half(u: RadialField, lam: float) -> RadialField:
    """u^lam = lam^(1/2) u(lam x); leaves ||grad u|| and the critical terms unchanged."""
    return _resample(u, lam, lam**0.5, lam**-2.0)


def scale_nu(u: RadialField, nu: float) -> RadialField:
    """u_nu = nu u(nu^2 x); leaves ||grad u|| and pot_b unchanged."""
    return _resample(u, nu * nu, nu, nu**-4.0)


# ---------------------------------------------------------------- lambda_u


def _lemma_violations(P: Params) -> list[str]:
    out = []
    if not P.b < P.a:
        out.append(f"b={P.b} >= a={P.a}: the rescaling lemma needs b<a")
    if not P.p_lower < P.p:
        out.append(f"p={P.p} <= 2+(4-2a)/3={P.p_lower}: the rescaling lemma needs p above it")
    if P.p > 6 - 2 * P.a + 1e-12:
        out.append(f"p={P.p} > 6-2a: outside the rescaling lemma range")
    return out


def lambda_star_from_report(rep: FunctionalReport, P: Params, xtol: float = 1e-12) -> float:
    """Unique lam > 0 with K(u_lam) = 0, from the primitives of u."""
    problems = _lemma_violations(P)
    if problems:
        raise RegimeError("; ".join(problems))
    G, A, B = rep.gradnorm_sq, rep.pot_a, rep.pot_b
    if G <= 0 and A <= 0 and B <= 0:
        raise DegenerateInputError("lambda_star of the zero field")
    al = 1.5 * (P.p - 2) + P.a
    c = P.k_coeff

    # K(u_lam)/lam^2 as a function of log(lam)
    def f(x):
        lam = np.exp(x)
        return G + c * lam ** (al - 2) * A - lam ** (P.q_b - 2) * B

    xs = np.log(2.0) * np.arange(-20, 21)
    vals = [f(x) for x in xs]
    for i in range(len(xs) - 1):
        if vals[i] == 0:
            return float(np.exp(xs[i]))
        if vals[i] > 0 > vals[i + 1]:
            x = bisect(f, xs[i], xs[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=400)
            return float(np.exp(x))
    raise BracketError("no sign change of K(u_lam) for lam in [2^-20, 2^20]")


def lambda_star(u: RadialField, P: Params) -> float:
    if u.is_zero():
        raise DegenerateInputError("lambda_star of the zero field")
    return lambda_star_from_report(report(u, P), P)


# ---------------------------------------------------------------- minimizer


@dataclass(frozen=True)
class MinimizerOptions:
    max_iter: int = 4000
    energy_rtol: float = 1e-9
    patience: int = 20
    k_tol: float = 1e-4
    max_halvings: int = 40


@dataclass(frozen=True)
class MinimizerResult:
    phi: RadialField
    energy: float
    K_residual: float
    iterations: int
    converged: bool
    gradnorm_sq: float
    message: str = ""


class _Objective:
    """E with the grid's far-field closure, plus a preconditioned gradient.

    The energy is exactly the one ``report`` evaluates.  Its gradient is taken
    with the closure slope frozen at the current iterate, and preconditioned
    by the H-dot-1 metric (4 pi / h) D L D of v = r u with a free outer end.
    """

    def __init__(self, P: Params, grid: RadialGrid):
        self.P = P
        self.g = grid
        self.wa = grid.w_sing(P.a)
        self.wb = grid.w_sing(P.b)
        n = grid.n
        d = 2.0 * np.ones(n)
        d[-1] = 1.0
        e = -np.ones(n - 1)
        self.lu = lapack.dgttrf(e, d, e.copy())

    def report(self, phi) -> FunctionalReport:
        return report(RadialField(self.g, phi), self.P)

    def direction(self, phi):
        g, P = self.g, self.P
        u = RadialField(g, phi)
        s = far_slope(u)
        nl = self.wa * phi ** (P.p - 1) - self.wb * phi ** (P.q_b - 1)
        kin = np.zeros_like(phi)
        if s is not None and phi[-1] > 0:
            ta = _tail(u, P.a, P.p, s)
            tb = _tail(u, P.b, P.q_b, s)
            nl[-1] += (ta - tb) / phi[-1]
            if s > 0.5:
                kin[-1] = FOUR_PI * g.r_max * phi[-1] * (s - 1) ** 2 / (2 * s - 1)
        dl, d, du, du2, ipiv, info = self.lu
        x, info = lapack.dgttrs(dl, d, du, du2, ipiv, (nl + kin) / g.r)
        return phi + g.h / FOUR_PI * x / g.r

    def h1_inner(self, x, y):
        r = self.g.r
        return FOUR_PI / self.g.h * np.dot(np.diff(r * x, prepend=0.0), np.diff(r * y, prepend=0.0))

    def project(self, phi, rep: FunctionalReport):
        """t phi with K(t phi) = 0; the closure slope is amplitude invariant,
        so K(t phi) = t^2 G + c t^p A - t^(6-2b) B exactly."""
        P = self.P
        G, A, B = rep.gradnorm_sq, rep.pot_a, rep.pot_b
        if B <= 0:
            raise DegenerateInputError("no focusing term to project against")

        def f(x):
            t = np.exp(x)
            return G + P.k_coeff * t ** (P.p - 2) * A - t ** (P.q_b - 2) * B

        lo, hi = -1.0, 1.0
        while f(lo) <= 0:
            lo *= 2
            if lo < -200:
                raise BracketError("projection bracket failed")
        while f(hi) >= 0:
            hi *= 2
            if hi > 200:
                raise BracketError("projection bracket failed")
        t = float(np.exp(brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)))
        return t * phi, rep.scaled_amplitude(P, t)


def minimize_double_critical(
    P: Params, grid: RadialGrid | None = None, opts: MinimizerOptions | None = None
) -> MinimizerResult:
    """Projected Sobolev-gradient descent of E on the Pohozaev manifold K = 0.

    Starts from Q(b) projected on the manifold.  For p = 6-2a the Pohozaev
    and Nehari constraints coincide, so projection along the amplitude fiber
    t*phi is exact and needs no resampling.  E and K are both invariant under
    lam^(1/2) phi(lam x) in this case; the descent direction is made
    orthogonal to that orbit so the iterate does not drift in scale.
    """
    if P.groundstate_violations():
        raise RegimeError("; ".join(P.groundstate_violations()))
    grid = (grid or RadialGrid()).with_far_field(True)
    opts = opts or MinimizerOptions()
    ob = _Objective(P, grid)
    r, h = grid.r, grid.h
    phi, rep = ob.project(explicit_Q(P.b, grid).values.real.copy(), ob.report(explicit_Q(P.b, grid).values.real))
    E = rep.energy
    calm = 0
    it = 0
    tau = 1.0
    message = "max_iter reached"
    for it in range(1, opts.max_iter + 1):
        d = ob.direction(phi)
        orbit = 0.5 * phi + r * np.gradient(phi, h, edge_order=2)
        d = d - ob.h1_inner(d, orbit) / ob.h1_inner(orbit, orbit) * orbit
        tau = min(1.0, 2 * tau)
        for _ in range(opts.max_halvings):
            trial = np.abs(phi - tau * d)
            if np.any(trial > 0):
                trial, trep = ob.project(trial, ob.report(trial))
                if trep.energy < E:
                    break
            tau *= 0.5
        else:
            message = "no descent step found"
            calm = opts.patience
            break
        rel = abs(E - trep.energy) / abs(E)
        phi, rep, E = trial, trep, trep.energy
        calm = calm + 1 if rel < opts.energy_rtol else 0
        if calm >= opts.patience:
            message = "energy stalled"
            break
    field = RadialField(grid, phi, real_nonneg=True)
    rep = report(field, P)
    conv = calm >= opts.patience and abs(rep.K) <= opts.k_tol * rep.gradnorm_sq
    return MinimizerResult(
        phi=field,
        energy=rep.energy,
        K_residual=rep.K,
        iterations=it,
        converged=bool(conv),
        gradnorm_sq=rep.gradnorm_sq,
        message=message,
    )
