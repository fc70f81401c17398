"""Virial and Morawetz quantities for radial fields.

Weights are radial functions psi(r) sampled with four derivatives.  For a
radial field the localized virial identity reads

    d^2/dt^2 int psi |u|^2 = 4 int psi'' |u_r|^2 - int Lap^2 psi |u|^2
        + 2(p-2)/p int Lap psi |x|^-a |u|^p + 4a/p int (psi'/r) |x|^-a |u|^p
        - (4-2b)/(3-b) int Lap psi |x|^-b |u|^(6-2b)
        - 2b/(3-b) int (psi'/r) |x|^-b |u|^(6-2b)

with Lap psi = psi'' + 2 psi'/r and Lap^2 psi = psi'''' + 4 psi'''/r.  The
angular-gradient term is absent because the fields are radial.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import PPoly

from .errors import PreconditionError
from .functionals import (
    FOUR_PI,
    Params,
    RadialField,
    RadialGrid,
    gradient_parts,
    gradnorm_sq,
    load_calibration,
    mass,
    weighted_sum,
)

if TYPE_CHECKING:
    from .evolution import TimeSeries


class WeightKind(str, Enum):
    QUADRATIC_CUTOFF_PSI_R = "QUADRATIC_CUTOFF_PSI_R"
    MORAWETZ_ZETA = "MORAWETZ_ZETA"
    PLAIN_QUADRATIC = "PLAIN_QUADRATIC"


@dataclass(frozen=True, eq=False)
class WeightFunction:
    kind: WeightKind
    R: float
    grid: RadialGrid
    psi: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    d4: np.ndarray

    @property
    def lap(self) -> np.ndarray:
        return self.d2 + 2 * self.d1 / self.grid.r

    @property
    def bilap(self) -> np.ndarray:
        return self.d4 + 4 * self.d3 / self.grid.r

    def compatible(self, u: RadialField) -> None:
        g = u.grid
        if g.n != self.grid.n or g.r_max != self.grid.r_max:
            raise ValueError("weight and field live on different grids")


def _ramp(alpha: float, beta: float):
    """C^1 smoothstep from 0 at alpha to 1 at beta."""

    def f(t):
        x = np.clip((t - alpha) / (beta - alpha), 0.0, 1.0)
        return x * x * (3 - 2 * x)

    return f


def _cubic_ppoly(f, breaks) -> PPoly:
    """Exact PPoly of a function that is a cubic on each interval."""
    breaks = np.asarray(breaks, float)
    c = np.zeros((4, len(breaks) - 1))
    for i in range(len(breaks) - 1):
        x0, x1 = breaks[i], breaks[i + 1]
        xs = np.linspace(x0, x1, 4)
        c[:, i] = np.polyfit(xs - x0, f(xs), 3)
    return PPoly(c, breaks, extrapolate=True)


# joins of the cutoff profile on rho - 1 in [0, 2]
_PSI_JOINS = (0.2, 0.25, 0.5, 1.8)


def _psi_profile():
    """psi(rho) = rho^2 on [0,1], 0 beyond 3, C^3, psi'' <= 2 and psi >= 0.

    psi'' = 2 - (2+A) s1 + (A+c) s2 - c s3 with smoothstep ramps s_i in
    rho - 1; A and c are fixed by psi'(3) = psi(3) = 0.
    """
    t1, t2a, t2b, t3a = _PSI_JOINS
    s1 = _ramp(1.0, 1.0 + t1)
    s2 = _ramp(1.0 + t2a, 1.0 + t2b)
    s3 = _ramp(1.0 + t3a, 3.0)
    br = [0.0, 1.0, 1.0 + t1, 1.0 + t2a, 1.0 + t2b, 1.0 + t3a, 3.0, 4.0]
    g0 = _cubic_ppoly(lambda x: 2 - 2 * s1(x), br)
    gA = _cubic_ppoly(lambda x: s2(x) - s1(x), br)
    gc = _cubic_ppoly(lambda x: s2(x) - s3(x), br)

    def end(pp):
        d1 = pp.antiderivative()
        return d1(3.0), d1.antiderivative()(3.0)

    e0, eA, ec = end(g0), end(gA), end(gc)
    M = np.array([[eA[0], ec[0]], [eA[1], ec[1]]])
    A, c = np.linalg.solve(M, -np.array(e0))
    g = PPoly(g0.c + A * gA.c + c * gc.c, g0.x, extrapolate=True)
    d1 = g.antiderivative()
    d0 = d1.antiderivative()
    return d0, d1, g


def _zeta_profile():
    """z(rho): z' = rho on [0,1/2], z' = 1 beyond 1, convex C^3 join.

    On [1/2,1], z' = 1/2 + h(t)/2 with t = 2 rho - 1 and
    h = t + 4t^3 - 7t^4 + 3t^5, so h' = (1-t)^2 (15t^2 + 2t + 1) >= 0.
    """
    # coefficients of z' in powers of (rho - x_left), highest first
    c = np.zeros((6, 3))
    c[-1, 0], c[-2, 0] = 0.0, 1.0  # rho on [0, 1/2]
    # t = 2 s, s = rho - 1/2: z' = 1/2 + s + 16 s^3 - 56 s^4 + 48 s^5
    c[:, 1] = [48.0, -56.0, 16.0, 0.0, 1.0, 0.5]
    c[-1, 2] = 1.0
    d1 = PPoly(c, [0.0, 0.5, 1.0, 2.0], extrapolate=True)
    return d1.antiderivative(), d1, d1.derivative()


_PSI = None
_ZETA = None


def _sample(profile, R: float, grid: RadialGrid, support: float | None):
    d0, d1, d2 = profile
    rho = grid.r / R
    d3 = d2.derivative()
    d4 = d2.derivative(2)
    arrs = [
        R * R * d0(rho),
        R * d1(rho),
        d2(rho),
        d3(rho) / R,
        d4(rho) / (R * R),
    ]
    if support is not None:
        out = rho >= support
        for a in arrs:
            a[out] = 0.0
    return arrs


def plain_quadratic(grid: RadialGrid) -> WeightFunction:
    r = grid.r
    z = np.zeros(grid.n)
    return WeightFunction(WeightKind.PLAIN_QUADRATIC, np.inf, grid, r * r, 2 * r, 2 + z, z, z.copy())


def psi_R(grid: RadialGrid, R: float) -> WeightFunction:
    """r^2 inside R, zero outside 3R, with psi' <= 2r and psi'' <= 2."""
    global _PSI
    if not R > 0:
        raise ValueError("R must be positive")
    if _PSI is None:
        _PSI = _psi_profile()
    psi, d1, d2, d3, d4 = _sample(_PSI, R, grid, 3.0)
    inner = grid.r <= R
    # exact on the inner ball
    psi[inner] = grid.r[inner] ** 2
    d1[inner] = 2 * grid.r[inner]
    d2[inner] = 2.0
    d3[inner] = 0.0
    d4[inner] = 0.0
    w = WeightFunction(WeightKind.QUADRATIC_CUTOFF_PSI_R, float(R), grid, psi, d1, d2, d3, d4)
    _verify_psi(w)
    return w


def zeta_weight(grid: RadialGrid, R: float) -> WeightFunction:
    """r^2/2 inside R/2, affine with slope R beyond R, convex in between."""
    global _ZETA
    if not R > 0:
        raise ValueError("R must be positive")
    if _ZETA is None:
        _ZETA = _zeta_profile()
    psi, d1, d2, d3, d4 = _sample(_ZETA, R, grid, None)
    w = WeightFunction(WeightKind.MORAWETZ_ZETA, float(R), grid, psi, d1, d2, d3, d4)
    if np.any(d1 <= 0) or np.any(d2 < -1e-12):
        raise AssertionError("zeta weight lost monotonicity or convexity")
    return w


def _verify_psi(w: WeightFunction) -> None:
    r = w.grid.r
    tol = 1e-9 * max(1.0, w.R * w.R)
    if np.any(w.psi < -tol) or np.any(w.d1 > 2 * r + tol) or np.any(w.d2 > 2 + 1e-9):
        raise AssertionError("cutoff weight violates psi>=0, psi'<=2r or psi''<=2")


def make_weight(kind: WeightKind | str, grid: RadialGrid, R: float | None = None) -> WeightFunction:
    kind = WeightKind(kind)
    if kind is WeightKind.PLAIN_QUADRATIC:
        return plain_quadratic(grid)
    if R is None:
        raise ValueError(f"{kind.value} needs a scale R")
    if kind is WeightKind.QUADRATIC_CUTOFF_PSI_R:
        return psi_R(grid, R)
    return zeta_weight(grid, R)


# ---------------------------------------------------------------- quantities


def virial_V(u: RadialField, w: WeightFunction) -> float:
    """int psi |u|^2 dx."""
    w.compatible(u)
    return weighted_sum(u, 0.0, 2.0, f=w.psi)


def _dv4(v: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order d/dr of v = r u, using that v is odd in r."""
    n = len(v)
    if n < 5:
        return np.gradient(v, h)
    ext = np.concatenate([-v[1::-1], [0.0], v])  # v_{-2}, v_{-1}, v_0, v_1..v_n
    d = np.empty(n, dtype=v.dtype)
    # interior nodes i = 1..n-2 (array index i-1), ext index of v_i is i+2
    i = np.arange(1, n - 1)
    d[:-2] = (-ext[i + 4] + 8 * ext[i + 3] - 8 * ext[i + 1] + ext[i]) / (12 * h)
    f = v
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    return d


def morawetz_M(u: RadialField, w: WeightFunction) -> float:
    """2 Im int conj(u) psi' u_r dx = 8 pi int psi' Im(conj(v) v') dr."""
    w.compatible(u)
    g = u.grid
    v = g.r * u.values
    j = np.imag(np.conj(v) * _dv4(v, g.h))
    return float(2 * FOUR_PI * g.h * np.sum(w.d1 * j))


def kinetic_weighted(u: RadialField, w: WeightFunction) -> float:
    """int psi'' |u_r|^2 dx, reducing to gradnorm_sq when psi'' = 1.

    Uses int psi''|u_r|^2 r^2 = int psi''|v'|^2 + int psi''' r|u|^2 - [psi'' r|u|^2],
    with the same differences and boundary treatment as ``gradnorm_sq``.
    """
    g = u.grid
    dv, bnd = gradient_parts(u)
    rm = g.r - 0.5 * g.h
    # psi'' at cell midpoints; exact polynomial pieces are not needed here
    d2m = np.interp(rm, np.concatenate([[0.0], g.r]), np.concatenate([[w.d2[0]], w.d2]))
    s = FOUR_PI / g.h * np.sum(d2m * np.abs(dv) ** 2) + w.d2[-1] * bnd
    s += np.sum(g.w_vol * w.d3 / g.r * np.abs(u.values) ** 2)
    return float(s)


def virial_second_derivative(
    u: RadialField, P: Params, w: WeightFunction, use_a: bool = True, use_b: bool = True
) -> float:
    """Right-hand side of the localized virial identity for radial u."""
    w.compatible(u)
    for name in ("psi", "d1", "d2", "d3", "d4"):
        if getattr(w, name) is None:
            raise ValueError(f"weight is missing {name}")
    if u.is_zero():
        return 0.0
    a, b, p, qb = P.a, P.b, P.p, P.q_b
    r = u.grid.r
    lap, bil, d1r = w.lap, w.bilap, w.d1 / r
    out = 4 * kinetic_weighted(u, w) - weighted_sum(u, 0.0, 2.0, f=bil)
    if use_a:
        out += 2 * (p - 2) / p * weighted_sum(u, a, p, f=lap)
        out += 4 * a / p * weighted_sum(u, a, p, f=d1r)
    if use_b:
        out -= (4 - 2 * b) / (3 - b) * weighted_sum(u, b, qb, f=lap)
        out -= 2 * b / (3 - b) * weighted_sum(u, b, qb, f=d1r)
    return float(out)


def virial_second_derivative_discrete(
    u: RadialField, P: Params, w: WeightFunction, use_a: bool = True, use_b: bool = True
) -> float:
    """Exact d^2/dt^2 of ``virial_V`` along the semi-discrete flow of the integrator.

    The stepper approximates i v' = H v with H = -L + diag(c), L the Dirichlet
    second difference on v = r u and c the pointwise nonlinear coefficient.
    With B = i[Psi, L] one has V' = <v, B v> and V'' = i<v, [H, B] v>, exactly.
    This differs from ``virial_second_derivative`` by O(h^2) and is the value a
    finite difference of V along a run converges to as dt -> 0.
    """
    w.compatible(u)
    g = u.grid
    if u.is_zero():
        return 0.0
    h = g.h
    v = g.r * u.values
    psi = w.psi

    def lap(x):
        y = -2.0 * x
        y[1:] += x[:-1]
        y[:-1] += x[1:]
        return y / (h * h)

    au = np.abs(u.values)
    c = np.zeros(g.n)
    if use_a:
        c += g.w_sing(P.a) / g.w_vol * au ** (P.p - 2)
    if use_b:
        c -= g.w_sing(P.b) / g.w_vol * au ** (4 - 2 * P.b)
    Hv = c * v - lap(v)
    Bv = -1j * (lap(psi * v) - psi * lap(v))
    return float(-2 * FOUR_PI * h * np.imag(np.vdot(Hv, Bv)))


def localized_pot(u: RadialField, P: Params, radius: float) -> float:
    """int over |x| <= radius of |x|^-b |u|^(6-2b)."""
    g = u.grid
    sel = g.r <= radius * (1 + 1e-12)
    return float(np.sum(g.w_sing(P.b)[sel] * np.abs(u.values[sel]) ** P.q_b))


def morawetz_action_bound(u: RadialField, w: WeightFunction, C: float | None = None) -> bool:
    """|M_psi[u]| <= C sup|psi'| ||u|| ||grad u||; for zeta sup|zeta'| = R."""
    if C is None:
        C = load_calibration()["m1_C"]
    scale = float(np.max(np.abs(w.d1)))
    lhs = abs(morawetz_M(u, w))
    return lhs <= C * scale * np.sqrt(mass(u) * gradnorm_sq(u)) * (1 + 1e-9)


# ---------------------------------------------------------------- time series


@dataclass(frozen=True)
class VirialRecord:
    t: float
    V: float
    M_psi: float
    Vpp_identity: float
    Vpp_fd: float
    Vpp_discrete: float


def second_difference(t: Sequence[float], y: Sequence[float]) -> np.ndarray:
    """Three-point second derivative on possibly uneven samples; NaN at the ends."""
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    out = np.full(len(t), np.nan)
    if len(t) < 3:
        return out
    h0 = t[1:-1] - t[:-2]
    h1 = t[2:] - t[1:-1]
    out[1:-1] = 2 * (h0 * y[2:] - (h0 + h1) * y[1:-1] + h1 * y[:-2]) / (h0 * h1 * (h0 + h1))
    return out


def virial_records(
    times: Sequence[float],
    states: Sequence[RadialField],
    P: Params,
    w: WeightFunction,
    use_a: bool = True,
    use_b: bool = True,
) -> list[VirialRecord]:
    if len(times) != len(states):
        raise ValueError("times and states differ in length")
    V = [virial_V(u, w) for u in states]
    fd = second_difference(times, V)
    return [
        VirialRecord(
            t=float(t),
            V=V[i],
            M_psi=morawetz_M(u, w),
            Vpp_identity=virial_second_derivative(u, P, w, use_a, use_b),
            Vpp_fd=float(fd[i]),
            Vpp_discrete=virial_second_derivative_discrete(u, P, w, use_a, use_b),
        )
        for i, (t, u) in enumerate(zip(times, states))
    ]


def virial_series(ts: TimeSeries, P: Params, w: WeightFunction) -> list[VirialRecord]:
    """Virial records along a run that kept its states."""
    if ts.states is None:
        raise PreconditionError("the run did not keep its states (keep_states=False)")
    return virial_records(ts.t, ts.states, P, w, ts.use_a, ts.use_b)


@dataclass(frozen=True)
class MorawetzAverage:
    lhs: float
    bound: float
    flagged: bool


def morawetz_timeavg(ts: TimeSeries, R: float, T: float, P: Params, C: float | None = None):
    """(1/T) int_0^T int_{B(R/4)} |x|^-b |u|^(6-2b) dx dt against C (R/T + R^-gamma)."""
    from .evolution import Outcome

    cal = load_calibration()
    if C is None:
        C = cal["morawetz_C"]
    if not (R > 0 and T > 0):
        raise ValueError("R and T must be positive")
    if ts.outcome is not Outcome.COMPLETED:
        raise PreconditionError(f"run ended with {ts.outcome.value}, not COMPLETED")
    if not np.isclose(ts.local_radius, R / 4, rtol=1e-12, atol=0):
        raise ValueError(f"run recorded the localized potential on B({ts.local_radius}), need B(R/4)")
    t = np.asarray(ts.t)
    if T > t[-1] * (1 + 1e-12):
        raise ValueError(f"run covers t <= {t[-1]}, shorter than T={T}")
    y = np.asarray(ts.localized_pot)
    sel = t <= T
    tt, yy = t[sel], y[sel]
    if tt[-1] < T:
        tt = np.append(tt, T)
        yy = np.append(yy, np.interp(T, t, y))
    lhs = float(trapezoid(yy, tt) / T)
    gamma = min(2.0, P.p - 2 + P.a)
    bound = C * (R / T + R**-gamma)
    return MorawetzAverage(lhs, float(bound), bool(lhs > cal["flag_factor"] * bound))


def blowup_certificate(
    ts: TimeSeries, P: Params, m: float, delta0: float, R: float, tol: float = 1e-3
) -> bool:
    """True iff the finite-difference V_R'' stays <= -8(3-b) delta0 m (1-tol)."""
    if not delta0 > 0:
        raise PreconditionError(f"delta0={delta0} <= 0: datum not strictly below threshold")
    if len(ts.mass) == 0 or ts.mass[0] == 0:
        raise PreconditionError("zero trajectory has no negative-K datum")
    if not np.isclose(ts.virial_R, R, rtol=1e-12, atol=0):
        raise ValueError(f"run recorded V_R with R={ts.virial_R}, asked for R={R}")
    fd = second_difference(ts.t, ts.V_R)[1:-1]
    if fd.size == 0:
        return False
    limit = -8 * (3 - P.b) * delta0 * m * (1 - tol)
    return bool(np.all(fd <= limit))
