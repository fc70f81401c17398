"""Radial grids, fields, singular-weight quadrature and the scalar functionals.

All integrals are over R^3 for radial profiles u(|x|).  Nodes sit at
r_i = i*h, i = 1..n, so the singular weights |x|^-kappa are never evaluated
at the origin.  The first cells are handled by a zeta-function endpoint
correction, which keeps the rule second order (or better) for integrands
r^(2-kappa) g(r) with g smooth.

A grid built with ``far_field=True`` adds an analytic power-law closure
beyond R_max: the field is continued as u(R) (R/r)^sigma with sigma the
local log-slope at the last node.  This is what lets slowly decaying
profiles such as the explicit ground state (u ~ 1/r) be integrated on a
finite box.  With ``far_field=False`` the field is taken to vanish beyond
R_max (Dirichlet box), which is the Hamiltonian the time stepper conserves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from importlib import resources

import numpy as np
from scipy.special import zeta

from .errors import (
    DegenerateInputError,
    GridTooSmallError,
    InvalidFieldError,
    RegimeError,
    UnsupportedSingularityError,
)

FOUR_PI = 4.0 * np.pi
GRID_TOL = 1e-4


def load_calibration() -> dict:
    """Frozen calibration constants shipped with the package."""
    text = resources.files("radial_inls").joinpath("data/calibration.json").read_text()
    return json.loads(text)


# ---------------------------------------------------------------- parameters


@dataclass(frozen=True)
class Params:
    """Exponents (a, b, p) of the equation with its standing assumption.

    0 < a < 2, 0 < b < 2 and 2 < p <= 6 - 2a.  The three regime predicates
    are independent and can be queried separately.
    """

    a: float
    b: float
    p: float

    def __post_init__(self):
        for name in ("a", "b", "p"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise RegimeError(f"{name}={v!r} is not finite")
            object.__setattr__(self, name, float(v))
        problems = self.standing_violations()
        if problems:
            raise RegimeError("; ".join(problems))

    def standing_violations(self) -> list[str]:
        a, b, p = self.a, self.b, self.p
        out = []
        if not 0 < a < 2:
            out.append(f"a={a} outside (0,2) violates the standing assumption")
        if not 0 < b < 2:
            out.append(f"b={b} outside (0,2) violates the standing assumption")
        if not p > 2:
            out.append(f"p={p} <= 2 violates the standing assumption")
        if p > 6 - 2 * a + 1e-12:
            out.append(f"p={p} > 6-2a={6 - 2 * a} violates the standing assumption")
        return out

    # exponents and coefficients used everywhere
    @property
    def q_b(self) -> float:
        """Energy-critical power 6 - 2b of the focusing term."""
        return 6.0 - 2.0 * self.b

    @property
    def alpha(self) -> float:
        """3(p-2) + 2a."""
        return 3.0 * (self.p - 2.0) + 2.0 * self.a

    @property
    def k_coeff(self) -> float:
        return self.alpha / (2.0 * self.p)

    @property
    def i_coeffs(self) -> tuple[float, float]:
        a, b, p = self.a, self.b, self.p
        c1 = (3 * (p - 2) - 2 * (2 - a)) / (6 * (p - 2) + 4 * a)
        c2 = (2 * (6 - 2 * b) - 3 * (p - 2) - 2 * a) / ((3 * (p - 2) + 2 * a) * (6 - 2 * b))
        return c1, c2

    @property
    def p_lower(self) -> float:
        """Mass-critical power 2 + (4 - 2a)/3."""
        return 2.0 + (4.0 - 2.0 * self.a) / 3.0

    @property
    def double_critical(self) -> bool:
        return abs(self.p - (6.0 - 2.0 * self.a)) <= 1e-12

    # regime predicates
    def scattering_violations(self) -> list[str]:
        a, b, p = self.a, self.b, self.p
        out = []
        if not 0 < a < 1:
            out.append(f"a={a} outside (0,1) violates the scattering theorem range")
        if not 0 < b < 4 / 3:
            out.append(f"b={b} outside (0,4/3) violates the scattering theorem range")
        if not a < b:
            out.append(f"a={a} >= b={b} violates the scattering theorem range (a<b)")
        if not self.p_lower < p:
            out.append(f"p={p} <= 2+(4-2a)/3={self.p_lower} violates the scattering theorem range")
        if not p < 6 - 2 * a:
            out.append(f"p={p} >= 6-2a={6 - 2 * a} violates the scattering theorem range")
        if not p >= 4:
            out.append(f"p={p} < 4 violates the scattering theorem range")
        return out

    def blowup_violations(self) -> list[str]:
        a, b, p = self.a, self.b, self.p
        out = []
        if not b < a:
            out.append(f"b={b} >= a={a} violates the blow-up theorem range (b<a)")
        if not self.p_lower < p:
            out.append(f"p={p} <= 2+(4-2a)/3={self.p_lower} violates the blow-up theorem range")
        if not p < 6 - 2 * a:
            out.append(f"p={p} >= 6-2a={6 - 2 * a} violates the blow-up theorem range")
        return out

    def groundstate_violations(self) -> list[str]:
        out = []
        if not self.double_critical:
            out.append(
                f"p={self.p} != 6-2a={6 - 2 * self.a} violates the ground-state existence range"
            )
        if not self.b < self.a:
            out.append(f"b={self.b} >= a={self.a} violates the ground-state existence range (b<a)")
        return out

    @property
    def scattering_regime(self) -> bool:
        return not self.scattering_violations()

    @property
    def blowup_regime(self) -> bool:
        return not self.blowup_violations()

    @property
    def groundstate_regime(self) -> bool:
        return not self.groundstate_violations()

    @property
    def ordering(self) -> str:
        """Which ordering of (a, b) a check ran under."""
        if self.b < self.a:
            return "b<a"
        if self.a < self.b:
            return "a<b"
        return "a=b"


# ---------------------------------------------------------------- grid, field


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid r_i = i*h on (0, r_max]."""

    n: int = 3000
    r_max: float = 30.0
    far_field: bool = True

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise GridTooSmallError(f"n={self.n} must be a positive integer")
        if not (np.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError(f"r_max={self.r_max} must be positive and finite")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "r_max", float(self.r_max))

    @cached_property
    def h(self) -> float:
        return self.r_max / self.n

    @cached_property
    def r(self) -> np.ndarray:
        r = self.h * np.arange(1, self.n + 1)
        r.setflags(write=False)
        return r

    @cached_property
    def w_vol(self) -> np.ndarray:
        return self.w_sing(0.0)

    def w_sing(self, kappa: float) -> np.ndarray:
        """Weights for the integral of |x|^-kappa f(|x|) over R^3, kappa < 3."""
        return _w_sing(self.n, self.h, float(kappa))

    def with_far_field(self, flag: bool) -> RadialGrid:
        return self if flag == self.far_field else replace(self, far_field=flag)

    def zeros(self) -> RadialField:
        return RadialField(self, np.zeros(self.n, complex))

    def sample(self, f, real_nonneg: bool = False) -> RadialField:
        """Field with values f(r) at the nodes."""
        return RadialField(self, np.asarray(f(self.r)), real_nonneg=real_nonneg)


_WCACHE: dict = {}


def _w_sing(n: int, h: float, kappa: float) -> np.ndarray:
    key = (n, h, kappa)
    w = _WCACHE.get(key)
    if w is None:
        if not kappa < 3:
            raise UnsupportedSingularityError(f"kappa={kappa} >= 3 is not integrable at 0")
        r = h * np.arange(1, n + 1)
        w = FOUR_PI * h * r ** (2.0 - kappa)
        # Navot endpoint correction for the r^(2-kappa) singularity
        w[0] -= FOUR_PI * float(zeta(kappa - 2.0)) * h ** (3.0 - kappa)
        w.setflags(write=False)
        if len(_WCACHE) > 64:
            _WCACHE.clear()
        _WCACHE[key] = w
    return w


@dataclass(frozen=True, eq=False)
class RadialField:
    """Complex radial profile on a grid; immutable."""

    grid: RadialGrid
    values: np.ndarray
    real_nonneg: bool = field(default=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex, copy=True).reshape(-1)
        if v.shape[0] != self.grid.n:
            raise InvalidFieldError(f"{v.shape[0]} values for a grid of {self.grid.n} nodes")
        if not np.all(np.isfinite(v)):
            raise InvalidFieldError("field has non-finite values")
        if self.real_nonneg and (np.any(v.imag != 0) or np.any(v.real < 0)):
            raise InvalidFieldError("field tagged real_nonneg has negative or complex values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def __mul__(self, c) -> RadialField:
        c = complex(c)
        keep = self.real_nonneg and c.imag == 0 and c.real >= 0
        return RadialField(self.grid, self.values * c, real_nonneg=keep)

    __rmul__ = __mul__

    def with_values(self, values, real_nonneg: bool = False) -> RadialField:
        return RadialField(self.grid, values, real_nonneg=real_nonneg)

    def on(self, grid: RadialGrid) -> RadialField:
        """Same nodal values attached to a grid with another closure flag."""
        if grid.n != self.grid.n or grid.r_max != self.grid.r_max:
            raise InvalidFieldError("grids have different nodes")
        return RadialField(grid, self.values, real_nonneg=self.real_nonneg)


# ---------------------------------------------------------------- closure


def far_slope(u: RadialField) -> float | None:
    """Local decay exponent sigma with |u| ~ r^-sigma at R_max, or None."""
    g = u.grid
    if g.n < 3:
        return None
    a = u.abs
    un = a[-1]
    if not (un > 0):
        return None
    d = (3 * a[-1] - 4 * a[-2] + a[-3]) / (2 * g.h)
    s = -g.r_max * d / un
    return float(s) if np.isfinite(s) else None


def _tail(u: RadialField, kappa: float, q: float, sigma: float | None) -> float:
    """Integral of |x|^-kappa |u|^q beyond the last cell under the power-law closure."""
    if sigma is None or not u.grid.far_field:
        return 0.0
    e = q * sigma + kappa - 3.0
    if e <= 0:
        return 0.0
    R = u.grid.r_max
    re = R + 0.5 * u.grid.h
    un = abs(u.values[-1])
    # R^(q sigma) re^-e written so that steep tails cannot overflow
    return float(FOUR_PI * un**q * R ** (3.0 - kappa) * (R / re) ** e / e)


def weighted_sum(u: RadialField, kappa: float, q: float, f=None, sigma=False) -> float:
    """Integral of f |x|^-kappa |u|^q over R^3, with the grid's closure.

    ``f`` is an optional smooth nodal factor; the tail is weighted by its
    last value.  ``sigma`` may be passed to avoid recomputing the slope.
    """
    w = u.grid.w_sing(kappa)
    aq = u.abs**q
    s = np.sum(w * aq) if f is None else np.sum(w * f * aq)
    if u.grid.far_field:
        if sigma is False:
            sigma = far_slope(u)
        t = _tail(u, kappa, q, sigma)
        if t:
            s += t if f is None else f[-1] * t
    return float(s)


def gradient_parts(u: RadialField) -> tuple[np.ndarray, float]:
    """Jumps of v = r u between nodes (v_0 = 0) and the boundary term.

    gradnorm_sq = 4 pi / h * sum |dv|^2 + boundary.  With the closure the
    boundary term is the exterior contribution 4 pi R |u_n|^2 (s-1)^2/(2s-1);
    in the Dirichlet box it is the jump to v_{n+1} = 0.
    """
    g = u.grid
    v = g.r * u.values
    dv = np.diff(v, prepend=0.0)
    if g.far_field:
        s = far_slope(u)
        if s is not None and s > 0.5:
            bnd = FOUR_PI * g.r_max * abs(u.values[-1]) ** 2 * (s - 1.0) ** 2 / (2 * s - 1.0)
        else:
            bnd = 0.0
    else:
        bnd = FOUR_PI * abs(v[-1]) ** 2 / g.h
    return dv, float(bnd)


# ---------------------------------------------------------------- functionals


def _check(u: RadialField):
    if not isinstance(u, RadialField):
        raise InvalidFieldError(f"expected RadialField, got {type(u).__name__}")


def mass(u: RadialField) -> float:
    """Integral of |u|^2 over R^3."""
    _check(u)
    return weighted_sum(u, 0.0, 2.0)


def weighted_norm(u: RadialField, kappa: float, q: float) -> float:
    """Integral of |x|^-kappa |u|^q over R^3 for 0 <= kappa < 2, q >= 1."""
    _check(u)
    if not 0 <= kappa < 2:
        raise UnsupportedSingularityError(f"kappa={kappa} outside [0,2)")
    if not q >= 1:
        raise ValueError(f"q={q} < 1")
    return weighted_sum(u, kappa, q)


def gradnorm_sq(u: RadialField) -> float:
    """||grad u||^2 by first differences of v = r u."""
    _check(u)
    if u.grid.n < 3:
        raise GridTooSmallError("gradnorm_sq needs n >= 3")
    dv, bnd = gradient_parts(u)
    return float(FOUR_PI / u.grid.h * np.sum(np.abs(dv) ** 2) + bnd)


@dataclass(frozen=True)
class FunctionalReport:
    mass: float
    energy: float
    energy_c: float
    gradnorm_sq: float
    K: float
    K_c: float
    I: float
    pot_a: float
    pot_b: float

    @classmethod
    def from_primitives(cls, P: Params, mass: float, G: float, A: float, B: float):
        """Assemble every functional from mass, ||grad u||^2, pot_a and pot_b."""
        qb = P.q_b
        c1, c2 = P.i_coeffs
        return cls(
            mass=float(mass),
            energy=G / 2 + A / P.p - B / qb,
            energy_c=G / 2 - B / qb,
            gradnorm_sq=float(G),
            K=G + P.k_coeff * A - B,
            K_c=G - B,
            I=c1 * G + c2 * B,
            pot_a=float(A),
            pot_b=float(B),
        )

    def scaled_mass(self, P: Params, lam: float) -> FunctionalReport:
        """Exact report of lam^(3/2) u(lam x)."""
        return FunctionalReport.from_primitives(
            P,
            self.mass,
            lam**2 * self.gradnorm_sq,
            lam ** (1.5 * (P.p - 2) + P.a) * self.pot_a,
            lam**P.q_b * self.pot_b,
        )

    def scaled_amplitude(self, P: Params, t: float) -> FunctionalReport:
        """Exact report of t u."""
        return FunctionalReport.from_primitives(
            P, t * t * self.mass, t * t * self.gradnorm_sq, t**P.p * self.pot_a,
            t**P.q_b * self.pot_b,
        )


def report(u: RadialField, P: Params) -> FunctionalReport:
    _check(u)
    if u.is_zero():
        return FunctionalReport.from_primitives(P, 0.0, 0.0, 0.0, 0.0)
    s = far_slope(u)
    return FunctionalReport.from_primitives(
        P,
        weighted_sum(u, 0.0, 2.0, sigma=s),
        gradnorm_sq(u),
        weighted_sum(u, P.a, P.p, sigma=s),
        weighted_sum(u, P.b, P.q_b, sigma=s),
    )


def gn_ratio(u: RadialField, kappa: float, q: float) -> float:
    """Weighted norm over the Gagliardo-Nirenberg denominator."""
    _check(u)
    if not 0 < kappa < 2:
        raise UnsupportedSingularityError(f"kappa={kappa} outside (0,2)")
    if not 2 < q <= 6 - 2 * kappa + 1e-12:
        raise ValueError(f"q={q} outside (2, 6-2kappa]")
    if u.is_zero():
        raise DegenerateInputError("gn_ratio of the zero field")
    g_exp = (1.5 * q + kappa - 3) / 2
    m_exp = (3 - kappa - q / 2) / 2
    den = gradnorm_sq(u) ** g_exp
    if abs(m_exp) > 1e-12:
        den *= mass(u) ** m_exp
    return weighted_norm(u, kappa, q) / den


def strauss_bound_check(u: RadialField, R: float, C: float | None = None) -> bool:
    """max_{r>=R} r|u(r)| <= C mass^(1/4) gradnorm_sq^(1/4)."""
    _check(u)
    if not R > 0:
        raise ValueError("R must be positive")
    if C is None:
        C = load_calibration()["strauss_C"]
    sel = u.grid.r >= R
    lhs = float(np.max(u.grid.r[sel] * u.abs[sel])) if np.any(sel) else 0.0
    if lhs == 0.0:
        return True
    return lhs <= C * mass(u) ** 0.25 * gradnorm_sq(u) ** 0.25
