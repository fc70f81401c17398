"""Strang-split time integration of radial solutions in a Dirichlet box.

The linear part acts on v = r u, which turns the radial Laplacian into
d^2/dr^2 with v(0) = v(R_max + h) = 0, and is advanced by Crank-Nicolson.
The nonlinear part only rotates the phase of u pointwise, so it is solved
exactly.  Both substeps preserve the discrete mass sum(w_vol |u|^2), and
the discrete energy with the Dirichlet gradient form is conserved up to the
splitting error O(dt^2).

The nonlinear coefficients are w_sing(kappa)/w_vol rather than r^-kappa, so
the flow is the Hamiltonian flow of exactly the quadrature energy reported
by ``functionals`` on the same grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.fft
from scipy.linalg import lapack

from .diagnostics import localized_pot, psi_R, virial_V, virial_second_derivative
from .errors import NumericalFailure, PreconditionError, ResolutionWarning, StepSizeWarning
from .functionals import FunctionalReport, Params, RadialField, RadialGrid, gradnorm_sq, report

CSV_COLUMNS = ("t", "mass", "energy", "gradnorm_sq", "K", "K_c", "pot_a", "pot_b", "V_R", "localized_pot")


class Outcome(str, Enum):
    COMPLETED = "COMPLETED"
    BLOWUP_DETECTED = "BLOWUP_DETECTED"
    RESOLUTION_LOST = "RESOLUTION_LOST"


@dataclass(frozen=True)
class EvolutionConfig:
    """Time stepping and monitoring options.

    ``local_radius`` defaults to virial_R/4, the ball used by the time-averaged
    Morawetz bound.  ``boundary_tol`` stops the run once |u| at the wall
    exceeds that fraction of max|u|.
    """

    dt: float = 1e-4
    t_max: float = 1.0
    record_every: int = 100
    blowup_grad_factor: float = 25.0
    resolution_sentinel: float = 0.2
    use_a: bool = True
    use_b: bool = True
    virial_R: float = 8.0
    local_radius: float | None = None
    boundary_tol: float = 1e-4
    keep_states: bool = False

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt={self.dt} must be positive")
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise ValueError(f"t_max={self.t_max} must be positive")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError(f"record_every={self.record_every} must be a positive integer")
        if not self.blowup_grad_factor > 1:
            raise ValueError("blowup_grad_factor must exceed 1")
        if not 0 < self.resolution_sentinel <= 1:
            raise ValueError("resolution_sentinel must lie in (0, 1]")
        if not self.virial_R > 0:
            raise ValueError("virial_R must be positive")
        if self.local_radius is not None and not self.local_radius > 0:
            raise ValueError("local_radius must be positive")
        if not self.boundary_tol > 0:
            raise ValueError("boundary_tol must be positive")
        object.__setattr__(self, "record_every", int(self.record_every))

    @property
    def radius(self) -> float:
        return self.virial_R / 4 if self.local_radius is None else float(self.local_radius)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Records of a run; ``energy`` is the Hamiltonian of the integrated flow.

    With a nonlinearity switched off its potential is left out of ``energy``;
    K, K_c, pot_a and pot_b are always those of the full model.
    """

    t: np.ndarray
    mass: np.ndarray
    energy: np.ndarray
    gradnorm_sq: np.ndarray
    K: np.ndarray
    K_c: np.ndarray
    pot_a: np.ndarray
    pot_b: np.ndarray
    V_R: np.ndarray
    localized_pot: np.ndarray
    outcome: Outcome
    stop_reason: str
    final: RadialField
    dt: float
    use_a: bool
    use_b: bool
    virial_R: float
    local_radius: float
    states: list | None = field(default=None)

    def columns(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in CSV_COLUMNS}

    def max_drift(self, name: str) -> float:
        """max_t |q(t)/q(0) - 1| for a recorded quantity."""
        y = np.asarray(getattr(self, name))
        if y[0] == 0:
            return float(np.max(np.abs(y)))
        return float(np.max(np.abs(y / y[0] - 1)))


# ---------------------------------------------------------------- stepping


class _Stepper:
    """Factorized Crank-Nicolson solve plus the phase coefficients."""

    def __init__(self, grid: RadialGrid, P: Params, dt: float, use_a: bool, use_b: bool):
        self.grid = grid
        self.P = P
        self.dt = dt
        n, h = grid.n, grid.h
        th = 1j * dt / (2 * h * h)
        self.th = th
        off = np.full(n - 1, -th, complex)
        diag = np.full(n, 1 + 2 * th, complex)
        dl, d, du, du2, ipiv, info = lapack.zgttrf(off, diag, off.copy())
        if info != 0:
            raise NumericalFailure(f"tridiagonal factorization failed (info={info})")
        self._lu = (dl, d, du, du2, ipiv)
        wv = grid.w_vol
        self.ca = grid.w_sing(P.a) / wv if use_a else None
        self.cb = grid.w_sing(P.b) / wv if use_b else None

    def _phase(self, u: np.ndarray, tau: float) -> np.ndarray:
        if self.ca is None and self.cb is None:
            return u
        au = np.abs(u)
        V = np.zeros(len(u))
        if self.ca is not None:
            V += self.ca * au ** (self.P.p - 2)
        if self.cb is not None:
            V -= self.cb * au ** (4 - 2 * self.P.b)
        return u * np.exp(-1j * tau * V)

    def _linear(self, u: np.ndarray) -> np.ndarray:
        r, th = self.grid.r, self.th
        v = r * u
        rhs = (1 - 2 * th) * v
        rhs[1:] += th * v[:-1]
        rhs[:-1] += th * v[1:]
        v, info = lapack.zgttrs(*self._lu, rhs)
        if info != 0:
            raise NumericalFailure(f"tridiagonal solve failed (info={info})")
        return v / r

    def __call__(self, u: np.ndarray) -> np.ndarray:
        half = 0.5 * self.dt
        u = self._phase(self._linear(self._phase(u, half)), half)
        if not np.all(np.isfinite(u)):
            raise NumericalFailure("non-finite values after a time step")
        return u


def _guard(grid: RadialGrid, dt: float) -> None:
    if dt > 0.5 * grid.h**2 * (1 + 1e-12):
        warnings.warn(
            f"dt={dt:g} exceeds h^2/2={0.5 * grid.h**2:g}; high wavenumbers are phase-aliased",
            StepSizeWarning,
            stacklevel=3,
        )


def step(u: RadialField, P: Params, dt: float, use_a: bool = True, use_b: bool = True) -> RadialField:
    """One Strang step: half nonlinear phase, Crank-Nicolson, half phase."""
    if not dt > 0:
        raise ValueError(f"dt={dt} must be positive")
    if u.grid.n < 2:
        raise PreconditionError("time stepping needs at least two nodes")
    _guard(u.grid, dt)
    if u.is_zero():
        return u.with_values(u.values)
    return u.with_values(_Stepper(u.grid, P, dt, use_a, use_b)(u.values))


# ---------------------------------------------------------------- monitors


def spectral_tail_fraction(u: RadialField) -> float:
    """Fraction of the Dirichlet gradient energy above a tenth of the grid's top wavenumber."""
    g = u.grid
    v = g.r * u.values
    c = scipy.fft.dst(v.real, type=1, norm="ortho") + 1j * scipy.fft.dst(v.imag, type=1, norm="ortho")
    j = np.arange(1, g.n + 1)
    lam = np.sin(0.5 * np.pi * j / (g.n + 1)) ** 2
    e = lam * np.abs(c) ** 2
    tot = e.sum()
    if tot == 0:
        return 0.0
    return float(e[j > g.n / 10].sum() / tot)


def _energy(rep: FunctionalReport, P: Params, use_a: bool, use_b: bool) -> float:
    e = rep.gradnorm_sq / 2
    if use_a:
        e += rep.pot_a / P.p
    if use_b:
        e -= rep.pot_b / P.q_b
    return e


# ---------------------------------------------------------------- driver


def evolve(u0: RadialField, P: Params, cfg: EvolutionConfig) -> TimeSeries:
    """Integrate to cfg.t_max unless blow-up or loss of resolution stops the run.

    Blow-up is declared once ||grad u||^2 exceeds blowup_grad_factor^2 times
    its initial value while the localized virial V_R'' (evaluated by the
    identity at the current state) is negative.  RESOLUTION_LOST is reported
    when the spectral sentinel or the wall amplitude check trips.
    """
    grid = u0.grid.with_far_field(False)
    u = u0.on(grid).values.copy()
    stepper = _Stepper(grid, P, cfg.dt, cfg.use_a, cfg.use_b)
    _guard(grid, cfg.dt)
    weight = psi_R(grid, cfg.virial_R)
    radius = cfg.radius
    cols = {name: [] for name in CSV_COLUMNS}
    states = [] if cfg.keep_states else None

    def record(t, field_):
        rep = report(field_, P)
        cols["t"].append(t)
        cols["mass"].append(rep.mass)
        cols["energy"].append(_energy(rep, P, cfg.use_a, cfg.use_b))
        cols["gradnorm_sq"].append(rep.gradnorm_sq)
        cols["K"].append(rep.K)
        cols["K_c"].append(rep.K_c)
        cols["pot_a"].append(rep.pot_a)
        cols["pot_b"].append(rep.pot_b)
        cols["V_R"].append(virial_V(field_, weight))
        cols["localized_pot"].append(localized_pot(field_, P, radius))
        if states is not None:
            states.append(field_)

    f0 = RadialField(grid, u)
    record(0.0, f0)
    G0 = cols["gradnorm_sq"][0]
    g_limit = cfg.blowup_grad_factor**2 * G0
    n_full = int(math.floor(cfg.t_max / cfg.dt * (1 + 1e-12)))
    rest = cfg.t_max - n_full * cfg.dt
    if rest <= 1e-9 * cfg.dt:
        rest = 0.0
    n_steps = n_full + (1 if rest else 0)

    outcome, reason = Outcome.COMPLETED, "reached t_max"
    zero = not np.any(u)
    g_checked = G0
    t = 0.0
    for k in range(1, n_steps + 1):
        if zero:
            t = cfg.t_max
            break
        if k == n_full + 1:
            u = _Stepper(grid, P, rest, cfg.use_a, cfg.use_b)(u)
            t = cfg.t_max
        else:
            u = stepper(u)
            t = k * cfg.dt
        fk = RadialField(grid, u)
        G = gradnorm_sq(fk)
        if G > g_limit and virial_second_derivative(fk, P, weight, cfg.use_a, cfg.use_b) < 0:
            outcome, reason = Outcome.BLOWUP_DETECTED, f"gradnorm_sq grew by {G / G0:.6g}"
            break
        at_record = k % cfg.record_every == 0 or k == n_steps
        if at_record or G > 1.5 * g_checked:
            g_checked = G
            frac = spectral_tail_fraction(fk)
            if frac > cfg.resolution_sentinel:
                outcome, reason = Outcome.RESOLUTION_LOST, f"spectral tail fraction {frac:.3g}"
                break
        if at_record:
            amax = np.max(np.abs(u))
            if abs(u[-1]) > cfg.boundary_tol * amax:
                outcome, reason = Outcome.RESOLUTION_LOST, "amplitude reached the outer wall"
                break
            record(t, fk)
    if outcome is not Outcome.COMPLETED or zero:
        if t > cols["t"][-1]:
            record(t, RadialField(grid, u))
    if outcome is Outcome.RESOLUTION_LOST:
        warnings.warn(f"evolution stopped at t={t:g}: {reason}", ResolutionWarning, stacklevel=2)

    arrays = {name: np.asarray(vals, float) for name, vals in cols.items()}
    return TimeSeries(
        **arrays,
        outcome=outcome,
        stop_reason=reason,
        final=RadialField(grid, u),
        dt=cfg.dt,
        use_a=cfg.use_a,
        use_b=cfg.use_b,
        virial_R=cfg.virial_R,
        local_radius=radius,
        states=states,
    )


def scattering_indicator(ts: TimeSeries, window: tuple[float, float]) -> float:
    """Minimum of the localized potential over the records with t in window."""
    t0, t1 = window
    if not t0 <= t1:
        raise ValueError(f"window {window} is empty")
    t = ts.t
    if t1 > t[-1] * (1 + 1e-12) + 1e-12:
        raise PreconditionError(f"window ends at {t1} after the last record t={t[-1]}")
    sel = (t >= t0 - 1e-12) & (t <= t1 + 1e-12)
    if not np.any(sel):
        raise ValueError(f"no records in the window {window}")
    return float(np.min(ts.localized_pot[sel]))
