"""Experiment configuration, dispatch and persistence.

A configuration is a JSON document with the sections ``params``, ``grid``,
``evolution``, ``initial``, ``output`` and, for sweeps, ``sweep``.  Unknown
keys anywhere are errors.  Output files carry no wall-clock data, so equal
configurations and seeds give byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import platform
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from importlib import metadata
from itertools import product
from pathlib import Path
from typing import Any

import numpy as np
import scipy
from scipy.interpolate import PchipInterpolator

from .classifier import (
    Verdict,
    bound_identity_sides,
    classify,
    gradient_lower_bound_report,
)
from .diagnostics import blowup_certificate, plain_quadratic, virial_second_derivative
from .errors import (
    BracketError,
    ConfigError,
    NumericalFailure,
    RegimeError,
)
from .evolution import CSV_COLUMNS, EvolutionConfig, Outcome, evolve
from .functionals import Params, RadialField, RadialGrid, report
from .groundstate import bundle, explicit_Q, minimize_double_critical, q_gradnorm_sq_exact, scale_mass

log = logging.getLogger(__name__)

COMMANDS = ("groundstate", "classify", "evolve", "sweep", "verify")
INITIAL_KINDS = ("gaussian", "explicit_q", "scaled_q", "file")
REGIMES = ("any", "scattering", "blowup", "groundstate")
FORMATS = ("csv", "json")
SWEEP_AXES = ("amplitude", "width", "lambda")

EXIT_OK, EXIT_CONFIG, EXIT_REGIME, EXIT_NUMERICAL = 0, 2, 3, 4
MIN_NODES = 5


# ---------------------------------------------------------------- config


@dataclass(frozen=True)
class InitialConfig:
    """Initial datum.

    gaussian:   amplitude * exp(-r^2 / width^2)
    explicit_q: amplitude * Q
    scaled_q:   amplitude * lambda^(3/2) Q(lambda r), times exp(-(r/width)^4)
                when width is given
    file:       .npy of nodal values, or a text file with columns r, re[, im]
    """

    kind: str = "gaussian"
    amplitude: float = 1.0
    width: float | None = None
    lam: float = 1.0
    path: str | None = None


@dataclass(frozen=True)
class SweepConfig:
    command: str = "evolve"
    axes: tuple = ()


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    params: Params
    regime: str = "any"
    grid: RadialGrid = field(default_factory=RadialGrid)
    evolution: EvolutionConfig | None = None
    initial: InitialConfig = field(default_factory=InitialConfig)
    out_dir: str | None = None
    formats: tuple = FORMATS
    sweep: SweepConfig | None = None
    seed: int = 0
    source: dict = field(default_factory=dict, compare=False)


def _section(doc: dict, name: str, allowed) -> dict:
    sec = doc.get(name, {})
    if sec is None:
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section '{name}' must be a table")
    extra = sorted(set(sec) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key(s) in '{name}': {', '.join(extra)}")
    return sec


def _num(sec: dict, key: str, where: str, default=None, integer=False):
    v = sec.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {v!r}")
    if integer:
        if int(v) != v:
            raise ConfigError(f"{where}.{key} must be an integer")
        return int(v)
    return float(v)


def _flag(sec: dict, key: str, where: str, default: bool) -> bool:
    v = sec.get(key, default)
    if not isinstance(v, bool):
        raise ConfigError(f"{where}.{key} must be true or false")
    return v


def parse_config(doc: dict, command: str | None = None, base_dir: Path | None = None) -> ExperimentConfig:
    """Validate a configuration document; raises ConfigError or RegimeError."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a table")
    top = ("command", "params", "grid", "evolution", "initial", "output", "sweep", "seed")
    extra = sorted(set(doc) - set(top))
    if extra:
        raise ConfigError(f"unknown top-level key(s): {', '.join(extra)}")
    cmd = doc.get("command", command)
    if command is not None and cmd != command:
        raise ConfigError(f"config says command={cmd!r} but '{command}' was requested")
    if cmd not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {cmd!r}")

    ps = _section(doc, "params", ("a", "b", "p", "regime"))
    if cmd != "verify" and not all(k in ps for k in ("a", "b", "p")):
        raise ConfigError("params needs a, b and p")
    a = _num(ps, "a", "params", 1.2)
    b = _num(ps, "b", "params", 0.8)
    p = _num(ps, "p", "params", 3.6)
    P = Params(a, b, p)
    regime = ps.get("regime", "any")
    if regime not in REGIMES:
        raise ConfigError(f"params.regime must be one of {REGIMES}")
    problems = {
        "any": [],
        "scattering": P.scattering_violations(),
        "blowup": P.blowup_violations(),
        "groundstate": P.groundstate_violations(),
    }[regime]
    if problems:
        raise RegimeError("; ".join(problems))

    gs = _section(doc, "grid", ("r_max", "n"))
    n = _num(gs, "n", "grid", 3000, integer=True)
    if n < MIN_NODES:
        raise ConfigError(f"grid.n={n} is below the {MIN_NODES} nodes the difference stencils need")
    try:
        grid = RadialGrid(n=n, r_max=_num(gs, "r_max", "grid", 30.0))
    except ValueError as e:
        raise ConfigError(str(e)) from e

    evo = None
    names = [f.name for f in dataclasses.fields(EvolutionConfig)]
    if "evolution" in doc or cmd in ("evolve", "sweep"):
        es = _section(doc, "evolution", names)
        kw = {}
        for f in dataclasses.fields(EvolutionConfig):
            if f.name not in es:
                continue
            if f.type in ("bool",):
                kw[f.name] = _flag(es, f.name, "evolution", f.default)
            elif f.name == "record_every":
                kw[f.name] = _num(es, f.name, "evolution", integer=True)
            else:
                kw[f.name] = _num(es, f.name, "evolution")
        try:
            evo = EvolutionConfig(**kw)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    ins = _section(doc, "initial", ("kind", "amplitude", "width", "lambda", "path"))
    kind = ins.get("kind", "gaussian")
    if kind not in INITIAL_KINDS:
        raise ConfigError(f"initial.kind must be one of {INITIAL_KINDS}")
    path = ins.get("path")
    if kind == "file":
        if not isinstance(path, str):
            raise ConfigError("initial.path is required for kind=file")
        fp = Path(path)
        if not fp.is_absolute() and base_dir is not None:
            fp = base_dir / fp
        if not fp.is_file():
            raise ConfigError(f"initial.path {fp} does not exist")
        path = str(fp)
    width = _num(ins, "width", "initial", 1.0 if kind == "gaussian" else None)
    init = InitialConfig(
        kind=kind,
        amplitude=_num(ins, "amplitude", "initial", 1.0),
        width=width,
        lam=_num(ins, "lambda", "initial", 1.0),
        path=path,
    )
    if init.width is not None and not init.width > 0:
        raise ConfigError("initial.width must be positive")
    if not init.lam > 0:
        raise ConfigError("initial.lambda must be positive")

    outs = _section(doc, "output", ("dir", "formats"))
    formats = outs.get("formats", list(FORMATS))
    if not isinstance(formats, list) or not set(formats) <= set(FORMATS):
        raise ConfigError(f"output.formats must be a subset of {FORMATS}")
    out_dir = outs.get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError("output.dir must be a string")

    sweep = None
    if cmd == "sweep":
        ss = _section(doc, "sweep", ("command",) + SWEEP_AXES)
        sub = ss.get("command", "evolve")
        if sub not in ("classify", "evolve"):
            raise ConfigError("sweep.command must be classify or evolve")
        axes = []
        for ax in SWEEP_AXES:
            if ax in ss:
                vals = ss[ax]
                if not isinstance(vals, list) or not all(
                    isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals
                ):
                    raise ConfigError(f"sweep.{ax} must be a list of numbers")
                axes.append((ax, tuple(float(v) for v in vals)))
        sweep = SweepConfig(command=sub, axes=tuple(axes))
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return ExperimentConfig(
        command=cmd,
        params=P,
        regime=regime,
        grid=grid,
        evolution=evo,
        initial=init,
        out_dir=out_dir,
        formats=tuple(f for f in FORMATS if f in formats),
        sweep=sweep,
        seed=seed,
        source=doc,
    )


def load_config(path: str | Path, command: str | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    return parse_config(doc, command, base_dir=path.parent)


# ---------------------------------------------------------------- serialization


def _jsonable(x):
    if isinstance(x, Enum):
        return x.value
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {f.name: _jsonable(getattr(x, f.name)) for f in dataclasses.fields(x)}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def _encode(x, indent: int) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            return "null"
        s = "%.17g" % x
        if not any(c in s for c in ".en"):
            s += ".0"
        return s
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(x, list):
        if not x:
            return "[]"
        return "[\n" + ",\n".join(pad + _encode(v, indent + 1) for v in x) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(_jsonable(obj), 0) + "\n"


def write_csv(path: Path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], float) for k in names])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for row in data:
            fh.write(",".join("%.12g" % v for v in row) + "\n")


# ---------------------------------------------------------------- pipeline


@dataclass
class RunSummary:
    """Outcome of one run.  ``wall_time`` is logged but never serialized."""

    config: dict
    classification: Any = None
    bundle: dict | None = None
    outcome: str | None = None
    results: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)
    seed: int = 0
    wall_time: float = 0.0
    error: str | None = None

    def to_dict(self) -> dict:
        d = {
            "config": self.config,
            "classification": self.classification,
            "bundle": self.bundle,
            "outcome": self.outcome,
            "results": self.results,
            "versions": self.versions,
            "seed": self.seed,
        }
        if self.error is not None:
            d["error"] = self.error
        return _jsonable(d)


def versions() -> dict:
    try:
        own = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        own = "unknown"
    return {"artifact": own, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()}


def _echo(cfg: ExperimentConfig) -> dict:
    P = cfg.params
    d = {
        "command": cfg.command,
        "params": {"a": P.a, "b": P.b, "p": P.p, "regime": cfg.regime},
        "grid": {"r_max": cfg.grid.r_max, "n": cfg.grid.n},
        "initial": {
            "kind": cfg.initial.kind,
            "amplitude": cfg.initial.amplitude,
            "width": cfg.initial.width,
            "lambda": cfg.initial.lam,
            "path": cfg.initial.path,
        },
    }
    if cfg.evolution is not None:
        d["evolution"] = dataclasses.asdict(cfg.evolution)
    if cfg.sweep is not None:
        d["sweep"] = {"command": cfg.sweep.command, **{k: list(v) for k, v in cfg.sweep.axes}}
    return d


def initial_field(init: InitialConfig, P: Params, grid: RadialGrid) -> RadialField:
    """Build the initial datum on ``grid`` (with its far-field closure)."""
    g = grid.with_far_field(True)
    if init.kind == "gaussian":
        w = init.width
        return g.sample(lambda r: init.amplitude * np.exp(-(r / w) ** 2) + 0j)
    if init.kind in ("explicit_q", "scaled_q"):
        Q = explicit_Q(P.b, g)
        if init.kind == "scaled_q" and init.lam != 1.0:
            Q = scale_mass(Q, init.lam)
        vals = init.amplitude * Q.values
        if init.kind == "scaled_q" and init.width is not None:
            vals = vals * np.exp(-((g.r / init.width) ** 4))
        return RadialField(g, vals)
    path = Path(init.path)
    if path.suffix == ".npy":
        vals = np.load(path)
        if vals.shape != (g.n,):
            raise ConfigError(f"{path} holds {vals.shape} values, grid has n={g.n}")
        return RadialField(g, vals)
    try:
        tab = np.atleast_2d(np.loadtxt(path, delimiter=None, comments="#"))
    except ValueError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    if tab.shape[1] not in (2, 3):
        raise ConfigError(f"{path} must have columns r, re[, im]")
    r = tab[:, 0]
    if np.any(np.diff(r) <= 0):
        raise ConfigError(f"{path}: radii must increase")
    inside = (g.r >= r[0]) & (g.r <= r[-1])
    vals = np.zeros(g.n, complex)
    vals[inside] = PchipInterpolator(r, tab[:, 1])(g.r[inside])
    if tab.shape[1] == 3:
        vals[inside] += 1j * PchipInterpolator(r, tab[:, 2])(g.r[inside])
    vals[g.r < r[0]] = vals[inside][0] if np.any(inside) else 0.0
    return RadialField(g, vals * init.amplitude)


def _bundle_dict(gs) -> dict:
    return {
        "m": gs.m,
        "S_b": gs.S_b,
        "C_star": gs.C_star,
        "gradnorm_sq_Q": gs.gradnorm_sq_Q,
        "m_formula_alt": gs.m_formula_alt,
        "K_c_Q": gs.K_c_Q,
    }


def _run_groundstate(cfg, summary, out):
    P = cfg.params
    gs = bundle(P.b, P, cfg.grid)
    summary.bundle = _bundle_dict(gs)
    summary.results["gradnorm_sq_Q_exact"] = q_gradnorm_sq_exact(P.b)
    cols = {"r": cfg.grid.r, "Q": gs.Q.values.real}
    if P.groundstate_regime:
        res = minimize_double_critical(P, cfg.grid.with_far_field(True))
        rep = report(res.phi, P)
        summary.results["minimizer"] = {
            "energy": res.energy,
            "K_residual": res.K_residual,
            "gradnorm_sq": res.gradnorm_sq,
            "iterations": res.iterations,
            "converged": res.converged,
            "message": res.message,
            "mass": rep.mass,
        }
        cols["phi"] = res.phi.values.real
    if out is not None and "csv" in cfg.formats:
        write_csv(out / "groundstate.csv", cols)


def _run_classify(cfg, summary, out):
    P = cfg.params
    gs = bundle(P.b, P, cfg.grid)
    summary.bundle = _bundle_dict(gs)
    u0 = initial_field(cfg.initial, P, cfg.grid)
    res = classify(u0, P, gs)
    summary.classification = res
    return u0, gs, res


def _run_evolve(cfg, summary, out):
    P = cfg.params
    u0, gs, cl = _run_classify(cfg, summary, out)
    ts = evolve(u0, P, cfg.evolution)
    summary.outcome = ts.outcome.value
    r = summary.results
    r["stop_reason"] = ts.stop_reason
    r["t_end"] = float(ts.t[-1])
    r["records"] = len(ts.t)
    r["mass_drift"] = ts.max_drift("mass")
    r["energy_drift"] = ts.max_drift("energy")
    r["sup_gradnorm_sq"] = float(np.max(ts.gradnorm_sq))
    r["min_localized_pot"] = float(np.min(ts.localized_pot))
    if cl.verdict is Verdict.K_MINUS and len(ts.t) >= 3:
        delta0 = 1 - cl.energy / gs.m
        if delta0 > 0:
            r["blowup_certificate"] = blowup_certificate(ts, P, gs.m, delta0, ts.virial_R)
    if out is not None and "csv" in cfg.formats:
        write_csv(out / "timeseries.csv", ts.columns())
    return ts


# ---------------------------------------------------------------- verify


def verify_suites(cfg: ExperimentConfig) -> dict[str, dict]:
    """Identity suites on the configured grid; each entry has pass and worst."""
    rng = np.random.default_rng(cfg.seed)
    grid = cfg.grid.with_far_field(True)
    out = {}

    worst = 0.0
    for b in (0.25, 0.5, 1.0, 1.5):
        Q = explicit_Q(b, grid)
        rep = report(Q, Params(1.0, b, 3.0))
        worst = max(worst, abs(rep.K_c) / rep.gradnorm_sq)
    out["q_pohozaev"] = {"pass": worst < 1e-4, "worst": worst, "tol": 1e-4}

    worst = 0.0
    for _ in range(50):
        P = _random_params(rng)
        gs = bundle(P.b, P, grid)
        worst = max(worst, abs(gs.m - gs.m_formula_alt) / gs.m)
    out["threshold_forms"] = {"pass": worst < 1e-6, "worst": worst, "tol": 1e-6}

    worst = 0.0
    for _ in range(100):
        P = _random_params(rng)
        lhs, rhs = bound_identity_sides(P.a, P.b, P.p)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    out["bound_identity"] = {"pass": worst <= 8 * np.finfo(float).eps, "worst": worst, "tol": 8 * np.finfo(float).eps}

    worst = 0.0
    w = plain_quadratic(grid)
    for _ in range(20):
        P = _random_params(rng)
        u = _random_field(rng, grid)
        vpp = virial_second_derivative(u, P, w)
        k8 = 8 * report(u, P).K
        worst = max(worst, abs(vpp - k8) / max(1.0, abs(k8)))
    out["virial_quadratic"] = {"pass": worst < 1e-10, "worst": worst, "tol": 1e-10}

    worst = 0.0
    for _ in range(20):
        P = _random_params(rng, blowup=True)
        gs = bundle(P.b, P, grid)
        u = _random_field(rng, grid)
        rep = report(u, P)
        lam = 1.0
        # push into K<0 by mass-preserving concentration
        while rep.scaled_mass(P, lam).K >= 0 and lam < 2**20:
            lam *= 2
        ok = gradient_lower_bound_report(rep.scaled_mass(P, lam), P, gs.m)
        worst = max(worst, 0.0 if ok else 1.0)
    out["gradient_bound"] = {"pass": worst == 0.0, "worst": worst, "tol": 0.0}
    return out


def _random_params(rng, blowup: bool = False) -> Params:
    """Admissible (a, b, p) with p above the mass-critical power; b<a if blowup."""
    while True:
        a = rng.uniform(0.05, 1.95)
        b = rng.uniform(0.05, a if blowup else 1.95)
        lo = 2 + (4 - 2 * a) / 3
        p = rng.uniform(lo, 6 - 2 * a)
        if abs(a - b) > 1e-3 and lo + 1e-6 < p < 6 - 2 * a - 1e-6:
            return Params(a, b, p)


def _random_field(rng, grid: RadialGrid) -> RadialField:
    c = rng.normal(size=3) + 1j * rng.normal(size=3)
    w = rng.uniform(0.5, 3.0, size=3)
    return grid.sample(lambda r: sum(ci * np.exp(-((r / wi) ** 2)) for ci, wi in zip(c, w)))


def _run_verify(cfg, summary, out):
    suites = verify_suites(cfg)
    summary.results["suites"] = suites
    summary.outcome = "PASS" if all(s["pass"] for s in suites.values()) else "FAIL"


# ---------------------------------------------------------------- dispatch


def _out_dir(cfg: ExperimentConfig) -> Path | None:
    if cfg.out_dir is None:
        return None
    out = Path(cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"output dir {out} is not writable: {e}") from e
    return out


def run(cfg: ExperimentConfig) -> RunSummary:
    """Dispatch one non-sweep command, write its files and return the summary."""
    if cfg.command == "sweep":
        raise ConfigError("use sweep() for sweep configurations")
    if cfg.command == "evolve" and cfg.evolution is None:
        raise ConfigError("evolve needs an evolution section")
    out = _out_dir(cfg)
    summary = RunSummary(config=_echo(cfg), versions=versions(), seed=cfg.seed)
    t0 = time.perf_counter()
    {
        "groundstate": _run_groundstate,
        "classify": _run_classify,
        "evolve": _run_evolve,
        "verify": _run_verify,
    }[cfg.command](cfg, summary, out)
    summary.wall_time = time.perf_counter() - t0
    log.info("%s finished in %.3f s", cfg.command, summary.wall_time)
    if out is not None and "json" in cfg.formats:
        (out / "summary.json").write_text(dumps(summary.to_dict()), encoding="utf-8")
    return summary


def _cells(cfg: ExperimentConfig) -> list[dict]:
    axes = cfg.sweep.axes
    if not axes or any(len(v) == 0 for _, v in axes):
        return []
    names = [n for n, _ in axes]
    return [dict(zip(names, combo)) for combo in product(*(v for _, v in axes))]


def _cell_config(cfg: ExperimentConfig, cell: dict, index: int) -> ExperimentConfig:
    init = cfg.initial
    kw = {}
    if "amplitude" in cell:
        kw["amplitude"] = cell["amplitude"]
    if "width" in cell:
        kw["width"] = cell["width"]
    if "lambda" in cell:
        kw["lam"] = cell["lambda"]
    out = None if cfg.out_dir is None else str(Path(cfg.out_dir) / f"cell_{index:04d}")
    return dataclasses.replace(
        cfg,
        command=cfg.sweep.command,
        initial=dataclasses.replace(init, **kw),
        out_dir=out,
        sweep=None,
    )


def _run_cell(cfg: ExperimentConfig) -> RunSummary:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return run(cfg)
    except (ConfigError, RegimeError, NumericalFailure, BracketError, ValueError) as e:
        return RunSummary(config=_echo(cfg), versions=versions(), seed=cfg.seed, error=f"{type(e).__name__}: {e}")


def sweep(cfg: ExperimentConfig, threads: int = 1) -> tuple[list[RunSummary], dict]:
    """Run every lattice cell and aggregate a verdict-versus-outcome table."""
    if cfg.sweep is None:
        raise ConfigError("configuration has no sweep section")
    cells = _cells(cfg)
    configs = [_cell_config(cfg, c, i) for i, c in enumerate(cells)]
    if threads > 1 and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            summaries = list(pool.map(_run_cell, configs))
    else:
        summaries = [_run_cell(c) for c in configs]
    rows = []
    for i, (cell, s) in enumerate(zip(cells, summaries)):
        cl = s.classification
        rows.append(
            {
                "cell": i,
                **cell,
                "verdict": None if cl is None else cl.verdict.value,
                "outcome": s.outcome,
                "error": s.error,
            }
        )
    report_ = {"config": _echo(cfg), "versions": versions(), "seed": cfg.seed, "table": rows}
    out = _out_dir(cfg)
    if out is not None:
        (out / "sweep.json").write_text(dumps(report_), encoding="utf-8")
    return summaries, report_


def outcome_exit_code(summary: RunSummary) -> int:
    if summary.config.get("command") == "verify" and summary.outcome != "PASS":
        return 1
    return EXIT_OK


__all__ = [
    "COMMANDS",
    "CSV_COLUMNS",
    "ExperimentConfig",
    "InitialConfig",
    "Outcome",
    "RunSummary",
    "SweepConfig",
    "dumps",
    "initial_field",
    "load_config",
    "parse_config",
    "run",
    "sweep",
    "verify_suites",
    "write_csv",
]
