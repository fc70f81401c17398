"""Radial solutions of i u_t + Lap u = |x|^-a |u|^(p-2) u - |x|^-b |u|^(4-2b) u in R^3.

Modules: ``functionals`` (grids, quadrature, energies), ``groundstate``
(explicit Q, thresholds, scalings, minimizer), ``classifier`` (sub-threshold
verdicts and variational checks), ``evolution`` (Strang time stepping),
``diagnostics`` (virial and Morawetz quantities) and ``harness`` / ``cli``.
"""

from .classifier import ClassificationResult, Verdict, classify
from .diagnostics import WeightKind, make_weight
from .evolution import EvolutionConfig, Outcome, TimeSeries, evolve, step
from .functionals import Params, RadialField, RadialGrid, report
from .groundstate import bundle, explicit_Q

__all__ = [
    "ClassificationResult",
    "EvolutionConfig",
    "Outcome",
    "Params",
    "RadialField",
    "RadialGrid",
    "TimeSeries",
    "Verdict",
    "WeightKind",
    "bundle",
    "classify",
    "evolve",
    "explicit_Q",
    "make_weight",
    "report",
    "step",
]
