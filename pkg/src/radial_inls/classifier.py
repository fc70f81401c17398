"""Sub-threshold classification and the variational inequalities around Q.

Data with E(u) < m split by the sign of K into a global (K >= 0) and a
blow-up (K < 0) set; on these sets the sign test agrees with comparing
||grad u|| against ||grad Q||.  The checks below evaluate those statements
for given fields with a relative tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import PreconditionError, RegimeError
from .functionals import FunctionalReport, Params, RadialField, gradnorm_sq, report, weighted_norm
from .groundstate import GroundStateBundle

TOL = 1e-3


class Verdict(str, Enum):
    K_PLUS = "K_PLUS"
    K_MINUS = "K_MINUS"
    ABOVE_THRESHOLD = "ABOVE_THRESHOLD"
    ZERO = "ZERO"


@dataclass(frozen=True)
class ClassificationResult:
    """Verdict with the numbers it was based on.

    ``consistent`` says whether the K-sign test and the gradient test agree;
    it is only informative when energy < m and is True otherwise.
    ``ordering`` records whether the check ran with b<a, a<b or a=b.
    """

    verdict: Verdict
    energy: float
    m: float
    K: float
    gradnorm_sq: float
    gradnorm_sq_Q: float
    consistent: bool
    ordering: str


def _same_b(P: Params, gs: GroundStateBundle) -> None:
    if abs(gs.b - P.b) > 1e-12:
        raise ValueError(f"ground-state bundle built for b={gs.b}, params have b={P.b}")


def classify_report(rep: FunctionalReport, P: Params, gs: GroundStateBundle) -> ClassificationResult:
    _same_b(P, gs)
    G, GQ = rep.gradnorm_sq, gs.gradnorm_sq_Q
    if rep.mass == 0 and G == 0:
        verdict, consistent = Verdict.ZERO, True
    elif rep.energy >= gs.m:
        verdict, consistent = Verdict.ABOVE_THRESHOLD, True
    else:
        verdict = Verdict.K_PLUS if rep.K >= 0 else Verdict.K_MINUS
        consistent = (rep.K >= 0) == (G < GQ)
    return ClassificationResult(
        verdict=verdict,
        energy=rep.energy,
        m=gs.m,
        K=rep.K,
        gradnorm_sq=G,
        gradnorm_sq_Q=GQ,
        consistent=bool(consistent),
        ordering=P.ordering,
    )


def classify(u0: RadialField, P: Params, gs: GroundStateBundle) -> ClassificationResult:
    """Verdict by energy against m, then by the sign of K."""
    return classify_report(report(u0, P), P, gs)


def _clem_violations(P: Params) -> list[str]:
    out = []
    if not P.b < P.a:
        out.append(f"b={P.b} >= a={P.a} violates the variational lemma range (b<a)")
    if not P.p_lower < P.p < 6 - 2 * P.a:
        out.append(
            f"p={P.p} outside (2+(4-2a)/3, 6-2a)=({P.p_lower}, {6 - 2 * P.a}) "
            "violates the variational lemma range"
        )
    return out


def _gate(P: Params) -> None:
    problems = _clem_violations(P)
    if problems:
        raise RegimeError("; ".join(problems))


def check_clem1_report(rep: FunctionalReport, P: Params, m: float, tol: float = TOL) -> bool:
    _gate(P)
    return bool(rep.K > 0 or rep.I >= m * (1 - tol))


def check_clem2_report(rep: FunctionalReport, P: Params, m: float, tol: float = TOL) -> bool:
    _gate(P)
    return bool(rep.K_c > 0 or rep.I >= m * (1 - tol))


def check_clem1(u: RadialField, P: Params, m: float, tol: float = TOL) -> bool:
    """K(u) <= 0 implies I(u) >= m (1 - tol)."""
    return check_clem1_report(report(u, P), P, m, tol)


def check_clem2(u: RadialField, P: Params, m: float, tol: float = TOL) -> bool:
    """K_c(u) <= 0 implies I(u) >= m (1 - tol)."""
    return check_clem2_report(report(u, P), P, m, tol)


def gradient_bound_coefficient(P: Params) -> float:
    """c with ||grad u||^2 >= c m whenever K(u) < 0; c m equals ||grad Q||^2."""
    a, b, p = P.a, P.b, P.p
    return (6 * (p - 2) + 4 * a) * (3 - b) / (3 * (p - 2) * (2 - b) + 2 * (2 - b) * a)


def bound_identity_sides(a: float, b: float, p: float) -> tuple[float, float]:
    """Both sides of (6(p-2)+4a)(16-8b) = 16(3(p-2)(2-b)+2(2-b)a)."""
    return (6 * (p - 2) + 4 * a) * (16 - 8 * b), 16 * (3 * (p - 2) * (2 - b) + 2 * (2 - b) * a)


def gradient_lower_bound_report(rep: FunctionalReport, P: Params, m: float, tol: float = TOL) -> bool:
    if not rep.K < 0:
        raise PreconditionError(f"K(u)={rep.K} >= 0: the gradient bound applies only when K<0")
    return bool(rep.gradnorm_sq >= gradient_bound_coefficient(P) * m * (1 - tol))


def gradient_lower_bound(u: RadialField, P: Params, m: float, tol: float = TOL) -> bool:
    """||grad u||^2 >= c m (1 - tol) for a field with K(u) < 0."""
    return gradient_lower_bound_report(report(u, P), P, m, tol)


def coercivity_margin(u: RadialField, gs: GroundStateBundle, eps: float, tol: float = 1e-9) -> float:
    """K_c(u) - [(1 - (1-eps)^(2-b)) / (1-eps)^(2-b)] pot_b(u).

    Requires ||grad u||^2 <= (1-eps) ||grad Q||^2; the result is then >= 0 up
    to quadrature error.
    """
    if not 0 <= eps < 1:
        raise ValueError(f"eps={eps} outside [0,1)")
    b = gs.b
    G = gradnorm_sq(u)
    if G > (1 - eps) * gs.gradnorm_sq_Q * (1 + tol):
        raise PreconditionError(
            f"||grad u||^2={G} exceeds (1-eps)||grad Q||^2={(1 - eps) * gs.gradnorm_sq_Q}"
        )
    if u.is_zero():
        return 0.0
    B = weighted_norm(u, b, 6 - 2 * b)
    s = (1 - eps) ** (2 - b)
    return float(G - B - (1 - s) / s * B)
