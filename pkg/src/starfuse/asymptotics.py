"""Many-agent behavior: phase regions of the limiting fusion risk and the
optimal risk exponent.

With identical local beliefs, the fusion agent's updated belief polarizes to
0 or 1 as the network grows; which way it goes under each hypothesis is
decided by two per-decision odds factors, partitioning the belief plane into
three regions (the fourth sign combination is infeasible). Convergence to
the regional limit is exponential, and the best achievable exponent is the
Chernoff information of the local decision channel at the best threshold.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .observation import (
    CostPair,
    ObservationModel,
    belief_from_threshold,
    decision_one_log_tails,
    gaussian_q,
    threshold_from_belief,
)


class PhaseRegion(enum.Enum):
    """Limiting value of the fusion risk as the network grows."""

    RISK_VANISHES = "Case1"
    FALSE_ALARM_FLOOR = "Case2"
    MISSED_DETECTION_FLOOR = "Case3"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class PhaseClassification:
    z1: float
    z2: float
    t0: float
    t1: float
    region: PhaseRegion
    limit_risk: float | None
    log_g0: float
    log_g1: float


def classify_phase(model: ObservationModel, costs: CostPair, q0: float, q1: float,
                   pi0: float | None = None, boundary_tol: float = 1e-12) -> PhaseClassification:
    """Classify which limit the fusion risk approaches for beliefs (q0, q1).

    ``t0 < t1`` are the true per-agent rates of deciding 1; ``z1`` and ``z2``
    are the fusion agent's perceived per-decision odds factors. The signs of
    log(z1 * z2**t0) and log(z1 * z2**t1) pick the region. Points within
    ``boundary_tol`` of a sign change are reported as BOUNDARY rather than
    forced into a region. ``limit_risk`` is filled when the true prior is
    supplied (None on a boundary).
    """
    lam1 = threshold_from_belief(model, costs, q1)
    t0 = gaussian_q(lam1 / model.sigma)
    t1 = gaussian_q((lam1 - 1.0) / model.sigma)

    lam0 = threshold_from_belief(model, costs, q0)
    lp10, lp11, lp00, lp01 = decision_one_log_tails(model, lam0)
    log_z1 = float(lp00 - lp01)
    log_z2 = float((lp01 - lp00) + (lp10 - lp11))
    g0 = log_z1 + t0 * log_z2
    g1 = log_z1 + t1 * log_z2

    if abs(g0) <= boundary_tol or abs(g1) <= boundary_tol:
        region = PhaseRegion.BOUNDARY
    elif g0 > 0.0 and g1 < 0.0:
        region = PhaseRegion.RISK_VANISHES
    elif g0 < 0.0 and g1 < 0.0:
        region = PhaseRegion.FALSE_ALARM_FLOOR
    elif g0 > 0.0 and g1 > 0.0:
        region = PhaseRegion.MISSED_DETECTION_FLOOR
    else:
        # g0 < 0 < g1 needs z2 >= 1, which the ROC ordering rules out.
        raise AssertionError("infeasible sign pattern: increasing count evidence")

    limit_risk = None
    if pi0 is not None and region is not PhaseRegion.BOUNDARY:
        if not 0.0 < pi0 < 1.0:
            raise ValueError(f"pi0={pi0!r} is degenerate: must lie strictly inside (0, 1)")
        limit_risk = {
            PhaseRegion.RISK_VANISHES: 0.0,
            PhaseRegion.FALSE_ALARM_FLOOR: costs.c_fa * pi0,
            PhaseRegion.MISSED_DETECTION_FLOOR: costs.c_md * (1.0 - pi0),
        }[region]
    return PhaseClassification(
        z1=math.exp(log_z1), z2=math.exp(log_z2), t0=float(t0), t1=float(t1),
        region=region, limit_risk=limit_risk, log_g0=g0, log_g1=g1,
    )


def exponent_objective(model: ObservationModel, lam, s):
    """log of the s-mixed overlap of the local decision channel at threshold
    ``lam``: log(a**(1-s) (1-b)**s + (1-a)**(1-s) b**s) with a = P(0|0),
    b = P(1|1). Convex in ``s``; its negated minimum is the exponent."""
    lp10, lp11, lp00, lp01 = decision_one_log_tails(model, lam)
    s = np.asarray(s, dtype=float)
    term_zero = (1.0 - s) * lp00 + s * lp01
    term_one = (1.0 - s) * lp10 + s * lp11
    out = np.logaddexp(term_zero, term_one)
    return float(out) if out.ndim == 0 else out


def _ternary_min_s(f, m: int, iters: int = 120):
    """Vectorized ternary search of a per-component convex function on [0,1]."""
    lo = np.zeros(m)
    hi = np.ones(m)
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        take_left = f(m1) <= f(m2)
        hi = np.where(take_left, m2, hi)
        lo = np.where(take_left, lo, m1)
    return 0.5 * (lo + hi)


def exponent_curve(model: ObservationModel, lam_values):
    """min over s of the exponent objective, for each threshold in ``lam_values``."""
    lam = np.atleast_1d(np.asarray(lam_values, dtype=float))
    s_best = _ternary_min_s(lambda s: exponent_objective(model, lam, s), lam.shape[0])
    values = exponent_objective(model, lam, s_best)
    return float(values[0]) if np.ndim(lam_values) == 0 else values


@dataclass(frozen=True)
class ExponentReport:
    lambda_star: float
    s_star: float
    beta_star: float
    fa_at_opt: float
    md_at_opt: float
    q_star: float
    variance_proxy: float


def optimal_exponent(model: ObservationModel, costs: CostPair | None = None,
                     grid_step: float = 1e-3, refine_tol: float = 1e-9) -> ExponentReport:
    """Best achievable risk exponent over identical local thresholds.

    Dense threshold grid over [-3 sigma, 1 + 3 sigma] with the convex inner
    minimization done by ternary search, then golden-section refinement of
    the outer threshold around the grid winner. Also reports the identical
    belief that realizes the optimal threshold under the given costs.
    """
    if costs is None:
        costs = CostPair()
    s = model.sigma
    grid = np.round(np.arange(-3.0 * s, 1.0 + 3.0 * s + grid_step / 2.0, grid_step), 12)
    values = exponent_curve(model, grid)
    i = int(np.argmin(values))

    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]

    def g_min(lam):
        s_best = _ternary_min_s(lambda ss: exponent_objective(model, np.array([lam]), ss), 1)
        return float(exponent_objective(model, np.array([lam]), s_best)[0])

    c = b - (b - a) * inv_phi
    d = a + (b - a) * inv_phi
    fc, fd = g_min(c), g_min(d)
    while abs(b - a) > refine_tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * inv_phi
            fc = g_min(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * inv_phi
            fd = g_min(d)
    lam_star = 0.5 * (a + b)
    s_star = float(_ternary_min_s(lambda ss: exponent_objective(model, np.array([lam_star]), ss), 1)[0])
    beta_star = -float(exponent_objective(model, lam_star, s_star))
    fa = float(gaussian_q(lam_star / model.sigma))
    md = 1.0 - float(gaussian_q((lam_star - 1.0) / model.sigma))
    return ExponentReport(
        lambda_star=float(lam_star),
        s_star=s_star,
        beta_star=max(beta_star, 0.0),
        fa_at_opt=fa,
        md_at_opt=md,
        q_star=belief_from_threshold(model, costs, float(lam_star)),
        variance_proxy=model.variance_proxy,
    )


def chernoff_bernoulli(p1: float, p2: float, iters: int = 120) -> float:
    """Chernoff information between Bernoulli(p1) and Bernoulli(p2)."""
    if not (0.0 < p1 < 1.0 and 0.0 < p2 < 1.0):
        raise ValueError("Bernoulli parameters must lie strictly inside (0, 1)")
    l1, l1c = math.log(p1), math.log1p(-p1)
    l2, l2c = math.log(p2), math.log1p(-p2)

    def h(s):
        return np.logaddexp(s * l1 + (1.0 - s) * l2, s * l1c + (1.0 - s) * l2c)

    lo, hi = 0.0, 1.0
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if h(m1) <= h(m2):
            hi = m2
        else:
            lo = m1
    return max(0.0, -float(h(0.5 * (lo + hi))))


@dataclass(frozen=True)
class SStarComparison:
    """Chernoff mixing weight at a threshold: the ternary-search minimizer
    (ground truth) next to a printed closed-form candidate that is retained
    for documentation and is None outside its domain."""

    numeric: float
    closed_form: float | None


def s_star_comparison(model: ObservationModel, lam: float) -> SStarComparison:
    numeric = float(_ternary_min_s(lambda ss: exponent_objective(model, np.array([lam]), ss), 1)[0])

    a = float(gaussian_q(-lam / model.sigma))           # P(decide 0 | H=0)
    b = float(gaussian_q((lam - 1.0) / model.sigma))    # P(decide 1 | H=1)
    closed_form = None
    try:
        big_a = -math.log1p(-a) + math.log(b)
        big_b = math.log(a) - math.log1p(-b)
        if big_a != 0.0 and big_b / big_a > 0.0 and big_a + big_b != 0.0:
            inner = (a / (1.0 - a) + math.log(big_b / big_a)) / (big_a + big_b)
            if inner > 0.0:
                closed_form = math.log(inner)
    except ValueError:
        closed_form = None
    return SStarComparison(numeric=numeric, closed_form=closed_form)
