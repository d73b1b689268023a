"""Diversification quotient and ratio on scenario data.

``DQ_alpha = alpha* / alpha`` where ``alpha*`` is the smallest level ``b``
with ``rho_b(S) <= sum_i rho_alpha(X_i)``. Three routes are available:

* ``bisection`` -- the defining infimum, by bisection on ``b``;
* ``exceedance`` -- for VaR, ``alpha* = P(S > sum_i VaR_alpha(X_i))``;
* ``rmin`` -- for ES, ``alpha* = min_r E[(r (S - sum_i ES_alpha(X_i)) + 1)_+]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import InvalidInputError, UndefinedDRError
from .risk_measures import BISECTION_TOL, EmpiricalDistribution, bisect, check_level
from .scenarios import ScenarioMatrix

MEASURES = ("VaR", "ES")
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DQResult:
    value: float
    alpha: float
    alpha_star: float
    method: str
    stderr: float | None = None

    def __float__(self) -> float:
        return float(self.value)


def normalize_measure(measure: str) -> str:
    m = str(measure).strip().lower()
    if m == "var":
        return "VaR"
    if m in ("es", "cvar", "expected shortfall"):
        return "ES"
    raise InvalidInputError(f"measure must be VaR or ES, got {measure!r}")


def _rho(ed: EmpiricalDistribution, measure: str, level: float) -> float:
    return ed.var(level) if measure == "VaR" else ed.es(level)


def _marginals(scenarios: ScenarioMatrix):
    return [EmpiricalDistribution.from_scenarios(scenarios, i) for i in range(scenarios.n_assets)]


def marginal_sum(scenarios: ScenarioMatrix, measure: str, alpha: float) -> float:
    """``sum_i rho_alpha(X_i)``."""
    measure = normalize_measure(measure)
    return float(np.sum([_rho(ed, measure, alpha) for ed in _marginals(scenarios)]))


def _alpha_star_bisection(total: EmpiricalDistribution, measure: str, threshold: float) -> float:
    def holds(b):
        return _rho(total, measure, b) <= threshold

    if total.upper() <= threshold:
        return 0.0
    hi = 1.0 - 1e-15
    if not holds(hi):
        return 1.0
    return bisect(holds, 0.0, hi, tol=BISECTION_TOL)


def alpha_star(scenarios: ScenarioMatrix, measure: str, alpha: float) -> float:
    """The defining infimum ``alpha*``, computed by bisection on ``b``.

    Returns 1 when ``rho_b(S)`` exceeds the marginal sum for every ``b``.
    """
    alpha = check_level(alpha)
    measure = normalize_measure(measure)
    threshold = marginal_sum(scenarios, measure, alpha)
    total = EmpiricalDistribution.from_scenarios(scenarios)
    return _alpha_star_bisection(total, measure, threshold)


def _exceedance(scenarios: ScenarioMatrix, threshold: float) -> float:
    hit = scenarios.total() > threshold
    if scenarios.uniform:
        return np.count_nonzero(hit) / scenarios.n_scenarios
    return float(min(scenarios.probabilities[hit].sum(), 1.0))


def _rmin_objective(r, d, p):
    return np.sum(p * np.maximum(r * d + 1.0, 0.0))


def _rmin_alpha_star(d: np.ndarray, p: np.ndarray) -> float:
    """``min_{r > 0} E[(r d + 1)_+]`` for a finite distribution of ``d``."""
    if p[d > 0].sum() == 0.0:
        return 0.0
    # exact scan: the objective is piecewise linear with kinks at -1/d for d < 0
    neg = d < 0
    pos_p = p[~neg].sum()
    pos_pd = (p[~neg] * d[~neg]).sum()
    best = float(p.sum())  # r -> 0
    if np.any(neg):
        kinks = -1.0 / d[neg]
        order = np.argsort(kinks, kind="stable")
        kinks = kinks[order]
        pn = p[neg][order]
        pdn = (p[neg] * d[neg])[order]
        suffix_p = np.concatenate([np.cumsum(pn[::-1])[::-1][1:], [0.0]])
        suffix_pd = np.concatenate([np.cumsum(pdn[::-1])[::-1][1:], [0.0]])
        vals = pos_p + kinks * pos_pd + suffix_p + kinks * suffix_pd
        best = min(best, float(vals.min()))
    # golden-section on log r as an independent bracket of the same minimum
    lo, hi = np.log(1e-12), np.log(1e12)
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = _rmin_objective(np.exp(x1), d, p)
    f2 = _rmin_objective(np.exp(x2), d, p)
    for _ in range(60):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = _rmin_objective(np.exp(x1), d, p)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = _rmin_objective(np.exp(x2), d, p)
    return max(min(best, f1, f2), 0.0)


def _batch_stderr(fn: Callable[[ScenarioMatrix], float], scenarios: ScenarioMatrix, batches: int) -> float:
    """Standard error of ``fn`` from contiguous, equally sized row batches."""
    if batches < 2:
        raise InvalidInputError("need at least two batches for a standard error")
    edges = np.linspace(0, scenarios.n_scenarios, batches + 1).astype(int)
    vals = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        p = None
        if not scenarios.uniform:
            p = scenarios.probabilities[lo:hi]
            p = p / p.sum()
        vals.append(fn(ScenarioMatrix(scenarios.losses[lo:hi], p, scenarios.labels)))
    return float(np.std(vals, ddof=1) / np.sqrt(batches))


def dq_var(scenarios: ScenarioMatrix, alpha: float, stderr_batches: int | None = None) -> DQResult:
    """``DQ^VaR_alpha = P(S > sum_i VaR_alpha(X_i)) / alpha`` (strict exceedance)."""
    alpha = check_level(alpha)
    threshold = marginal_sum(scenarios, "VaR", alpha)
    star = _exceedance(scenarios, threshold)
    if scenarios.uniform:
        # count / (N alpha) keeps integer-valued answers such as n exact
        value = np.count_nonzero(scenarios.total() > threshold) / (scenarios.n_scenarios * alpha)
    else:
        value = star / alpha
    se = None
    if stderr_batches:
        se = _batch_stderr(lambda s: dq_var(s, alpha).value, scenarios, stderr_batches)
    return DQResult(value, alpha, star, "exceedance", se)


def dq_es(
    scenarios: ScenarioMatrix,
    alpha: float,
    method: str = "rmin",
    stderr_batches: int | None = None,
) -> DQResult:
    """``DQ^ES_alpha`` by r-minimization (default) or by bisection on the defining infimum."""
    alpha = check_level(alpha)
    threshold = marginal_sum(scenarios, "ES", alpha)
    if method == "rmin":
        d = scenarios.total() - threshold
        star = _rmin_alpha_star(d, scenarios.probability_vector())
    elif method == "bisection":
        total = EmpiricalDistribution.from_scenarios(scenarios)
        star = _alpha_star_bisection(total, "ES", threshold)
    else:
        raise InvalidInputError(f"method must be 'rmin' or 'bisection', got {method!r}")
    se = None
    if stderr_batches:
        se = _batch_stderr(lambda s: dq_es(s, alpha, method).value, scenarios, stderr_batches)
    return DQResult(star / alpha, alpha, star, method, se)


def dq(scenarios: ScenarioMatrix, measure: str, alpha: float, **kwargs) -> DQResult:
    measure = normalize_measure(measure)
    if measure == "VaR":
        return dq_var(scenarios, alpha, **kwargs)
    return dq_es(scenarios, alpha, **kwargs)


def dq_bisection(scenarios: ScenarioMatrix, measure: str, alpha: float) -> DQResult:
    """DQ straight from the defining infimum."""
    alpha = check_level(alpha)
    star = alpha_star(scenarios, measure, alpha)
    return DQResult(star / alpha, alpha, star, "bisection")


def dr(scenarios: ScenarioMatrix, measure: str, alpha: float) -> float:
    """Diversification ratio ``rho_alpha(S) / sum_i rho_alpha(X_i)``."""
    alpha = check_level(alpha)
    measure = normalize_measure(measure)
    parts = [_rho(ed, measure, alpha) for ed in _marginals(scenarios)]
    den = float(np.sum(parts))
    if den == 0.0 or abs(den) <= 1e-14 * float(np.sum(np.abs(parts))):
        raise UndefinedDRError("sum of marginal risk measures is zero")
    num = _rho(EmpiricalDistribution.from_scenarios(scenarios), measure, alpha)
    return num / den
