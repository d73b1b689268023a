"""Deterministic dependence structures attaining the special values of DQ.

All constructions are stratified grids ``u_j = (j - 0.5) / N`` rather than
random samples, so the probability masses in the attainment results are
exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import distributions as dist
from .exceptions import InvalidInputError
from .risk_measures import check_level
from .scenarios import ScenarioMatrix


@dataclass(frozen=True)
class TailEventDiagnostic:
    is_concentrated: bool
    level: float
    tail_sets: list  # one sorted index array per column


def grid(count: int) -> np.ndarray:
    return (np.arange(1, count + 1) - 0.5) / count


def _integer_mass(alpha: float, count: int) -> int:
    m = alpha * count
    k = round(m)
    if k < 1 or abs(m - k) > 1e-9 * max(1.0, m):
        raise InvalidInputError(f"alpha * N must be a positive integer, got {m}")
    return int(k)


def make_comonotonic(marginals: Sequence[dist.UnivariateModel], count: int) -> ScenarioMatrix:
    """Column ``i`` is ``quantile(marginals[i], u)`` on a common grid ``u``."""
    if count < 2:
        raise InvalidInputError("need at least two scenarios")
    u = grid(count)
    cols = [np.asarray(dist.quantile(m, u), dtype=float) for m in marginals]
    return ScenarioMatrix(np.column_stack(cols))


def make_alpha_ce(n: int, alpha: float, count: int) -> ScenarioMatrix:
    """An alpha-concentration-exclusion model on a grid of ``count`` rows.

    With ``u`` the grid, column ``i`` equals ``1 + (i alpha - u) / alpha``
    (strictly decreasing, in ``(1, 2)``) on the slice
    ``((i - 1) alpha, i alpha]``, equals 1 elsewhere on ``(0, n alpha]``, and 0
    outside it. Strict exceedances of ``VaR_alpha = 1`` are thus mutually
    exclusive while ``(0, n alpha]`` is a common tail event.
    """
    if n < 2:
        raise InvalidInputError("need n >= 2")
    alpha = check_level(alpha)
    if not alpha < 1.0 / n:
        raise InvalidInputError("the alpha-CE construction needs alpha < 1/n")
    _integer_mass(alpha, count)
    u = grid(count)
    x = np.zeros((count, n))
    in_b = u <= n * alpha
    for i in range(n):
        lo, hi = i * alpha, (i + 1) * alpha
        col = np.where(in_b, 1.0, 0.0)
        on_slice = (u > lo) & (u <= hi)
        col[on_slice] = 1.0 + (hi - u[on_slice]) / alpha
        x[:, i] = col
    return ScenarioMatrix(x)


def make_multinomial_onehot(n: int, count: int) -> ScenarioMatrix:
    """Rows ``e_1, ..., e_n`` in equal proportion: each column is Bernoulli(1/n), sums are 1."""
    if n < 2:
        raise InvalidInputError("need n >= 2")
    if count % n:
        raise InvalidInputError("count must be divisible by n")
    return ScenarioMatrix(np.tile(np.eye(n), (count // n, 1)))


def dq_es_uniform_pair(t: float, alpha: float) -> float:
    """DQ^ES of two U[-1, 1] losses whose sum is U[-t, t]: ``(1 - (2 - 2 alpha) / t)_+ / alpha``."""
    alpha = check_level(alpha)
    if not 0 < t <= 2:
        raise InvalidInputError("t must lie in (0, 2]")
    return max(1.0 - (2.0 - 2.0 * alpha) / t, 0.0) / alpha


def tail_set(x: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` largest entries; ties go to the lower index."""
    order = np.lexsort((np.arange(x.size), -x))
    return np.sort(order[:k])


def check_alpha_concentration(scenarios: ScenarioMatrix, alpha: float) -> TailEventDiagnostic:
    """Whether every column shares the same top-``alpha N`` scenario set."""
    alpha = check_level(alpha)
    if not scenarios.uniform:
        raise InvalidInputError("concentration diagnostics need equally likely scenarios")
    k = _integer_mass(alpha, scenarios.n_scenarios)
    sets = [tail_set(scenarios.column(i), k) for i in range(scenarios.n_assets)]
    same = all(np.array_equal(sets[0], s) for s in sets[1:])
    return TailEventDiagnostic(same, alpha, sets)


def alpha_ce_conditions(scenarios: ScenarioMatrix, alpha: float) -> dict:
    """Check the four alpha-CE conditions on equally likely scenarios.

    Returns a dict with keys ``exceed_prob`` (i), ``at_least_prob`` (ii),
    ``exclusive`` (iii) and ``concentrated`` (iv), each a bool.
    """
    from .risk_measures import var_empirical

    alpha = check_level(alpha)
    n, count = scenarios.n_assets, scenarios.n_scenarios
    x = scenarios.losses
    var = np.array([var_empirical(x[:, i], alpha) for i in range(n)])
    strict = x > var
    weak = x >= var
    exceed = np.all(np.abs(strict.mean(axis=0) - alpha) <= 1e-12)
    at_least = np.all(weak.mean(axis=0) >= n * alpha - 1e-12)
    exclusive = bool(np.all(strict.sum(axis=1) <= 1))
    concentrated = check_alpha_concentration(scenarios, n * alpha).is_concentrated
    return {
        "exceed_prob": bool(exceed),
        "at_least_prob": bool(at_least),
        "exclusive": exclusive,
        "concentrated": bool(concentrated),
    }


def bernoulli_thin(scenarios: ScenarioMatrix, p: float) -> ScenarioMatrix:
    """Mix the scenario law with a point mass at zero: rows keep weight ``p``, a zero row gets ``1 - p``."""
    if not 0 < p < 1:
        raise InvalidInputError("p must lie in (0, 1)")
    probs = scenarios.probability_vector() * p
    losses = np.vstack([scenarios.losses, np.zeros((1, scenarios.n_assets))])
    probs = np.append(probs, 1.0 - p)
    probs /= math.fsum(probs)
    return ScenarioMatrix(losses, probs, scenarios.labels)
