"""Empirical VaR/ES, the superquantile transform and PELVE.

Conventions follow the small-alpha convention: ``VaR_alpha(X)`` is the
left-continuous ``(1 - alpha)``-quantile and ``ES_alpha(X)`` the average of
``VaR_b(X)`` over ``b`` in ``(0, alpha]``.

Empirical quantities are computed from the upper tail downward (sorted
descending, cumulative tail mass), which avoids forming ``1 - alpha``.
"""

from __future__ import annotations

import math
from typing import Union

import numpy as np

from . import distributions as dist
from .exceptions import CalibrationError, InvalidInputError, UnsupportedMeasureError

# tolerance when comparing cumulative probabilities with a level
PROB_TOL = 1e-12
BISECTION_TOL = 1e-12
BISECTION_MAXITER = 200


def check_level(alpha: float, name: str = "alpha") -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"{name} must lie in (0, 1), got {alpha}")
    return alpha


class EmpiricalDistribution:
    """Discrete distribution of a sample, optionally with probabilities.

    Parameters
    ----------
    values : array_like
        Sample values.
    probabilities : array_like, optional
        Probability of each value; equally likely when omitted. Duplicate
        values are allowed.
    """

    def __init__(self, values, probabilities=None):
        v = np.asarray(values, dtype=float).reshape(-1)
        if v.size == 0:
            raise InvalidInputError("empirical distribution needs at least one value")
        order = np.argsort(-v, kind="stable")
        self.desc = v[order]
        self.size = v.size
        if probabilities is None:
            self.probs = None
            self._csum = np.concatenate([[0.0], np.cumsum(self.desc)])
        else:
            p = np.asarray(probabilities, dtype=float).reshape(-1)[order]
            if p.shape != v.shape:
                raise InvalidInputError("need one probability per value")
            self.probs = p
            # tail[k] = mass of the k largest values
            self._tail = np.concatenate([[0.0], np.cumsum(p)])
            self._tail /= self._tail[-1]
            self._pcsum = np.concatenate([[0.0], np.cumsum(p * self.desc)]) / p.sum()

    @classmethod
    def from_scenarios(cls, scenarios, column=None) -> "EmpiricalDistribution":
        x = scenarios.total() if column is None else scenarios.column(column)
        return cls(x, scenarios.probabilities)

    @property
    def values(self) -> np.ndarray:
        """Sorted values (nondecreasing)."""
        return self.desc[::-1]

    @property
    def cumulative(self) -> np.ndarray:
        """Cumulative probabilities aligned with :attr:`values`."""
        if self.probs is None:
            return np.arange(1, self.size + 1) / self.size
        return 1.0 - self._tail[::-1][1:]

    def mean(self) -> float:
        if self.probs is None:
            return float(self._csum[-1] / self.size)
        return float(self._pcsum[-1])

    def _n_above(self, alpha: float) -> tuple[int, float]:
        """Number ``j`` of top atoms with cumulative tail mass <= alpha, and that mass."""
        if self.probs is None:
            m = alpha * self.size
            j = min(int(math.floor(m * (1.0 + 1e-12))), self.size - 1)
            return j, j / self.size
        j = int(np.searchsorted(self._tail, alpha + PROB_TOL, side="right")) - 1
        j = min(j, self.size - 1)
        return j, float(self._tail[j])

    def var(self, alpha: float) -> float:
        """Smallest value whose cumulative probability is at least ``1 - alpha``."""
        j, _ = self._n_above(alpha)
        return float(self.desc[j])

    def es(self, alpha: float) -> float:
        """Exact integral of the empirical quantile function over the top ``alpha``."""
        if alpha >= 1.0:
            return self.mean()
        j, mass = self._n_above(alpha)
        if self.probs is None:
            # work in counts: alpha N rows, so integer alpha N gives exact averages
            # written as the boundary value plus the average excess of the top
            # rows, so ties at the top give the tied value exactly
            m = alpha * self.size
            x = self.desc[j]
            return float(x + (self._csum[j] - j * x) / m)
        x = self.desc[j]
        return float(x + (self._pcsum[j] - mass * x) / alpha)

    def sf(self, x: float) -> float:
        """``P(X > x)`` (strict)."""
        k = int(np.searchsorted(-self.desc, -x, side="left"))
        if self.probs is None:
            return k / self.size
        return float(self._tail[k])

    def upper(self) -> float:
        return float(self.desc[0])


Sample = Union[EmpiricalDistribution, np.ndarray]


def _as_empirical(sample) -> EmpiricalDistribution:
    if isinstance(sample, EmpiricalDistribution):
        return sample
    return EmpiricalDistribution(sample)


def var_empirical(sample: Sample, alpha: float) -> float:
    """Empirical VaR; for equal weights the ``ceil((1 - alpha) N)``-th order statistic."""
    return _as_empirical(sample).var(check_level(alpha))


def es_empirical(sample: Sample, alpha: float) -> float:
    """Empirical ES with a fractional weight on the boundary order statistic."""
    return _as_empirical(sample).es(check_level(alpha))


def superquantile_value(sample_or_model, p: float) -> float:
    """Quantile of the superquantile transform at ``p``: ``ES_{1-p}``.

    Accepts an empirical sample (array or :class:`EmpiricalDistribution`) or a
    univariate model.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InvalidInputError("p must lie in (0, 1)")
    level = 1.0 - p
    if isinstance(sample_or_model, (EmpiricalDistribution, np.ndarray, list, tuple)):
        return _as_empirical(sample_or_model).es(level)
    return dist.es_analytic(sample_or_model, level)


def bisect(fn, lo: float, hi: float, tol: float = BISECTION_TOL, maxiter: int = BISECTION_MAXITER) -> float:
    """Boundary of a predicate that is False on ``lo`` and True on ``hi``.

    Returns the right end of the final bracket, so the predicate holds there.
    """
    for _ in range(maxiter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if fn(mid):
            hi = mid
        else:
            lo = mid
    return hi


def pelve(model: dist.UnivariateModel, alpha: float) -> float:
    """Multiplier ``c >= 1`` solving ``ES_{c alpha}(X) = VaR_alpha(X)``.

    Raises
    ------
    CalibrationError
        If no ``c`` in ``[1, 1/alpha)`` solves the equation.
    """
    alpha = check_level(alpha)
    if not dist.has_finite_mean(model):
        raise UnsupportedMeasureError(f"PELVE needs a finite mean, got {model!r}")
    target = dist.var_analytic(model, alpha)
    scale = max(1.0, abs(target))

    def gap(c):
        return dist.es_analytic(model, min(c * alpha, 1.0 - 1e-15)) - target

    lo, hi = 1.0, 1.0 / alpha
    if gap(lo) < -1e-9 * scale or gap(hi) > 1e-9 * scale:
        raise CalibrationError(f"no PELVE root in [1, 1/alpha) for {model!r} at alpha={alpha}")
    for _ in range(BISECTION_MAXITER):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 4e-16 * hi:
            break
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
