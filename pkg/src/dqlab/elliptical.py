"""Closed-form DQ and DR for elliptical models.

For ``X ~ E_n(mu, Sigma, tau)`` every linear combination is a location-scale
transform of ``Y ~ E_1(0, 1, tau)``, so both quotients reduce to one-dimensional
computations on ``Y`` driven by the dispersion summary ``k_Sigma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import distributions as dist
from .distributions import EllipticalSpec
from .dq_core import DQResult, normalize_measure
from .exceptions import InvalidInputError, LimitDoesNotExistError, UndefinedDRError, UnsupportedMeasureError
from .risk_measures import BISECTION_MAXITER, check_level

LIMIT_GRID = (1e1, 1e2, 1e3, 1e4)
LIMIT_TOL = 1e-3


@dataclass(frozen=True)
class DispersionSummary:
    k_sigma: float
    avg_correlation: float


def k_sigma(sigma) -> DispersionSummary:
    """``k = sum_i sigma_i / sqrt(1' Sigma 1)`` and the average correlation ``1 / k**2``."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    if not np.any(sigma):
        raise InvalidInputError("dispersion matrix must not be all zeros")
    total = float(sigma.sum())
    if not total > 0:
        raise InvalidInputError("1' Sigma 1 must be positive")
    k = float(np.sqrt(np.clip(np.diag(sigma), 0, None)).sum() / math.sqrt(total))
    return DispersionSummary(k, 1.0 / (k * k))


def _k(spec_or_k) -> float:
    if isinstance(spec_or_k, EllipticalSpec):
        return k_sigma(spec_or_k.sigma).k_sigma
    return float(spec_or_k)


def dq_var_from_k(y: dist.UnivariateModel, k: float, alpha: float) -> float:
    """``(1 - F(k VaR_alpha(Y))) / alpha`` for a standard margin ``Y``."""
    return dist.sf(y, k * dist.var_analytic(y, alpha)) / alpha


def dq_var_elliptical(spec: EllipticalSpec, alpha: float) -> DQResult:
    """Closed-form DQ based on VaR; does not depend on the location."""
    alpha = check_level(alpha)
    value = dq_var_from_k(spec.standard(), _k(spec), alpha)
    return DQResult(value, alpha, value * alpha, "analytic")


def es_level_inverse(y: dist.UnivariateModel, target: float, upper: float) -> float:
    """Level ``b <= upper`` with ``ES_b(Y) = target``, by bisection on ``log b``.

    ``b -> ES_b(Y)`` is continuous and strictly decreasing, and
    ``ES_upper(Y) <= target`` is assumed.
    """
    hi = upper
    lo = upper
    while dist.es_analytic(y, lo) <= target:
        lo *= 1e-4
        if lo < 1e-300:
            return 0.0
    a, b = math.log(lo), math.log(hi)
    for _ in range(BISECTION_MAXITER):
        if b - a <= 1e-14:
            break
        mid = 0.5 * (a + b)
        if dist.es_analytic(y, math.exp(mid)) <= target:
            b = mid
        else:
            a = mid
    return math.exp(0.5 * (a + b))


def dq_es_from_k(y: dist.UnivariateModel, k: float, alpha: float) -> float:
    if not dist.has_finite_mean(y):
        raise UnsupportedMeasureError("ES-based DQ needs a finite mean (nu > 1)")
    if k == 1.0:
        return 1.0
    star = es_level_inverse(y, k * dist.es_analytic(y, alpha), alpha)
    return star / alpha


def dq_es_elliptical(spec: EllipticalSpec, alpha: float) -> DQResult:
    """Closed-form DQ based on ES.

    Solves ``ES_{a*}(Y) = k_Sigma ES_alpha(Y)`` for ``a*``, which is the
    superquantile-transform formula written in level space.
    """
    alpha = check_level(alpha)
    value = dq_es_from_k(spec.standard(), _k(spec), alpha)
    return DQResult(value, alpha, value * alpha, "analytic")


def dq_elliptical(spec: EllipticalSpec, measure: str, alpha: float) -> DQResult:
    if normalize_measure(measure) == "VaR":
        return dq_var_elliptical(spec, alpha)
    return dq_es_elliptical(spec, alpha)


def density_ratio_limit(
    density: Callable[[float], float],
    k: float,
    log: bool = False,
    upper_endpoint: float = math.inf,
    grid=LIMIT_GRID,
    tol: float = LIMIT_TOL,
) -> float:
    """Numerical ``lim_{x -> inf} k f(k x) / f(x)``, the small-alpha limit of DQ^VaR.

    Parameters
    ----------
    density : callable
        Density ``f`` of the standard margin (or its log when ``log=True``).
    k : float
        Dispersion summary ``k_Sigma >= 1``.
    upper_endpoint : float
        Right end of the support; a finite value gives the limit 0 directly.

    Raises
    ------
    LimitDoesNotExistError
        When successive ratios on ``grid`` differ by more than ``tol``.
    """
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    if math.isfinite(upper_endpoint):
        return 1.0 if k == 1.0 else 0.0
    if k == 1.0:
        return 1.0
    ratios = []
    for x in grid:
        if log:
            lr = math.log(k) + density(k * x) - density(x)
            ratios.append(math.exp(lr) if np.isfinite(lr) else (0.0 if lr == -math.inf else math.nan))
        else:
            fx = density(x)
            if fx <= 0:
                continue
            ratios.append(k * density(k * x) / fx)
    ratios = [r for r in ratios if np.isfinite(r)]
    if len(ratios) < 2:
        raise LimitDoesNotExistError("density ratio could not be evaluated on the grid")
    if abs(ratios[-1] - ratios[-2]) >= tol:
        raise LimitDoesNotExistError(f"density ratio has not settled: {ratios}")
    return float(ratios[-1])


def dq_var_limit(spec_or_family, k: float | None = None, nu: float | None = None) -> float:
    """``lim_{alpha -> 0} DQ^VaR_alpha``: ``1{k = 1}`` for normal, ``k**-nu`` for t.

    Accepts an :class:`EllipticalSpec`, or a family name plus ``k`` (and ``nu``).
    """
    if isinstance(spec_or_family, EllipticalSpec):
        family, nu = spec_or_family.family, spec_or_family.nu
        k = _k(spec_or_family)
    else:
        family = EllipticalSpec(spec_or_family, np.eye(1), nu=nu if nu is not None else 1.0).family
        if k is None:
            raise InvalidInputError("k is required with a family name")
    if k < 1 - 1e-12:
        raise InvalidInputError("k must be at least 1")
    if family == "normal":
        return 1.0 if abs(k - 1.0) <= 1e-12 else 0.0
    return float(k ** (-nu))


def dr_elliptical(spec: EllipticalSpec, measure: str, alpha: float) -> float:
    """``(1'mu + sqrt(1'Sigma 1) rho(Y)) / (1'mu + sum_i sigma_i rho(Y))``."""
    alpha = check_level(alpha)
    y = spec.standard()
    if normalize_measure(measure) == "VaR":
        r = dist.var_analytic(y, alpha)
    else:
        r = dist.es_analytic(y, alpha)
    m = float(spec.mu.sum())
    num = m + math.sqrt(float(spec.sigma.sum())) * r
    den = m + float(spec.scales.sum()) * r
    if den == 0.0:
        raise UndefinedDRError("sum of marginal risk measures is zero")
    return num / den
