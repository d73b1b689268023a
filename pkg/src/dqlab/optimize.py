"""Portfolio weights minimizing DQ over the simplex.

Three routes:

* :func:`optimize_elliptical` -- for elliptical models the DQ-minimizing
  weights maximize ``w'sigma / sqrt(w' Sigma w)`` whatever the level and the
  risk measure; solved in closed form, or by an active-set QP on the boundary.
* :func:`optimize_dq_empirical` -- derivative-free search on a fixed scenario
  matrix (the objective is piecewise constant in ``w``).
* :func:`optimize_mrv_limit` -- convex program for the small-level limit
  ``f(w)`` of a regularly varying model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import EllipticalSpec, block_generator
from .dq_core import _rmin_alpha_star, normalize_measure
from .exceptions import InvalidInputError
from .mrv import SpectralMeasure, dq_limit_mrv, marginal_etas
from .risk_measures import EmpiricalDistribution, check_level
from .scenarios import ScenarioMatrix

PATTERN_STEPS = (0.1, 0.03, 0.01, 0.003)
MIN_STARTS = 8
MIN_TAIL_COUNT = 20
MRV_GRAD_TOL = 1e-8
MRV_CONSTRAINT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Weights:
    """Long-only portfolio weights on the simplex."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).reshape(-1)
        if w.size == 0 or not np.all(np.isfinite(w)):
            raise InvalidInputError("weights must be a nonempty finite vector")
        if np.any(w < 0):
            raise InvalidInputError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InvalidInputError(f"weights must sum to 1, got {w.sum()!r}")
        object.__setattr__(self, "w", w)

    @classmethod
    def normalized(cls, v) -> "Weights":
        v = np.clip(np.asarray(v, dtype=float), 0.0, None)
        w = v / v.sum()
        # fold the last-ulp residual into the largest entry
        w[np.argmax(w)] += 1.0 - w.sum()
        return cls(w)

    def __len__(self) -> int:
        return self.w.size

    def __array__(self, dtype=None, copy=None):
        return self.w if dtype is None else self.w.astype(dtype)


@dataclass(frozen=True)
class OptimizationReport:
    weights: Weights
    objective: float
    method: str  # closed-form | qp-fallback | simplex-search | convex-mrv
    iterations: int
    converged: bool


# --- elliptical ---------------------------------------------------------------


def diversification_k(w, sigma) -> float:
    """``k_w = w'sigma / sqrt(w' Sigma w)``, the dispersion summary of ``w * X``."""
    w = np.asarray(w, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    s = np.sqrt(np.diag(sigma))
    return float(w @ s / math.sqrt(w @ sigma @ w))


def _active_set_qp(sigma: np.ndarray, s: np.ndarray, maxiter: int = 500) -> tuple[np.ndarray, int, bool]:
    """``min w' Sigma w`` subject to ``w's = 1``, ``w >= 0``.

    Primal active set on the nonnegativity constraints. On the free set ``F``
    the solution is proportional to ``Sigma_FF^{-1} s_F``; an excluded index is
    optimal when ``(Sigma w)_i >= (w' Sigma w) s_i``.
    """
    n = s.size
    free = np.ones(n, dtype=bool)
    for it in range(1, maxiter + 1):
        idx = np.flatnonzero(free)
        z = np.linalg.solve(sigma[np.ix_(idx, idx)], s[idx])
        if np.any(z <= 0):
            free[idx[np.argmin(z)]] = False
            continue
        w = np.zeros(n)
        w[idx] = z / (s[idx] @ z)
        grad = sigma @ w
        slack = grad - (w @ grad) * s
        slack[free] = 0.0
        if slack.min() >= -1e-12 * max(1.0, float(np.abs(grad).max())):
            return w, it, True
        free[np.argmin(slack)] = True
    return w, maxiter, False


def optimize_elliptical(spec: EllipticalSpec | np.ndarray) -> OptimizationReport:
    """DQ-minimizing weights for an elliptical model (any level, VaR or ES).

    Parameters
    ----------
    spec : EllipticalSpec or array_like
        The model, or just its dispersion matrix; the location and the
        family play no role.

    Returns
    -------
    OptimizationReport
        ``objective`` is ``k_{w*}``, the maximal diversification summary.
    """
    sigma = spec.sigma if isinstance(spec, EllipticalSpec) else np.asarray(spec, dtype=float)
    sigma = np.atleast_2d(sigma)
    n = sigma.shape[0]
    s = np.sqrt(np.diag(sigma))
    if np.any(s <= 0) or np.linalg.matrix_rank(sigma) < n:
        raise InvalidInputError("dispersion matrix must be invertible")
    z = np.linalg.solve(sigma, s)
    if np.all(z >= 0):
        w = Weights.normalized(z)
        return OptimizationReport(w, diversification_k(w.w, sigma), "closed-form", 1, True)
    raw, iters, ok = _active_set_qp(sigma, s)
    w = Weights.normalized(raw)
    return OptimizationReport(w, diversification_k(w.w, sigma), "qp-fallback", iters, ok)


# --- empirical ----------------------------------------------------------------


def _softmax(theta: np.ndarray) -> np.ndarray:
    e = np.exp(theta - theta.max())
    return e / e.sum()


class EmpiricalDQObjective:
    """``w -> DQ_alpha(w * X)`` on one fixed scenario matrix.

    Marginal risk measures are positively homogeneous, so ``rho(w_i X_i) =
    w_i rho(X_i)`` is computed once and only the aggregate is re-evaluated.
    """

    def __init__(self, scenarios: ScenarioMatrix, measure: str, alpha: float):
        self.x = scenarios.losses
        self.p = scenarios.probability_vector()
        self.uniform = scenarios.uniform
        self.measure = measure
        self.alpha = alpha
        eds = [EmpiricalDistribution.from_scenarios(scenarios, i) for i in range(scenarios.n_assets)]
        if measure == "VaR":
            self.rho = np.array([ed.var(alpha) for ed in eds])
        else:
            self.rho = np.array([ed.es(alpha) for ed in eds])
        self.evaluations = 0

    def __call__(self, w: np.ndarray) -> float:
        self.evaluations += 1
        d = self.x @ w - self.rho @ w
        if self.measure == "VaR":
            if self.uniform:
                return np.count_nonzero(d > 0) / (d.size * self.alpha)
            return float(self.p[d > 0].sum()) / self.alpha
        if self.uniform:
            return _es_alpha_star_top(d, self.alpha) / self.alpha
        return _rmin_alpha_star(d, self.p) / self.alpha


def _es_alpha_star_top(d: np.ndarray, alpha: float) -> float:
    """ES-based ``alpha*`` for equally likely ``d = S - T`` from its top ``alpha N`` values only.

    ``G(b) = int_0^b q_d(u) du`` is piecewise linear with ``G(alpha) <= 0``
    (ES is subadditive), so its positive root lies among the largest
    ``ceil(alpha N) + 1`` values; ``np.partition`` finds them in linear time.
    The full scan is the fallback if rounding pushes the root further out.
    """
    count = d.size
    m = min(count, math.ceil(alpha * count) + 1)
    top = np.sort(np.partition(d, count - m)[count - m:])[::-1]
    if top[0] <= 0:
        return 0.0
    g = np.cumsum(top) / count
    k = np.flatnonzero(g <= 0)
    if k.size == 0:
        return _rmin_alpha_star(d, np.full(count, 1.0 / count))
    k = int(k[0])  # G(k / N) > 0 >= G((k + 1) / N) with slope top[k] on that piece
    gk = g[k - 1] if k > 0 else 0.0
    return k / count + gk / (-top[k])


def _pattern_search(obj, theta: np.ndarray, max_moves: int) -> tuple[np.ndarray, float, int, bool]:
    best = obj(_softmax(theta))
    moves = 0
    n = theta.size
    for step in PATTERN_STEPS:
        while True:
            trial_best, trial_theta = best, None
            for i in range(n):
                for sgn in (1.0, -1.0):
                    t = theta.copy()
                    t[i] += sgn * step
                    v = obj(_softmax(t))
                    if v < trial_best:
                        trial_best, trial_theta = v, t
            if trial_theta is None:
                break
            theta, best = trial_theta, trial_best
            moves += 1
            if moves >= max_moves:
                return theta, best, moves, False
    return theta, best, moves, True


def optimize_dq_empirical(
    scenarios: ScenarioMatrix,
    measure: str,
    alpha: float,
    starts: int = MIN_STARTS,
    seed: int = 0,
    max_moves: int = 400,
) -> OptimizationReport:
    """Pattern search for weights minimizing empirical DQ on fixed scenarios.

    The weights are ``softmax(theta)``; coordinates of ``theta`` are probed
    with the step schedule ``(0.1, 0.03, 0.01, 0.003)``. Start 0 is the equal
    weight portfolio, the others are drawn from a flat Dirichlet law. This is
    a local search on a non-convex, piecewise-constant objective: the result
    is the best point found, with no claim of global optimality. Ties between
    starts go to the lowest start index.

    Raises
    ------
    InvalidInputError
        If ``alpha * N < 20``: the objective is then too coarse to search.
    """
    measure = normalize_measure(measure)
    alpha = check_level(alpha)
    n = scenarios.n_assets
    if alpha * scenarios.n_scenarios < MIN_TAIL_COUNT:
        raise InvalidInputError(
            f"alpha * N = {alpha * scenarios.n_scenarios:g} < {MIN_TAIL_COUNT}; "
            "use more scenarios or a larger alpha"
        )
    obj = EmpiricalDQObjective(scenarios, measure, alpha)
    if n == 1:
        w = Weights(np.ones(1))
        return OptimizationReport(w, obj(w.w), "simplex-search", 0, True)
    starts = max(int(starts), MIN_STARTS)
    rng = block_generator(seed, 0, 0)
    thetas = [np.zeros(n)] + [np.log(rng.dirichlet(np.ones(n))) for _ in range(starts - 1)]
    best = None
    total_moves = 0
    all_converged = True
    for theta0 in thetas:
        theta, val, moves, ok = _pattern_search(obj, theta0, max_moves)
        total_moves += moves
        all_converged &= ok
        if best is None or val < best[1]:
            best = (theta, val)
    w = Weights.normalized(_softmax(best[0]))
    return OptimizationReport(w, float(best[1]), "simplex-search", total_moves, all_converged)


# --- MRV limit ----------------------------------------------------------------


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = 1}`` (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.flatnonzero(u - css / k > 0)[-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


def _eta_and_grad(x: np.ndarray, psi: SpectralMeasure) -> tuple[float, np.ndarray]:
    proj = np.maximum(psi.directions @ x, 0.0)
    g = psi.gamma
    val = float(np.sum(psi.weights * proj**g))
    grad = g * (psi.weights * proj ** (g - 1.0)) @ psi.directions
    return val, grad


def optimize_mrv_limit(psi: SpectralMeasure, maxiter: int = 20000) -> OptimizationReport:
    """Minimize the small-level DQ limit ``f(w)`` over the simplex.

    With ``c_i = eta_{e_i}^{1/gamma}`` and ``v = c * w``, minimizing ``f`` is
    the convex program ``min eta(v / c)`` over the simplex in ``v``, solved by
    projected gradient with Armijo backtracking. The solution is mapped back
    to ``w`` and rescaled into the simplex (``f`` is homogeneous of degree 0).

    Raises
    ------
    InvalidInputError
        If ``gamma <= 1`` (no strict convexity) or some ``eta_{e_i} = 0``.
    """
    if not psi.gamma > 1:
        raise InvalidInputError("the MRV program needs gamma > 1")
    if np.any(psi.directions < 0):
        raise InvalidInputError("the MRV program needs atoms in the nonnegative orthant")
    etas = marginal_etas(psi)
    if np.any(etas <= 0):
        raise InvalidInputError("every margin needs a positive eta")
    c = etas ** (1.0 / psi.gamma)
    n = psi.n

    def g(v):
        val, grad = _eta_and_grad(v / c, psi)
        return val, grad / c

    v = np.full(n, 1.0 / n)
    val, grad = g(v)
    step = 1.0
    converged = False
    it = 0
    for it in range(1, maxiter + 1):
        pg = v - project_simplex(v - grad)
        if np.linalg.norm(pg) <= MRV_GRAD_TOL:
            converged = True
            break
        while True:
            cand = project_simplex(v - step * grad)
            cval, cgrad = g(cand)
            if cval <= val + grad @ (cand - v) + 0.5 / step * np.sum((cand - v) ** 2):
                break
            step *= 0.5
            if step < 1e-20:
                break
        v, val, grad = cand, cval, cgrad
        step *= 2.0
    if abs(v.sum() - 1.0) > MRV_CONSTRAINT_TOL:
        converged = False
    w = Weights.normalized(v / c)
    return OptimizationReport(w, dq_limit_mrv(w.w, psi), "convex-mrv", it, converged)
