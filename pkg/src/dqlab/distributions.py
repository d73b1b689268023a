"""Univariate loss models and seeded elliptical samplers.

Four univariate families are supported: ``Normal``, ``StudentT``, ``Uniform``
and ``Pareto``. Each is a frozen dataclass; the module-level functions
(:func:`quantile`, :func:`cdf`, :func:`density`, :func:`es_analytic`, ...)
dispatch on the model and accept scalars or numpy arrays.

Tail quantities are evaluated from the tail probability directly
(``var_analytic(model, alpha)`` rather than ``quantile(model, 1 - alpha)``)
so that levels like ``alpha = 1e-8`` keep full relative precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from .exceptions import InvalidInputError, UnsupportedMeasureError
from .scenarios import ScenarioMatrix

ArrayLike = Union[float, np.ndarray]

_BLOCK_ROWS = 1 << 16
_JITTER = 1e-10


@dataclass(frozen=True)
class Normal:
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidInputError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class StudentT:
    """Location-scale Student-t; ``scale`` is the dispersion, not the standard deviation."""

    nu: float
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.nu > 0:
            raise InvalidInputError(f"nu must be positive, got {self.nu}")
        if not self.scale > 0:
            raise InvalidInputError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class Uniform:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise InvalidInputError("Uniform requires lower < upper")


@dataclass(frozen=True)
class Pareto:
    """Pareto with survival ``(x / scale) ** -gamma`` for ``x >= scale``."""

    gamma: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidInputError(f"gamma must be positive, got {self.gamma}")
        if not self.scale > 0:
            raise InvalidInputError(f"scale must be positive, got {self.scale}")


UnivariateModel = Union[Normal, StudentT, Uniform, Pareto]


def _check_prob(p, name="p"):
    p = np.asarray(p, dtype=float)
    if np.any(~(p > 0)) or np.any(~(p < 1)):
        raise InvalidInputError(f"{name} must lie in (0, 1)")
    return p


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _t_log_norm_const(nu):
    return special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2) - 0.5 * np.log(nu * np.pi)


def quantile(model: UnivariateModel, p: ArrayLike) -> ArrayLike:
    """Left-continuous inverse of the cdf at ``p`` in (0, 1)."""
    p = _check_prob(p)
    if isinstance(model, Normal):
        q = model.loc + model.scale * special.ndtri(p)
    elif isinstance(model, StudentT):
        q = model.loc + model.scale * np.where(p == 0.5, 0.0, special.stdtrit(model.nu, p))
    elif isinstance(model, Uniform):
        q = model.lower + p * (model.upper - model.lower)
    elif isinstance(model, Pareto):
        q = model.scale * (1.0 - p) ** (-1.0 / model.gamma)
    else:
        raise TypeError(f"unknown model {model!r}")
    return _out(q)


def _t_upper_quantile(nu, a):
    """Standard t quantile at upper tail probability ``a``.

    ``stdtrit`` loses accuracy for tiny ``a`` (and saturates at ``1e100``).
    Below ``a = 1e-8`` the quantile is instead started from the power-tail
    approximation ``sf(x) ~ c nu^((nu - 1) / 2) x^-nu`` and polished by Newton
    steps on ``log sf(exp(u)) = log a``.
    """
    x = np.array(-special.stdtrit(nu, a), dtype=float, ndmin=1)
    av = np.array(a, dtype=float, ndmin=1) * np.ones_like(x)
    x[av == 0.5] = 0.0  # the median is exactly zero by symmetry
    deep = av < 1e-8
    if np.any(deep):
        ad = av[deep]
        log_c = _t_log_norm_const(nu) + (nu - 1) / 2 * np.log(nu)
        u = (log_c - np.log(ad)) / nu
        # beyond ~1e150 the relative error of the power tail is below 1e-300
        ok = u < 345.0
        for _ in range(8):
            uo = u[ok]
            log_sf = np.log(special.stdtr(nu, -np.exp(uo)))
            log_f = _t_log_norm_const(nu) - (nu + 1) / 2 * (2 * uo + np.log1p(nu * np.exp(-2 * uo)) - np.log(nu))
            # d/du log sf(e^u) = -x f / sf
            u[ok] = uo + (log_sf - np.log(ad[ok])) / np.exp(uo + log_f - log_sf)
        with np.errstate(over="ignore"):  # quantiles past 1.8e308 are reported as inf
            x[deep] = np.exp(u)
    return float(x[0]) if np.ndim(a) == 0 else x


def var_analytic(model: UnivariateModel, alpha: ArrayLike) -> ArrayLike:
    """VaR at tail probability ``alpha``, i.e. the quantile at ``1 - alpha``."""
    a = _check_prob(alpha, "alpha")
    if isinstance(model, Normal):
        q = model.loc - model.scale * special.ndtri(a)
    elif isinstance(model, StudentT):
        q = model.loc + model.scale * _t_upper_quantile(model.nu, a)
    elif isinstance(model, Uniform):
        q = model.upper - a * (model.upper - model.lower)
    elif isinstance(model, Pareto):
        q = model.scale * a ** (-1.0 / model.gamma)
    else:
        raise TypeError(f"unknown model {model!r}")
    return _out(q)


def cdf(model: UnivariateModel, x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    if isinstance(model, Normal):
        out = special.ndtr((x - model.loc) / model.scale)
    elif isinstance(model, StudentT):
        out = special.stdtr(model.nu, (x - model.loc) / model.scale)
    elif isinstance(model, Uniform):
        out = np.clip((x - model.lower) / (model.upper - model.lower), 0.0, 1.0)
    elif isinstance(model, Pareto):
        with np.errstate(divide="ignore"):
            out = np.where(x >= model.scale, 1.0 - (np.maximum(x, model.scale) / model.scale) ** (-model.gamma), 0.0)
    else:
        raise TypeError(f"unknown model {model!r}")
    return _out(out)


def sf(model: UnivariateModel, x: ArrayLike) -> ArrayLike:
    """Survival function ``P(X > x)``, accurate deep in the upper tail."""
    x = np.asarray(x, dtype=float)
    if isinstance(model, Normal):
        out = special.ndtr(-(x - model.loc) / model.scale)
    elif isinstance(model, StudentT):
        out = special.stdtr(model.nu, -(x - model.loc) / model.scale)
    elif isinstance(model, Uniform):
        out = np.clip((model.upper - x) / (model.upper - model.lower), 0.0, 1.0)
    elif isinstance(model, Pareto):
        out = np.where(x >= model.scale, (np.maximum(x, model.scale) / model.scale) ** (-model.gamma), 1.0)
    else:
        raise TypeError(f"unknown model {model!r}")
    return _out(out)


def density(model: UnivariateModel, x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    if isinstance(model, Normal):
        z = (x - model.loc) / model.scale
        out = np.exp(-0.5 * z * z) / (np.sqrt(2 * np.pi) * model.scale)
    elif isinstance(model, StudentT):
        z = (x - model.loc) / model.scale
        nu = model.nu
        out = np.exp(_t_log_norm_const(nu) - (nu + 1) / 2 * np.log1p(z * z / nu)) / model.scale
    elif isinstance(model, Uniform):
        inside = (x >= model.lower) & (x <= model.upper)
        out = np.where(inside, 1.0 / (model.upper - model.lower), 0.0)
    elif isinstance(model, Pareto):
        g, s = model.gamma, model.scale
        xs = np.maximum(x, s)
        out = np.where(x >= s, g / s * (xs / s) ** (-g - 1), 0.0)
    else:
        raise TypeError(f"unknown model {model!r}")
    return _out(out)


def log_density(model: UnivariateModel, x: ArrayLike) -> ArrayLike:
    """Log density; finite far in the tails where :func:`density` underflows."""
    x = np.asarray(x, dtype=float)
    if isinstance(model, Normal):
        z = (x - model.loc) / model.scale
        out = -0.5 * z * z - 0.5 * np.log(2 * np.pi) - np.log(model.scale)
    elif isinstance(model, StudentT):
        z = (x - model.loc) / model.scale
        nu = model.nu
        out = _t_log_norm_const(nu) - (nu + 1) / 2 * np.log1p(z * z / nu) - np.log(model.scale)
    else:
        with np.errstate(divide="ignore"):
            out = np.log(density(model, x))
    return _out(out)


def has_finite_mean(model: UnivariateModel) -> bool:
    if isinstance(model, StudentT):
        return model.nu > 1
    if isinstance(model, Pareto):
        return model.gamma > 1
    return True


def mean(model: UnivariateModel) -> float:
    if not has_finite_mean(model):
        raise UnsupportedMeasureError(f"{model!r} has infinite mean")
    if isinstance(model, (Normal, StudentT)):
        return float(model.loc)
    if isinstance(model, Uniform):
        return 0.5 * (model.lower + model.upper)
    return model.scale * model.gamma / (model.gamma - 1)


def es_analytic(model: UnivariateModel, alpha: ArrayLike) -> ArrayLike:
    """Closed-form Expected Shortfall ``(1/alpha) * int_0^alpha VaR_b db``.

    Raises
    ------
    UnsupportedMeasureError
        For Student-t with ``nu <= 1`` and Pareto with ``gamma <= 1``.
    """
    if not has_finite_mean(model):
        raise UnsupportedMeasureError(f"ES is infinite for {model!r}")
    a = _check_prob(alpha, "alpha")
    if isinstance(model, Normal):
        z = -special.ndtri(a)
        es = model.loc + model.scale * np.exp(-0.5 * z * z) / (np.sqrt(2 * np.pi) * a)
    elif isinstance(model, StudentT):
        nu = model.nu
        t = _t_upper_quantile(nu, a)
        # log(1 + t^2/nu) without overflowing t^2 deep in the tail
        at = np.abs(t)
        big = at > 1e100
        lq = np.where(big, 2 * np.log(np.where(big, at, 1.0)) - np.log(nu), np.log1p(np.where(big, 0.0, t) ** 2 / nu))
        log_es = _t_log_norm_const(nu) - (nu - 1) / 2 * lq + np.log(nu) - np.log(a) - np.log(nu - 1)
        es = model.loc + model.scale * np.exp(log_es)
    elif isinstance(model, Uniform):
        es = model.upper - 0.5 * a * (model.upper - model.lower)
    else:
        g = model.gamma
        es = model.scale * a ** (-1.0 / g) * g / (g - 1)
    return _out(es)


# --------------------------------------------------------------------------
# Elliptical models
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EllipticalSpec:
    """Elliptical model ``E_n(mu, Sigma, tau)`` with a normal or Student-t generator.

    ``sigma`` is the dispersion matrix. For the t family it is not the
    covariance; ``sigma[i, i]`` is the squared scale of margin ``i``.
    """

    family: str
    sigma: np.ndarray
    mu: np.ndarray | None = None
    nu: float | None = None

    def __post_init__(self):
        fam = self.family.lower()
        if fam in ("t", "student", "studentt", "student-t"):
            fam = "t"
        if fam not in ("normal", "t"):
            raise InvalidInputError(f"unknown elliptical family {self.family!r}")
        object.__setattr__(self, "family", fam)
        if fam == "t" and (self.nu is None or not self.nu > 0):
            raise InvalidInputError("the t family needs nu > 0")
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        n = sigma.shape[0]
        if sigma.shape != (n, n):
            raise InvalidInputError("dispersion matrix must be square")
        if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-12):
            raise InvalidInputError("dispersion matrix must be symmetric")
        if np.any(np.diag(sigma) < 0):
            raise InvalidInputError("dispersion matrix has a negative diagonal entry")
        if np.linalg.eigvalsh(sigma).min() < -1e-10:
            raise InvalidInputError("dispersion matrix is not positive semi-definite")
        if not np.any(sigma):
            raise InvalidInputError("dispersion matrix must not be all zeros")
        mu = np.zeros(n) if self.mu is None else np.asarray(self.mu, dtype=float).reshape(-1)
        if mu.shape != (n,):
            raise InvalidInputError(f"location has length {mu.size}, expected {n}")
        sigma.setflags(write=False)
        mu.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "mu", mu)

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    @property
    def scales(self) -> np.ndarray:
        return np.sqrt(np.diag(self.sigma))

    def standard(self) -> UnivariateModel:
        """The generator's standard margin ``Y ~ E_1(0, 1, tau)``."""
        return Normal() if self.family == "normal" else StudentT(self.nu)

    def linear(self, a) -> UnivariateModel:
        """Distribution of ``a^T X``."""
        a = np.asarray(a, dtype=float)
        loc = float(a @ self.mu)
        scale = float(np.sqrt(a @ self.sigma @ a))
        if self.family == "normal":
            return Normal(loc, scale)
        return StudentT(self.nu, loc, scale)

    def marginal(self, i: int) -> UnivariateModel:
        return self.linear(np.eye(self.n)[i])

    def aggregate(self) -> UnivariateModel:
        return self.linear(np.ones(self.n))


def equicorrelated(n: int, r: float) -> np.ndarray:
    """Unit-diagonal matrix with every off-diagonal entry equal to ``r``."""
    m = np.full((n, n), float(r))
    np.fill_diagonal(m, 1.0)
    return m


def ar1(n: int, r: float) -> np.ndarray:
    """AR(1) dispersion ``r ** |i - j|``."""
    idx = np.arange(n)
    return float(r) ** np.abs(idx[:, None] - idx[None, :])


def block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    """Counter-based generator for one block of rows, keyed by ``(seed, stream, block)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream, block))))


def _blocks(count: int):
    for b, start in enumerate(range(0, count, _BLOCK_ROWS)):
        yield b, start, min(start + _BLOCK_ROWS, count)


def cholesky_factor(sigma: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, retrying once with a ``1e-10`` diagonal jitter."""
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        pass
    try:
        return np.linalg.cholesky(sigma + _JITTER * np.eye(sigma.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise InvalidInputError("dispersion matrix is not positive semi-definite within jitter 1e-10") from exc


def sample_elliptical(spec: EllipticalSpec, count: int, seed: int, stream: int = 0) -> ScenarioMatrix:
    """Draw ``count`` equally likely scenarios from ``spec``.

    Normal draws are ``mu + L z`` with ``L`` the Cholesky factor of the
    dispersion. The t family divides the normal draw by ``sqrt(W / nu)`` with
    ``W`` an independent chi-square(nu) per row. Rows are produced in fixed
    blocks with their own counter-based stream, so output does not depend on
    how the work is chunked.
    """
    if count < 1:
        raise InvalidInputError("count must be positive")
    chol = cholesky_factor(spec.sigma)
    out = np.empty((count, spec.n))
    for b, lo, hi in _blocks(count):
        rng = block_generator(seed, stream, b)
        z = rng.standard_normal((hi - lo, spec.n)) @ chol.T
        if spec.family == "t":
            w = rng.chisquare(spec.nu, hi - lo) / spec.nu
            z /= np.sqrt(w)[:, None]
        out[lo:hi] = z + spec.mu
    return ScenarioMatrix(out)


def sample_univariate(model: UnivariateModel, shape, seed: int, stream: int = 0) -> np.ndarray:
    """iid draws of ``model`` with shape ``(count, n)`` (or ``(count,)``)."""
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    count = shape[0]
    tail = shape[1:]
    out = np.empty(shape)
    for b, lo, hi in _blocks(count):
        rng = block_generator(seed, stream, b)
        size = (hi - lo,) + tail
        if isinstance(model, Normal):
            x = model.loc + model.scale * rng.standard_normal(size)
        elif isinstance(model, StudentT):
            x = model.loc + model.scale * rng.standard_t(model.nu, size)
        elif isinstance(model, Uniform):
            x = rng.uniform(model.lower, model.upper, size)
        elif isinstance(model, Pareto):
            # 1 - U keeps the draw away from zero
            x = model.scale * (1.0 - rng.random(size)) ** (-1.0 / model.gamma)
        else:
            raise TypeError(f"unknown model {model!r}")
        out[lo:hi] = x
    return out
