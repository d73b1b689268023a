"""Asymptotics of DQ^VaR for multivariate regularly varying models.

A spectral measure is a finite list of atoms ``(s_k, p_k)`` on the L1 unit
sphere together with the tail index ``gamma``. Continuous spectral measures
can be approximated by passing quadrature atoms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from os import PathLike

import numpy as np

from . import distributions as dist
from .exceptions import InvalidInputError
from .scenarios import ScenarioMatrix


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    directions: np.ndarray  # (K, n), rows with unit L1 norm
    weights: np.ndarray  # (K,), summing to one
    gamma: float

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.directions, dtype=float))
        p = np.asarray(self.weights, dtype=float).reshape(-1)
        if s.shape[0] != p.size:
            raise InvalidInputError("need one weight per atom")
        if np.any(p <= 0):
            raise InvalidInputError("atom weights must be positive")
        if abs(p.sum() - 1.0) > 1e-12:
            raise InvalidInputError("atom weights must sum to 1")
        if np.any(np.abs(np.abs(s).sum(axis=1) - 1.0) > 1e-12):
            raise InvalidInputError("atom directions must have unit L1 norm")
        if not self.gamma > 0:
            raise InvalidInputError("tail index must be positive")
        object.__setattr__(self, "directions", s)
        object.__setattr__(self, "weights", p)
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def n(self) -> int:
        return self.directions.shape[1]

    @classmethod
    def from_unnormalized(cls, vectors, masses, gamma: float) -> "SpectralMeasure":
        """Atoms from arbitrary nonzero vectors and nonnegative masses (normalized here)."""
        v = np.atleast_2d(np.asarray(vectors, dtype=float))
        m = np.asarray(masses, dtype=float)
        norms = np.abs(v).sum(axis=1)
        keep = m > 0
        return cls(v[keep] / norms[keep, None], m[keep] / m[keep].sum(), gamma)

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "atoms": [{"s": s.tolist(), "p": float(p)} for s, p in zip(self.directions, self.weights)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpectralMeasure":
        try:
            atoms = obj["atoms"]
            return cls([a["s"] for a in atoms], [a["p"] for a in atoms], obj["gamma"])
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed spectral measure: {exc}") from None


def read_spectral_json(path: str | PathLike) -> SpectralMeasure:
    with open(path) as fh:
        return SpectralMeasure.from_json(json.load(fh))


def write_spectral_json(psi: SpectralMeasure, path: str | PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(psi.to_json(), fh, indent=2)


def iid_spectral(n: int, gamma: float) -> SpectralMeasure:
    """Spectral measure of iid regularly varying margins: mass ``1/n`` on each axis."""
    return SpectralMeasure(np.eye(n), np.full(n, 1.0 / n), gamma)


def _is_integer(g: float) -> bool:
    return float(g).is_integer()


def eta(x, psi: SpectralMeasure) -> float:
    """``sum_k p_k (x' s_k) ** gamma``.

    Negative projections are only accepted for integer ``gamma``.
    """
    x = np.asarray(x, dtype=float)
    proj = psi.directions @ x
    if np.any(proj < 0):
        if not _is_integer(psi.gamma):
            raise InvalidInputError("x' s must be nonnegative for non-integer gamma")
        return float(np.sum(psi.weights * proj ** int(psi.gamma)))
    return float(np.sum(psi.weights * proj**psi.gamma))


def marginal_etas(psi: SpectralMeasure) -> np.ndarray:
    return np.array([eta(e, psi) for e in np.eye(psi.n)])


def dq_limit_mrv(w, psi: SpectralMeasure) -> float:
    """``f(w) = eta_w / (sum_i w_i eta_{e_i} ** (1/gamma)) ** gamma``.

    Zero weights drop out of the denominator, which extends ``f`` to the
    faces of the simplex by continuity.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (psi.n,):
        raise InvalidInputError(f"weights must have length {psi.n}")
    if np.any(w < 0) or not np.any(w > 0):
        raise InvalidInputError("weights must be nonnegative and not all zero")
    etas = marginal_etas(psi)
    active = w > 0
    if np.any(etas[active] <= 0):
        raise InvalidInputError("every weighted margin needs a positive eta")
    g = psi.gamma
    den = float(np.sum(w[active] * etas[active] ** (1.0 / g)))
    return eta(w, psi) / den**g


def dq_limit_iid(n: int, gamma: float) -> float:
    """Small-alpha limit ``n ** (1 - gamma)`` of DQ^VaR for iid regularly varying risks."""
    if n < 1 or not gamma > 0:
        raise InvalidInputError("need n >= 1 and gamma > 0")
    return float(n) ** (1.0 - gamma)


def example2_matrix(r: float) -> np.ndarray:
    if not 0 <= r < 1:
        raise InvalidInputError("r must lie in [0, 1)")
    return np.array([[1.0, 0.0], [r, math.sqrt(1.0 - r * r)]])


def example2_f(w, r: float, nu: float) -> float:
    """Closed form of ``f(w)`` for ``X = A Y``, ``Y`` iid t(nu), ``A = [[1, 0], [r, sqrt(1 - r^2)]]``."""
    w1, w2 = (float(v) for v in w)
    if nu <= 1:
        raise InvalidInputError("nu must exceed 1")
    q = (w1 + w2 * r) ** nu + (w2 * math.sqrt(1 - r * r)) ** nu
    d = r**nu + math.sqrt(1 - r * r) ** nu
    inner = 0.0
    if w1 > 0:
        inner += w1 * q ** (-1.0 / nu)
    if w2 > 0:
        inner += w2 * (q / d) ** (-1.0 / nu)
    return inner ** (-nu)


def example2_spectral(r: float, nu: float) -> SpectralMeasure:
    """Upper-tail spectral atoms of ``A Y``: one per factor, mass ``||A e_j||_1 ** nu``.

    Only directions in the nonnegative orthant are kept; the lower-tail atoms
    ``-A e_j`` never contribute to the upper tail of a long-only portfolio.
    """
    a = example2_matrix(r)
    cols = a.T
    masses = np.abs(cols).sum(axis=1) ** nu
    return SpectralMeasure.from_unnormalized(cols, masses, nu)


def sample_example2(r: float, nu: float, count: int, seed: int, stream: int = 0) -> ScenarioMatrix:
    """Scenarios of ``A Y`` with ``Y`` two iid standard t(nu) factors."""
    y = dist.sample_univariate(dist.StudentT(nu), (count, 2), seed, stream)
    return ScenarioMatrix(y @ example2_matrix(r).T)
