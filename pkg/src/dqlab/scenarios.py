"""Joint loss scenarios and their CSV representation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from os import PathLike
from typing import Sequence

import numpy as np

from .exceptions import InvalidInputError

PROB_COLUMN = "prob"


@dataclass(frozen=True, eq=False)
class ScenarioMatrix:
    """``N x n`` matrix of joint losses with row probabilities.

    ``probabilities`` is ``None`` for equally likely rows; empirical routines
    use exact order-statistic arithmetic in that case.
    """

    losses: np.ndarray
    probabilities: np.ndarray | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        x = np.asarray(self.losses, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise InvalidInputError("losses must be a non-empty N x n matrix")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("losses must be finite")
        object.__setattr__(self, "losses", x)
        p = self.probabilities
        if p is not None:
            p = np.asarray(p, dtype=float).reshape(-1)
            if p.shape != (x.shape[0],):
                raise InvalidInputError("need one probability per scenario")
            if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
                raise InvalidInputError("probabilities must be nonnegative and sum to 1")
            object.__setattr__(self, "probabilities", p)
        labels = self.labels
        if labels is None:
            labels = tuple(f"x{i + 1}" for i in range(x.shape[1]))
        elif len(labels) != x.shape[1]:
            raise InvalidInputError("need one label per column")
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def n_scenarios(self) -> int:
        return self.losses.shape[0]

    @property
    def n_assets(self) -> int:
        return self.losses.shape[1]

    @property
    def uniform(self) -> bool:
        return self.probabilities is None

    def column(self, i: int) -> np.ndarray:
        return self.losses[:, i]

    def total(self) -> np.ndarray:
        """Row sums, the aggregate loss ``S``."""
        return self.losses.sum(axis=1)

    def weighted(self, w: Sequence[float]) -> "ScenarioMatrix":
        """Scenarios of ``w * X`` (componentwise)."""
        w = np.asarray(w, dtype=float)
        return ScenarioMatrix(self.losses * w, self.probabilities, self.labels)

    def with_losses(self, losses: np.ndarray) -> "ScenarioMatrix":
        return ScenarioMatrix(losses, self.probabilities, self.labels)

    def probability_vector(self) -> np.ndarray:
        if self.probabilities is None:
            return np.full(self.n_scenarios, 1.0 / self.n_scenarios)
        return self.probabilities


def write_scenarios_csv(scenarios: ScenarioMatrix, path: str | PathLike | io.TextIOBase) -> None:
    """Write the scenario CSV: header ``x1,...,xn[,prob]`` then one row per scenario.

    Values are written with ``repr`` so they read back bit-identically.
    """
    header = list(scenarios.labels)
    rows = scenarios.losses
    if scenarios.probabilities is not None:
        header.append(PROB_COLUMN)
        rows = np.column_stack([rows, scenarios.probabilities])

    def _emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])

    if isinstance(path, io.TextIOBase):
        _emit(path)
    else:
        with open(path, "w", newline="") as fh:
            _emit(fh)


def read_scenarios_csv(path: str | PathLike) -> ScenarioMatrix:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InvalidInputError(f"{path}: empty scenario file") from None
        try:
            data = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
        except ValueError as exc:
            raise InvalidInputError(f"{path}: {exc}") from None
    if data.size == 0:
        raise InvalidInputError(f"{path}: no scenarios")
    if data.shape[1] != len(header):
        raise InvalidInputError(f"{path}: rows do not match header width")
    if header[-1].lower() == PROB_COLUMN:
        return ScenarioMatrix(data[:, :-1], data[:, -1], tuple(header[:-1]))
    return ScenarioMatrix(data, None, tuple(header))


def read_dispersion_csv(path: str | PathLike) -> np.ndarray:
    """Read an ``n x n`` dispersion matrix: ``n`` lines of comma-separated reals, no header."""
    try:
        m = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    except (OSError, ValueError) as exc:
        raise InvalidInputError(f"{path}: {exc}") from None
    if m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"{path}: dispersion matrix must be square, got {m.shape}")
    return m


def write_dispersion_csv(sigma, path: str | PathLike) -> None:
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    with open(path, "w", newline="") as fh:
        for row in sigma:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
