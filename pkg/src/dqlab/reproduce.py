"""Data behind the reference figures and table, written as CSV panels.

Every panel is one CSV: the sweep variable first, then one column per model
or level. Analytic routes are used wherever a closed form exists; ``fig6``
is Monte Carlo. A ``<id>_manifest.json`` next to the panels records the
parameters, grids, seeds and file names, enough to replay the run.

The four elliptical models are normal and Student-t with the equicorrelated
dispersion ``Sigma_1`` or the AR(1) dispersion ``Sigma_2``; the defaults are
``r = 0.3``, ``n = 4``, ``nu = 3`` and ``alpha = 0.05``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import distributions as dist
from .elliptical import dq_es_from_k, dq_var_from_k, k_sigma
from .exceptions import InvalidInputError
from .mrv import example2_f, sample_example2
from .optimize import EmpiricalDQObjective, diversification_k
from .risk_measures import pelve

DEFAULT_N = 10**6
DEFAULT_SEED = 20240901
FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "table1")

EXAMPLE1_SIGMA = np.array([[1.0, 0.5], [0.5, 2.0]])


@dataclass
class Panel:
    name: str
    header: list[str]
    rows: list[list]


@dataclass
class Reproduction:
    figure_id: str
    panels: list[Panel]
    params: dict = field(default_factory=dict)


def fmt(v) -> str:
    """Six significant digits for numbers, strings unchanged."""
    if isinstance(v, str):
        return v
    return format(float(v), ".6g")


def _dispersions(n: int, r: float) -> dict[str, np.ndarray]:
    return {"sigma1": dist.equicorrelated(n, r), "sigma2": dist.ar1(n, r)}


def _models(n: int, r: float, nu: float):
    """``(label, standard margin Y, k_Sigma)`` for the four elliptical models."""
    out = []
    for fam, y in (("normal", dist.Normal()), ("t", dist.StudentT(nu))):
        for sname, sigma in _dispersions(n, r).items():
            out.append((f"{fam}_{sname}", y, k_sigma(sigma).k_sigma))
    return out


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    count = int(round((hi - lo) / step)) + 1
    return np.round(lo + step * np.arange(count), 10)


def _fig1(alpha=0.05, r=0.3, n=4) -> Reproduction:
    ks = {name: k_sigma(s).k_sigma for name, s in _dispersions(n, r).items()}
    labels = [f"{fam}_{s}" for fam in ("normal", "t") for s in ks]
    panels = []
    for measure, nus in (("var", _grid(0.1, 10.0, 0.1)), ("es", _grid(1.1, 10.0, 0.1))):
        fn = dq_var_from_k if measure == "var" else dq_es_from_k
        header = ["nu"] + [f"dq_{lab}" for lab in labels] + [f"dr_{lab}" for lab in labels]
        rows = []
        for nu in nus:
            dqs, drs = [], []
            for fam in ("normal", "t"):
                y = dist.Normal() if fam == "normal" else dist.StudentT(nu)
                for k in ks.values():
                    dqs.append(fn(y, k, alpha))
                    # centered models: the risk measure of Y cancels in DR
                    drs.append(1.0 / k)
            rows.append([nu] + dqs + drs)
        panels.append(Panel(f"fig1_{measure}", header, rows))
    return Reproduction("fig1", panels, {"alpha": alpha, "r": r, "n": n})


def _sweep(name: str, var_name: str, grid, models_at, alpha_at) -> list[Panel]:
    panels = []
    for measure, fn in (("var", dq_var_from_k), ("es", dq_es_from_k)):
        header, rows = None, []
        for x in grid:
            models = models_at(x)
            header = [var_name] + [f"dq_{lab}" for lab, _, _ in models]
            rows.append([x] + [fn(y, k, alpha_at(x)) for _, y, k in models])
        panels.append(Panel(f"{name}_{measure}", header, rows))
    return panels


def _fig2(alpha=0.05, nu=3.0, n=4) -> Reproduction:
    panels = _sweep("fig2", "r", _grid(0.0, 1.0, 0.01), lambda r: _models(n, r, nu), lambda r: alpha)
    return Reproduction("fig2", panels, {"alpha": alpha, "nu": nu, "n": n})


def _fig3(nu=3.0, r=0.3, n=4) -> Reproduction:
    models = _models(n, r, nu)
    panels = _sweep("fig3", "alpha", _grid(0.001, 0.099, 0.001), lambda a: models, lambda a: a)
    return Reproduction("fig3", panels, {"nu": nu, "r": r, "n": n})


def _fig4(alpha=0.05, nu=3.0, r=0.5) -> Reproduction:
    ns = list(range(2, 101))
    panels = _sweep("fig4", "n", ns, lambda n: _models(n, r, nu), lambda n: alpha)
    return Reproduction("fig4", panels, {"alpha": alpha, "nu": nu, "r": r})


def _fig5(nu=3.0, alphas=(0.001, 0.01, 0.025, 0.05)) -> Reproduction:
    y = dist.StudentT(nu)
    ws = _grid(0.0, 1.0, 0.01)
    panels = []
    for measure, fn in (("var", dq_var_from_k), ("es", dq_es_from_k)):
        rows = []
        for w1 in ws:
            w = np.array([w1, 1.0 - w1])
            k = diversification_k(w, EXAMPLE1_SIGMA)
            rows.append([w1] + [fn(y, k, a) for a in alphas])
        header = ["w1"] + [f"dq_alpha_{a:g}" for a in alphas]
        panels.append(Panel(f"fig5_{measure}", header, rows))
    return Reproduction("fig5", panels, {"nu": nu, "alphas": list(alphas), "sigma": EXAMPLE1_SIGMA.tolist()})


def _fig6(n_samples: int, seed: int, r=0.3, nus=(2.0, 4.0), alphas=(0.001, 0.01, 0.025)) -> Reproduction:
    ws = _grid(0.0, 1.0, 0.01)
    panels = []
    streams = {}
    for stream, nu in enumerate(nus):
        # one scenario set per panel: every weight and level sees the same draws
        scen = sample_example2(r, nu, n_samples, seed, stream)
        objs = [EmpiricalDQObjective(scen, "VaR", a) for a in alphas]
        rows = []
        for w1 in ws:
            w = np.array([w1, 1.0 - w1])
            rows.append([w1] + [obj(w) for obj in objs] + [example2_f(w, r, nu)])
        header = ["w1"] + [f"dq_alpha_{a:g}" for a in alphas] + ["f_limit"]
        panels.append(Panel(f"fig6_nu{nu:g}", header, rows))
        streams[f"nu={nu:g}"] = stream
    params = {"r": r, "nus": list(nus), "alphas": list(alphas), "n_samples": n_samples, "seed": seed, "streams": streams}
    return Reproduction("fig6", panels, params)


def _table1(alpha=0.01, r=0.3, n=4, nu=3.0) -> Reproduction:
    rows = []
    for label, y, k in _models(n, r, nu):
        c = pelve(y, alpha)
        rows.append([label, c, c * alpha, dq_var_from_k(y, k, alpha), dq_es_from_k(y, k, c * alpha)])
    header = ["model", "c", "c_alpha", "dq_var_alpha", "dq_es_c_alpha"]
    return Reproduction("table1", [Panel("table1", header, rows)], {"alpha": alpha, "r": r, "n": n, "nu": nu})


def compute(figure_id: str, n_samples: int = DEFAULT_N, seed: int = DEFAULT_SEED) -> Reproduction:
    """Panels for one figure or table id, without touching the file system."""
    if figure_id not in FIGURE_IDS:
        raise InvalidInputError(f"unknown figure id {figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
    if figure_id == "fig6":
        if n_samples < 1:
            raise InvalidInputError("sample size must be positive")
        return _fig6(n_samples, seed)
    return {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5, "table1": _table1}[figure_id]()


def write_panel(panel: Panel, out_dir: Path) -> Path:
    path = out_dir / f"{panel.name}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(panel.header)
        for row in panel.rows:
            writer.writerow([fmt(v) for v in row])
    return path


def reproduce(figure_id: str, out_dir, n_samples: int = DEFAULT_N, seed: int = DEFAULT_SEED) -> list[Path]:
    """Write the panels of ``figure_id`` and a manifest into ``out_dir``.

    Returns the written paths, manifest last.
    """
    rep = compute(figure_id, n_samples, seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [write_panel(p, out) for p in rep.panels]
    manifest = {
        "figure_id": figure_id,
        "params": rep.params,
        "monte_carlo": figure_id == "fig6",
        "n_samples": n_samples,
        "seed": seed,
        "replay": ["dqlab", "reproduce", figure_id, "--out", ".", "--n-samples", str(n_samples), "--seed", str(seed)],
        "version": __version__,
        "files": [p.name for p in paths],
    }
    mpath = out / f"{figure_id}_manifest.json"
    with open(mpath, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths + [mpath]
