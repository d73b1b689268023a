"""``dqlab`` command line.

Results go to stdout (or ``--out``) as CSV with a header row and six
significant digits. Exit status: 0 on success, 2 on invalid input, 3 on a
numerical failure. Errors are reported as one line on stderr.

Any subcommand accepts ``--config FILE.json``: a JSON object whose keys
mirror the long flags (``{"command": "elliptical", "family": "t", "nu": 3,
...}``). Flags given on the command line override the file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import distributions as dist
from . import dq_core as dqm
from . import elliptical as ell
from . import mrv, optimize, reproduce
from .exceptions import NumericalError, UndefinedDRError
from .reproduce import fmt
from .scenarios import read_dispersion_csv, read_scenarios_csv

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3
_POSITIONAL = {"reproduce": ("figure_id",)}


def _alphas(text) -> list[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    try:
        return [float(a) for a in str(text).split(",") if a.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha grid {text!r}") from None


def _vector(text) -> np.ndarray:
    try:
        return np.array([float(v) for v in str(text).split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid vector {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dqlab", description="Diversification quotients for portfolio risk.")
    p.add_argument("--config", help="JSON file mirroring the flags")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file mirroring the flags")
        sp.add_argument("--out", help="write the CSV here instead of stdout")

    e = sub.add_parser("elliptical", help="closed-form DQ and DR of a normal or t model")
    common(e)
    e.add_argument("--family", required=True, choices=["normal", "t"])
    e.add_argument("--nu", type=float, help="degrees of freedom for the t family")
    e.add_argument("--sigma", required=True, help="dispersion matrix CSV (n lines, no header)")
    e.add_argument("--mu", type=_vector, help="comma-separated location vector (affects DR only)")
    e.add_argument("--alpha", required=True, type=_alphas, help="level or comma-separated grid")
    e.add_argument("--measure", default="var", help="var or es")

    m = sub.add_parser("empirical", help="DQ and DR of a scenario CSV")
    common(m)
    m.add_argument("--input", required=True, help="scenario CSV (optional trailing 'prob' column)")
    m.add_argument("--alpha", required=True, type=_alphas)
    m.add_argument("--measure", default="var")
    m.add_argument("--method", default=None, help="rmin or bisection for ES")
    m.add_argument("--stderr-batches", type=int, default=None)

    r = sub.add_parser("mrv", help="small-level DQ limit f(w) for a spectral measure")
    common(r)
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--spectral", help="spectral measure JSON")
    src.add_argument("--iid", type=int, metavar="N", help="iid spectral measure with N margins")
    r.add_argument("--gamma", type=float, help="tail index (with --iid)")
    r.add_argument("--weights", type=_vector, help="comma-separated weights (default: equal)")

    o = sub.add_parser("optimize", help="DQ-minimizing weights")
    common(o)
    osrc = o.add_mutually_exclusive_group(required=True)
    osrc.add_argument("--sigma", help="dispersion matrix CSV (elliptical route)")
    osrc.add_argument("--input", help="scenario CSV (empirical search)")
    osrc.add_argument("--spectral", help="spectral measure JSON (MRV limit)")
    o.add_argument("--measure", default="var")
    o.add_argument("--alpha", type=float)
    o.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("reproduce", help="data files for a reference figure or table")
    g.add_argument("--config", help="JSON file mirroring the flags")
    g.add_argument("figure_id", help=", ".join(reproduce.FIGURE_IDS))
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--n-samples", type=int, default=reproduce.DEFAULT_N)
    g.add_argument("--seed", type=int, default=reproduce.DEFAULT_SEED)
    return p


def _config_argv(argv: list[str]) -> list[str]:
    """Expand ``--config`` into flags placed before the command-line ones."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return argv
    with open(known.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError(f"{known.config}: config must be a JSON object")
    command = cfg.pop("command", None)
    if rest and rest[0] in _sub_commands():
        command, rest = rest[0], rest[1:]
    if command is None:
        raise ValueError("no command given on the command line or in the config")
    positional, flags = [], []
    for name in _POSITIONAL.get(command, ()):
        if name in cfg:
            positional.append(str(cfg.pop(name)))
    for key, val in cfg.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(val, bool):
            if val:
                flags.append(flag)
            continue
        if isinstance(val, list):
            val = ",".join(str(v) for v in val)
        flags += [flag, str(val)]
    if positional and rest and not rest[0].startswith("-"):
        positional = []
    return [command] + positional + flags + rest


def _sub_commands():
    return ("elliptical", "empirical", "mrv", "optimize", "reproduce")


def _dr_or_nan(fn, *args) -> float:
    # an undefined DR should not hide the DQ result on the same row
    try:
        return fn(*args)
    except UndefinedDRError:
        return float("nan")


def _emit(header, rows, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    if out:
        Path(out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _cmd_elliptical(a):
    sigma = read_dispersion_csv(a.sigma)
    family = "t" if a.family == "t" else "normal"
    if family == "t" and a.nu is None:
        raise ValueError("--nu is required for the t family")
    spec = dist.EllipticalSpec(family, sigma, mu=a.mu, nu=a.nu)
    k = ell.k_sigma(spec.sigma).k_sigma
    rows = []
    for alpha in a.alpha:
        res = ell.dq_elliptical(spec, a.measure, alpha)
        rows.append([alpha, dqm.normalize_measure(a.measure), res.value, _dr_or_nan(ell.dr_elliptical, spec, a.measure, alpha), k])
    _emit(["alpha", "measure", "dq", "dr", "k_sigma"], rows, a.out)


def _cmd_empirical(a):
    scen = read_scenarios_csv(a.input)
    measure = dqm.normalize_measure(a.measure)
    kw = {}
    if a.stderr_batches:
        kw["stderr_batches"] = a.stderr_batches
    if a.method is not None:
        if measure != "ES":
            raise ValueError("--method applies to ES only")
        kw["method"] = a.method
    rows = []
    for alpha in a.alpha:
        res = dqm.dq(scen, measure, alpha, **kw)
        row = [alpha, measure, res.value, res.alpha_star, _dr_or_nan(dqm.dr, scen, measure, alpha)]
        if a.stderr_batches:
            row.append(res.stderr)
        rows.append(row)
    header = ["alpha", "measure", "dq", "alpha_star", "dr"] + (["stderr"] if a.stderr_batches else [])
    _emit(header, rows, a.out)


def _cmd_mrv(a):
    if a.spectral:
        psi = mrv.read_spectral_json(a.spectral)
    else:
        if a.gamma is None:
            raise ValueError("--gamma is required with --iid")
        psi = mrv.iid_spectral(a.iid, a.gamma)
    w = a.weights if a.weights is not None else np.full(psi.n, 1.0 / psi.n)
    _emit([f"w{i + 1}" for i in range(psi.n)] + ["f"], [list(w) + [mrv.dq_limit_mrv(w, psi)]], a.out)


def _cmd_optimize(a):
    if a.sigma:
        rep = optimize.optimize_elliptical(read_dispersion_csv(a.sigma))
    elif a.input:
        if a.alpha is None:
            raise ValueError("--alpha is required for the empirical search")
        rep = optimize.optimize_dq_empirical(read_scenarios_csv(a.input), a.measure, a.alpha, seed=a.seed)
    else:
        rep = optimize.optimize_mrv_limit(mrv.read_spectral_json(a.spectral))
    w = rep.weights.w
    header = [f"w{i + 1}" for i in range(w.size)] + ["objective", "method", "iterations", "converged"]
    _emit(header, [list(w) + [rep.objective, rep.method, str(rep.iterations), str(rep.converged).lower()]], a.out)


def _cmd_reproduce(a):
    for path in reproduce.reproduce(a.figure_id, a.out, a.n_samples, a.seed):
        print(path)


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv`` and execute; returns the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _config_argv(argv)
    except (OSError, ValueError) as exc:
        print(f"dqlab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {
        "elliptical": _cmd_elliptical,
        "empirical": _cmd_empirical,
        "mrv": _cmd_mrv,
        "optimize": _cmd_optimize,
        "reproduce": _cmd_reproduce,
    }[args.command]
    try:
        handler(args)
    except NumericalError as exc:
        print(f"dqlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"dqlab: error: {str(exc).splitlines()[0] if str(exc) else type(exc).__name__}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main() -> None:
    sys.exit(run())
