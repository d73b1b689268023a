"""Choosing weights that minimize DQ.

For an elliptical model the optimal weights maximize w'sigma / sqrt(w'Sigma w)
whatever the level or risk measure. On raw scenarios, a pattern search over
the simplex finds them from the data alone.

Run: python3 demos/04_optimize_portfolio.py
"""

import numpy as np

from dqlab import EllipticalSpec, optimize_dq_empirical, optimize_elliptical, sample_elliptical

sigma = np.array([[1.0, 0.5], [0.5, 2.0]])
closed = optimize_elliptical(sigma)
print(f"closed form:     w = {np.round(closed.weights.w, 4)}  k = {closed.objective:.4f}  ({closed.method})")

scen = sample_elliptical(EllipticalSpec("t", sigma, nu=3), 500_000, seed=7)
for measure in ("VaR", "ES"):
    rep = optimize_dq_empirical(scen, measure, 0.05)
    print(f"empirical {measure:<4}:  w = {np.round(rep.weights.w, 4)}  DQ = {rep.objective:.4f}  moves = {rep.iterations}")

# A matrix where the unconstrained solution would short an asset falls back to the QP.
sigma3 = np.array([[1.0, 0.9, 0.1], [0.9, 1.5, 0.6], [0.1, 0.6, 1.0]])
rep = optimize_elliptical(sigma3)
print(f"three assets:    w = {np.round(rep.weights.w, 4)}  ({rep.method})")
