"""Small-level behaviour of DQ for regularly varying losses.

With tail index gamma, iid risks give DQ^VaR -> n^(1 - gamma): below 1 when
means are finite, above 1 when they are not. A general spectral measure gives
the limit f(w), which can be minimized over the simplex.

Run: python3 demos/05_heavy_tails.py
"""

import numpy as np

from dqlab import Pareto, ScenarioMatrix, dq_var, sample_univariate
from dqlab import mrv
from dqlab.optimize import optimize_mrv_limit

for gamma in (0.5, 1.0, 3.0):
    x = sample_univariate(Pareto(gamma), (1_000_000, 4), seed=3)
    path = [dq_var(ScenarioMatrix(x), a).value for a in (0.05, 0.01, 0.002)]
    print(f"gamma={gamma}: DQ^VaR at 0.05, 0.01, 0.002 = {np.round(path, 3)}  limit {mrv.dq_limit_iid(4, gamma):.4f}")

# Two t factors mixed by A = [[1, 0], [r, sqrt(1 - r^2)]].
for nu in (2.0, 4.0):
    rep = optimize_mrv_limit(mrv.example2_spectral(0.3, nu))
    print(f"nu={nu}: limit-optimal w1 = {rep.weights.w[0]:.4f}, f(w*) = {rep.objective:.4f}, f(1/2, 1/2) = {mrv.example2_f([0.5, 0.5], 0.3, nu):.4f}")
