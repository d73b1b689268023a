"""Diversification quotients on scenario data.

DQ asks: at what tail level does the portfolio's risk drop below the sum of
standalone risks? Dividing that level by the reference level gives a number
near 0 for strong diversification, 1 for none, and above 1 when pooling makes
the tail worse.

Run: python3 demos/01_empirical_dq.py
"""

import numpy as np

from dqlab import EllipticalSpec, ScenarioMatrix, dq_es, dq_var, dr, equicorrelated, sample_elliptical

# Four assets with pairwise correlation 0.3 and Student-t(3) tails.
spec = EllipticalSpec("t", equicorrelated(4, 0.3), nu=3)
scen = sample_elliptical(spec, 200_000, seed=1)

for alpha in (0.01, 0.05):
    v = dq_var(scen, alpha, stderr_batches=20)
    e = dq_es(scen, alpha, stderr_batches=20)
    print(f"alpha={alpha:<5} DQ^VaR={v.value:.4f} (+/- {v.stderr:.4f})   DQ^ES={e.value:.4f} (+/- {e.stderr:.4f})")

# DQ only cares about dependence, so shifting or rescaling losses leaves it unchanged.
moved = scen.with_losses(2.0 * scen.losses + np.array([5.0, -3.0, 0.0, 100.0]))
print("after shift and scale:", dq_var(moved, 0.05).value == dq_var(scen, 0.05).value)

# DR (the ratio of risks) does depend on the location of the losses.
print(f"DR^VaR before: {dr(scen, 'VaR', 0.05):.4f}   after: {dr(moved, 'VaR', 0.05):.4f}")

# Scenario files may carry a trailing 'prob' column for unequal weights.
weighted = ScenarioMatrix(scen.losses[:1000], np.full(1000, 1e-3))
print(f"weighted copy of the first 1000 rows: DQ^ES_0.05 = {dq_es(weighted, 0.05).value:.4f}")
