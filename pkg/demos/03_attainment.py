"""Dependence structures that pin DQ at its extreme values.

Deterministic grid constructions make the special values exact:
comonotonic risks give 1, an alpha-CE model gives n, one-hot multinomial
risks give 1/alpha, and a constant total gives 0.

Run: python3 demos/03_attainment.py
"""

import numpy as np

from dqlab import Normal, ScenarioMatrix, StudentT, dq_es, dq_var
from dqlab import dependence as dep

N = 10_000
como = dep.make_comonotonic([Normal(), StudentT(3)], N)
print("comonotonic:       DQ^VaR_0.05 =", dq_var(como, 0.05).value)
print("  common tail event at every level:", dep.check_alpha_concentration(como, 0.05).is_concentrated)

ce = dep.make_alpha_ce(3, 0.05, N)
print("alpha-CE, n=3:     DQ^VaR_0.05 =", dq_var(ce, 0.05).value, "  DQ^ES_0.15 =", round(dq_es(ce, 0.15).value, 6))
print("  conditions:", dep.alpha_ce_conditions(ce, 0.05))

onehot = dep.make_multinomial_onehot(4, N)
print("one-hot, n=4:      DQ^VaR_0.3  =", round(dq_var(onehot, 0.3).value, 6), "= 1/0.3")

x = np.random.default_rng(0).normal(size=(N, 3))
x[:, 2] = -x[:, :2].sum(axis=1)
print("constant total:    DQ^VaR_0.05 =", dq_var(ScenarioMatrix(x), 0.05).value)

# Two U[-1, 1] losses whose sum is U[-t, t]: DQ^ES sweeps [0, 1] as t goes to 2.
for t in (1.9, 1.95, 1.99, 2.0):
    print(f"uniform pair t={t}: DQ^ES_0.05 = {dep.dq_es_uniform_pair(t, 0.05):.4f}")
