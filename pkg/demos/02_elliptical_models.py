"""Closed-form DQ for normal and t portfolios.

For elliptical models everything is driven by one number, k = sum of
marginal scales / scale of the sum. DQ then reduces to a one-dimensional
computation, and DR is always 1/k whatever the tail.

Run: python3 demos/02_elliptical_models.py
"""

from dqlab import EllipticalSpec, ar1, dq_es_elliptical, dq_var_elliptical, dq_var_limit, dr_elliptical, equicorrelated, k_sigma
from dqlab.risk_measures import pelve

alpha = 0.01
print(f"{'model':<22}{'k':>8}{'PELVE c':>10}{'DQ^VaR':>10}{'DQ^ES_ca':>10}{'DR':>8}{'limit':>8}")
for fam in ("normal", "t"):
    for name, sigma in (("equicorrelated", equicorrelated(4, 0.3)), ("AR(1)", ar1(4, 0.3))):
        spec = EllipticalSpec(fam, sigma, nu=3 if fam == "t" else None)
        k = k_sigma(sigma).k_sigma
        c = pelve(spec.standard(), alpha)  # ES at level c*alpha matches VaR at alpha
        print(
            f"{fam + ' ' + name:<22}{k:8.4f}{c:10.3f}"
            f"{dq_var_elliptical(spec, alpha).value:10.4f}{dq_es_elliptical(spec, c * alpha).value:10.4f}"
            f"{dr_elliptical(spec, 'VaR', alpha):8.4f}{dq_var_limit(spec):8.4f}"
        )

# Heavier tails mean weaker diversification at small levels, which DR cannot see.
sigma = equicorrelated(4, 0.3)
for nu in (1, 2, 3, 5, 10, 30):
    spec = EllipticalSpec("t", sigma, nu=nu)
    print(f"nu={nu:<3} DQ^VaR_0.01={dq_var_elliptical(spec, 0.01).value:.4f}  DR={dr_elliptical(spec, 'VaR', 0.01):.4f}")
