"""Diversification quotient (DQ) toolkit.

DQ compares the smallest tail level at which a portfolio's risk falls below
the sum of standalone risks with the level itself: ``DQ_alpha = alpha* / alpha``.
The package covers empirical DQ on scenario data, closed forms for elliptical
models, small-level limits for regularly varying models, dependence
constructions attaining the extreme values, and portfolio optimization.
"""

__version__ = "0.1.0"

from .dependence import (
    TailEventDiagnostic,
    check_alpha_concentration,
    dq_es_uniform_pair,
    make_alpha_ce,
    make_comonotonic,
    make_multinomial_onehot,
)
from .distributions import (
    EllipticalSpec,
    Normal,
    Pareto,
    StudentT,
    Uniform,
    ar1,
    equicorrelated,
    es_analytic,
    sample_elliptical,
    sample_univariate,
    var_analytic,
)
from .dq_core import DQResult, alpha_star, dq, dq_bisection, dq_es, dq_var, dr
from .elliptical import (
    DispersionSummary,
    density_ratio_limit,
    dq_elliptical,
    dq_es_elliptical,
    dq_var_elliptical,
    dq_var_limit,
    dr_elliptical,
    k_sigma,
)
from .exceptions import (
    CalibrationError,
    ConvergenceError,
    DQError,
    InvalidInputError,
    LimitDoesNotExistError,
    NumericalError,
    UndefinedDRError,
    UnsupportedMeasureError,
)
from .mrv import SpectralMeasure, dq_limit_iid, dq_limit_mrv, eta, example2_f, iid_spectral
from .optimize import OptimizationReport, Weights, optimize_dq_empirical, optimize_elliptical, optimize_mrv_limit
from .risk_measures import EmpiricalDistribution, es_empirical, pelve, superquantile_value, var_empirical
from .scenarios import ScenarioMatrix, read_scenarios_csv, write_scenarios_csv

__all__ = [name for name in dir() if not name.startswith("_")]
