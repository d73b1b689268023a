import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize as sopt

from dqlab import dependence as dep
from dqlab import distributions as dist
from dqlab import mrv
from dqlab.dq_core import _rmin_alpha_star, dq_var, dr
from dqlab.elliptical import dq_es_from_k, dq_var_from_k
from dqlab.exceptions import InvalidInputError
from dqlab.optimize import (
    EmpiricalDQObjective,
    _es_alpha_star_top,
    Weights,
    diversification_k,
    optimize_dq_empirical,
    optimize_elliptical,
    optimize_mrv_limit,
    project_simplex,
)
from dqlab.scenarios import ScenarioMatrix


def slsqp_oracle(sigma):
    """Oracle: maximize w's / sqrt(w' Sigma w) over the simplex with SLSQP from many starts."""
    n = sigma.shape[0]
    s = np.sqrt(np.diag(sigma))
    best = None
    rng = np.random.default_rng(0)
    for x0 in [np.full(n, 1.0 / n)] + [rng.dirichlet(np.ones(n)) for _ in range(5)]:
        res = sopt.minimize(
            lambda w: -(w @ s) / np.sqrt(w @ sigma @ w),
            x0,
            method="SLSQP",
            bounds=[(0, 1)] * n,
            constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1}],
            options={"ftol": 1e-14, "maxiter": 1000},
        )
        if best is None or res.fun < best.fun:
            best = res
    return best.x, -best.fun


def grid_argmin(fn, step=1e-4):
    """Oracle: 1-D brute force over w1 on a uniform grid."""
    w1 = np.arange(0.0, 1.0 + step / 2, step)
    vals = np.array([fn(np.array([a, 1.0 - a])) for a in w1])
    return w1[np.argmin(vals)], vals.min()


def random_sigma(rng, n):
    a = rng.normal(size=(n, n))
    d = rng.uniform(0.5, 2.0, n)
    return a @ a.T + np.diag(d)


# --- Weights ------------------------------------------------------------------


def test_weights_validation():
    assert len(Weights(np.array([0.25, 0.75]))) == 2
    with pytest.raises(InvalidInputError):
        Weights(np.array([0.5, 0.6]))
    with pytest.raises(InvalidInputError):
        Weights(np.array([1.5, -0.5]))
    with pytest.raises(InvalidInputError):
        Weights(np.array([]))


@given(st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=10))
def test_normalized_weights_sum_to_one(v):
    w = Weights.normalized(v)
    assert abs(w.w.sum() - 1.0) <= 1e-12
    assert np.all(w.w >= 0)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=8))
def test_project_simplex_kkt(v):
    v = np.array(v)
    x = project_simplex(v)
    assert abs(x.sum() - 1) <= 1e-12 and np.all(x >= 0)
    # optimality: v - x = tau on the support and <= tau off it
    r = v - x
    tau = r[x > 0].mean()
    assert np.allclose(r[x > 0], tau, atol=1e-9)
    assert np.all(r[x == 0] <= tau + 1e-9)


# --- elliptical ---------------------------------------------------------------


def test_example1_closed_form(example1_sigma):
    rep = optimize_elliptical(example1_sigma)
    assert rep.method == "closed-form" and rep.converged
    assert rep.weights.w[0] == pytest.approx(0.5860, abs=1e-3)
    assert rep.objective == pytest.approx(diversification_k(rep.weights.w, example1_sigma), rel=1e-14)


def test_identity_and_diagonal():
    assert np.allclose(optimize_elliptical(np.eye(5)).weights.w, 0.2, atol=1e-15)
    assert np.allclose(optimize_elliptical(np.diag([1.0, 4.0])).weights.w, [2 / 3, 1 / 3], atol=1e-15)


def test_singular_sigma_rejected():
    s = np.array([1.0, 2.0])
    with pytest.raises(InvalidInputError):
        optimize_elliptical(np.outer(s, s))


def test_invariant_to_location_and_scale(example1_sigma):
    base = optimize_elliptical(example1_sigma).weights.w
    spec = dist.EllipticalSpec("t", example1_sigma, mu=np.array([3.0, -7.0]), nu=3)
    assert np.allclose(optimize_elliptical(spec).weights.w, base, atol=1e-14)
    assert np.allclose(optimize_elliptical(12.5 * example1_sigma).weights.w, base, atol=1e-12)


def test_qp_fallback_matches_slsqp():
    rng = np.random.default_rng(2)
    fallback = 0
    for _ in range(400):
        n = int(rng.integers(2, 7))
        sigma = random_sigma(rng, n)
        rep = optimize_elliptical(sigma)
        if rep.method != "qp-fallback":
            continue
        fallback += 1
        assert rep.converged
        w_oracle, k_oracle = slsqp_oracle(sigma)
        assert rep.objective >= k_oracle - 1e-9
        assert np.allclose(rep.weights.w, w_oracle, atol=1e-4)
    assert fallback >= 50


@pytest.mark.parametrize("y", [dist.Normal(), dist.StudentT(3)], ids=repr)
def test_optimal_weights_beat_random_points(y):
    rng = np.random.default_rng(3)
    sigma = random_sigma(rng, 4)
    w_star = optimize_elliptical(sigma).weights.w
    k_star = diversification_k(w_star, sigma)
    points = rng.dirichlet(np.ones(4), size=200)
    for alpha in (0.01, 0.05):
        for fn in (dq_var_from_k, dq_es_from_k):
            best = fn(y, k_star, alpha)
            assert all(best <= fn(y, diversification_k(w, sigma), alpha) + 1e-12 for w in points)


# --- empirical ----------------------------------------------------------------


@pytest.fixture(scope="module")
def example1_scenarios(example1_sigma):
    return dist.sample_elliptical(dist.EllipticalSpec("t", example1_sigma, nu=3), 2 * 10**5, seed=20240901)


def test_empirical_search_near_closed_form(example1_scenarios):
    rep = optimize_dq_empirical(example1_scenarios, "VaR", 0.05)
    assert rep.method == "simplex-search"
    assert rep.weights.w[0] == pytest.approx(0.5860, abs=0.03)


def test_empirical_objective_matches_dq(example1_scenarios):
    obj = EmpiricalDQObjective(example1_scenarios, "VaR", 0.05)
    for w in ([0.5, 0.5], [0.2, 0.8], [0.9, 0.1]):
        w = np.array(w)
        assert obj(w) == pytest.approx(dq_var(example1_scenarios.weighted(w), 0.05).value, abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(5, 3000), st.floats(0.01, 0.99), st.booleans())
def test_top_values_route_matches_full_scan(seed, count, alpha, rounded):
    rng = np.random.default_rng(seed)
    d = rng.standard_t(3, count) - rng.uniform(0, 3)
    if rounded:
        d = np.round(d)
    full = _rmin_alpha_star(d, np.full(count, 1.0 / count))
    assert _es_alpha_star_top(d, alpha) == pytest.approx(full, abs=1e-12)


def test_empirical_never_worse_than_equal_weights(example1_scenarios):
    for measure in ("VaR", "ES"):
        obj = EmpiricalDQObjective(example1_scenarios, measure, 0.05)
        rep = optimize_dq_empirical(example1_scenarios, measure, 0.05)
        assert rep.objective <= obj(np.full(2, 0.5))
        assert rep.objective == pytest.approx(obj(rep.weights.w), abs=1e-12)


def test_empirical_search_is_deterministic(example1_scenarios):
    a = optimize_dq_empirical(example1_scenarios, "ES", 0.05, seed=4)
    b = optimize_dq_empirical(example1_scenarios, "ES", 0.05, seed=4)
    assert np.array_equal(a.weights.w, b.weights.w) and a.objective == b.objective


def test_dq_and_dr_argmins_agree(example1_scenarios):
    w_dq = optimize_dq_empirical(example1_scenarios, "VaR", 0.05).weights.w[0]
    w_dr, _ = grid_argmin(lambda w: dr(example1_scenarios.weighted(w), "VaR", 0.05), step=0.01)
    assert w_dq == pytest.approx(w_dr, abs=0.03)


def test_comonotonic_objective_is_flat():
    s = dep.make_comonotonic([dist.Normal(), dist.StudentT(4), dist.Normal(2, 3)], 10**4)
    rep = optimize_dq_empirical(s, "VaR", 0.05)
    assert rep.converged
    assert rep.objective == pytest.approx(1.0, abs=1e-3)


def test_single_asset():
    s = ScenarioMatrix(np.random.default_rng(0).normal(size=(1000, 1)))
    rep = optimize_dq_empirical(s, "ES", 0.05)
    assert np.array_equal(rep.weights.w, [1.0])
    assert rep.objective == pytest.approx(1.0, abs=1e-9)


def test_small_tail_rejected():
    s = ScenarioMatrix(np.random.default_rng(0).normal(size=(300, 2)))
    with pytest.raises(InvalidInputError, match="alpha"):
        optimize_dq_empirical(s, "VaR", 0.05)


# --- MRV limit ----------------------------------------------------------------


@pytest.mark.parametrize("n,gamma", [(2, 1.5), (4, 3.0), (6, 2.0)])
def test_mrv_iid_equal_weights(n, gamma):
    rep = optimize_mrv_limit(mrv.iid_spectral(n, gamma))
    assert rep.converged and rep.method == "convex-mrv"
    assert np.allclose(rep.weights.w, 1.0 / n, atol=1e-7)
    assert rep.objective == pytest.approx(n ** (1 - gamma), rel=1e-10)


@pytest.mark.parametrize("nu", [2.0, 4.0])
def test_mrv_example2_matches_grid(nu):
    rep = optimize_mrv_limit(mrv.example2_spectral(0.3, nu))
    w1, f_min = grid_argmin(lambda w: mrv.example2_f(w, 0.3, nu))
    assert rep.weights.w[0] == pytest.approx(w1, abs=1e-3)
    assert rep.objective <= f_min + 1e-12


def test_mrv_asymmetric_two_atoms_matches_grid():
    psi = mrv.SpectralMeasure([[0.8, 0.2], [0.3, 0.7]], [0.35, 0.65], 2.5)
    rep = optimize_mrv_limit(psi)
    w1, f_min = grid_argmin(lambda w: mrv.dq_limit_mrv(w, psi))
    assert rep.weights.w[0] == pytest.approx(w1, abs=1e-3)
    assert rep.objective <= f_min + 1e-12


def test_mrv_errors():
    with pytest.raises(InvalidInputError):
        optimize_mrv_limit(mrv.iid_spectral(3, 1.0))
    with pytest.raises(InvalidInputError):
        optimize_mrv_limit(mrv.SpectralMeasure([[1.0, 0.0]], [1.0], 2.0))
