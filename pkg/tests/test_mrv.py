import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dqlab import distributions as dist
from dqlab import mrv
from dqlab.dq_core import dq_var
from dqlab.exceptions import InvalidInputError
from dqlab.mrv import SpectralMeasure, dq_limit_iid, dq_limit_mrv, eta, example2_f, iid_spectral
from dqlab.scenarios import ScenarioMatrix


def eta_loop(x, directions, weights, gamma):
    """Oracle: the defining finite sum, one atom at a time."""
    total = 0.0
    for s, p in zip(directions, weights):
        total += p * sum(a * b for a, b in zip(x, s)) ** gamma
    return total


def random_measure(seed, n, atoms, gamma):
    rng = np.random.default_rng(seed)
    return SpectralMeasure.from_unnormalized(rng.exponential(size=(atoms, n)), rng.uniform(0.1, 1, atoms), gamma)


weight_vectors = st.integers(2, 5).flatmap(
    lambda n: st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n).map(np.array)
)


# --- spectral measures --------------------------------------------------------


def test_validation():
    with pytest.raises(InvalidInputError):
        SpectralMeasure(np.eye(2), [0.5, 0.4], 2.0)
    with pytest.raises(InvalidInputError):
        SpectralMeasure([[0.5, 0.6]], [1.0], 2.0)
    with pytest.raises(InvalidInputError):
        SpectralMeasure(np.eye(2), [1.0, 0.0], 2.0)
    with pytest.raises(InvalidInputError):
        SpectralMeasure(np.eye(2), [0.5, 0.5], 0.0)
    with pytest.raises(InvalidInputError):
        SpectralMeasure(np.eye(2), [1.0], 2.0)


def test_json_round_trip(tmp_path):
    psi = random_measure(1, 3, 5, 2.5)
    path = tmp_path / "psi.json"
    mrv.write_spectral_json(psi, path)
    back = mrv.read_spectral_json(path)
    assert np.array_equal(back.directions, psi.directions)
    assert np.array_equal(back.weights, psi.weights)
    assert back.gamma == psi.gamma
    assert set(json.loads(path.read_text())) == {"gamma", "atoms"}


def test_malformed_json():
    with pytest.raises(InvalidInputError):
        SpectralMeasure.from_json({"gamma": 2.0})
    with pytest.raises(InvalidInputError):
        SpectralMeasure.from_json({"gamma": 2.0, "atoms": [{"s": [1.0]}]})


# --- eta ----------------------------------------------------------------------


def test_eta_examples():
    psi = iid_spectral(4, 3.0)
    for j in range(4):
        assert eta(np.eye(4)[j], psi) == 0.25
    assert eta(np.full(4, 0.25), psi) == pytest.approx(0.015625, rel=1e-15)
    single = SpectralMeasure([[0.5, 0.5]], [1.0], 2.0)
    assert eta([1.0, 1.0], single) == 1.0


@given(st.integers(0, 10**6), st.integers(1, 6), st.floats(0.3, 5.0))
def test_eta_matches_loop(seed, atoms, gamma):
    psi = random_measure(seed, 3, atoms, gamma)
    x = np.random.default_rng(seed + 1).uniform(0, 2, 3)
    assert eta(x, psi) == pytest.approx(eta_loop(x, psi.directions, psi.weights, gamma), rel=1e-12)


@given(st.integers(0, 10**6), st.floats(0.01, 100.0))
def test_eta_homogeneous_of_degree_gamma(seed, c):
    psi = random_measure(seed, 3, 4, 2.5)
    x = np.random.default_rng(seed).uniform(0, 1, 3)
    assert eta(c * x, psi) == pytest.approx(c**2.5 * eta(x, psi), rel=1e-12)


def test_eta_negative_projection():
    psi = SpectralMeasure([[1.0, 0.0], [0.0, -1.0]], [0.5, 0.5], 2.0)
    assert eta([1.0, 2.0], psi) == pytest.approx(0.5 * 1 + 0.5 * 4)
    frac = SpectralMeasure(psi.directions, psi.weights, 2.5)
    with pytest.raises(InvalidInputError):
        eta([1.0, 2.0], frac)


# --- f(w) ---------------------------------------------------------------------


def test_f_examples():
    psi = iid_spectral(4, 3.0)
    assert dq_limit_mrv(np.full(4, 0.25), psi) == pytest.approx(0.0625, rel=1e-14)
    other = random_measure(3, 4, 6, 2.0)
    for j in range(4):
        assert dq_limit_mrv(np.eye(4)[j], other) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_f_on_iid_measure_equals_iid_limit(n, gamma):
    assert abs(dq_limit_mrv(np.full(n, 1.0 / n), iid_spectral(n, gamma)) - dq_limit_iid(n, gamma)) <= 1e-12


@given(weight_vectors, st.floats(0.01, 100.0), st.integers(0, 10**6))
def test_f_homogeneous_of_degree_zero(w, c, seed):
    psi = random_measure(seed, w.size, 5, 2.5)
    assert dq_limit_mrv(c * w, psi) == pytest.approx(dq_limit_mrv(w, psi), rel=1e-12)


@given(weight_vectors, st.integers(0, 10**6), st.floats(0.3, 4.0))
def test_f_range(w, seed, gamma):
    psi = random_measure(seed, w.size, 5, gamma)
    f = dq_limit_mrv(w, psi)
    assert 0.0 < f <= w.size + 1e-12


def test_f_zero_weights_by_continuity():
    psi = random_measure(4, 3, 5, 2.0)
    w0 = np.array([0.6, 0.4, 0.0])
    near = np.array([0.6, 0.4, 1e-9])
    assert dq_limit_mrv(w0, psi) == pytest.approx(dq_limit_mrv(near, psi), rel=1e-6)


def test_f_errors():
    psi = SpectralMeasure([[1.0, 0.0]], [1.0], 2.0)  # second margin never extreme
    with pytest.raises(InvalidInputError):
        dq_limit_mrv([0.5, 0.5], psi)
    assert dq_limit_mrv([1.0, 0.0], psi) == 1.0
    with pytest.raises(InvalidInputError):
        dq_limit_mrv([0.5, 0.5, 0.0], iid_spectral(2, 2.0))
    with pytest.raises(InvalidInputError):
        dq_limit_mrv([0.0, 0.0], iid_spectral(2, 2.0))


# --- iid limit ----------------------------------------------------------------


def test_iid_limit_examples():
    assert dq_limit_iid(4, 3.0) == 0.0625
    assert dq_limit_iid(4, 1.0) == 1.0
    assert dq_limit_iid(5, 0.2) == pytest.approx(3.624, abs=1e-3)
    assert dq_limit_iid(3, 1e-9) == pytest.approx(3.0, rel=1e-6)
    with pytest.raises(InvalidInputError):
        dq_limit_iid(0, 2.0)


def test_iid_pareto_trend_and_subadditivity_boundary():
    alphas = (0.05, 0.01, 0.002)
    x = dist.sample_univariate(dist.Pareto(3.0), (2 * 10**6, 4), seed=20240901)
    light = [dq_var(ScenarioMatrix(x), a).value for a in alphas]
    # decreasing toward 4 ** -2 = 0.0625; the final point is still well above it
    assert light[0] > light[1] > light[2] > 0.0625
    assert light[-1] < 1
    heavy = dist.sample_univariate(dist.Pareto(0.5), (2 * 10**6, 4), seed=20240902)
    assert dq_var(ScenarioMatrix(heavy), 0.002).value > 1


# --- Example 2 ----------------------------------------------------------------


def test_example2_endpoints():
    for r in (0.0, 0.3, 0.9):
        for nu in (1.5, 2.0, 4.0):
            assert example2_f([1.0, 0.0], r, nu) == pytest.approx(1.0, rel=1e-14)
            assert example2_f([0.0, 1.0], r, nu) == pytest.approx(1.0, rel=1e-14)


def test_example2_hand_value():
    # r = 0.3, nu = 2, w = (1/2, 1/2): q = 0.4225 + 0.2275 = 0.65 and d = 1
    assert example2_f([0.5, 0.5], 0.3, 2.0) == pytest.approx(0.65, rel=1e-14)


@given(st.floats(0.0, 1.0), st.floats(0.0, 0.95), st.floats(1.1, 6.0))
def test_example2_matches_spectral_representation(w1, r, nu):
    w = np.array([w1, 1.0 - w1])
    psi = mrv.example2_spectral(r, nu)
    if r == 0.0 and 0.0 in w:
        return
    assert dq_limit_mrv(w, psi) == pytest.approx(example2_f(w, r, nu), rel=1e-10)


def test_example2_monte_carlo():
    scen = mrv.sample_example2(0.3, 2.0, 10**7, seed=20240901)
    w = np.array([0.5, 0.5])
    assert dq_var(scen.weighted(w), 0.001).value == pytest.approx(example2_f(w, 0.3, 2.0), abs=0.05)


def test_example2_matrix_rejects_r_one():
    with pytest.raises(InvalidInputError):
        mrv.example2_matrix(1.0)
    with pytest.raises(InvalidInputError):
        example2_f([0.5, 0.5], 0.3, 1.0)
