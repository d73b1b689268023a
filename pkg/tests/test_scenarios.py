import io

import numpy as np
import pytest

from dqlab.exceptions import InvalidInputError
from dqlab.scenarios import (
    ScenarioMatrix,
    read_dispersion_csv,
    read_scenarios_csv,
    write_dispersion_csv,
    write_scenarios_csv,
)


def test_defaults_and_views():
    s = ScenarioMatrix(np.array([[1.0, 2.0], [3.0, -4.0], [0.5, 0.5]]))
    assert s.labels == ("x1", "x2")
    assert s.uniform and s.n_scenarios == 3 and s.n_assets == 2
    assert np.array_equal(s.total(), [3.0, -1.0, 1.0])
    assert np.allclose(s.probability_vector(), 1 / 3)
    assert np.array_equal(s.weighted([2.0, 0.5]).losses, [[2.0, 1.0], [6.0, -2.0], [1.0, 0.25]])


@pytest.mark.parametrize(
    "losses,probs",
    [
        (np.array([[np.nan, 1.0]]), None),
        (np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([0.5, 0.6])),
        (np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([1.2, -0.2])),
        (np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([1.0])),
        (np.empty((0, 2)), None),
    ],
)
def test_invalid_scenarios_rejected(losses, probs):
    with pytest.raises(InvalidInputError):
        ScenarioMatrix(losses, probs)


def test_csv_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(4)
    s = ScenarioMatrix(rng.standard_t(3, size=(50, 3)), labels=("a", "b", "c"))
    path = tmp_path / "s.csv"
    write_scenarios_csv(s, path)
    back = read_scenarios_csv(path)
    assert np.array_equal(back.losses, s.losses)
    assert back.labels == ("a", "b", "c") and back.probabilities is None


def test_csv_probability_column(tmp_path):
    p = np.array([0.1, 0.2, 0.7])
    s = ScenarioMatrix(np.arange(6.0).reshape(3, 2), p)
    buf = io.StringIO()
    write_scenarios_csv(s, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "x1,x2,prob"
    path = tmp_path / "p.csv"
    path.write_text(text)
    back = read_scenarios_csv(path)
    assert np.array_equal(back.probabilities, p)
    assert not back.uniform


def test_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,x2\n1,2\n3,oops\n")
    with pytest.raises(InvalidInputError):
        read_scenarios_csv(bad)
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("x1,x2\n1,2,3\n")
    with pytest.raises(InvalidInputError):
        read_scenarios_csv(ragged)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(InvalidInputError):
        read_scenarios_csv(empty)


def test_dispersion_csv_round_trip(tmp_path):
    sigma = np.array([[1.0, 0.3], [0.3, 2.0]])
    path = tmp_path / "sigma.csv"
    write_dispersion_csv(sigma, path)
    assert np.array_equal(read_dispersion_csv(path), sigma)
    (tmp_path / "rect.csv").write_text("1,2,3\n4,5,6\n")
    with pytest.raises(InvalidInputError):
        read_dispersion_csv(tmp_path / "rect.csv")
    with pytest.raises(InvalidInputError):
        read_dispersion_csv(tmp_path / "missing.csv")
