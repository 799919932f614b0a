import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.model_selection import ParameterGrid

from qhatm import QhatmParams, QhatmSolver, builtin, h_curve, solve


def test_fit_returns_self_and_sets_attributes():
    est = QhatmSolver(problem="ex41", gamma=1.0, h=-1.0, n=1, order=3)
    assert est.fit() is est
    assert est.variables_ == ("x", "t")
    assert est.n_features_in_ == 2
    assert est.problem_.name == "ex41"
    assert len(est.solution_.iterates) == 4


def test_predict_matches_engine_evaluation():
    est = QhatmSolver(problem="ex45", gamma=0.8, h=-1.1, n=2, order=4).fit()
    sol = solve(builtin("ex45"), QhatmParams(gamma=0.8, h=-1.1, n=2, order=4))
    rng = np.random.default_rng(7)
    X = rng.uniform(0.05, 1.0, size=(12, 4))  # columns x, y, z, t
    got = est.predict(X)
    for row, value in zip(X, got):
        point = dict(zip(est.variables_, row))
        assert value == pytest.approx(sol.evaluate(point), rel=1e-15)


def test_predict_column_order_for_space_fractional_problem():
    est = QhatmSolver(problem="ex42", gamma=2.0, h=-1.0, order=6).fit()
    assert est.variables_ == ("t", "x")
    # exact solution e**(x-t) is reproduced closely at the classical order
    value = est.predict([[0.3, 0.5]])[0]
    assert value == pytest.approx(math.exp(0.5 - 0.3), rel=1e-8)


def test_predict_requires_fit():
    with pytest.raises(NotFittedError):
        QhatmSolver().predict([[0.0, 0.0]])


def test_predict_validates_column_count():
    est = QhatmSolver(problem="ex41", gamma=1.0).fit()
    with pytest.raises(ValueError, match="columns"):
        est.predict([[0.0, 0.0, 0.0]])


def test_predict_rejects_non_finite_rows():
    est = QhatmSolver(problem="ex41", gamma=1.0).fit()
    with pytest.raises(ValueError):
        est.predict([[np.nan, 0.0]])


def test_fit_validates_gamma_range():
    with pytest.raises(ValueError, match=r"\(1, 2\]"):
        QhatmSolver(problem="ex42", gamma=0.5).fit()


def test_problem_accepts_spec_object():
    est = QhatmSolver(problem=builtin("ex43"), gamma=1.0, h=-1.0, order=2).fit()
    assert est.problem_.name == "ex43"
    assert est.variables_ == ("t", "x")


def test_problem_type_error():
    with pytest.raises(TypeError):
        QhatmSolver(problem=42).fit()


def test_get_params_set_params_clone():
    est = QhatmSolver(problem="ex44", gamma=0.9, h=-0.8, n=2, order=5)
    params = est.get_params()
    assert params == {"problem": "ex44", "gamma": 0.9, "h": -0.8, "n": 2, "order": 5}
    est.set_params(h=-1.0, order=3)
    assert est.h == -1.0 and est.order == 3
    duplicate = clone(est).fit()
    original = est.fit()
    X = [[0.2, 0.4, 0.1], [1.0, 0.5, 0.3]]
    np.testing.assert_allclose(duplicate.predict(X), original.predict(X), rtol=1e-15)


def test_parameter_grid_sweep_matches_h_curve():
    # The estimator protocol drives the same sweep the analysis helper runs.
    point = {"x": 1.5, "t": 0.01}
    hs = [-2.0, -1.5, -1.0, -0.5]
    curve = h_curve(builtin("ex41"), 1.0, 1, 3, point, h_min=-2.0, h_max=-0.5, steps=4)
    base = QhatmSolver(problem="ex41", gamma=1.0, n=1, order=3)
    for cp, grid_point in zip(curve, ParameterGrid({"h": hs})):
        est = clone(base).set_params(**grid_point).fit()
        value = est.predict([[point["x"], point["t"]]])[0]
        assert cp.h == pytest.approx(grid_point["h"])
        assert value == pytest.approx(cp.value, rel=1e-14)


def test_residual_method():
    est = QhatmSolver(problem="ex41", gamma=1.0, h=-1.0, order=2).fit()
    got = est.residual([[0.0, 0.1], [1.0, 0.3]])
    # remainder oracle: e**x * 2 * (-2)^(M+1) t^M / M!
    for (x, t), value in zip([(0.0, 0.1), (1.0, 0.3)], got):
        oracle = math.exp(x) * 2.0 * (-2.0) ** 3 * t**2 / 2.0
        assert value == pytest.approx(oracle, rel=1e-9)


def test_score_against_reference_values():
    est = QhatmSolver(problem="ex41", gamma=1.0, h=-1.0, order=6).fit()
    X = [[0.0, 0.1], [0.5, 0.2]]
    y = [math.exp(0.0 - 0.2), math.exp(0.5 - 0.4)]
    score = est.score(X, y)
    assert -1e-6 < score <= 0.0
    with pytest.raises(ValueError, match="entries"):
        est.score(X, [1.0])


def test_score_without_reference_uses_residual():
    est = QhatmSolver(problem="ex41", gamma=1.0, h=-1.0, order=3).fit()
    X = [[0.0, 0.1], [0.0, 0.2]]
    expected = -float(np.mean(np.abs(est.residual(X))))
    assert est.score(X) == pytest.approx(expected, rel=1e-15)


def test_score_prefers_classical_h_on_residuals():
    # The score ranks h = -1 above a detuned h, mirroring its diagnostic use.
    X = [[1.5, t] for t in (0.05, 0.1, 0.2)]
    good = QhatmSolver(problem="ex41", gamma=1.0, h=-1.0, order=4).fit().score(X)
    bad = QhatmSolver(problem="ex41", gamma=1.0, h=-0.3, order=4).fit().score(X)
    assert good > bad
