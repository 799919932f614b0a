"""scikit-learn style front end for the series solver.

`fit` runs the deformation recurrence for the configured problem and control
parameters; `predict` evaluates the assembled truncated series on rows of
coordinate values.  Because the class follows the estimator protocol
(`get_params` / `set_params` / `clone`), parameter studies over h, n, or the
truncation order compose with the usual scikit-learn tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .engine import QhatmParams, residual_series, solve
from .problems import ProblemSpec, builtin

__all__ = ["QhatmSolver"]


class QhatmSolver(BaseEstimator):
    """Series solver for linear fractional telegraph problems.

    Parameters
    ----------
    problem : str or ProblemSpec, default="ex41"
        Built-in problem name (see `qhatm.BUILTIN_NAMES`) or a fully
        constructed problem object, e.g. from `qhatm.load_custom`.
    gamma : float, default=1.0
        Numeric value of the fractional order symbol; must lie in the
        problem's admissible range.
    h : float, default=-1.0
        Convergence-control parameter.  h = -1 with n = 1 is the classical
        homotopy limit.
    n : int, default=1
        Asymptotic parameter; iterate m is weighted by (1/n)**m in the
        assembled series.
    order : int, default=3
        Truncation order M; iterates v_0 .. v_M are computed.

    Attributes
    ----------
    problem_ : ProblemSpec
        The resolved problem.
    solution_ : Solution
        Iterates and assembled series produced by `fit`.
    variables_ : tuple of str
        Column order expected by `predict`: the problem's coordinates
        followed by its evolution variable.
    n_features_in_ : int
        Number of input columns, ``len(variables_)``.

    Examples
    --------
    >>> from qhatm import QhatmSolver
    >>> est = QhatmSolver(problem="ex41", gamma=1.0, h=-1.0, n=1, order=3).fit()
    >>> est.variables_
    ('x', 't')
    >>> float(est.predict([[0.0, 0.0]])[0])
    1.0
    """

    def __init__(self, problem="ex41", gamma: float = 1.0, h: float = -1.0,
                 n: int = 1, order: int = 3):
        self.problem = problem
        self.gamma = gamma
        self.h = h
        self.n = n
        self.order = order

    # ------------------------------------------------------------------

    def _resolve_problem(self) -> ProblemSpec:
        if isinstance(self.problem, ProblemSpec):
            return self.problem
        if isinstance(self.problem, str):
            return builtin(self.problem)
        raise TypeError(
            f"problem must be a built-in name or a ProblemSpec, got {type(self.problem)!r}"
        )

    def fit(self, X=None, y=None) -> "QhatmSolver":
        """Compute the iterates and the assembled series.

        X and y are accepted for estimator-protocol compatibility and ignored:
        the inputs of the computation are the problem and the parameters.
        """
        spec = self._resolve_problem()
        params = QhatmParams(gamma=self.gamma, h=self.h, n=self.n, order=self.order)
        self.solution_ = solve(spec, params)
        self.problem_ = spec
        self.variables_ = spec.variables
        self.n_features_in_ = len(self.variables_)
        return self

    def _points(self, X) -> np.ndarray:
        check_is_fitted(self, "solution_")
        X = check_array(X, ensure_2d=True, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} columns but problem {self.problem_.name!r} "
                f"expects {self.n_features_in_}: {self.variables_}"
            )
        return X

    def _evaluate_rows(self, series, X) -> np.ndarray:
        gamma = self.solution_.params.gamma
        zcol = self.variables_.index(self.problem_.evolution_var)
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            coords = dict(zip(self.variables_, row))
            out[i] = series.evaluate(float(row[zcol]), gamma, coords)
        return out

    def predict(self, X) -> np.ndarray:
        """Evaluate the assembled series at rows ordered per `variables_`."""
        X = self._points(X)
        return self._evaluate_rows(self.solution_.assembled, X)

    def residual(self, X) -> np.ndarray:
        """Defect of the assembled series in the original equation, per row."""
        X = self._points(X)
        res = residual_series(self.solution_.assembled, self.problem_, self.solution_.params)
        return self._evaluate_rows(res, X)

    def score(self, X, y=None) -> float:
        """Negative mean absolute error (vs y) or residual (y omitted).

        With y given this scores the prediction against reference values;
        without y it scores how well the series satisfies the equation at the
        points X.  Higher is better in both cases, so the estimator can drive
        a search for a good convergence-control parameter h.
        """
        if y is not None:
            pred = self.predict(X)
            y = np.asarray(y, dtype=float).reshape(-1)
            if y.shape[0] != pred.shape[0]:
                raise ValueError(f"y has {y.shape[0]} entries, expected {pred.shape[0]}")
            return -float(np.mean(np.abs(pred - y)))
        return -float(np.mean(np.abs(self.residual(X))))
