"""Series solutions of linear fractional telegraph equations.

The solver runs a homotopy-style iteration with a convergence-control
parameter h and an asymptotic integer n, producing symbolic fractional power
series iterates and their weighted sum as the truncated solution.  Five
telegraph benchmark problems are built in; custom linear problems load from a
JSON schema.  `QhatmSolver` wraps the engine in the scikit-learn estimator
protocol; the `qhatm` command exposes the same functionality on the shell.
"""

from .analysis import (
    CurvePoint,
    ErrorRecord,
    Table45Row,
    error_grid,
    h_curve,
    residual_sweep,
    table_ex45,
    taylor_coeffs,
)
from .engine import (
    QhatmParams,
    Solution,
    assemble,
    bracket,
    deformation_step,
    k_m,
    residual_series,
    solve,
)
from .problems import (
    BUILTIN_NAMES,
    ExactSolution,
    ProblemFormatError,
    ProblemSpec,
    builtin,
    exact_eval,
    load_custom,
    problem_to_json,
)
from .series import (
    AffineExponent,
    CatalogMismatchError,
    ExponentUnderflowError,
    Factor,
    FactorCatalog,
    FracSeries,
    MissingCoordinateError,
    Term,
)
from .solver import QhatmSolver
from .special import GammaDomainError, gamma, ln_gamma

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AffineExponent",
    "BUILTIN_NAMES",
    "CatalogMismatchError",
    "CurvePoint",
    "ErrorRecord",
    "ExactSolution",
    "ExponentUnderflowError",
    "Factor",
    "FactorCatalog",
    "FracSeries",
    "GammaDomainError",
    "MissingCoordinateError",
    "ProblemFormatError",
    "ProblemSpec",
    "QhatmParams",
    "QhatmSolver",
    "Solution",
    "Table45Row",
    "Term",
    "assemble",
    "bracket",
    "builtin",
    "deformation_step",
    "error_grid",
    "exact_eval",
    "gamma",
    "h_curve",
    "k_m",
    "ln_gamma",
    "load_custom",
    "problem_to_json",
    "residual_series",
    "residual_sweep",
    "solve",
    "table_ex45",
    "taylor_coeffs",
]
