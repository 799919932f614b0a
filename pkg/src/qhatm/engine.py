"""The deformation recurrence producing the series iterates.

Given a problem and the control parameters (numeric fractional order g,
convergence-control parameter h, asymptotic integer n >= 1, truncation order
M) the engine produces iterates v_0 .. v_M and the assembled truncated series

    S_M = sum_{m=0}^{M} v_m * (1/n)**m .

The m-th step, written in the evolution domain, is

    v_m = k_m v_{m-1}
          + h * [ v_{m-1} - (1 - k_m/n) u_0 + J^(leading)( bracket_m(v_{m-1}) ) ]

with k_m = 0 for m <= 1 and k_m = n otherwise, u_0 the initial guess, and

    bracket_m(v) = sum_i c_i D^(order_i) v + matrix . v + (1 - k_m/n) * source .

On the power-term lattice this is identical to the transform-domain
formulation (applying the order-(leading) integral J is exactly the inverse
transform of the 1/s**leading factor acting term by term), which is why no
symbolic transform appears here.

`solve` is pure: parameter sweeps may run concurrently over independent
parameter sets with no coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite
from typing import Mapping, Sequence

from .problems import ProblemSpec
from .series import FracSeries

__all__ = [
    "QhatmParams",
    "Solution",
    "k_m",
    "bracket",
    "deformation_step",
    "assemble",
    "solve",
    "residual_series",
]


@dataclass(frozen=True)
class QhatmParams:
    """Control knobs: numeric order, h, n, and the truncation order."""

    gamma: float
    h: float
    n: int = 1
    order: int = 3

    def validate_for(self, spec: ProblemSpec) -> None:
        if not isfinite(self.gamma):
            raise ValueError(f"gamma must be finite, got {self.gamma!r}")
        spec.validate_gamma(self.gamma)
        if not isfinite(self.h):
            raise ValueError(f"h must be finite, got {self.h!r}")
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"n must be an integer >= 1, got {self.n!r}")
        if not (isinstance(self.order, int) and self.order >= 0):
            raise ValueError(f"order must be an integer >= 0, got {self.order!r}")


@dataclass(frozen=True)
class Solution:
    """Ordered iterates v_0 .. v_M plus the assembled truncated series."""

    spec: ProblemSpec
    params: QhatmParams
    iterates: tuple[FracSeries, ...]
    assembled: FracSeries

    def evaluate(self, point: Mapping[str, float]) -> float:
        """Value of the assembled series at a point given as {variable: value}."""
        z = _evolution_value(self.spec, point)
        return self.assembled.evaluate(z, self.params.gamma, point)

    def residual_value(self, point: Mapping[str, float]) -> float:
        """Value of the defect of the assembled series in the original equation."""
        res = residual_series(self.assembled, self.spec, self.params)
        z = _evolution_value(self.spec, point)
        return res.evaluate(z, self.params.gamma, point)


def _evolution_value(spec: ProblemSpec, point: Mapping[str, float]) -> float:
    try:
        return point[spec.evolution_var]
    except KeyError:
        raise KeyError(
            f"point is missing the evolution variable {spec.evolution_var!r}"
        ) from None


def k_m(m: int, n: int) -> int:
    """Iteration schedule: 0 for m <= 1, n afterwards."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return 0 if m <= 1 else n


def bracket(
    v: FracSeries,
    spec: ProblemSpec,
    gamma: float,
    include_source: bool = False,
) -> FracSeries:
    """Inner bracket of one step: lower-order derivatives, matrix action, source.

    The source enters once per solve (scheduled by 1 - k_m/n in the step), so
    callers probing linear behaviour leave `include_source` off.
    """
    out = FracSeries.zero(spec.catalog)
    for coeff, order in spec.lower_terms:
        out = out.add(v.caputo(order, gamma).scale(coeff))
    out = out.add(v.apply_matrix(spec.bracket_matrix))
    if include_source:
        out = out.add(spec.source)
    return out


def deformation_step(
    v_prev: FracSeries, m: int, spec: ProblemSpec, params: QhatmParams
) -> FracSeries:
    """Produce v_m from v_{m-1}.

    For m = 1 the initial-data term cancels v_0 exactly, leaving
    v_1 = h * J^(leading)(bracket(v_0) + source).
    """
    k = k_m(m, params.n)
    w = 1.0 - k / params.n  # 1 at the first step, 0 afterwards
    inner = bracket(v_prev, spec, params.gamma, include_source=False)
    if w != 0.0:
        inner = inner.add(spec.source.scale(w))
    stepped = (
        v_prev.add(spec.initial_guess.scale(-w))
        .add(inner.rl_integral(spec.leading_order, params.gamma))
        .scale(params.h)
    )
    return v_prev.scale(float(k)).add(stepped)


def assemble(iterates: Sequence[FracSeries], n: int) -> FracSeries:
    """Weighted sum of the iterates: sum_m v_m * (1/n)**m."""
    if not (isinstance(n, int) and n >= 1):
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    if not iterates:
        raise ValueError("need at least one iterate to assemble")
    total = FracSeries.zero(iterates[0].catalog)
    for m, v in enumerate(iterates):
        total = total.add(v.scale((1.0 / n) ** m))
    return total


def solve(spec: ProblemSpec, params: QhatmParams) -> Solution:
    """Run the recurrence and assemble the truncated series."""
    params.validate_for(spec)
    iterates = [spec.initial_guess]
    for m in range(1, params.order + 1):
        iterates.append(deformation_step(iterates[-1], m, spec, params))
    return Solution(
        spec=spec,
        params=params,
        iterates=tuple(iterates),
        assembled=assemble(iterates, params.n),
    )


def residual_series(
    v: FracSeries, spec: ProblemSpec, params: QhatmParams
) -> FracSeries:
    """Defect of `v` in the original equation, as a series.

    Evaluates to zero everywhere exactly when `v` solves the equation within
    the span of the factor catalog.
    """
    lead = v.caputo(spec.leading_order, params.gamma)
    return lead.add(bracket(v, spec, params.gamma, include_source=True))
