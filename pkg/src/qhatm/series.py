"""Exact algebra of finite fractional power series in one evolution variable.

A series is a finite sum of terms

    coeff * z**(p + q*g) * F_j(other variables)

where z is the evolution variable (t for time-fractional problems, x for
space-fractional ones), g is the symbolic fractional order, (p, q) is an
integer pair, and F_j is a separable factor drawn from a fixed catalog.

Exponents are kept symbolic as (p, q) pairs so that like terms merge exactly
and results can be compared structurally, independent of the numeric value of
g.  The orders fed to the Caputo derivative and the fractional integral are
affine in g as well, so both operations shift (p, q) exactly; the numeric
order is used only for branch decisions and Gamma evaluation.

All values are immutable; every operation returns a new series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .special import gamma_ratio

__all__ = [
    "AffineExponent",
    "Term",
    "Factor",
    "FactorCatalog",
    "FracSeries",
    "CatalogMismatchError",
    "ExponentUnderflowError",
    "MissingCoordinateError",
]

# Relative coefficient pruning threshold: suppresses float dust left behind by
# Gamma-ratio round trips without touching genuinely small terms.
PRUNE_REL = 1e-14

# Slack used for numeric branch decisions on exponents and orders.
EXP_TOL = 1e-12


class CatalogMismatchError(ValueError):
    """Two series over different factor catalogs were combined."""


class ExponentUnderflowError(ValueError):
    """A derivative produced a negative exponent on a nonzero term.

    This never happens for the telegraph problems handled here; it signals a
    derivative order that exceeds what the series supports.
    """


class MissingCoordinateError(KeyError):
    """A factor evaluator was not given a value for one of its variables."""


@dataclass(frozen=True, order=True)
class AffineExponent:
    """Exponent p + q*g over the symbolic fractional order g."""

    p: int
    q: int

    def value(self, gamma_num: float) -> float:
        return self.p + self.q * gamma_num

    def __add__(self, other: "AffineExponent") -> "AffineExponent":
        return AffineExponent(self.p + other.p, self.q + other.q)

    def __sub__(self, other: "AffineExponent") -> "AffineExponent":
        return AffineExponent(self.p - other.p, self.q - other.q)

    def __str__(self) -> str:
        if self.q == 0:
            return str(self.p)
        gpart = "g" if self.q == 1 else f"{self.q}g"
        return gpart if self.p == 0 else f"{self.p}+{gpart}"


@dataclass(frozen=True)
class Term:
    """One summand: coeff * z**exponent * catalog factor `factor`."""

    coeff: float
    exponent: AffineExponent
    factor: int


@dataclass(frozen=True)
class Factor:
    """A separable factor function of the non-evolution variables."""

    name: str
    variables: tuple[str, ...]
    func: Callable[..., float]
    description: str = ""

    def evaluate(self, coords: Mapping[str, float]) -> float:
        try:
            args = [coords[v] for v in self.variables]
        except KeyError as exc:
            raise MissingCoordinateError(
                f"factor {self.name!r} needs coordinate {exc.args[0]!r}"
            ) from None
        return self.func(*args)


class FactorCatalog:
    """Ordered, immutable basis of separable factor functions."""

    def __init__(self, factors: Iterable[Factor]):
        self.factors = tuple(factors)
        names = [f.name for f in self.factors]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate factor names in catalog: {names}")
        self._index = {name: j for j, name in enumerate(names)}

    def __len__(self) -> int:
        return len(self.factors)

    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.factors)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown factor id {name!r}; known: {sorted(self._index)}") from None

    def evaluate(self, j: int, coords: Mapping[str, float]) -> float:
        return self.factors[j].evaluate(coords)

    def compatible(self, other: "FactorCatalog") -> bool:
        return self is other or self.names() == other.names()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FactorCatalog) and self.names() == other.names()

    def __hash__(self) -> int:
        return hash(self.names())

    def __repr__(self) -> str:
        return f"FactorCatalog({list(self.names())})"


def _canonical(entries: Mapping[tuple[int, int, int], float]) -> tuple[Term, ...]:
    # Merge happened in the dict; here: drop dust, then sort by (p, q, factor).
    if not entries:
        return ()
    max_abs = max(abs(c) for c in entries.values())
    if max_abs == 0.0:
        return ()
    cutoff = PRUNE_REL * max_abs
    kept = {k: c for k, c in entries.items() if abs(c) >= cutoff}
    return tuple(
        Term(kept[k], AffineExponent(k[0], k[1]), k[2]) for k in sorted(kept)
    )


@dataclass(frozen=True)
class FracSeries:
    """Canonical finite fractional power series over a factor catalog.

    The term tuple holds at most one term per (exponent, factor) pair, sorted
    by (p, q, factor); the empty tuple is the zero series.  Use `build` (or
    the arithmetic operations) rather than the raw constructor so that the
    canonical form is maintained.
    """

    catalog: FactorCatalog
    terms: tuple[Term, ...] = ()

    @staticmethod
    def zero(catalog: FactorCatalog) -> "FracSeries":
        return FracSeries(catalog, ())

    @classmethod
    def build(
        cls,
        catalog: FactorCatalog,
        entries: Iterable[tuple[float, int, int, int]],
    ) -> "FracSeries":
        """Create a canonical series from (coeff, p, q, factor) tuples."""
        acc: dict[tuple[int, int, int], float] = {}
        size = len(catalog)
        for coeff, p, q, factor in entries:
            if not math.isfinite(coeff):
                raise ValueError(f"non-finite coefficient {coeff!r}")
            if not 0 <= factor < size:
                raise ValueError(f"factor index {factor} out of range for {catalog!r}")
            key = (p, q, factor)
            acc[key] = acc.get(key, 0.0) + coeff
        return cls(catalog, _canonical(acc))

    # ------------------------------------------------------------------
    # basic algebra

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coeff_map(self) -> dict[tuple[int, int, int], float]:
        return {(t.exponent.p, t.exponent.q, t.factor): t.coeff for t in self.terms}

    def add(self, other: "FracSeries") -> "FracSeries":
        if not self.catalog.compatible(other.catalog):
            raise CatalogMismatchError(
                f"cannot add series over {self.catalog!r} and {other.catalog!r}"
            )
        acc = self.coeff_map()
        for key, coeff in other.coeff_map().items():
            acc[key] = acc.get(key, 0.0) + coeff
        return FracSeries(self.catalog, _canonical(acc))

    def __add__(self, other: "FracSeries") -> "FracSeries":
        return self.add(other)

    def __sub__(self, other: "FracSeries") -> "FracSeries":
        return self.add(other.scale(-1.0))

    def scale(self, c: float) -> "FracSeries":
        if not math.isfinite(c):
            raise ValueError(f"non-finite scale factor {c!r}")
        if c == 0.0:
            return FracSeries.zero(self.catalog)
        return FracSeries(
            self.catalog, _canonical({k: v * c for k, v in self.coeff_map().items()})
        )

    # ------------------------------------------------------------------
    # fractional calculus, term by term

    @staticmethod
    def _order_parts(order, gamma_num: float) -> tuple[AffineExponent, float]:
        if isinstance(order, int):
            order = AffineExponent(order, 0)
        nu = order.value(gamma_num)
        if not nu > 0.0:
            raise ValueError(f"derivative/integral order must be positive, got {nu}")
        return order, nu

    def caputo(self, order, gamma_num: float) -> "FracSeries":
        """Caputo derivative of the given (affine) order.

        Term rule, with n the ceiling of the numeric order (n = order for
        positive integer orders):

            D^nu z**beta = Gamma(beta+1)/Gamma(beta-nu+1) * z**(beta-nu)   beta > n-1
            D^nu z**beta = 0                                              beta <= n-1
        """
        order, nu = self._order_parts(order, gamma_num)
        n = round(nu) if abs(nu - round(nu)) <= EXP_TOL and round(nu) >= 1 else math.ceil(nu)
        acc: dict[tuple[int, int, int], float] = {}
        for t in self.terms:
            beta = t.exponent.value(gamma_num)
            if beta < -EXP_TOL:
                raise ValueError(f"negative exponent {beta} in Caputo input term {t}")
            if beta <= n - 1 + EXP_TOL:
                continue
            if beta - nu < -EXP_TOL:
                raise ExponentUnderflowError(
                    f"order {nu} drives exponent {beta} below zero"
                )
            # beta > n-1 >= nu-1 keeps the denominator argument positive.
            assert beta - nu + 1.0 > 0.0
            new = t.exponent - order
            key = (new.p, new.q, t.factor)
            acc[key] = acc.get(key, 0.0) + t.coeff * gamma_ratio(beta + 1.0, beta - nu + 1.0)
        return FracSeries(self.catalog, _canonical(acc))

    def rl_integral(self, order, gamma_num: float) -> "FracSeries":
        """Riemann-Liouville integral of the given (affine) order.

        Term rule:  J^nu z**beta = Gamma(beta+1)/Gamma(beta+nu+1) * z**(beta+nu).
        """
        order, nu = self._order_parts(order, gamma_num)
        acc: dict[tuple[int, int, int], float] = {}
        for t in self.terms:
            beta = t.exponent.value(gamma_num)
            if beta < -EXP_TOL:
                raise ValueError(f"negative exponent {beta} in integral input term {t}")
            new = t.exponent + order
            key = (new.p, new.q, t.factor)
            acc[key] = acc.get(key, 0.0) + t.coeff * gamma_ratio(beta + 1.0, beta + nu + 1.0)
        return FracSeries(self.catalog, _canonical(acc))

    # ------------------------------------------------------------------
    # factor-basis action and evaluation

    def apply_matrix(self, matrix: Sequence[Sequence[float]]) -> "FracSeries":
        """Replace each term's factor by its image under the basis matrix.

        `matrix[i][j]` is the weight of output factor i in the image of input
        factor j, so a term with factor j spawns terms with factors i.
        """
        size = len(self.catalog)
        if len(matrix) != size or any(len(row) != size for row in matrix):
            raise ValueError(
                f"matrix must be {size}x{size} to act on {self.catalog!r}"
            )
        acc: dict[tuple[int, int, int], float] = {}
        for t in self.terms:
            for i in range(size):
                w = matrix[i][t.factor]
                if w != 0.0:
                    key = (t.exponent.p, t.exponent.q, i)
                    acc[key] = acc.get(key, 0.0) + w * t.coeff
        return FracSeries(self.catalog, _canonical(acc))

    def evaluate(self, z: float, gamma_num: float, coords: Mapping[str, float]) -> float:
        """Numeric value at evolution value z; the convention 0**0 = 1 applies."""
        if z < 0.0:
            raise ValueError(f"evolution value must be >= 0, got {z}")
        total = 0.0
        for t in self.terms:
            e = t.exponent.value(gamma_num)
            if e < -EXP_TOL:
                raise ValueError(f"negative exponent {e} at evaluation of term {t}")
            e = max(e, 0.0)
            if z == 0.0:
                power = 1.0 if e <= EXP_TOL else 0.0
            else:
                power = z**e
            total += t.coeff * power * self.catalog.evaluate(t.factor, coords)
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = [
            f"{t.coeff:g}*z^({t.exponent})*[{self.catalog.factors[t.factor].name}]"
            for t in self.terms
        ]
        return " + ".join(bits)
