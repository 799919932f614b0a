import math
import random

import pytest
from scipy.integrate import quad

from conftest import assert_series_close, assert_series_terms
from qhatm.series import (
    AffineExponent,
    CatalogMismatchError,
    ExponentUnderflowError,
    Factor,
    FactorCatalog,
    FracSeries,
    MissingCoordinateError,
)

CAT = FactorCatalog(
    [
        Factor("one", (), lambda: 1.0, "constant"),
        Factor("exp_x", ("x",), math.exp, "e**x"),
    ]
)

OTHER_CAT = FactorCatalog([Factor("t", ("t",), lambda t: t)])

A01 = AffineExponent(0, 1)  # the bare fractional order g


def s(*entries) -> FracSeries:
    """Series from (coeff, p, q[, factor]) tuples over CAT."""
    return FracSeries.build(CAT, [(e + (0,))[:4] for e in entries])


def random_series(rng, n_terms=6) -> FracSeries:
    entries = [
        (rng.uniform(-3, 3), rng.randrange(0, 4), rng.randrange(0, 3), rng.randrange(0, 2))
        for _ in range(n_terms)
    ]
    return FracSeries.build(CAT, entries)


# ----------------------------------------------------------------------
# construction and canonical form

def test_build_merges_like_terms():
    assert_series_terms(s((2.0, 1, 0), (3.0, 1, 0)), {(1, 0, 0): 5.0})


def test_zero_series_is_empty():
    assert FracSeries.zero(CAT).is_zero
    assert s((1.0, 0, 0), (-1.0, 0, 0)).is_zero


def test_terms_sorted_by_exponent_then_factor():
    series = FracSeries.build(CAT, [(1.0, 2, 0, 1), (1.0, 0, 1, 0), (1.0, 0, 0, 0)])
    keys = [(t.exponent.p, t.exponent.q, t.factor) for t in series.terms]
    assert keys == sorted(keys)


def test_pruning_drops_relative_dust():
    series = s((1.0, 0, 0), (1e-15, 1, 0))
    assert_series_terms(series, {(0, 0, 0): 1.0})
    # a genuinely small series is untouched
    tiny = s((1e-15, 1, 0))
    assert_series_terms(tiny, {(1, 0, 0): 1e-15}, rtol=0)


def test_canonicalization_idempotent():
    rng = random.Random(7)
    for _ in range(20):
        series = random_series(rng)
        rebuilt = FracSeries.build(
            CAT, [(t.coeff, t.exponent.p, t.exponent.q, t.factor) for t in series.terms]
        )
        assert rebuilt.terms == series.terms


def test_non_finite_coefficient_rejected():
    with pytest.raises(ValueError):
        s((float("nan"), 0, 0))
    with pytest.raises(ValueError):
        s((float("inf"), 1, 0))


def test_factor_out_of_range_rejected():
    with pytest.raises(ValueError):
        FracSeries.build(CAT, [(1.0, 0, 0, 5)])


# ----------------------------------------------------------------------
# add / scale

def test_add_identity_and_inverse():
    rng = random.Random(11)
    series = random_series(rng)
    zero = FracSeries.zero(CAT)
    assert series.add(zero).terms == series.terms
    assert series.add(series.scale(-1.0)).is_zero


def test_add_requires_same_catalog():
    with pytest.raises(CatalogMismatchError):
        s((1.0, 0, 0)).add(FracSeries.build(OTHER_CAT, [(1.0, 0, 0, 0)]))


def test_scale_trivials():
    series = s((2.0, 0, 1))
    assert series.scale(1.0).terms == series.terms
    assert series.scale(0.0).is_zero
    assert_series_terms(series.scale(-0.5), {(0, 1, 0): -1.0})


def test_scale_rejects_non_finite():
    with pytest.raises(ValueError):
        s((1.0, 0, 0)).scale(float("inf"))


# ----------------------------------------------------------------------
# Caputo derivative

def test_caputo_constant_is_zero_for_fractional_order():
    assert s((1.0, 0, 0)).caputo(A01, 0.5).is_zero


def test_caputo_integer_order_is_ordinary_derivative():
    assert_series_terms(s((1.0, 2, 0)).caputo(1, 1.0), {(1, 0, 0): 2.0}, rtol=1e-12)


def test_caputo_half_order_of_t():
    # D^(1/2) t = Gamma(2)/Gamma(3/2) t^(1/2) = (2/sqrt(pi)) t^(1/2)
    got = s((1.0, 1, 0)).caputo(A01, 0.5)
    assert_series_terms(got, {(1, -1, 0): 2.0 / math.sqrt(math.pi)}, rtol=1e-12)
    assert got.terms[0].exponent.value(0.5) == pytest.approx(0.5)
    assert 2.0 / math.sqrt(math.pi) == pytest.approx(1.1283791670955126, rel=1e-15)


def test_caputo_drops_low_powers_below_ceiling():
    # order in (1, 2]: both the constant and the linear term vanish
    series = s((3.0, 0, 0), (5.0, 1, 0))
    assert series.caputo(AffineExponent(0, 2), 0.8).is_zero


def test_caputo_order_must_be_positive():
    with pytest.raises(ValueError):
        s((1.0, 1, 0)).caputo(A01, -0.5)


def test_caputo_rejects_negative_input_exponent():
    series = FracSeries.build(CAT, [(1.0, -1, 0, 0)])
    with pytest.raises(ValueError):
        series.caputo(1, 1.0)


def test_caputo_exponent_underflow():
    # beta = 0.4 with order 0.6 enters the formula branch and lands below zero
    series = s((1.0, 0, 1))
    with pytest.raises(ExponentUnderflowError):
        series.caputo(AffineExponent(1, -1), 0.4)


def test_caputo_gradient_check_at_integer_order():
    # Central finite difference of the evaluated series vs the term rule.
    rng = random.Random(23)
    for _ in range(10):
        series = FracSeries.build(
            CAT,
            [
                (rng.uniform(-2, 2), rng.randrange(0, 5), rng.randrange(0, 3), 0)
                for _ in range(5)
            ],
        )
        deriv = series.caputo(1, 1.0)
        for z in (0.1, 0.35, 0.6, 1.0):
            step = 1e-5
            fd = (
                series.evaluate(z + step, 1.0, {}) - series.evaluate(z - step, 1.0, {})
            ) / (2 * step)
            assert abs(deriv.evaluate(z, 1.0, {}) - fd) <= 1e-6


# ----------------------------------------------------------------------
# Riemann-Liouville integral

def test_integral_of_t_is_half_t_squared():
    assert_series_terms(s((1.0, 1, 0)).rl_integral(1, 1.0), {(2, 0, 0): 0.5}, rtol=1e-12)


def test_integral_semigroup_half_plus_half_equals_one():
    # J^(1/2) J^(1/2) 1 = t, compared against the direct first integral.
    once = s((1.0, 0, 0)).rl_integral(A01, 0.5)
    twice = once.rl_integral(A01, 0.5)
    direct = s((1.0, 0, 0)).rl_integral(1, 0.5)
    (term,) = twice.terms
    assert term.exponent.value(0.5) == pytest.approx(1.0)
    assert term.coeff == pytest.approx(direct.terms[0].coeff, rel=1e-12)
    for z in (0.0, 0.3, 1.0):
        assert twice.evaluate(z, 0.5, {}) == pytest.approx(
            direct.evaluate(z, 0.5, {}), abs=1e-14
        )


def test_integral_semigroup_on_lattice():
    rng = random.Random(31)
    orders = [AffineExponent(1, 0), AffineExponent(0, 1), AffineExponent(1, 1)]
    for g in (0.3, 0.7, 1.0):
        for a in orders:
            for b in orders:
                series = random_series(rng)
                chained = series.rl_integral(a, g).rl_integral(b, g)
                joint = series.rl_integral(a + b, g)
                assert_series_close(chained, joint, rtol=1e-12)


def test_integral_of_constant_against_quadrature():
    # J^a 1 (t) = 1/Gamma(a) * integral_0^t (t-tau)^(a-1) dtau, a = 0.7
    g = 0.7
    result = s((1.0, 0, 0)).rl_integral(A01, g)
    assert_series_terms(result, {(0, 1, 0): 1.0 / math.gamma(g + 1.0)}, rtol=1e-12)
    for t in (0.4, 0.8, 1.3):
        oracle, err = quad(lambda u: u ** (g - 1.0) / math.gamma(g), 0.0, t)
        assert err < 1e-10
        assert result.evaluate(t, g, {}) == pytest.approx(oracle, rel=1e-9)


def test_caputo_inverts_integral():
    # D^a (J^a S) = S exactly on the lattice, for orders across (0, 2].
    rng = random.Random(47)
    cases = [
        (AffineExponent(0, 1), 0.3),
        (AffineExponent(0, 1), 1.0),
        (AffineExponent(0, 2), 0.5),
        (AffineExponent(0, 2), 1.0),
        (AffineExponent(1, 1), 0.999),
    ]
    for order, g in cases:
        for _ in range(5):
            series = random_series(rng)
            back = series.rl_integral(order, g).caputo(order, g)
            assert set(back.coeff_map()) == set(series.coeff_map())
            assert_series_close(back, series, rtol=1e-12)


# ----------------------------------------------------------------------
# matrix action on the factor basis

def test_apply_matrix_identity_and_zero():
    rng = random.Random(3)
    series = random_series(rng)
    identity = ((1.0, 0.0), (0.0, 1.0))
    assert series.apply_matrix(identity).terms == series.terms
    assert series.apply_matrix(((0.0, 0.0), (0.0, 0.0))).is_zero


def test_apply_matrix_temporal_operator_example():
    # Basis {1, t}; the operator sends t to -(1 + t).
    cat = FactorCatalog(
        [Factor("one", (), lambda: 1.0), Factor("t", ("t",), lambda t: t)]
    )
    series = FracSeries.build(cat, [(1.0, 0, 0, 1)])
    matrix = ((-1.0, -1.0), (0.0, -1.0))
    assert_series_terms(series.apply_matrix(matrix), {(0, 0, 0): -1.0, (0, 0, 1): -1.0})


def test_apply_matrix_dimension_mismatch():
    with pytest.raises(ValueError):
        s((1.0, 0, 0)).apply_matrix(((1.0,),))


# ----------------------------------------------------------------------
# evaluation

def test_evaluate_zero_series():
    assert FracSeries.zero(CAT).evaluate(0.7, 0.5, {}) == 0.0


def test_evaluate_zero_to_the_zero_is_one():
    series = FracSeries.build(CAT, [(1.0, 0, 0, 1)])
    assert series.evaluate(0.0, 1.0, {"x": 0.0}) == 1.0


def test_evaluate_positive_exponent_vanishes_at_origin():
    assert s((3.0, 0, 1)).evaluate(0.0, 0.5, {}) == 0.0


def test_evaluate_linear_in_the_series():
    rng = random.Random(91)
    for _ in range(10):
        a, b = random_series(rng), random_series(rng)
        c = rng.uniform(-2, 2)
        coords = {"x": rng.uniform(-1, 1)}
        z, g = rng.uniform(0.01, 2.0), rng.uniform(0.1, 1.0)
        lhs = a.add(b).evaluate(z, g, coords)
        rhs = a.evaluate(z, g, coords) + b.evaluate(z, g, coords)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
        assert a.scale(c).evaluate(z, g, coords) == pytest.approx(
            c * a.evaluate(z, g, coords), rel=1e-12, abs=1e-12
        )


def test_evaluate_missing_coordinate():
    series = FracSeries.build(CAT, [(1.0, 0, 0, 1)])
    with pytest.raises(MissingCoordinateError):
        series.evaluate(0.5, 1.0, {})


def test_evaluate_rejects_negative_evolution_value():
    with pytest.raises(ValueError):
        s((1.0, 1, 0)).evaluate(-0.1, 1.0, {})
