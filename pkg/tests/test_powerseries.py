import os
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from grseries import powerseries as ps
from grseries.errors import DomainError
from grseries.homology import ManifoldModel
from grseries.powerseries import Monomial, Series, USeries, plug_monomial, product, subst_scale

from series_helpers import PLANE, SORDER, TORDER, fractions, oracle_exp, series

LINE = ManifoldModel.from_lists([[2]], [0], [1])
A = (1,)


def line(terms, torder=3, sorder=3):
    return Series(LINE, torder, sorder, terms)


# -- univariate -----------------------------------------------------------


def test_useries_pow_minus_one():
    one_plus_t = USeries([1, 1], 3)
    assert one_plus_t.pow(-1) == USeries([1, -1, 1, -1])
    assert USeries([1, -1], 6).pow(-1) == USeries.geometric(6)


def test_useries_subst_scale():
    assert subst_scale(USeries([1, 1], 4), 2) == USeries([1, 0, 1, 0, 0])
    f = USeries.geometric(9)
    assert subst_scale(f, 1) == f
    assert subst_scale(f, 3) == USeries([1, 0, 0, 1, 0, 0, 1, 0, 0, 1])


def test_useries_exp_log_against_sympy():
    t = sympy.symbols("t")
    n = 10
    got = USeries([0, 1, Fraction(-1, 2), 3], n).exp()
    assert list(got) == oracle_exp(t - t**2 / 2 + 3 * t**3, n)
    assert got.log() == USeries([0, 1, Fraction(-1, 2), 3], n)


def test_useries_rational_pow_needs_unit_constant():
    with pytest.raises(DomainError):
        USeries([2, 1], 3).pow(Fraction(1, 2))
    assert USeries([4, 1], 3).pow(2) == USeries([16, 8, 1, 0])


def test_useries_mixed_orders_take_the_smaller():
    assert (USeries.geometric(5) * USeries.geometric(2)).torder == 2


def test_floats_rejected():
    with pytest.raises(DomainError):
        USeries([1.0, 0.5], 2)


# -- multivariate: examples -------------------------------------------------


def test_difference_of_squares():
    x = line({(A, 0): 1, ((0,), 0): 1})
    y = line({(A, 0): -1, ((0,), 0): 1})
    assert ps.mul(x, y) == line({((0,), 0): 1, ((2,), 0): -1})


def test_identity_and_inverse():
    x = line({(A, 1): Fraction(2, 3), ((2,), 0): 5, ((0,), 0): 1})
    unit = Series.unit(LINE, 3, 3)
    assert ps.mul(x, unit) == x
    assert not ps.add(x, -x)


def test_exp_examples():
    assert ps.exp(Series.zero(LINE, 3, 3)) == Series.unit(LINE, 3, 3)
    e = ps.exp(line({(A, 0): 1}))
    assert e == line({((0,), 0): 1, (A, 0): 1, ((2,), 0): Fraction(1, 2), ((3,), 0): Fraction(1, 6)})
    x = line({(A, 1): 5})
    assert ps.log(ps.exp(x)) == x


def test_exp_coefficient_examples():
    x = ps.exp(line({(A, 1): 5, (A, 0): 3}, 4, 4))
    assert ps.coeff(x, (A, 1)) == 5
    assert ps.coeff(ps.exp(line({(A, 1): 5}, 4, 4)), ((2,), 2)) == Fraction(25, 2)
    unit = Series.unit(LINE, 0, 0)
    assert ps.coeff(unit, ((0,), 0)) == 1


def test_coeff_out_of_bounds_raises():
    x = line({(A, 0): 1}, 2, 1)
    with pytest.raises(DomainError):
        x.coeff(((3,), 0))
    with pytest.raises(DomainError):
        x.coeff((A, 2))


def test_pow_examples():
    x = line({((0,), 0): 1, (A, 0): 1})
    assert ps.pow(x, -1) == line({((0,), 0): 1, (A, 0): -1, ((2,), 0): 1, ((3,), 0): -1})
    y = line({((0,), 0): 1, (A, 0): Fraction(1, 3), (A, 1): 2})
    assert ps.pow(y, Fraction(3, 2)) * ps.pow(y, Fraction(3, 2)) == ps.pow(y, 3)
    with pytest.raises(DomainError):
        ps.pow(line({((0,), 0): 2, (A, 0): 1}), Fraction(1, 2))
    with pytest.raises(DomainError):
        ps.pow(line({((0,), 0): 2, (A, 0): 1}), -1)


def test_log_and_exp_preconditions():
    with pytest.raises(DomainError):
        ps.exp(line({((0,), 0): 1}))
    with pytest.raises(DomainError):
        ps.log(line({((0,), 0): 2}))


def test_bound_or_model_mismatch():
    with pytest.raises(DomainError):
        line({}, 3, 3) + line({}, 3, 2)
    with pytest.raises(DomainError):
        line({}, 3, 3) * Series(PLANE, 3, 3)


def test_plug_monomial_examples():
    got = plug_monomial(USeries.exponential(3), (A, 1), 1, LINE, 3, 3)
    assert got == ps.exp(line({(A, 1): 1}))
    assert plug_monomial(USeries([1, 1], 3), (A, 0), 1, LINE, 3, 3) == line({((0,), 0): 1, (A, 0): 1})
    got = plug_monomial(USeries.geometric(3), (A, 0), 1, LINE, 3, 3)
    assert got == line({((n,), 0): 1 for n in range(4)})
    with pytest.raises(DomainError):
        plug_monomial(USeries.geometric(3), ((0,), 0), 1, LINE, 3, 3)
    with pytest.raises(DomainError):
        plug_monomial(USeries.geometric(2), (A, 0), 1, LINE, 3, 3)


def test_text_format():
    x = line({((0,), 0): 1, (A, 1): Fraction(-3, 2), ((2,), 0): 4})
    assert x.to_text() == "1\n-3/2 * t[1] * s^1\n4 * t[2]"
    assert Series.zero(LINE, 3, 3).to_text() == "0"
    assert Series.from_text(x.to_text(), LINE, 3, 3) == x


def test_product_parallel_matches_sequential(monkeypatch):
    import random
    from series_helpers import random_series
    rng = random.Random(7)
    factors = [random_series(rng, constant=1) for _ in range(9)]
    monkeypatch.setenv("GRSERIES_NO_PARALLEL", "1")
    sequential = product(factors)
    monkeypatch.delenv("GRSERIES_NO_PARALLEL")
    parallel = product(factors)
    assert sequential == parallel
    folded = factors[0]
    for f in factors[1:]:
        folded = folded * f
    assert folded == parallel
    assert product([], PLANE, TORDER, SORDER) == Series.unit(PLANE, TORDER, SORDER)


# -- multivariate: properties ---------------------------------------------


@given(series(), series(), series())
def test_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z


@given(series(constant=0))
def test_exp_log_round_trip(x):
    assert ps.log(ps.exp(x)) == x
    assert ps.exp(ps.log(ps.exp(x))) == ps.exp(x)


@given(series(constant=0), series(constant=0))
def test_exp_turns_sums_into_products(x, y):
    assert ps.exp(x + y) == ps.exp(x) * ps.exp(y)


@settings(max_examples=50)
@given(series(constant=1), fractions, fractions)
def test_pow_additivity(x, a, b):
    assert ps.pow(x, a + b) == ps.pow(x, a) * ps.pow(x, b)


@given(series(constant=1), st.integers(0, 4))
def test_integer_pow_is_repeated_product(x, n):
    expected = Series.unit(PLANE, TORDER, SORDER)
    for _ in range(n):
        expected = expected * x
    assert ps.pow(x, n) == expected


@given(fractions, fractions)
def test_plug_monomial_is_multiplicative(a, b):
    f = USeries([1, a, b, 1, -a], 4)
    g = USeries([1, b, 0, a, 2], 4)
    m = ((1, 0), 1)
    lhs = plug_monomial(f * g, m, Fraction(2, 3), PLANE, TORDER, SORDER)
    rhs = (plug_monomial(f, m, Fraction(2, 3), PLANE, TORDER, SORDER)
           * plug_monomial(g, m, Fraction(2, 3), PLANE, TORDER, SORDER))
    assert lhs == rhs


@given(series())
def test_text_round_trip(x):
    assert Series.from_text(x.to_text(), PLANE, TORDER, SORDER) == x
