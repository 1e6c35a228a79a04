from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from sympy import divisor_sigma
from sympy.functions.combinatorial.numbers import mobius as sympy_mobius

from grseries.errors import DomainError
from grseries.numtheory import divisors, factorize, mobius, mobius_divisor_sum, sigma


@pytest.mark.parametrize("m, expected", [(1, [1]), (12, [1, 2, 3, 4, 6, 12]), (7, [1, 7])])
def test_divisors_examples(m, expected):
    assert divisors(m) == expected


@pytest.mark.parametrize("m", range(1, 400))
def test_divisors_match_trial_division(m):
    assert divisors(m) == [d for d in range(1, m + 1) if m % d == 0]


@pytest.mark.parametrize("bad", [0, -3])
def test_nonpositive_arguments_rejected(bad):
    for fn in (divisors, mobius, mobius_divisor_sum):
        with pytest.raises(DomainError):
            fn(bad)


@pytest.mark.parametrize("m, expected", [(1, 1), (6, 1), (4, 0), (2, -1), (30, -1)])
def test_mobius_examples(m, expected):
    assert mobius(m) == expected


def test_mobius_against_sympy():
    for m in range(1, 2000):
        assert mobius(m) == int(sympy_mobius(m)), m


@pytest.mark.parametrize("x, expected", [(1, 1), (4, 7), (Fraction(3, 2), 0), (0, 0),
                                         (-4, 0), (Fraction(8, 2), 7)])
def test_sigma_examples(x, expected):
    assert sigma(x) == expected


def test_sigma_against_sympy():
    for m in range(1, 1000):
        assert sigma(m) == int(divisor_sigma(m)), m


def test_mobius_divisor_sum_is_indicator_of_one():
    for n in range(1, 10_001):
        assert mobius_divisor_sum(n) == (1 if n == 1 else 0), n


def test_sigma_multiplicative_on_coprime_pairs():
    from math import gcd
    for m in range(1, 301):
        for n in range(1, 301):
            if gcd(m, n) == 1:
                assert sigma(m * n) == sigma(m) * sigma(n)


@given(st.integers(min_value=1, max_value=10**6))
def test_factorize_reconstructs(n):
    product = 1
    for p, e in factorize(n).items():
        assert all(p % q for q in range(2, int(p ** 0.5) + 1))
        product *= p ** e
    assert product == n
