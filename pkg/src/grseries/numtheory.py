"""Small exact number theory: divisors, Moebius function, divisor sums.

Inputs are expected to be modest (up to ~10**4), so factorisation is by
trial division throughout.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from .errors import DomainError


def _check_positive(m: int) -> None:
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise DomainError(f"expected a positive integer, got {m!r}")


@lru_cache(maxsize=4096)
def _divisors(m: int) -> tuple[int, ...]:
    small, large = [], []
    d = 1
    while d * d <= m:
        if m % d == 0:
            small.append(d)
            if d * d != m:
                large.append(m // d)
        d += 1
    return tuple(small + large[::-1])


def divisors(m: int) -> list[int]:
    """Positive divisors of ``m`` in ascending order."""
    _check_positive(m)
    return list(_divisors(m))


def factorize(m: int) -> dict[int, int]:
    """Prime factorisation ``{p: e}`` of a positive integer."""
    _check_positive(m)
    out: dict[int, int] = {}
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


@lru_cache(maxsize=4096)
def mobius(m: int) -> int:
    """Moebius function: (-1)**k on squarefree m with k prime factors, else 0."""
    _check_positive(m)
    exps = factorize(m)
    if any(e > 1 for e in exps.values()):
        return 0
    return -1 if len(exps) % 2 else 1


def sigma(x) -> int:
    """Divisor sum of ``x`` when ``x`` is a positive integer, and 0 otherwise.

    Rationals are accepted so that callers can write ``sigma(Fraction(m, 4))``
    without first testing divisibility.
    """
    if isinstance(x, bool):
        return 0
    if isinstance(x, Rational):
        x = Fraction(x)
        if x.denominator != 1 or x.numerator < 1:
            return 0
        return sum(_divisors(x.numerator))
    return 0


def mobius_divisor_sum(n: int) -> int:
    """Literal sum of mobius(m) over the divisors m of n."""
    return sum(mobius(m) for m in divisors(n))
