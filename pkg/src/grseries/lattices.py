"""Index-m sublattices of Z + tau Z and the multiple-cover series of a torus.

A sublattice is named by its Hermite normal form triple ``(a, b, p)``,
meaning the lattice spanned by ``a`` and ``b*tau + p`` with ``ab = m`` and
``0 <= p < a``.  Vectors are written as ``(x, y)`` for ``x + y*tau``.

The three index-2 lattices are

    L1 = Z + 2tau Z,   L2 = 2Z + tau Z,   L3 = 2Z + (1 + tau) Z.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import DomainError, InvariantError
from .homology import HomologyClass
from .numtheory import divisors, sigma
from .powerseries import USeries

INDEX_TWO_BASES: dict[int, tuple[tuple[int, int], tuple[int, int]]] = {
    1: ((1, 0), (0, 2)),
    2: ((2, 0), (0, 1)),
    3: ((2, 0), (1, 1)),
}


class SublatticeHNF(NamedTuple):
    a: int
    b: int
    p: int

    @property
    def index(self) -> int:
        return self.a * self.b

    def generators(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.a, 0), (self.p, self.b)


@dataclass(frozen=True)
class TorusData:
    """An embedded torus: its class, the sign of D_0 and the signs of D_1..D_3.

    ``type`` is the number of negative D_i.  Built from a type alone, the
    first ``type`` of the D_i are taken negative.
    """

    cls: HomologyClass
    sign: int
    type: int
    signs: tuple[int, int, int]

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise DomainError(f"torus sign must be +-1, got {self.sign}")
        if self.type not in (0, 1, 2, 3):
            raise DomainError(f"torus type must be in 0..3, got {self.type}")
        if len(self.signs) != 3 or any(s not in (1, -1) for s in self.signs):
            raise DomainError(f"signs of D_1..D_3 must be three entries +-1, got {self.signs}")
        if sum(1 for s in self.signs if s < 0) != self.type:
            raise DomainError(f"signs {self.signs} inconsistent with type {self.type}")

    @classmethod
    def of_type(cls, A: Sequence[int], sign: int, type: int) -> "TorusData":
        if type not in (0, 1, 2, 3):
            raise DomainError(f"torus type must be in 0..3, got {type}")
        signs = tuple(-1 if i < type else 1 for i in range(3))
        return cls(tuple(A), sign, type, signs)

    @classmethod
    def with_signs(cls, A: Sequence[int], sign: int, signs: Sequence[int]) -> "TorusData":
        signs = tuple(signs)
        return cls(tuple(A), sign, sum(1 for s in signs if s < 0), signs)


class LatticeCensus(NamedTuple):
    m: int
    countA: int
    countB: int
    countC: int


def enumerate_sublattices(m: int) -> list[SublatticeHNF]:
    """All HNF representatives of index ``m``, ordered by a then p."""
    if not isinstance(m, int) or m < 1:
        raise DomainError(f"index must be a positive integer, got {m!r}")
    return [SublatticeHNF(a, m // a, p) for a in divisors(m) for p in range(a)]


def in_lattice(v: tuple[int, int], basis: tuple[tuple[int, int], tuple[int, int]]) -> bool:
    """Integer membership of v in the lattice spanned by ``basis`` (Cramer's rule)."""
    (u1, u2), (w1, w2) = basis
    det = u1 * w2 - w1 * u2
    if det == 0:
        raise DomainError("degenerate basis")
    x_num = v[0] * w2 - w1 * v[1]
    y_num = u1 * v[1] - v[0] * u2
    return x_num % det == 0 and y_num % det == 0


def containments_by_membership(lat: SublatticeHNF) -> frozenset[int]:
    """Containments decided by testing both generators in each index-2 lattice."""
    gens = lat.generators()
    return frozenset(i for i, basis in INDEX_TWO_BASES.items()
                     if all(in_lattice(g, basis) for g in gens))


def containments(lat: SublatticeHNF) -> frozenset[int]:
    """{i : lat is contained in L_i}."""
    a, b, p = lat
    out = set()
    if b % 2 == 0:
        out.add(1)
    if a % 2 == 0 and p % 2 == 0:
        out.add(2)
    if a % 2 == 0 and (b - p) % 2 == 0:
        out.add(3)
    return frozenset(out)


def census(m: int) -> LatticeCensus:
    """Brute-force sizes of the containment classes for index m.

    Raises InvariantError if the three single-containment classes differ in
    size, if some lattice sits in exactly two L_i, or if the divisor-sum
    counts do not hold.
    """
    buckets: dict[frozenset[int], int] = {}
    for lat in enumerate_sublattices(m):
        key = containments(lat)
        buckets[key] = buckets.get(key, 0) + 1
    for key in buckets:
        if len(key) == 2:
            raise InvariantError(f"index {m}: lattice contained in exactly {sorted(key)}")
    singles = [buckets.get(frozenset({i}), 0) for i in (1, 2, 3)]
    if len(set(singles)) != 1:
        raise InvariantError(f"index {m}: single-containment counts differ {singles}")
    A = buckets.get(frozenset(), 0)
    B = singles[0]
    C = buckets.get(frozenset({1, 2, 3}), 0)
    expected = (sigma(m), sigma(Fraction(m, 2)), sigma(Fraction(m, 4)))
    if (A + 3 * B + C, B + C, C) != expected:
        raise InvariantError(f"index {m}: counts {(A, B, C)} violate divisor sums {expected}")
    return LatticeCensus(m, A, B, C)


def sgn_lambda(lat: SublatticeHNF, torus: TorusData) -> int:
    """Sign of the cover: sign of D_0 times the signs of D_i over containing L_i."""
    s = torus.sign
    for i in containments(lat):
        s *= torus.signs[i - 1]
    return s


def signed_sum_bruteforce(m: int, torus: TorusData) -> int:
    return sum(sgn_lambda(lat, torus) for lat in enumerate_sublattices(m))


def signed_sum_closed(m: int, torus: TorusData) -> int:
    """sgn D0 * (A + B * sum sgn D_i + C * prod sgn D_i) with A, B, C from divisor sums."""
    C = sigma(Fraction(m, 4))
    B = sigma(Fraction(m, 2)) - C
    A = sigma(m) - 3 * B - C
    s_sum = sum(torus.signs)
    s_prod = torus.signs[0] * torus.signs[1] * torus.signs[2]
    return torus.sign * (A + B * s_sum + C * s_prod)


def signed_sum(m: int, torus: TorusData) -> int:
    """Sum of sgn over index-m sublattices, by enumeration and by closed form."""
    brute = signed_sum_bruteforce(m, torus)
    closed = signed_sum_closed(m, torus)
    if brute != closed:
        raise InvariantError(f"index {m}: enumerated signed sum {brute} != closed form {closed}")
    return brute


def s1s2(torus: TorusData) -> tuple[int, int]:
    s_sum = sum(torus.signs)
    s_prod = torus.signs[0] * torus.signs[1] * torus.signs[2]
    return s_sum - 3, s_prod - s_sum + 2


def cover_exponent(m: int, torus: TorusData) -> Fraction:
    """Exponent of F(t^m) contributed by the m-fold covers of one torus."""
    return Fraction(signed_sum(m, torus), m)


def phi_lattice(torus: TorusData, F: USeries, torder: int | None = None) -> USeries:
    """prod_m F(t^m)^(signed_sum(m)/m), in the log domain."""
    if F[0] != 1:
        raise DomainError("F must have constant term 1")
    n = F.torder if torder is None else torder
    if n > F.torder:
        raise DomainError(f"F known to order {F.torder}, need {n}")
    logF = F.truncate(n).log()
    total = USeries([0], n)
    for m in range(1, n + 1):
        total = total + logF.subst_scale(m) * cover_exponent(m, torus)
    return total.exp()


def phi_closed(torus: TorusData, f: USeries, torder: int | None = None) -> USeries:
    """[f(t) f(t^2)^(s1/2) f(t^4)^(s2/4)]^sign."""
    if f[0] != 1:
        raise DomainError("f must have constant term 1")
    n = f.torder if torder is None else torder
    if n > f.torder:
        raise DomainError(f"f known to order {f.torder}, need {n}")
    f = f.truncate(n)
    s1, s2 = s1s2(torus)
    if s1 % 2 or s2 % 4:
        raise InvariantError(f"s1={s1}, s2={s2} not divisible by 2 and 4")
    out = f * f.subst_scale(2).pow(s1 // 2) * f.subst_scale(4).pow(s2 // 4)
    return out.pow(torus.sign)
