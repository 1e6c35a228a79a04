"""Integer model of H_2 with intersection form, canonical class and grading.

Homology classes are plain tuples of integers (coordinates in a fixed basis).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .errors import DomainError

HomologyClass = tuple[int, ...]


class ClassKind(enum.Enum):
    EXCEPTIONAL = "exceptional"
    TOROIDAL = "toroidal"
    GENERIC = "generic"


@dataclass(frozen=True)
class ManifoldModel:
    """Rank-r lattice with symmetric form, canonical class and grading.

    ``kappa[i]`` is the pairing of the canonical class with the i-th basis
    vector, so ``kappa . A`` is an ordinary dot product with A's coordinates.
    ``grading`` is a linear functional used only to truncate series.
    """

    rank: int
    form: tuple[tuple[int, ...], ...]
    kappa: tuple[int, ...]
    grading: tuple[int, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise DomainError("rank must be positive")
        object.__setattr__(self, "form", tuple(tuple(int(x) for x in row) for row in self.form))
        object.__setattr__(self, "kappa", tuple(int(x) for x in self.kappa))
        object.__setattr__(self, "grading", tuple(int(x) for x in self.grading))
        if len(self.form) != self.rank or any(len(row) != self.rank for row in self.form):
            raise DomainError(f"form must be {self.rank}x{self.rank}")
        for i in range(self.rank):
            for j in range(i):
                if self.form[i][j] != self.form[j][i]:
                    raise DomainError(f"form is not symmetric at ({i}, {j})")
        if len(self.kappa) != self.rank:
            raise DomainError(f"kappa must have length {self.rank}")
        if len(self.grading) != self.rank:
            raise DomainError(f"grading must have length {self.rank}")

    @classmethod
    def from_lists(cls, form: Sequence[Sequence[int]], kappa: Sequence[int],
                   grading: Sequence[int]) -> "ManifoldModel":
        return cls(len(form), tuple(map(tuple, form)), tuple(kappa), tuple(grading))

    def check(self, A: Sequence[int]) -> HomologyClass:
        if len(A) != self.rank:
            raise DomainError(f"class {tuple(A)} does not have length {self.rank}")
        return tuple(int(x) for x in A)

    def zero(self) -> HomologyClass:
        return (0,) * self.rank

    def grade(self, A: Sequence[int]) -> int:
        A = self.check(A)
        return sum(l * a for l, a in zip(self.grading, A))


def dot(model: ManifoldModel, A: Sequence[int], B: Sequence[int]) -> int:
    """Intersection pairing A.B."""
    A, B = model.check(A), model.check(B)
    return sum(A[i] * model.form[i][j] * B[j]
               for i in range(model.rank) for j in range(model.rank)
               if A[i] and B[j])


def kappa_dot(model: ManifoldModel, A: Sequence[int]) -> int:
    A = model.check(A)
    return sum(k * a for k, a in zip(model.kappa, A))


def classify(model: ManifoldModel, A: Sequence[int]) -> ClassKind:
    sq = dot(model, A, A)
    if sq == -1:
        return ClassKind.EXCEPTIONAL
    if sq == 0 and kappa_dot(model, A) == 0:
        return ClassKind.TOROIDAL
    return ClassKind.GENERIC


def _half(n: int, what: str) -> int:
    if n % 2:
        raise DomainError(f"{what} is odd; A.A + kappa.A must be even")
    return n // 2


def d_formula(model: ManifoldModel, A: Sequence[int]) -> int:
    """(A.A - kappa.A)/2 with no convention applied; may be negative."""
    return _half(dot(model, A, A) - kappa_dot(model, A), "A.A - kappa.A")


def d_A(model: ManifoldModel, A: Sequence[int]) -> int:
    """Number of point constraints (A.A - kappa.A)/2.

    An exceptional class whose formula value is negative (kappa.E != -1) is
    given 0, as for an embedded exceptional sphere; toroidal classes get 0
    from the formula itself.  Generic classes keep the formula value even
    when negative; callers that need a constraint count reject it.
    """
    d = d_formula(model, A)
    if d < 0 and classify(model, A) is ClassKind.EXCEPTIONAL:
        return 0
    return d


def g_A(model: ManifoldModel, A: Sequence[int]) -> int:
    """Genus 1 + (A.A + kappa.A)/2."""
    return 1 + _half(dot(model, A, A) + kappa_dot(model, A), "A.A + kappa.A")


def delta(model: ManifoldModel, A: Sequence[int], d: int) -> int:
    """Double-point count d_A - d for 0 <= d <= d_A."""
    top = d_A(model, A)
    if not 0 <= d <= top:
        raise DomainError(f"d={d} outside [0, {top}] for class {tuple(A)}")
    return top - d


def is_primitive(A: Sequence[int]) -> bool:
    g = 0
    for a in A:
        g = gcd(g, a)
    return g == 1


def primitive_part(A: Sequence[int]) -> tuple[HomologyClass, int]:
    """Split a nonzero class as q * A0 with A0 primitive and q >= 1."""
    g = 0
    for a in A:
        g = gcd(g, a)
    if g == 0:
        raise DomainError("the zero class has no primitive part")
    return tuple(a // g for a in A), g


def add(A: Sequence[int], B: Sequence[int]) -> HomologyClass:
    return tuple(a + b for a, b in zip(A, B))


def scale(n: int, A: Sequence[int]) -> HomologyClass:
    return tuple(n * a for a in A)
