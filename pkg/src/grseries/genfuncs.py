"""Named univariate generating functions and the identities between them."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .numtheory import mobius, sigma
from .powerseries import USeries


class Flavor(enum.Enum):
    TAUBES_F = "taubes"       # f_or_F holds the torus function f
    RUAN_TIAN_F = "ruan-tian"  # f_or_F holds the per-cover function F


@dataclass(frozen=True)
class GenFuncChoice:
    e: USeries
    g: USeries
    f_or_F: USeries
    flavor: Flavor

    @property
    def torder(self) -> int:
        return min(self.e.torder, self.g.torder, self.f_or_F.torder)


def taubes_defaults(torder: int) -> GenFuncChoice:
    """e = 1 + t, f = 1/(1 - t), g = exp(t)."""
    if torder < 0:
        raise DomainError("torder must be nonnegative")
    return GenFuncChoice(
        e=USeries([1, 1], torder),
        g=USeries.exponential(torder),
        f_or_F=USeries.geometric(torder),
        flavor=Flavor.TAUBES_F,
    )


def mobius_F(torder: int) -> USeries:
    """exp(sum_{m>=1} mu(m) t^m), truncated."""
    return USeries([0] + [mobius(m) for m in range(1, torder + 1)]).exp()


def ruan_tian_defaults(torder: int) -> GenFuncChoice:
    base = taubes_defaults(torder)
    return GenFuncChoice(e=base.e, g=base.g, f_or_F=mobius_F(torder),
                         flavor=Flavor.RUAN_TIAN_F)


def _require_unit_constant(x: USeries, name: str) -> None:
    if x[0] != 1:
        raise DomainError(f"{name} must have constant term 1, got {x[0]}")


def _order(x: USeries, torder: int | None) -> int:
    n = x.torder if torder is None else torder
    if n > x.torder:
        raise DomainError(f"series known to order {x.torder}, need {n}")
    return n


def wall_crossing_family(f: USeries) -> list[USeries]:
    """[f, f/f(t^2), f f(t^4)/f(t^2)^2, f f(t^4)/f(t^2)^3]."""
    _require_unit_constant(f, "f")
    f2_inv = f.subst_scale(2).inverse()
    f4 = f.subst_scale(4)
    f1 = f * f2_inv
    f2 = f1 * f4 * f2_inv
    f3 = f2 * f2_inv
    return [f, f1, f2, f3]


def f_from_F(F: USeries, torder: int | None = None) -> USeries:
    """prod_{m>=1} F(t^m)^(sigma(m)/m), evaluated in the log domain."""
    _require_unit_constant(F, "F")
    n = _order(F, torder)
    logF = F.truncate(n).log()
    total = USeries.one(n) * 0
    for m in range(1, n + 1):
        total = total + logF.subst_scale(m) * Fraction(sigma(m), m)
    return total.exp()


def check_prodF(F: USeries, torder: int | None = None) -> tuple[bool, int | None]:
    """Whether prod_{k<=N} F(t^k) equals exp(t) mod t^(N+1); also the first bad degree."""
    _require_unit_constant(F, "F")
    n = _order(F, torder)
    F = F.truncate(n)
    prod = USeries.one(n)
    for k in range(1, n + 1):
        prod = prod * F.subst_scale(k)
    bad = prod.first_difference(USeries.exponential(n))
    return bad is None, bad
