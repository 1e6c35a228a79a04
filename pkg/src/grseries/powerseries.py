"""Exact truncated power series.

Two classes live here:

``USeries``
    univariate series ``c0 + c1 t + ... + cN t^N`` with ``Fraction``
    coefficients, used for the named generating functions.

``Series``
    sparse series in monomials ``t_A s^d`` where ``A`` ranges over a homology
    lattice (so ``t_A t_B = t_{A+B}`` holds by adding coordinate vectors) and
    ``d`` is a nonnegative power of ``s``.  A term is kept iff
    ``grade(A) <= torder`` and ``d <= sorder``.

All arithmetic is exact.  Rational powers are computed as ``exp(c log x)``
and therefore require constant term 1.
"""
from __future__ import annotations

import os
import re
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import DomainError
from .homology import HomologyClass, ManifoldModel


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise DomainError("floating point coefficients are not accepted")
    return Fraction(c)


def _is_nonneg_int(c: Fraction) -> bool:
    return c.denominator == 1 and c.numerator >= 0


def format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# univariate
# ---------------------------------------------------------------------------


class USeries:
    """Truncated univariate power series with exact coefficients.

    Binary operations between series of different orders return a series of
    the smaller order.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = (), torder: int | None = None):
        cs = [_frac(c) for c in coeffs]
        if torder is not None:
            if torder < 0:
                raise DomainError("torder must be nonnegative")
            cs = cs[: torder + 1] + [Fraction(0)] * (torder + 1 - len(cs))
        if not cs:
            raise DomainError("a USeries needs at least one coefficient or a torder")
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    # constructors ---------------------------------------------------------

    @classmethod
    def one(cls, torder: int) -> "USeries":
        return cls([1], torder)

    @classmethod
    def variable(cls, torder: int) -> "USeries":
        return cls([0, 1], torder)

    @classmethod
    def geometric(cls, torder: int) -> "USeries":
        """1/(1-t)."""
        return cls([1] * (torder + 1))

    @classmethod
    def exponential(cls, torder: int) -> "USeries":
        return cls([Fraction(1, factorial(n)) for n in range(torder + 1)])

    # basics ---------------------------------------------------------------

    @property
    def torder(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, USeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"USeries([{', '.join(format_fraction(c) for c in self.coeffs)}])"

    def truncate(self, torder: int) -> "USeries":
        return USeries(self.coeffs, torder)

    def first_difference(self, other: "USeries") -> int | None:
        """Lowest degree at which the two series differ, or None."""
        n = min(self.torder, other.torder)
        for k in range(n + 1):
            if self.coeffs[k] != other.coeffs[k]:
                return k
        return None

    # ring operations -------------------------------------------------------

    def _coerce(self, other) -> "USeries":
        if isinstance(other, USeries):
            return other
        return USeries([other], self.torder)

    def __add__(self, other) -> "USeries":
        other = self._coerce(other)
        n = min(self.torder, other.torder)
        return USeries([self.coeffs[k] + other.coeffs[k] for k in range(n + 1)])

    __radd__ = __add__

    def __neg__(self) -> "USeries":
        return USeries([-c for c in self.coeffs])

    def __sub__(self, other) -> "USeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "USeries":
        return (-self) + other

    def __mul__(self, other) -> "USeries":
        if not isinstance(other, USeries):
            c = _frac(other)
            return USeries([c * a for a in self.coeffs])
        n = min(self.torder, other.torder)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            ai = a[i]
            if not ai:
                continue
            for j in range(n + 1 - i):
                if b[j]:
                    out[i + j] += ai * b[j]
        return USeries(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "USeries":
        if isinstance(other, USeries):
            return self * other.inverse()
        return self * (1 / _frac(other))

    def __pow__(self, c) -> "USeries":
        return self.pow(c)

    def inverse(self) -> "USeries":
        a = self.coeffs
        if a[0] == 0:
            raise DomainError("series with zero constant term is not invertible")
        inv0 = 1 / a[0]
        out = [inv0]
        for n in range(1, len(a)):
            acc = sum((a[k] * out[n - k] for k in range(1, n + 1)), Fraction(0))
            out.append(-inv0 * acc)
        return USeries(out)

    def exp(self) -> "USeries":
        a = self.coeffs
        if a[0] != 0:
            raise DomainError("exp needs zero constant term")
        out = [Fraction(1)]
        for n in range(1, len(a)):
            acc = sum((k * a[k] * out[n - k] for k in range(1, n + 1)), Fraction(0))
            out.append(acc / n)
        return USeries(out)

    def log(self) -> "USeries":
        a = self.coeffs
        if a[0] != 1:
            raise DomainError("log needs constant term 1")
        out = [Fraction(0)]
        for n in range(1, len(a)):
            acc = sum((k * out[k] * a[n - k] for k in range(1, n)), Fraction(0))
            out.append(a[n] - acc / n)
        return USeries(out)

    def pow(self, c) -> "USeries":
        c = _frac(c)
        if _is_nonneg_int(c):
            result, base, e = USeries.one(self.torder), self, c.numerator
            while e:
                if e & 1:
                    result = result * base
                e >>= 1
                if e:
                    base = base * base
            return result
        if self.coeffs[0] != 1:
            raise DomainError(f"power {c} needs constant term 1")
        return (self.log() * c).exp()

    def subst_scale(self, q: int, torder: int | None = None) -> "USeries":
        """Substitute t -> t**q.  The result keeps ``torder`` (default: same)."""
        if q < 1:
            raise DomainError("substitution exponent must be >= 1")
        n = self.torder if torder is None else torder
        if n // q > self.torder:
            raise DomainError(f"need order {n // q} of the source series, have {self.torder}")
        out = [Fraction(0)] * (n + 1)
        for k in range(n // q + 1):
            out[k * q] = self.coeffs[k]
        return USeries(out)


def subst_scale(x: USeries, q: int) -> USeries:
    return x.subst_scale(q)


# ---------------------------------------------------------------------------
# multivariate
# ---------------------------------------------------------------------------


class Monomial(NamedTuple):
    cls: HomologyClass
    sdeg: int


class Series:
    """Truncated series in t_A s^d over a ManifoldModel.

    Terms outside the bounds are dropped on construction; every stored
    monomial must have nonnegative grading.
    """

    __slots__ = ("model", "torder", "sorder", "terms", "_grades")

    def __init__(self, model: ManifoldModel, torder: int, sorder: int,
                 terms: Mapping | Iterable = ()):
        if torder < 0 or sorder < 0:
            raise DomainError("truncation bounds must be nonnegative")
        self.model = model
        self.torder = torder
        self.sorder = sorder
        items = terms.items() if isinstance(terms, Mapping) else terms
        store: dict[Monomial, Fraction] = {}
        grades: dict[HomologyClass, int] = {}
        for mono, c in items:
            cls, sdeg = model.check(mono[0]), int(mono[1])
            c = _frac(c)
            if not c:
                continue
            g = grades.get(cls)
            if g is None:
                g = grades[cls] = model.grade(cls)
            if g < 0 or sdeg < 0:
                raise DomainError(f"monomial {cls}, s^{sdeg} has negative degree")
            if g > torder or sdeg > sorder:
                continue
            key = Monomial(cls, sdeg)
            c = store.get(key, 0) + c
            if c:
                store[key] = c
            else:
                store.pop(key, None)
        self.terms: dict[Monomial, Fraction] = store
        self._grades = grades

    @classmethod
    def _raw(cls, model, torder, sorder, terms, grades) -> "Series":
        obj = cls.__new__(cls)
        obj.model, obj.torder, obj.sorder = model, torder, sorder
        obj.terms, obj._grades = terms, grades
        return obj

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, model, torder, sorder) -> "Series":
        return cls(model, torder, sorder)

    @classmethod
    def unit(cls, model, torder, sorder) -> "Series":
        return cls(model, torder, sorder, {Monomial(model.zero(), 0): 1})

    @classmethod
    def monomial(cls, model, torder, sorder, A, sdeg=0, coeff=1) -> "Series":
        return cls(model, torder, sorder, {Monomial(tuple(A), sdeg): coeff})

    def like(self, terms=()) -> "Series":
        return Series(self.model, self.torder, self.sorder, terms)

    # basics ---------------------------------------------------------------

    def grade(self, cls: HomologyClass) -> int:
        g = self._grades.get(cls)
        if g is None:
            g = self._grades[cls] = self.model.grade(cls)
        return g

    def bounds(self) -> tuple[int, int]:
        return self.torder, self.sorder

    def _check_compatible(self, other: "Series") -> None:
        if not isinstance(other, Series):
            raise DomainError(f"cannot combine Series with {type(other).__name__}")
        if other.model != self.model:
            raise DomainError("series over different models")
        if other.bounds() != self.bounds():
            raise DomainError(f"truncation bounds differ: {self.bounds()} vs {other.bounds()}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (self.model == other.model and self.bounds() == other.bounds()
                and self.terms == other.terms)

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"Series(torder={self.torder}, sorder={self.sorder}, terms={len(self.terms)})"

    def constant_term(self) -> Fraction:
        return self.terms.get(Monomial(self.model.zero(), 0), Fraction(0))

    def in_bounds(self, m: Monomial) -> bool:
        return 0 <= self.grade(tuple(m[0])) <= self.torder and 0 <= m[1] <= self.sorder

    def coeff(self, m) -> Fraction:
        cls, sdeg = self.model.check(m[0]), m[1]
        if not self.in_bounds(Monomial(cls, sdeg)):
            raise DomainError(f"monomial {cls}, s^{sdeg} lies outside the truncation bounds")
        return self.terms.get(Monomial(cls, sdeg), Fraction(0))

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(),
                      key=lambda kv: (self.grade(kv[0].cls), kv[0].cls, kv[0].sdeg))

    def classes(self) -> set[HomologyClass]:
        return {m.cls for m in self.terms}

    def truncate(self, torder: int, sorder: int) -> "Series":
        if torder > self.torder or sorder > self.sorder:
            raise DomainError("cannot raise truncation bounds")
        return Series(self.model, torder, sorder, self.terms)

    # ring operations -------------------------------------------------------

    def __add__(self, other) -> "Series":
        if not isinstance(other, Series):
            other = self.like({Monomial(self.model.zero(), 0): other})
        self._check_compatible(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Series._raw(self.model, self.torder, self.sorder, out, self._grades)

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series._raw(self.model, self.torder, self.sorder,
                           {m: -c for m, c in self.terms.items()}, self._grades)

    def __sub__(self, other) -> "Series":
        return self + (-other)

    def __rsub__(self, other) -> "Series":
        return (-self) + other

    def scale(self, c) -> "Series":
        c = _frac(c)
        if not c:
            return self.like()
        return Series._raw(self.model, self.torder, self.sorder,
                           {m: c * v for m, v in self.terms.items()}, self._grades)

    def __mul__(self, other) -> "Series":
        if not isinstance(other, Series):
            return self.scale(other)
        self._check_compatible(other)
        T, S = self.torder, self.sorder
        left = [(m.cls, self.grade(m.cls), m.sdeg, c) for m, c in self.terms.items()]
        right = sorted(((m.cls, other.grade(m.cls), m.sdeg, c) for m, c in other.terms.items()),
                       key=lambda r: r[1])
        out: dict[Monomial, Fraction] = {}
        grades = dict(self._grades)
        for ca, ga, sa, va in left:
            room_t, room_s = T - ga, S - sa
            for cb, gb, sb, vb in right:
                if gb > room_t:
                    break
                if sb > room_s:
                    continue
                cls = tuple(x + y for x, y in zip(ca, cb))
                key = Monomial(cls, sa + sb)
                v = out.get(key, 0) + va * vb
                if v:
                    out[key] = v
                else:
                    del out[key]
                grades[cls] = ga + gb
        return Series._raw(self.model, T, S, out, grades)

    __rmul__ = __mul__

    def _nilpotency_bound(self) -> int:
        zero = self.model.zero()
        for m in self.terms:
            if self.grade(m.cls) == 0 and m.sdeg == 0 and m.cls != zero:
                raise DomainError(f"term t{list(m.cls)} has degree 0 and is not nilpotent")
        return self.torder + self.sorder

    def exp(self) -> "Series":
        if self.constant_term() != 0:
            raise DomainError("exp needs zero constant term")
        N = self._nilpotency_bound()
        result = Series.unit(self.model, self.torder, self.sorder)
        term = result
        for n in range(1, N + 1):
            term = (term * self).scale(Fraction(1, n))
            if not term:
                break
            result = result + term
        return result

    def log(self) -> "Series":
        if self.constant_term() != 1:
            raise DomainError("log needs constant term 1")
        y = self - 1
        N = y._nilpotency_bound()
        result = self.like()
        power = y
        for n in range(1, N + 1):
            if not power:
                break
            result = result + power.scale(Fraction((-1) ** (n + 1), n))
            power = power * y
        return result

    def pow(self, c) -> "Series":
        c = _frac(c)
        if _is_nonneg_int(c):
            result = Series.unit(self.model, self.torder, self.sorder)
            base, e = self, c.numerator
            while e:
                if e & 1:
                    result = result * base
                e >>= 1
                if e:
                    base = base * base
            return result
        if self.constant_term() != 1:
            raise DomainError(f"power {c} needs constant term 1")
        return self.log().scale(c).exp()

    def __pow__(self, c) -> "Series":
        return self.pow(c)

    # text form -------------------------------------------------------------

    def to_text(self) -> str:
        """Canonical text: one ``coeff * t[...] * s^d`` term per line."""
        if not self.terms:
            return "0"
        zero = self.model.zero()
        lines = []
        for m, c in self.sorted_terms():
            parts = [format_fraction(c)]
            if m.cls != zero:
                parts.append("t[" + ",".join(str(a) for a in m.cls) + "]")
            if m.sdeg:
                parts.append(f"s^{m.sdeg}")
            lines.append(" * ".join(parts))
        return "\n".join(lines)

    def to_json(self) -> list[dict]:
        return [{"class": list(m.cls), "s": m.sdeg, "coeff": format_fraction(c)}
                for m, c in self.sorted_terms()]

    @classmethod
    def from_text(cls, text: str, model: ManifoldModel, torder: int, sorder: int) -> "Series":
        terms = []
        text = text.strip()
        if text == "0":
            return cls(model, torder, sorder)
        for line in text.splitlines():
            m = _TERM_RE.fullmatch(line.strip())
            if m is None:
                raise DomainError(f"cannot parse series term {line!r}")
            coeff = Fraction(m.group("c"))
            A = (tuple(int(x) for x in m.group("t").split(",")) if m.group("t")
                 else model.zero())
            terms.append(((A, int(m.group("s") or 0)), coeff))
        return cls(model, torder, sorder, terms)

    def first_difference(self, other: "Series") -> tuple[Monomial, Fraction, Fraction] | None:
        """Lowest differing term in canonical order, with both coefficients."""
        self._check_compatible(other)
        diff = self - other
        if not diff:
            return None
        m, _ = diff.sorted_terms()[0]
        return m, self.terms.get(m, Fraction(0)), other.terms.get(m, Fraction(0))


_TERM_RE = re.compile(r"(?P<c>-?\d+(?:/\d+)?)(?: \* t\[(?P<t>-?\d+(?:,-?\d+)*)\])?(?: \* s\^(?P<s>\d+))?")


def add(x: Series, y: Series) -> Series:
    return x + y


def mul(x: Series, y: Series) -> Series:
    return x * y


def exp(x: Series) -> Series:
    return x.exp()


def log(x: Series) -> Series:
    return x.log()


def pow(x: Series, c) -> Series:  # noqa: A001 - mirrors the ring operation name
    return x.pow(c)


def coeff(x: Series, m) -> Fraction:
    return x.coeff(m)


def plug_monomial(g: USeries, m, c, model: ManifoldModel, torder: int, sorder: int) -> Series:
    """Compose ``g`` with the monomial ``c * t_A s^d``: sum of g_n c^n t_{nA} s^{nd}."""
    cls, sdeg = model.check(m[0]), int(m[1])
    c = _frac(c)
    grade = model.grade(cls)
    if grade < 0 or sdeg < 0:
        raise DomainError("monomial with negative degree")
    if grade == 0 and sdeg == 0:
        raise DomainError("cannot compose a power series with a degree-zero monomial")
    n_max = min(torder // grade if grade else sorder // sdeg,
                sorder // sdeg if sdeg else torder // grade)
    if n_max > g.torder:
        raise DomainError(f"generating function known to order {g.torder}, need {n_max}")
    terms = {}
    cn = Fraction(1)
    for n in range(n_max + 1):
        if g[n]:
            terms[Monomial(tuple(n * a for a in cls), n * sdeg)] = g[n] * cn
        cn *= c
    return Series(model, torder, sorder, terms)


def _parallel_enabled() -> bool:
    return os.environ.get("GRSERIES_NO_PARALLEL", "") not in ("1", "true", "yes")


def product(factors: Sequence[Series], model: ManifoldModel | None = None,
            torder: int | None = None, sorder: int | None = None) -> Series:
    """Product of series by balanced pairwise reduction.

    The pairing is fixed, so the result is identical whether or not the
    pairs of one level are multiplied on a thread pool.
    """
    level = list(factors)
    if not level:
        if model is None:
            raise DomainError("empty product needs model and bounds")
        return Series.unit(model, torder, sorder)
    pool = ThreadPoolExecutor(max_workers=4) if _parallel_enabled() and len(level) > 4 else None
    try:
        while len(level) > 1:
            pairs = [(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
            if pool is not None:
                merged = list(pool.map(lambda p: p[0] * p[1], pairs))
            else:
                merged = [a * b for a, b in pairs]
            if len(level) % 2:
                merged.append(level[-1])
            level = merged
    finally:
        if pool is not None:
            pool.shutdown()
    return level[0]
