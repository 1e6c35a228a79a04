"""Assemble the Taubes series GT and the Ruan-Tian series RT from curve data.

A ``CurveTable`` carries counts for generic classes, exceptional spheres and
a list of embedded tori.  Both series are built from the same table: the
Taubes numbers tau(A, k) and the toroidal RT(A, 0) are derived from the tori,
never supplied directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, InvariantError
from .genfuncs import (Flavor, GenFuncChoice, f_from_F, mobius_F, taubes_defaults,
                       wall_crossing_family)
from .homology import (ClassKind, HomologyClass, ManifoldModel, classify, d_A, d_formula,
                       dot, kappa_dot, primitive_part)
from .lattices import TorusData, cover_exponent
from .powerseries import Monomial, Series, USeries, plug_monomial, product


@dataclass(frozen=True)
class GenericEntry:
    cls: HomologyClass
    counts: Mapping[int, int]


@dataclass(frozen=True)
class ExceptionalEntry:
    cls: HomologyClass
    count: int


@dataclass
class CurveTable:
    model: ManifoldModel
    generic: list[GenericEntry] = field(default_factory=list)
    exceptional: list[ExceptionalEntry] = field(default_factory=list)
    tori: list[TorusData] = field(default_factory=list)

    def validate(self) -> "CurveTable":
        """Raise DomainError naming the first violated table invariant."""
        model = self.model
        seen: set[HomologyClass] = set()
        for entry in self.generic:
            A = model.check(entry.cls)
            if A in seen:
                raise DomainError(f"class {list(A)} listed twice")
            seen.add(A)
            if classify(model, A) is not ClassKind.GENERIC:
                raise DomainError(f"generic entry {list(A)} is {classify(model, A).value}")
            _check_grading(model, A)
            top = d_A(model, A)
            if top < 0:
                raise DomainError(f"generic class {list(A)} has d_A = {top} < 0")
            for d in entry.counts:
                if not 0 <= d <= top:
                    raise DomainError(f"count for d={d} outside [0, {top}] for class {list(A)}")
        for entry in self.exceptional:
            E = model.check(entry.cls)
            if E in seen:
                raise DomainError(f"class {list(E)} listed twice")
            seen.add(E)
            if classify(model, E) is not ClassKind.EXCEPTIONAL:
                raise DomainError(f"exceptional entry {list(E)} has square {dot(model, E, E)}")
            _check_grading(model, E)
        for torus in self.tori:
            A = model.check(torus.cls)
            if classify(model, A) is not ClassKind.TOROIDAL:
                raise DomainError(f"torus class {list(A)} is not toroidal")
            _check_grading(model, A)
        return self

    def torus_directions(self) -> list[HomologyClass]:
        dirs = {primitive_part(t.cls)[0] for t in self.tori}
        return sorted(dirs, key=lambda A: (self.model.grade(A), A))

    def atom_classes(self) -> list[HomologyClass]:
        out = [e.cls for e in self.generic] + [e.cls for e in self.exceptional]
        out += self.torus_directions()
        return sorted(set(map(tuple, out)), key=lambda A: (self.model.grade(A), A))


def _check_grading(model: ManifoldModel, A: HomologyClass) -> None:
    if model.grade(A) <= 0:
        raise DomainError(f"class {list(A)} has nonpositive grading {model.grade(A)}")


# ---------------------------------------------------------------------------
# the two series
# ---------------------------------------------------------------------------


def tau_table(table: CurveTable, torder: int | None = None) -> dict[tuple[HomologyClass, int], int]:
    """Signed count of type-k tori per class, for classes of grade <= torder."""
    out: dict[tuple[HomologyClass, int], int] = {}
    for torus in table.tori:
        if torder is not None and table.model.grade(torus.cls) > torder:
            continue
        for k in range(4):
            out.setdefault((tuple(torus.cls), k), 0)
        out[(tuple(torus.cls), torus.type)] += torus.sign
    return out


def _shared_factors(table: CurveTable, gens: GenFuncChoice, torder: int,
                    sorder: int) -> list[Series]:
    model = table.model
    factors = []
    for entry in table.exceptional:
        if entry.count:
            factors.append(plug_monomial(gens.e.pow(entry.count), (entry.cls, 0), 1,
                                         model, torder, sorder))
    for entry in table.generic:
        for d, n in sorted(entry.counts.items()):
            if n:
                factors.append(plug_monomial(gens.g.pow(n), (entry.cls, d),
                                             Fraction(1, factorial(d)), model, torder, sorder))
    return factors


def build_GT(table: CurveTable, gens: GenFuncChoice, torder: int, sorder: int) -> Series:
    """Taubes series: e-factors, g-factors over every d, f_k-factors over tori."""
    if gens.flavor is not Flavor.TAUBES_F:
        raise DomainError("build_GT needs generating functions with the torus function f")
    table.validate()
    factors = _shared_factors(table, gens, torder, sorder)
    if table.tori:
        family = wall_crossing_family(gens.f_or_F)
        for (cls, k), tau in sorted(tau_table(table, torder).items()):
            if tau:
                factors.append(plug_monomial(family[k].pow(tau), (cls, 0), 1,
                                             table.model, torder, sorder))
    return product(factors, table.model, torder, sorder)


def rt_torus_counts(table: CurveTable, torder: int) -> dict[HomologyClass, Fraction]:
    """RT(B, 0) for toroidal B: each torus C adds signed_sum(m, C)/m at B = m[C]."""
    model = table.model
    out: dict[HomologyClass, Fraction] = {}
    for torus in table.tori:
        g = model.grade(torus.cls)
        for m in range(1, torder // g + 1):
            B = tuple(m * a for a in torus.cls)
            out[B] = out.get(B, Fraction(0)) + cover_exponent(m, torus)
    return out


def build_RT(table: CurveTable, gens: GenFuncChoice, torder: int, sorder: int) -> Series:
    """Ruan-Tian series: shared e and g factors, then F(t_B)^RT(B,0) for toroidal B."""
    if gens.flavor is not Flavor.RUAN_TIAN_F:
        raise DomainError("build_RT needs generating functions with the cover function F")
    table.validate()
    factors = _shared_factors(table, gens, torder, sorder)
    for B, c in sorted(rt_torus_counts(table, torder).items()):
        if c:
            factors.append(plug_monomial(gens.f_or_F.pow(c), (B, 0), 1,
                                         table.model, torder, sorder))
    return product(factors, table.model, torder, sorder)


# ---------------------------------------------------------------------------
# extraction
# ---------------------------------------------------------------------------


def extract(series: Series, A: Sequence[int], delta: int) -> int:
    """Gr_delta(A) = d! * coefficient of t_A s^d with d = d_A - delta."""
    model = series.model
    A = model.check(A)
    top = d_A(model, A)
    if top < 0:
        raise DomainError(f"class {list(A)} has d_A = {top} < 0")
    d = top - delta
    if d < 0 or delta < 0:
        raise DomainError(f"delta={delta} outside [0, {top}] for class {list(A)}")
    value = series.coeff((A, d)) * factorial(d)
    if value.denominator != 1:
        raise InvariantError(f"coefficient for class {list(A)}, delta {delta} is {value}, not integral")
    return value.numerator


def expansion(series: Series, strict: bool = True) -> dict[tuple[HomologyClass, int], int | Fraction]:
    """All (class, delta) -> Gr_delta(class) readable from the stored terms.

    With ``strict=False`` a non-integral entry is returned as a Fraction
    instead of raising.
    """
    out: dict[tuple[HomologyClass, int], int | Fraction] = {}
    zero = series.model.zero()
    for m, c in series.sorted_terms():
        if m.cls == zero:
            continue
        try:
            top = d_A(series.model, m.cls)
        except DomainError:
            continue
        if not 0 <= m.sdeg <= top:
            continue
        key = (m.cls, top - m.sdeg)
        if strict:
            out[key] = extract(series, m.cls, top - m.sdeg)
        else:
            value = c * factorial(m.sdeg)
            out[key] = value.numerator if value.denominator == 1 else value
    return out


def non_integral_entries(series: Series) -> list[tuple[HomologyClass, int, Fraction]]:
    return [(A, dl, v) for (A, dl), v in expansion(series, strict=False).items()
            if isinstance(v, Fraction)]


# ---------------------------------------------------------------------------
# closed form for Gr_0
# ---------------------------------------------------------------------------


def admissibility_problems(table: CurveTable) -> list[str]:
    """Reasons the table falls outside the hypotheses of the Gr_0 closed form.

    The closed form needs every contribution to the double-point count to be
    nonnegative: generic classes with A.A >= 0, exceptional spheres counted
    0 or 1 times with kappa.E = -1, and distinct atoms pairing nonnegatively.
    """
    model = table.model
    problems = []
    for entry in table.generic:
        if dot(model, entry.cls, entry.cls) < 0:
            problems.append(f"generic class {list(entry.cls)} has negative square")
    for entry in table.exceptional:
        if entry.count not in (0, 1):
            problems.append(f"exceptional class {list(entry.cls)} has count {entry.count}")
        if kappa_dot(model, entry.cls) != -1:
            problems.append(f"exceptional class {list(entry.cls)} has kappa.E != -1")
    for A, B in combinations(table.atom_classes(), 2):
        if dot(model, A, B) < 0:
            problems.append(f"classes {list(A)} and {list(B)} intersect negatively")
    return problems


@dataclass(frozen=True)
class _Atom:
    cls: HomologyClass
    kind: ClassKind
    grade: int
    d: int
    weight: int      # Gr(A, d_A) or Gr(E, 0); unused for tori
    max_n: int | None


def _atoms(table: CurveTable) -> list[_Atom]:
    model = table.model
    atoms = []
    for entry in table.generic:
        top = d_A(model, entry.cls)
        atoms.append(_Atom(tuple(entry.cls), ClassKind.GENERIC, model.grade(entry.cls), top,
                           entry.counts.get(top, 0), None))
    for entry in table.exceptional:
        atoms.append(_Atom(tuple(entry.cls), ClassKind.EXCEPTIONAL, model.grade(entry.cls), 0,
                           entry.count, 1))
    for A0 in table.torus_directions():
        atoms.append(_Atom(A0, ClassKind.TOROIDAL, model.grade(A0), 0, 0, None))
    atoms.sort(key=lambda a: (a.grade, a.cls))
    return atoms


def decompositions(table: CurveTable, A: Sequence[int]) -> Iterable[list[tuple[_Atom, int]]]:
    """All ways to write A as sum n_i A_i over distinct atoms with n_i >= 1."""
    model = table.model
    atoms = _atoms(table)
    target = model.check(A)

    def rec(i, remaining, chosen):
        if not any(remaining):
            yield list(chosen)
            return
        if i == len(atoms):
            return
        rgrade = model.grade(remaining)
        atom = atoms[i]
        yield from rec(i + 1, remaining, chosen)
        n = 1
        while n * atom.grade <= rgrade and (atom.max_n is None or n <= atom.max_n):
            rest = tuple(r - n * a for r, a in zip(remaining, atom.cls))
            chosen.append((atom, n))
            yield from rec(i + 1, rest, chosen)
            chosen.pop()
            n += 1

    if model.grade(target) < 0:
        return
    yield from rec(0, target, [])


def double_point_terms(model: ManifoldModel, y: list[tuple[_Atom, int]]) -> list[tuple[str, int]]:
    """The separate contributions to the double-point count of a decomposition."""
    terms = []
    for atom, n in y:
        terms.append((f"self {list(atom.cls)}", n * (n - 1) // 2 * dot(model, atom.cls, atom.cls)))
        terms.append((f"nodes {list(atom.cls)}", n * (d_formula(model, atom.cls) - atom.d)))
    for (a, n), (b, k) in combinations(y, 2):
        terms.append((f"cross {list(a.cls)}.{list(b.cls)}", n * k * dot(model, a.cls, b.cls)))
    return terms


def _torus_family(f: USeries | None, n: int) -> list[USeries]:
    f = USeries.geometric(n) if f is None else f.truncate(n)
    return wall_crossing_family(f)


def q_closed(table: CurveTable, A0: HomologyClass, n: int, f: USeries | None = None) -> Fraction:
    """Coefficient of u^n in prod_q prod_k f_k(u^q)^tau(q A0, k)."""
    family = _torus_family(f, n)
    total = USeries.one(n)
    for (cls, k), tau in tau_table(table).items():
        base, q = primitive_part(cls)
        if base != A0 or not tau or q > n:
            continue
        total = total * family[k].pow(tau).subst_scale(q, n)
    return total[n]


def q_bruteforce(table: CurveTable, A0: HomologyClass, n: int, f: USeries | None = None) -> Fraction:
    """Sum over multiplicity assignments m_C with sum m_C q_C = n of prod r(C, m_C)."""
    family = _torus_family(f, n)
    curves = []
    for torus in table.tori:
        base, q = primitive_part(torus.cls)
        if base == A0 and q <= n:
            curves.append((q, family[torus.type].pow(torus.sign)))

    def rec(i, left):
        if i == len(curves):
            return Fraction(1) if left == 0 else Fraction(0)
        q, fc = curves[i]
        return sum((fc[m] * rec(i + 1, left - m * q) for m in range(left // q + 1)), Fraction(0))

    return rec(0, n)


def taubes_gr0_closed(table: CurveTable, A: Sequence[int], f: USeries | None = None,
                      brute_q_up_to: int = 6) -> int:
    """Gr_0(A) as a sum over admissible decompositions of R(y') Q(y'').

    Every decomposition is enumerated and its double-point count split into
    self, node and cross terms; each must be nonnegative, and their total
    must match d_A minus the decomposition's constraint count.  Q(n, A0) is
    recomputed by brute force for n <= ``brute_q_up_to``.
    """
    table.validate()
    problems = admissibility_problems(table)
    if problems:
        raise DomainError("table outside closed-form hypotheses: " + "; ".join(problems))
    model = table.model
    A = model.check(A)
    top = d_A(model, A)
    if top != d_formula(model, A):
        raise DomainError(f"class {list(A)}: d_A convention {top} differs from formula "
                          f"{d_formula(model, A)}")
    if top < 0:
        raise DomainError(f"class {list(A)} has d_A = {top} < 0")
    q_cache: dict[tuple[HomologyClass, int], Fraction] = {}

    def Q(A0, n):
        key = (A0, n)
        if key not in q_cache:
            value = q_closed(table, A0, n, f)
            if n <= brute_q_up_to:
                brute = q_bruteforce(table, A0, n, f)
                if brute != value:
                    raise InvariantError(f"Q({n}, {list(A0)}): product {value} != multiset sum {brute}")
            q_cache[key] = value
        return q_cache[key]

    total = Fraction(0)
    for y in decompositions(table, A):
        terms = double_point_terms(model, y)
        for name, value in terms:
            if value < 0:
                raise InvariantError(f"class {list(A)}: negative double-point term {name} = {value}")
        delta_total = sum(v for _, v in terms)
        if top - sum(n * atom.d for atom, n in y) != delta_total:
            raise InvariantError(f"class {list(A)}: double-point expansion does not add up")
        if delta_total:
            continue
        R = Fraction(factorial(top))
        Qv = Fraction(1)
        for atom, n in y:
            if atom.kind is ClassKind.TOROIDAL:
                Qv *= Q(atom.cls, n)
            else:
                R *= Fraction(atom.weight ** n, factorial(n) * factorial(atom.d) ** n)
        total += R * Qv
    if total.denominator != 1:
        raise InvariantError(f"closed-form Gr_0({list(A)}) = {total} is not integral")
    return total.numerator


def candidate_classes(table: CurveTable, torder: int) -> list[HomologyClass]:
    """Nonzero nonnegative combinations of table classes with grade <= torder."""
    model = table.model
    atoms = table.atom_classes()
    seen = {model.zero()}
    frontier = [model.zero()]
    while frontier:
        nxt = []
        for base in frontier:
            for a in atoms:
                c = tuple(x + y for x, y in zip(base, a))
                if c not in seen and model.grade(c) <= torder:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    seen.discard(model.zero())
    return sorted(seen, key=lambda A: (model.grade(A), A))


def gr0_in_bounds(model: ManifoldModel, A: HomologyClass, sorder: int) -> bool:
    try:
        top = d_A(model, A)
        return top == d_formula(model, A) and 0 <= top <= sorder
    except DomainError:
        return False


# ---------------------------------------------------------------------------
# the main identity
# ---------------------------------------------------------------------------


@dataclass
class TheoremReport:
    torder: int
    sorder: int
    gt: Series
    rt: Series
    equal: bool
    first_difference: tuple | None
    non_integral: list[tuple[HomologyClass, int, Fraction]] = field(default_factory=list)
    gr0_checks: list[tuple[HomologyClass, int, int]] = field(default_factory=list)
    gr0_skipped: str | None = None

    @property
    def gr0_failures(self) -> list[tuple[HomologyClass, int, int]]:
        return [row for row in self.gr0_checks if row[1] != row[2]]

    @property
    def gr0_integral(self) -> bool:
        return all(dl != 0 for _, dl, _ in self.non_integral)

    @property
    def passed(self) -> bool:
        """Series equal, every Gr_0 integral, closed form agrees wherever checked.

        Non-integral entries with delta > 0 are reported but do not fail the
        check: exp(c t_A) alone gives c^2/2 at t_{2A}.
        """
        return self.equal and self.gr0_integral and not self.gr0_failures

    def summary(self) -> dict:
        out = {
            "torder": self.torder,
            "sorder": self.sorder,
            "series_equal": self.equal,
            "gr0_integral": self.gr0_integral,
            "non_integral": [{"class": list(A), "delta": dl, "value": str(v)}
                             for A, dl, v in self.non_integral],
            "gr0_checked": len(self.gr0_checks),
            "gr0_failures": [{"class": list(A), "extracted": e, "closed": c}
                             for A, e, c in self.gr0_failures],
            "passed": self.passed,
        }
        if self.first_difference is not None:
            m, a, b = self.first_difference
            out["first_difference"] = {"class": list(m.cls), "s": m.sdeg,
                                       "gt": str(a), "rt": str(b)}
        if self.gr0_skipped:
            out["gr0_skipped"] = self.gr0_skipped
        return out


def verify_main_theorem(table: CurveTable, torder: int, sorder: int,
                        F: USeries | None = None, check_gr0: bool = True) -> TheoremReport:
    """Build GT with f = f_from_F(F) and RT with F, compare, and cross-check Gr_0."""
    F = mobius_F(torder) if F is None else F
    f = f_from_F(F, torder)
    base = taubes_defaults(torder)
    gt = build_GT(table, GenFuncChoice(base.e, base.g, f, Flavor.TAUBES_F), torder, sorder)
    rt = build_RT(table, GenFuncChoice(base.e, base.g, F, Flavor.RUAN_TIAN_F), torder, sorder)
    diff = gt.first_difference(rt)
    report = TheoremReport(torder, sorder, gt, rt, diff is None, diff)
    report.non_integral = sorted(set(non_integral_entries(gt)) | set(non_integral_entries(rt)))
    if not check_gr0:
        report.gr0_skipped = "not requested"
        return report
    problems = admissibility_problems(table)
    if problems:
        report.gr0_skipped = "; ".join(problems)
        return report
    for A in candidate_classes(table, torder):
        if not gr0_in_bounds(table.model, A, sorder):
            continue
        report.gr0_checks.append((A, extract(gt, A, 0), taubes_gr0_closed(table, A, f)))
    return report
