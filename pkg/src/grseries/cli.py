"""Command-line front end.

Exit codes: 0 success, 1 an identity check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from .builders import (CurveTable, ExceptionalEntry, GenericEntry, build_GT, build_RT,
                       expansion, verify_main_theorem)
from .errors import DomainError, InvariantError
from .genfuncs import (check_prodF, f_from_F, mobius_F, ruan_tian_defaults, taubes_defaults,
                       wall_crossing_family)
from .homology import ManifoldModel
from .lattices import (TorusData, census, phi_closed, phi_lattice, signed_sum_bruteforce,
                       signed_sum_closed)
from .powerseries import USeries, format_fraction
from .samples import random_table

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

_CLASS = {"type": "array", "items": {"type": "integer"}}

INPUT_SCHEMA = {
    "type": "object",
    "required": ["model"],
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "required": ["rank", "form", "kappa", "grading"],
            "additionalProperties": False,
            "properties": {
                "rank": {"type": "integer", "minimum": 1},
                "form": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                "kappa": _CLASS,
                "grading": _CLASS,
            },
        },
        "table": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "generic": {"type": "array", "items": {
                    "type": "object", "required": ["class", "counts"], "additionalProperties": False,
                    "properties": {
                        "class": _CLASS,
                        "counts": {"type": "object",
                                   "patternProperties": {"^[0-9]+$": {"type": "integer"}},
                                   "additionalProperties": False},
                    }}},
                "exceptional": {"type": "array", "items": {
                    "type": "object", "required": ["class", "count"], "additionalProperties": False,
                    "properties": {"class": _CLASS, "count": {"type": "integer"}}}},
                "tori": {"type": "array", "items": {
                    "type": "object", "required": ["class", "sign"], "additionalProperties": False,
                    "properties": {
                        "class": _CLASS,
                        "sign": {"enum": [1, -1]},
                        "type": {"type": "integer", "minimum": 0, "maximum": 3},
                        "signs": {"type": "array", "items": {"enum": [1, -1]},
                                  "minItems": 3, "maxItems": 3},
                    }}},
            },
        },
    },
}


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: Path | None = None
    torder: int = 8
    sorder: int | None = None
    max_m: int = 200
    seed: int | None = None
    trials: int = 1
    out: Path | None = None
    format: str = "text"


# ---------------------------------------------------------------------------
# (de)serialisation
# ---------------------------------------------------------------------------


def table_from_json(doc: dict) -> CurveTable:
    try:
        jsonschema.validate(doc, INPUT_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"schema violation at {where}: {exc.message}") from None
    m = doc["model"]
    try:
        model = ManifoldModel(m["rank"], tuple(map(tuple, m["form"])), tuple(m["kappa"]),
                              tuple(m["grading"]))
        t = doc.get("table", {})
        table = CurveTable(model)
        for g in t.get("generic", []):
            table.generic.append(GenericEntry(model.check(g["class"]),
                                              {int(d): c for d, c in g["counts"].items()}))
        for e in t.get("exceptional", []):
            table.exceptional.append(ExceptionalEntry(model.check(e["class"]), e["count"]))
        for c in t.get("tori", []):
            cls = model.check(c["class"])
            if "signs" in c:
                torus = TorusData.with_signs(cls, c["sign"], c["signs"])
                if "type" in c and c["type"] != torus.type:
                    raise DomainError(f"torus {list(cls)}: type {c['type']} disagrees with signs")
            elif "type" in c:
                torus = TorusData.of_type(cls, c["sign"], c["type"])
            else:
                raise DomainError(f"torus {list(cls)} needs a type or signs")
            table.tori.append(torus)
        return table.validate()
    except DomainError as exc:
        raise InputError(str(exc)) from None


def table_to_json(table: CurveTable) -> dict:
    model = table.model
    return {
        "model": {"rank": model.rank, "form": [list(r) for r in model.form],
                  "kappa": list(model.kappa), "grading": list(model.grading)},
        "table": {
            "generic": [{"class": list(g.cls),
                         "counts": {str(d): c for d, c in sorted(g.counts.items())}}
                        for g in table.generic],
            "exceptional": [{"class": list(e.cls), "count": e.count} for e in table.exceptional],
            "tori": [{"class": list(t.cls), "sign": t.sign, "type": t.type,
                      "signs": list(t.signs)} for t in table.tori],
        },
    }


def dumps_table(table: CurveTable) -> str:
    return json.dumps(table_to_json(table), indent=2, sort_keys=True) + "\n"


def load_table(path: Path) -> CurveTable:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return table_from_json(doc)


def _value(v):
    return v if isinstance(v, int) else format_fraction(v)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_build(kind: str, cfg: RunConfig) -> tuple[int, str]:
    table = load_table(cfg.input)
    sorder = cfg.torder if cfg.sorder is None else cfg.sorder
    if kind == "gt":
        series = build_GT(table, taubes_defaults(cfg.torder), cfg.torder, sorder)
    else:
        series = build_RT(table, ruan_tian_defaults(cfg.torder), cfg.torder, sorder)
    rows = expansion(series, strict=False)
    if cfg.format == "json":
        doc = {"kind": kind, "torder": cfg.torder, "sorder": sorder,
               "series": series.to_json(),
               "expansion": [{"class": list(A), "delta": dl, "value": _value(v)}
                             for (A, dl), v in rows.items()]}
        return EXIT_OK, json.dumps(doc, indent=2) + "\n"
    lines = [series.to_text(), "# expansion: class delta value"]
    lines += [f"[{','.join(map(str, A))}] {dl} {_value(v)}" for (A, dl), v in rows.items()]
    return EXIT_OK, "\n".join(lines) + "\n"


def _check_line(name: str, ok: bool, detail: str = "") -> dict:
    return {"check": name, "passed": ok, "detail": detail}


def verify_lattice_census(cfg: RunConfig) -> list[dict]:
    checks = []
    bad = None
    for m in range(1, cfg.max_m + 1):
        try:
            census(m)
        except InvariantError as exc:
            bad = str(exc)
            break
    checks.append(_check_line(f"census identities for m <= {cfg.max_m}", bad is None, bad or ""))
    bad = None
    limit = min(cfg.max_m, 64)
    for m in range(1, limit + 1):
        for sign in (1, -1):
            for k in range(4):
                torus = TorusData.of_type((1,), sign, k)
                a, b = signed_sum_bruteforce(m, torus), signed_sum_closed(m, torus)
                if a != b and bad is None:
                    bad = f"m={m}, sign={sign}, type={k}: {a} != {b}"
    checks.append(_check_line(f"signed sums match closed form for m <= {limit}", bad is None, bad or ""))
    return checks


def verify_genfunc(cfg: RunConfig) -> list[dict]:
    n = cfg.torder
    F = mobius_F(n)
    ok, bad = check_prodF(F, n)
    checks = [_check_line(f"prod F(t^k) = exp(t) mod t^{n + 1}", ok,
                          "" if ok else f"first failing degree {bad}")]
    f = f_from_F(F, n)
    bad = f.first_difference(USeries.geometric(n))
    checks.append(_check_line(f"f_from_F(mobius F) = 1/(1-t) mod t^{n + 1}", bad is None,
                              "" if bad is None else f"first failing degree {bad}"))
    t = USeries.variable(n)
    one = USeries.one(n)
    expected = [USeries.geometric(n), one + t,
                (one + t) / (one + t.subst_scale(2)),
                (one + t) * (one - t.subst_scale(2)) / (one + t.subst_scale(2))]
    for k, (got, want) in enumerate(zip(wall_crossing_family(USeries.geometric(n)), expected)):
        bad = got.first_difference(want)
        checks.append(_check_line(f"f_{k} at f = 1/(1-t)", bad is None,
                                  "" if bad is None else f"first failing degree {bad}"))
    return checks


def verify_phi(cfg: RunConfig) -> list[dict]:
    n = cfg.torder
    F = mobius_F(n)
    f = f_from_F(F, n)
    checks = []
    for sign in (1, -1):
        for k in range(4):
            torus = TorusData.of_type((1,), sign, k)
            bad = phi_lattice(torus, F, n).first_difference(phi_closed(torus, f, n))
            checks.append(_check_line(f"phi sign={sign:+d} type={k}", bad is None,
                                      "" if bad is None else f"first failing degree {bad}"))
    return checks


def verify_theorem(cfg: RunConfig) -> list[dict]:
    sorder = cfg.torder if cfg.sorder is None else cfg.sorder
    if cfg.input is not None:
        tables = [("input", load_table(cfg.input))]
    elif cfg.seed is not None:
        rng = random.Random(cfg.seed)
        tables = [(f"seed {cfg.seed} trial {i}", random_table(rng, rng.choice([2, 3])))
                  for i in range(cfg.trials)]
    else:
        raise InputError("verify theorem needs --input or --seed")
    checks = []
    for name, table in tables:
        report = verify_main_theorem(table, cfg.torder, sorder)
        summary = report.summary()
        detail = "" if report.passed else json.dumps(summary, sort_keys=True)
        checks.append(_check_line(f"GT = RT ({name})", report.passed, detail))
    return checks


VERIFIERS = {
    "lattice-census": verify_lattice_census,
    "genfunc": verify_genfunc,
    "phi": verify_phi,
    "theorem": verify_theorem,
}


def cmd_verify(which: str, cfg: RunConfig) -> tuple[int, str]:
    checks = VERIFIERS[which](cfg)
    ok = all(c["passed"] for c in checks)
    if cfg.format == "json":
        text = json.dumps({"verify": which, "passed": ok, "checks": checks}, indent=2) + "\n"
    else:
        lines = [f"{'PASS' if c['passed'] else 'FAIL'}  {c['check']}"
                 + (f"  ({c['detail']})" if c["detail"] else "") for c in checks]
        lines.append("all checks passed" if ok else "some checks FAILED")
        text = "\n".join(lines) + "\n"
    return (EXIT_OK if ok else EXIT_FAIL), text


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grseries", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--order", dest="torder", type=_nonneg, default=8,
                       help="truncation order in the grading (default 8)")
        p.add_argument("--s-order", dest="sorder", type=_nonneg, default=None,
                       help="truncation order in s (default: same as --order)")
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")

    b = sub.add_parser("build", help="build the GT or RT series of a curve table")
    b.add_argument("kind", choices=["gt", "rt"])
    b.add_argument("--input", type=Path, required=True)
    common(b)

    v = sub.add_parser("verify", help="run an identity suite")
    v.add_argument("which", choices=sorted(VERIFIERS))
    v.add_argument("--input", type=Path, default=None)
    v.add_argument("--max-m", dest="max_m", type=_positive, default=200)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--trials", type=_positive, default=1)
    common(v)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    cfg = RunConfig(command=args.command, input=args.input, torder=args.torder,
                    sorder=args.sorder, out=args.out, format=args.format,
                    max_m=getattr(args, "max_m", 200), seed=getattr(args, "seed", None),
                    trials=getattr(args, "trials", 1))
    try:
        if args.command == "build":
            code, text = cmd_build(args.kind, cfg)
        else:
            code, text = cmd_verify(args.which, cfg)
    except (InputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if cfg.out is not None:
        cfg.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
