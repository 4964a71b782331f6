"""Batch command-line interface.

Commands: ``check`` (classify one bracket), ``fibre`` (linearize at a
point), ``iso`` (verify or search for isomorphisms), ``classify``
(finite-field sweeps with orbit counts), ``catalog`` (list or emit
built-ins).  All file I/O uses the JSON formats of the library; reports
also render as aligned text tables on stdout.

Exit codes: 0 when the run succeeds and the queried property holds, 1 when
the input is well-formed but the property fails (or no witness exists),
2 on input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Optional

from . import catalog, sweeps
from .affgebra import (
    BiAffineBracket,
    condition_report,
    is_affine_antisymmetric,
    is_affine_leibniz,
    is_derivative,
    is_homogeneous,
    is_lie_affgebra,
    is_lie_type,
    satisfies_affine_jacobi,
)
from .exactmath import FieldSpec, Mat, Vec
from .leibalg import LeibnizAlgebra
from .morphism import SearchReport, is_affgebra_iso, search_iso

__all__ = ["RunReport", "main"]

USAGE_ERROR = 2


class InputError(Exception):
    pass


@dataclass
class RunReport:
    """One command's outcome: per-condition booleans (keyed by condition
    label), overall verdicts, and an optional witness."""

    command: str
    conditions: dict = dc_field(default_factory=dict)
    verdicts: dict = dc_field(default_factory=dict)
    witness: Optional[dict] = None
    elapsed: float = 0.0

    def __post_init__(self):
        v = self.verdicts
        if "derivative" in v and "homogeneous" in v and v["derivative"] and not v["homogeneous"]:
            raise AssertionError("inconsistent verdicts: derivative but not homogeneous")
        if {"antisymmetric", "lie-type", "lie-affgebra"} <= v.keys():
            if v["antisymmetric"] and (v["lie-type"] != v["lie-affgebra"]):
                raise AssertionError(
                    "inconsistent verdicts: antisymmetric data must agree on lie-type"
                )

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "conditions": self.conditions,
            "verdicts": self.verdicts,
            "witness": self.witness,
            "elapsed_seconds": round(self.elapsed, 6),
        }

    def render(self) -> str:
        rows = [("condition", label, "pass" if ok else "FAIL") for label, ok in self.conditions.items()]
        rows += [("verdict", label, "yes" if ok else "no") for label, ok in self.verdicts.items()]
        if not rows:
            return "(empty report)"
        w0 = max(len(r[0]) for r in rows)
        w1 = max(len(r[1]) for r in rows)
        lines = [f"{a:<{w0}}  {b:<{w1}}  {c}" for a, b, c in rows]
        if self.witness is not None:
            lines.append(f"witness: {json.dumps(self.witness, sort_keys=True)}")
        lines.append(f"elapsed: {self.elapsed:.3f}s")
        return "\n".join(lines)


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_bracket(path: str) -> BiAffineBracket:
    obj = _load_json(path)
    try:
        return BiAffineBracket.from_json(obj)
    except Exception as exc:
        raise InputError(f"bad bracket data in {path}: {exc}") from exc


def _write_output(args, obj) -> None:
    text = canonical_dumps(obj)
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_field(text: str) -> FieldSpec:
    text = text.strip().lower()
    if text in ("q", "rationals"):
        return FieldSpec("Q")
    if text.startswith("gf:"):
        try:
            return FieldSpec("GF", int(text[3:]))
        except ValueError as exc:
            raise InputError(f"bad field spec {text!r}: {exc}") from exc
    raise InputError(f"bad field spec {text!r} (expected 'q' or 'gf:<prime>')")


def _parse_point(field: FieldSpec, text: str, dim: int) -> Vec:
    text = text.strip()
    if text.startswith("["):
        entries = json.loads(text)
    else:
        entries = [t for t in text.split(",") if t != ""]
    if len(entries) != dim:
        raise InputError(f"point has {len(entries)} coordinates, expected {dim}")
    try:
        return Vec(field, tuple(field.parse(e) for e in entries))
    except Exception as exc:
        raise InputError(f"bad point {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    K = _load_bracket(args.input)
    start = time.perf_counter()
    conditions = condition_report(K)
    verdicts = {
        "affine-leibniz": is_affine_leibniz(K),
        "derivative": is_derivative(K),
        "homogeneous": is_homogeneous(K),
        "lie-type": is_lie_type(K),
        "antisymmetric": is_affine_antisymmetric(K),
        "affine-jacobi": satisfies_affine_jacobi(K),
    }
    verdicts["lie-affgebra"] = verdicts["antisymmetric"] and verdicts["affine-jacobi"]
    report = RunReport(
        command="check",
        conditions=conditions,
        verdicts=verdicts,
        elapsed=time.perf_counter() - start,
    )
    print(report.render())
    _write_output(args, report.to_json())
    wanted = {
        "all": "affine-leibniz",
        "general": "affine-leibniz",
        "derivative": "derivative",
        "homogeneous": "homogeneous",
        "lie": "lie-type",
    }[args.type]
    return 0 if verdicts[wanted] else 1


# ---------------------------------------------------------------------------
# fibre
# ---------------------------------------------------------------------------


def cmd_fibre(args) -> int:
    K = _load_bracket(args.input)
    o = _parse_point(K.field, args.at, K.dim)
    fibre = K.fibre_at(o)
    out = fibre.rebuild().to_json()
    out["at"] = o.to_json()
    print(canonical_dumps(out), end="")
    _write_output(args, out)
    return 0


# ---------------------------------------------------------------------------
# iso
# ---------------------------------------------------------------------------


def cmd_iso(args) -> int:
    K = _load_bracket(args.left)
    K2 = _load_bracket(args.right)
    start = time.perf_counter()
    if args.witness:
        wobj = _load_json(args.witness)
        try:
            psi = Mat.from_json(K.field, wobj["psi"])
            q = Vec.from_json(K.field, wobj["q"])
        except Exception as exc:
            raise InputError(f"bad witness file: {exc}") from exc
        ok = is_affgebra_iso(K, K2, psi, q)
        report = RunReport(
            command="iso",
            verdicts={"isomorphic": ok},
            witness={"psi": psi.to_json(), "q": q.to_json()} if ok else None,
            elapsed=time.perf_counter() - start,
        )
        print(report.render())
        _write_output(args, report.to_json())
        return 0 if ok else 1
    if K.field.kind != "GF":
        raise InputError("--search needs a finite field; over Q only verification is supported")
    result: SearchReport = search_iso(K, K2, max_candidates=args.max_candidates)
    report = RunReport(
        command="iso",
        verdicts={"isomorphic": result.found},
        witness=result.to_json()["witness"],
        elapsed=time.perf_counter() - start,
    )
    print(report.render())
    print(f"checked: {result.checked}")
    _write_output(args, result.to_json())
    return 0 if result.found else 1


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------


def _classify_shard(payload) -> list:
    algebra_json, kind, shard, nshards, cap = payload
    L = LeibnizAlgebra.from_json(algebra_json)
    if kind == "homogeneous":
        return list(sweeps.homogeneous_data(L, shard=(shard, nshards)))
    if kind == "derivative":
        data = sweeps.homogeneous_data(L, shard=(shard, nshards))
        return [d for d in data if is_derivative(sweeps.datum_to_bracket(L, d))]
    if kind == "lie":
        return sweeps.lie_type_data(L, shard=(shard, nshards))
    if kind == "general":
        return list(sweeps.general_data(L, max_candidates=cap, shard=(shard, nshards)))
    raise InputError(f"unknown classify type {kind!r}")


def cmd_classify(args) -> int:
    field = _parse_field(args.field)
    if field.kind != "GF":
        raise InputError("classify sweeps need a finite field (--field gf:<prime>)")
    try:
        L = catalog.algebra(args.fibre, field)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    start = time.perf_counter()
    jobs = max(1, args.jobs)
    payloads = [
        (L.to_json(), args.type, shard, jobs, args.max_candidates) for shard in range(jobs)
    ]
    if jobs == 1:
        shards = [_classify_shard(payloads[0])]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            shards = list(pool.map(_classify_shard, payloads))
    data = sorted({d for shard in shards for d in shard})
    orbits = sweeps.orbit_partition(L, data, max_candidates=args.max_candidates)
    elapsed = time.perf_counter() - start

    reps = [orbit[0] for orbit in orbits]
    out = {
        "fibre": args.fibre,
        "field": field.spec_to_json(),
        "type": args.type,
        "solutions": len(data),
        "orbits": len(orbits),
        "orbit_sizes": [len(orbit) for orbit in orbits],
        "representatives": [
            {
                "lambda": [list(rep[0][i * L.dim : (i + 1) * L.dim]) for i in range(L.dim)],
                "mu": [list(rep[1][i * L.dim : (i + 1) * L.dim]) for i in range(L.dim)],
                "s": list(rep[2]),
            }
            for rep in reps
        ],
        "elapsed_seconds": round(elapsed, 6),
    }
    print(f"fibre {args.fibre} over GF({field.p}), type {args.type}")
    print(f"solutions: {len(data)}")
    print(f"orbits:    {len(orbits)}")
    width = max((len(str(rep)) for rep in reps), default=0)
    for orbit in orbits:
        print(f"  size {len(orbit):>6}  rep {str(orbit[0]):<{width}}")
    _write_output(args, out)
    return 0


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def _parse_bindings(text: str) -> dict:
    out = {}
    if not text:
        return out
    for piece in text.split(","):
        if "=" not in piece:
            raise InputError(f"bad binding {piece!r} (expected name=value)")
        name, value = piece.split("=", 1)
        out[name.strip()] = value.strip()
    return out


def cmd_catalog(args) -> int:
    if args.action == "list":
        out = {
            "algebras": catalog.algebra_names(),
            "families": catalog.family_names(),
        }
        print("algebras:")
        for name in out["algebras"]:
            print(f"  {name}")
        print("families:")
        for name in out["families"]:
            fam = catalog.family(name)
            print(f"  {name:<28} fibre={fam.fibre:<8} type={fam.predicate}")
        _write_output(args, out)
        return 0

    field = _parse_field(args.field)
    name = args.name
    if name is None:
        raise InputError("catalog emit needs --name")
    if name in catalog.family_names():
        fam = catalog.family(name)
        bindings = _parse_bindings(args.bind or "")
        fibre = None
        if fam.fibre == "any":
            fibre = catalog.algebra(args.fibre or "L2", field)
        try:
            K = catalog.instantiate(fam, field, bindings, fibre=fibre)
        except catalog.ConstraintViolation as exc:
            raise InputError(f"constraint violated - {exc}") from exc
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        obj = K.to_json()
    else:
        try:
            obj = catalog.algebra(name, field).to_json()
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    print(canonical_dumps(obj), end="")
    _write_output(args, obj)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leibaff",
        description="Exact tools for Leibniz algebras and their affine extensions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="classify a bracket from JSON")
    p_check.add_argument("--input", "-i", required=True)
    p_check.add_argument(
        "--type",
        choices=["all", "general", "derivative", "homogeneous", "lie"],
        default="all",
    )
    p_check.add_argument("--output", "-o")
    p_check.set_defaults(func=cmd_check)

    p_fibre = sub.add_parser("fibre", help="linearization data at a base point")
    p_fibre.add_argument("--input", "-i", required=True)
    p_fibre.add_argument("--at", required=True, help="comma-separated coordinates")
    p_fibre.add_argument("--output", "-o")
    p_fibre.set_defaults(func=cmd_fibre)

    p_iso = sub.add_parser("iso", help="verify or search for an isomorphism")
    p_iso.add_argument("left")
    p_iso.add_argument("right")
    group = p_iso.add_mutually_exclusive_group(required=True)
    group.add_argument("--witness", help="JSON file with psi and q")
    group.add_argument("--search", action="store_true")
    p_iso.add_argument("--max-candidates", type=int, default=10**7)
    p_iso.add_argument("--output", "-o")
    p_iso.set_defaults(func=cmd_iso)

    p_cls = sub.add_parser("classify", help="finite-field sweep with orbit counts")
    p_cls.add_argument("--fibre", required=True)
    p_cls.add_argument("--field", required=True, help="gf:<prime>")
    p_cls.add_argument(
        "--type",
        choices=["general", "derivative", "homogeneous", "lie"],
        required=True,
    )
    p_cls.add_argument("--jobs", type=int, default=1)
    p_cls.add_argument("--max-candidates", type=int, default=10**7)
    p_cls.add_argument("--output", "-o")
    p_cls.set_defaults(func=cmd_classify)

    p_cat = sub.add_parser("catalog", help="list built-ins or emit one as JSON")
    p_cat.add_argument("action", choices=["list", "emit"])
    p_cat.add_argument("--name")
    p_cat.add_argument("--field", default="q")
    p_cat.add_argument("--bind", help="comma-separated name=value parameter bindings")
    p_cat.add_argument("--fibre", help="fibre algebra for fibre-generic families")
    p_cat.add_argument("--output", "-o")
    p_cat.set_defaults(func=cmd_catalog)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
