"""Command-line front end: ``matroid-operads <command> [options]``.

Every command prints one JSON document on stdout.  Exit status is 0 on
success, 2 for invalid input (including unknown options) and 1 when an
internal consistency check fails.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional

from . import catalog as C
from .building import BuildingError, check_operad_laws, enumerate_nested_sets
from .fy import FYError, fy_algebra
from .lattice import LatticeError
from .leray import VARIANTS, LerayError, koszul_report
from .operad import KINDS, OperadError
from .shuffle import ShuffleError

CACHE_ENV = "MATROID_OPERADS_CACHE"
CACHE_VERSION = 1
INPUT_ERRORS = (C.InputError, LatticeError, BuildingError, FYError, LerayError, OperadError, ShuffleError)


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; also report them as JSON."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(json.dumps({"error": {"type": "usage", "message": message}}))
        sys.exit(2)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=_jsonable)


# -- input ----------------------------------------------------------------

def _parse_order(text: Optional[str]):
    if text is None:
        return None
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise C.InputError(f"atom order must be comma-separated integers, got {text!r}")


def _input_spec(args) -> dict:
    """Canonical description of the input, with file contents inlined (used for hashing too)."""
    if args.family is None and args.lattice is None:
        raise C.InputError("give --family or --lattice")
    if args.family is not None and args.lattice is not None:
        raise C.InputError("give only one of --family and --lattice")
    spec = {"family": args.family, "lattice": None, "building": args.building, "members": None,
            "atom_order": _parse_order(getattr(args, "atom_order", None))}
    if args.lattice is not None:
        spec["lattice"] = C.load_json(args.lattice)
    if args.building not in C.BUILDING_CHOICES:
        data = C.load_json(args.building)
        if isinstance(data, dict):
            data = data.get("members")
        if not isinstance(data, list):
            raise C.InputError("a building set file holds a list of members or {'members': [...]}")
        spec["building"] = "explicit"
        spec["members"] = data
    return spec


def _resolve(spec: dict):
    return C.resolve(spec["family"], spec["lattice"], spec["building"], spec["members"], spec["atom_order"])


# -- commands -------------------------------------------------------------

def cmd_lattice(args, spec):
    L, _ = _resolve(dict(spec, building="minimal", members=None))
    out = L.to_json()
    out["size"] = L.size
    out["rk"] = L.rk
    return out


def cmd_building_sets(args, spec):
    L, B = _resolve(spec)
    out = {"selected": spec["building"], "building_set": B.to_json()}
    if args.all:
        for choice in C.BUILDING_CHOICES:
            try:
                _, Bc = _resolve(dict(spec, building=choice, members=None))
                out[choice] = Bc.to_json()
            except C.InputError:
                pass
    return out


def cmd_nested(args, spec):
    L, B = _resolve(spec)
    sets = enumerate_nested_sets(B, irreducible_only=args.irreducible, max_size=args.max_size)
    out = {"count": len(sets), "nested_sets": [sorted(S.members) for S in sets]}
    if args.laws:
        out["laws"] = check_operad_laws(B, args.max_size or 3)
    return out


def cmd_fy(args, spec):
    L, B = _resolve(spec)
    A = fy_algebra(B)
    out = {}
    plain = not (args.hilbert or args.basis or args.pairing or args.oracle)
    if args.hilbert or plain:
        out["hilbert"] = A.hilbert
    if plain:
        out["dim"] = A.dim
    if args.basis:
        out["basis"] = A.to_json(basis=True)["basis"]
    if args.pairing:
        res = A.pd_pairing()
        out["pairing"] = {"nondegenerate": res["nondegenerate"], "top_dimension": A.hilbert[A.top_degree]}
    if args.oracle:
        out["oracle"] = C.check_fy(B)
    return out


def cmd_os(args, spec):
    L, _ = _resolve(dict(spec, building="minimal", members=None))
    res = C.check_os(L)
    out = {}
    plain = not (args.hilbert or args.projective)
    if args.hilbert or plain:
        out["hilbert"] = res["hilbert"]
    if args.projective or plain:
        ph = list(res["projective_hilbert"])
        while len(ph) > 1 and ph[-1] == 0:
            ph.pop()
        out["projective_hilbert"] = ph
    if plain:
        out["oracle_agrees"] = res["pass"]
    return out


def cmd_operad_check(args, spec):
    L, B = _resolve(spec)
    kinds = args.kind or list(KINDS)
    if not B.irreducible:
        raise C.InputError("structure maps are checked on irreducible building sets")
    return C.check_operads(B, kinds, args.max_automorphisms)


def cmd_groebner_check(args, spec):
    # the atom order here permutes the direction used by the monomial order,
    # not the lattice itself
    order = spec["atom_order"]
    L, B = _resolve(dict(spec, atom_order=None))
    if order is not None and sorted(order) != list(range(L.n_atoms)):
        raise C.InputError(f"atom order must be a permutation of 0..{L.n_atoms - 1}")
    orders = [tuple(order)] if order is not None else None
    return C.check_groebner(B, orders, count=args.orders)


def cmd_koszul(args, spec):
    L, B = _resolve(spec)
    if not B.irreducible:
        raise C.InputError("Leray models need an irreducible building set")
    return koszul_report(B, args.variant)


def _run_entry(payload):
    entry, only, full = payload
    return C.run_entry(entry, only, full)


def cmd_catalog(args, spec):
    entries = C.load_catalog(args.catalog) if args.catalog else C.default_catalog()
    only = None
    if args.only:
        only = [x for part in args.only for x in part.split(",") if x]
        unknown = [x for x in only if x not in C.CHECKS]
        if unknown:
            raise C.InputError(f"unknown checks {unknown}; choose from {sorted(C.CHECKS)}")
    jobs = [(e, only, args.full) for e in entries]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_entry, jobs))
    else:
        reports = [_run_entry(j) for j in jobs]
    return {"entries": reports, "failed": [r["entry"]["name"] for r in reports if not r["pass"]],
            "pass": all(r["pass"] for r in reports)}


COMMANDS = {
    "lattice": cmd_lattice,
    "building-sets": cmd_building_sets,
    "nested": cmd_nested,
    "fy": cmd_fy,
    "os": cmd_os,
    "operad-check": cmd_operad_check,
    "groebner-check": cmd_groebner_check,
    "koszul": cmd_koszul,
    "catalog": cmd_catalog,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
    common.add_argument("--cache", metavar="DIR", help=f"result cache directory (or ${CACHE_ENV})")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized helpers; never changes results")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--family", help="boolean:N, partition:N, path:N, cycle:N or complete:N")
    source.add_argument("--lattice", metavar="FILE", help="flats JSON or graph JSON")
    source.add_argument("--building", default="minimal",
                        help="minimal, maximal, tubes, or a JSON file listing the members")
    source.add_argument("--atom-order", help="permutation of the atoms, e.g. 2,0,1")

    p = _Parser(prog="matroid-operads", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("lattice", parents=[common, source], help="lattice of flats")
    s = sub.add_parser("building-sets", parents=[common, source], help="building sets")
    s.add_argument("--all", action="store_true", help="also list every standard choice")
    s = sub.add_parser("nested", parents=[common, source], help="nested sets")
    s.add_argument("--irreducible", action="store_true")
    s.add_argument("--max-size", type=int)
    s.add_argument("--laws", action="store_true", help="check composition laws")
    s = sub.add_parser("fy", parents=[common, source], help="FY ring")
    s.add_argument("--hilbert", action="store_true")
    s.add_argument("--basis", action="store_true")
    s.add_argument("--pairing", action="store_true")
    s.add_argument("--oracle", action="store_true")
    s = sub.add_parser("os", parents=[common, source], help="Orlik-Solomon algebra")
    s.add_argument("--hilbert", action="store_true")
    s.add_argument("--projective", action="store_true")
    s = sub.add_parser("operad-check", parents=[common, source], help="structure map relations")
    s.add_argument("--kind", action="append", choices=KINDS)
    s.add_argument("--max-automorphisms", type=int)
    s = sub.add_parser("groebner-check", parents=[common, source], help="quadratic Groebner basis")
    s.add_argument("--orders", type=int, default=3, help="number of atom orders when none is given")
    s = sub.add_parser("koszul", parents=[common, source], help="Leray model homology")
    s.add_argument("--variant", choices=VARIANTS, default=VARIANTS[0])
    s = sub.add_parser("catalog", parents=[common], help="run checks on a catalog")
    s.add_argument("--catalog", metavar="FILE", help="JSON catalog (default: builtin)")
    s.add_argument("--only", action="append", help=f"checks to run: {', '.join(C.CHECKS)}")
    s.add_argument("--full", action="store_true", help="do not skip large instances")
    s.add_argument("--jobs", type=int, default=1)
    return p


# -- cache and output ---------------------------------------------------------

def cache_key(command: str, spec, args) -> str:
    extra = {k: v for k, v in sorted(vars(args).items())
             if k not in ("pretty", "cache", "seed", "command", "family", "lattice", "building",
                          "atom_order", "catalog")}
    if command == "catalog" and args.catalog:
        extra["catalog"] = C.load_json(args.catalog)
    blob = dumps({"version": CACHE_VERSION, "command": command, "input": spec, "options": extra})
    return hashlib.sha256(blob.encode()).hexdigest()


def pretty(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if "entries" in obj and isinstance(obj["entries"], list):
            return _catalog_table(obj)
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {dumps(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(f"{pad}- {dumps(v)}" if _flat(v) else pretty(v, indent + 1) for v in obj)
    return pad + dumps(obj)


def _flat(v) -> bool:
    if isinstance(v, dict):
        return False
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and _flat(x)) for x in v)
    return True


def _catalog_table(obj) -> str:
    names = []
    for r in obj["entries"]:
        for k in r.get("checks", {}):
            if k not in names:
                names.append(k)
    width = max([len(r["entry"]["name"]) for r in obj["entries"]] + [5])
    head = "entry".ljust(width) + "  " + "  ".join(n.ljust(6) for n in names)
    lines = [head, "-" * len(head)]
    for r in obj["entries"]:
        if "error" in r:
            cells = ["input error: " + r["error"]["message"]]
        else:
            cells = []
            for n in names:
                c = r["checks"].get(n)
                mark = "-" if c is None else ("skip" if "skipped" in c else ("ok" if c["pass"] else "FAIL"))
                cells.append(mark.ljust(max(6, len(n))))
        lines.append(r["entry"]["name"].ljust(width) + "  " + "  ".join(cells))
    lines.append("all checks passed" if obj["pass"] else f"failed: {', '.join(obj['failed'])}")
    return "\n".join(lines)


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    random.seed(args.seed)
    try:
        spec = None if args.command == "catalog" else _input_spec(args)
        cache_dir = args.cache or os.environ.get(CACHE_ENV)
        text = None
        path = None
        if cache_dir:
            path = os.path.join(cache_dir, cache_key(args.command, spec, args) + ".json")
            if os.path.exists(path):
                with open(path) as fh:
                    text = fh.read()
        if text is None:
            result = COMMANDS[args.command](args, spec)
            text = dumps(result)
            if path:
                os.makedirs(cache_dir, exist_ok=True)
                tmp = path + ".tmp"
                with open(tmp, "w") as fh:
                    fh.write(text)
                os.replace(tmp, path)
        result = json.loads(text)
    except INPUT_ERRORS as exc:
        payload = {"type": type(exc).__name__, "message": str(exc)}
        w = getattr(exc, "witness", None)
        if w is not None:
            payload["witness"] = json.loads(dumps(w))
        print(dumps({"error": payload}))
        return 2
    except AssertionError as exc:
        print(dumps({"error": {"type": "internal", "message": str(exc)}}))
        return 1
    print(pretty(result) if args.pretty else text)
    if args.command == "catalog" and not result["pass"]:
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
