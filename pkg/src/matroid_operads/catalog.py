"""Catalog entries, input resolution and the per-entry checks.

Every check returns a JSON-ready dict with a ``pass`` flag.  Entries are
resolved lazily so that a broken input only affects its own entry.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from .building import (BuildingError, BuildingSet, check_operad_laws, enumerate_nested_sets,
                       maximal_building_set, minimal_building_set, tubes_building_set)
from .fy import FYError, fy_algebra, oracle_hilbert
from .lattice import (GraphInput, Lattice, LatticeError, build_boolean, build_from_flats, build_graphic,
                      build_partition, complete_graph, cycle_graph, path_graph)
from .leray import AFFINE, PROJECTIVE, LerayError, build_leray
from .operad import (FY, FYPD, KINDS, OS, OSBAR, OperadError, check_presentation_relations, fy_well_defined,
                     fypd_well_defined, os_algebra, os_well_defined)
from .os_algebra import os_oracle_hilbert
from .shuffle import (DirectedBuiltLattice, ShuffleError, atom_orders, check_admissibility, check_el,
                      verify_quadratic_gb)

BUILDING_CHOICES = ("minimal", "maximal", "tubes")


class InputError(ValueError):
    """Input that cannot be resolved to a built lattice (exit code 2)."""


GRAPHS = {"path": path_graph, "cycle": cycle_graph, "complete": complete_graph}


def parse_family(spec: str):
    """``boolean:3``, ``partition:4``, ``path:4``, ``cycle:4``, ``complete:4``.

    Returns ``(lattice, graph or None)``.
    """
    name, _, arg = spec.partition(":")
    try:
        n = int(arg)
    except ValueError:
        raise InputError(f"family {spec!r} needs an integer parameter, e.g. partition:3")
    if name == "boolean":
        return build_boolean(n), None
    if name == "partition":
        return build_partition(n), None
    if name in GRAPHS:
        if n < 2:
            raise InputError("graphs need at least two vertices")
        g = GRAPHS[name](n)
        return build_graphic(g), g
    raise InputError(f"unknown family {name!r}")


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}")


def lattice_from_data(data):
    """Flats JSON ``{"atoms", "flats"}`` or graph JSON ``{"vertices", "edges"}``."""
    if not isinstance(data, dict):
        raise InputError("lattice input must be a JSON object")
    if "flats" in data:
        return build_from_flats(data["flats"], data.get("atoms")), None
    if "edges" in data:
        g = GraphInput.from_json(data)
        return build_graphic(g), g
    raise InputError("lattice input needs either 'flats' or 'vertices'/'edges'")


def _label(a):
    # JSON turns tuple labels (edges, pairs) into lists
    return tuple(_label(x) for x in a) if isinstance(a, list) else a


def building_from_members(L: Lattice, members) -> BuildingSet:
    """Members given as atom-label lists (flats) or as element ids."""
    index = {frozenset(f): i for i, f in enumerate(L.flats())}
    ids = []
    for m in members:
        if isinstance(m, int):
            if not 0 <= m < L.size:
                raise InputError(f"element id {m} out of range")
            ids.append(m)
            continue
        if not isinstance(m, (list, tuple)):
            raise InputError(f"member {m!r} is neither an element id nor a list of atoms")
        try:
            key = frozenset(_label(a) for a in m)
        except TypeError:
            raise InputError(f"member {m!r} has an unusable atom label")
        if key not in index:
            raise InputError(f"{sorted(m, key=repr)} is not a flat")
        ids.append(index[key])
    return BuildingSet(L, ids)


@dataclass
class Entry:
    name: str
    family: Optional[str] = None
    lattice: Optional[dict] = None
    building: str = "minimal"
    members: Optional[list] = None
    atom_order: Optional[List[int]] = None
    _resolved: Optional[tuple] = field(default=None, repr=False)

    @classmethod
    def from_json(cls, data: dict, base_dir: str = ".") -> "Entry":
        if not isinstance(data, dict) or "name" not in data:
            raise InputError("catalog entries need a name")
        lat = data.get("lattice")
        if isinstance(lat, str):
            lat = {"file": os.path.join(base_dir, lat)}
        return cls(name=data["name"], family=data.get("family"), lattice=lat,
                   building=data.get("building", "minimal"), members=data.get("members"),
                   atom_order=data.get("atom_order"))

    def to_json(self) -> dict:
        out = {"name": self.name, "building": self.building}
        if self.family:
            out["family"] = self.family
        if self.lattice is not None:
            out["lattice"] = self.lattice
        if self.members is not None:
            out["members"] = self.members
        if self.atom_order is not None:
            out["atom_order"] = self.atom_order
        return out

    def resolve(self):
        """``(lattice, building set)``; raises InputError / LatticeError / BuildingError."""
        if self._resolved is None:
            self._resolved = resolve(self.family, self.lattice, self.building, self.members,
                                     self.atom_order)
        return self._resolved


def resolve(family: Optional[str], lattice: Optional[dict], building: str = "minimal",
            members=None, atom_order: Optional[Sequence[int]] = None):
    if (family is None) == (lattice is None):
        raise InputError("give exactly one of a family or a lattice input")
    if family is not None:
        L, g = parse_family(family)
    else:
        data = load_json(lattice["file"]) if "file" in lattice else lattice
        L, g = lattice_from_data(data)
    if atom_order is not None:
        order = list(atom_order)
        if sorted(order) != list(range(L.n_atoms)):
            raise InputError(f"atom order must be a permutation of 0..{L.n_atoms - 1}")
        L = L.with_atom_order(order)
        if g is not None:
            g = GraphInput(g.vertices, [g.edges[i] for i in order], [g.labels[i] for i in order])
    if building == "minimal":
        B = minimal_building_set(L)
    elif building == "maximal":
        B = maximal_building_set(L)
    elif building == "tubes":
        if g is None:
            raise InputError("tubes need a graph input")
        B = tubes_building_set(g)
        L = B.lattice
    elif building == "explicit":
        if members is None:
            raise InputError("explicit building sets need members")
        B = building_from_members(L, members)
    else:
        raise InputError(f"unknown building set choice {building!r}")
    return L, B


def default_catalog() -> List[Entry]:
    out = []
    for n in range(1, 5):
        for b in ("minimal", "maximal"):
            out.append(Entry(f"boolean:{n}/{b}", family=f"boolean:{n}", building=b))
    for n in range(2, 5):
        for b in ("minimal", "maximal"):
            out.append(Entry(f"partition:{n}/{b}", family=f"partition:{n}", building=b))
    for b in ("minimal", "maximal"):
        out.append(Entry(f"cycle:4/{b}", family="cycle:4", building=b))
    out.append(Entry("path:4/minimal", family="path:4", building="minimal"))
    for n in range(2, 6):
        out.append(Entry(f"path:{n}/tubes", family=f"path:{n}", building="tubes"))
    for n in range(3, 6):
        out.append(Entry(f"cycle:{n}/tubes", family=f"cycle:{n}", building="tubes"))
    return out


def load_catalog(path: str) -> List[Entry]:
    data = load_json(path)
    if isinstance(data, dict):
        data = data.get("entries")
    if not isinstance(data, list):
        raise InputError("a catalog is a list of entries or {'entries': [...]}")
    base = os.path.dirname(os.path.abspath(path))
    return [Entry.from_json(d, base) for d in data]


# -- checks -------------------------------------------------------------------

def _skip(reason: str) -> dict:
    return {"skipped": reason, "pass": True}


def check_fy(B: BuildingSet) -> dict:
    A = fy_algebra(B)
    oracle = oracle_hilbert(B)
    # the oracle runs one degree past the top to confirm vanishing there
    n = len(A.hilbert)
    ok = oracle[:n] == A.hilbert and not any(oracle[n:])
    return {"hilbert": A.hilbert, "oracle_hilbert": oracle, "dim": A.dim, "pass": ok}


def check_pd(B: BuildingSet) -> dict:
    A = fy_algebra(B)
    res = A.pd_pairing()
    top = A.hilbert[A.top_degree]
    return {"top_dimension": top, "nondegenerate": res["nondegenerate"],
            "pass": bool(res["nondegenerate"]) and top == 1}


def check_os(L: Lattice) -> dict:
    A = os_algebra(L)
    oracle = os_oracle_hilbert(L)
    return {"hilbert": A.hilbert, "oracle_hilbert": oracle, "projective_hilbert": A.projective_hilbert(),
            "pass": A.hilbert == oracle}


def check_operads(B: BuildingSet, kinds: Sequence[str] = KINDS, max_automorphisms: Optional[int] = None) -> dict:
    if not B.irreducible:
        return _skip("reducible building set")
    out = {}
    ok = True
    for k in kinds:
        rel = check_presentation_relations(k, B, max_automorphisms=max_automorphisms)
        if k == FY:
            bad = fy_well_defined(B)
        elif k == FYPD:
            bad = fypd_well_defined(B)
        else:
            bad = os_well_defined(B)
        rel = dict(rel, well_defined=not bad, ideal_failures=bad[:5])
        rel["pass"] = rel["pass"] and not bad
        ok = ok and rel["pass"]
        out[k] = rel
    return {"kinds": out, "pass": ok}


def check_nested(B: BuildingSet, max_size: int = 3) -> dict:
    if not B.irreducible:
        return _skip("reducible building set")
    res = check_operad_laws(B, max_size)
    res["failures"] = res["failures"][:5]
    return res


def check_groebner(B: BuildingSet, orders: Optional[List[Sequence[int]]] = None, count: int = 3) -> dict:
    """Normal monomial counts under several atom orders, admissibility and EL checks."""
    L = B.lattice
    if orders is None:
        orders = atom_orders(L.n_atoms, count)
    runs = []
    ok = True
    for o in orders:
        r = verify_quadratic_gb(B, o)
        runs.append({"atom_order": list(o), "normal_monomials": r["normal_monomials"],
                     "frame_monomials": r["frame_monomials"], "fy_dim": r["fy_dim"],
                     "characterizations_agree": r["characterizations_agree"], "verdict": r["verdict"]})
        ok = ok and r["verdict"]
    out = {"orders": runs, "pass": ok}
    if B.irreducible:
        adm = []
        el = []
        for o in orders[:2]:
            D = DirectedBuiltLattice(B, o)
            a = check_admissibility(D)
            adm.append({"atom_order": list(o), "checked": a["checked"], "failures": len(a["failures"])})
            ok = ok and a["pass"]
            bad = check_el(D)
            el.append({"atom_order": list(o), "failures": [list(b) for b in bad[:5]]})
            ok = ok and not bad
        out["admissibility"] = adm
        out["el"] = el
        out["pass"] = ok
    return out


def check_koszul(B: BuildingSet, variants: Sequence[str] = (PROJECTIVE, AFFINE)) -> dict:
    if not B.irreducible:
        return _skip("reducible building set")
    out = {}
    ok = True
    for v in variants:
        M = build_leray(B, v)
        comp = M.os_comparison()
        d2 = not M.d_squared_failures()
        dec = M.decomposition_dims() == M.dims()
        res = {
            "bigraded_dims": [[2 * a, q, n] for (a, q), n in M.dims().items()],
            "homology": comp["homology"],
            "os_dims": comp["source_dims"],
            "d_squared_zero": d2,
            "decomposition_agrees": dec,
            "koszul": comp["verdict"] and d2,
        }
        res["pass"] = res["koszul"] and dec
        ok = ok and res["pass"]
        out[v] = res
    return {"variants": out, "pass": ok}


def check_consistency(B: BuildingSet) -> dict:
    """Normal monomials, FY dimension, the Leray q = 0 row and the decomposition formula."""
    if not B.irreducible:
        return _skip("reducible building set")
    A = fy_algebra(B)
    shuffle_count = verify_quadratic_gb(B)["normal_monomials"]
    M = build_leray(B, PROJECTIVE)
    row = sum(n for (a, q), n in M.dims().items() if q == 0)
    dec = M.decomposition_dims()
    formula = sum(n for (a, q), n in dec.items() if q == 0)
    total = sum(M.dims().values())
    total_formula = sum(dec.values())
    return {"shuffle": shuffle_count, "fy_dim": A.dim, "leray_row": row, "decomposition": formula,
            "leray_total": total, "decomposition_total": total_formula,
            "pass": shuffle_count == A.dim == row == formula and total == total_formula}


CHECKS: Dict[str, Callable] = {
    "fy": lambda L, B: check_fy(B),
    "pd": lambda L, B: check_pd(B),
    "os": lambda L, B: check_os(L),
    "nested": lambda L, B: check_nested(B),
    "operad-check": lambda L, B: check_operads(B),
    "groebner-check": lambda L, B: check_groebner(B),
    "koszul": lambda L, B: check_koszul(B),
    "consistency": lambda L, B: check_consistency(B),
}

# entries whose Leray models or full relation checks are too large for a routine run
HEAVY = {
    "koszul": lambda L, B: L.n_atoms > 6 or len(B.members) > 15,
}


def run_entry(entry: Entry, only: Optional[Sequence[str]] = None, full: bool = False) -> dict:
    names = list(only) if only else list(CHECKS)
    report = {"entry": entry.to_json()}
    try:
        L, B = entry.resolve()
    except (InputError, LatticeError, BuildingError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        report["pass"] = False
        return report
    report["building_set"] = {"size": len(B.members), "irreducible": B.irreducible}
    checks = {}
    for name in names:
        heavy = HEAVY.get(name)
        if not full and heavy is not None and heavy(L, B):
            checks[name] = _skip("large instance; run with --full")
            continue
        try:
            checks[name] = CHECKS[name](L, B)
        except (AssertionError, BuildingError, FYError, LerayError, OperadError, ShuffleError) as exc:
            checks[name] = {"error": f"{type(exc).__name__}: {exc}", "pass": False}
    report["checks"] = checks
    report["pass"] = all(c["pass"] for c in checks.values())
    return report
