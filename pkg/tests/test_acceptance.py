"""End-to-end acceptance checks over the default catalog.

Each test prints a single ``criterion N: PASS|FAIL`` line (visible even
under output capture) and asserts the same verdict.  Run directly with
``python tests/test_acceptance.py`` to get only the summary lines.
"""

import time

import pytest

from matroid_operads import catalog as C
from matroid_operads.building import maximal_building_set, minimal_building_set
from matroid_operads.fy import fy_algebra
from matroid_operads.lattice import build_boolean, build_graphic, build_partition, cycle_graph
from matroid_operads.leray import AFFINE, PROJECTIVE, build_leray
from matroid_operads.operad import os_algebra
from matroid_operads.shuffle import DirectedBuiltLattice, atom_orders, check_admissibility, check_el

CATALOG = C.default_catalog()


def _report(capsys, n, title, failures, started, extra=""):
    line = f"criterion {n}: {'PASS' if not failures else 'FAIL'}  {title}  ({time.time() - started:.1f}s)"
    if extra:
        line += f"  {extra}"
    if failures:
        line += f"  failures: {failures[:5]}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return not failures


def _irreducible():
    return [(e.name, e.resolve()[1]) for e in CATALOG if e.resolve()[1].irreducible]


def criterion_1(capsys=None):
    t = time.time()
    bad = []
    for e in CATALOG:
        _, B = e.resolve()
        r = C.check_fy(B)
        if not r["pass"]:
            bad.append((e.name, r["hilbert"], r["oracle_hilbert"]))
    p3 = fy_algebra(minimal_building_set(build_partition(3))).hilbert
    p4 = fy_algebra(minimal_building_set(build_partition(4))).hilbert
    if p3 != [1, 1] or p4 != [1, 5, 1]:
        bad.append(("spot values", p3, p4))
    return _report(capsys, 1, f"FY bases match the oracle on {len(CATALOG)} entries", bad, t)


def criterion_2(capsys=None):
    t = time.time()
    bad = [e.name for e in CATALOG if not C.check_pd(e.resolve()[1])["pass"]]
    return _report(capsys, 2, "pairings nondegenerate, top degree one-dimensional", bad, t)


def criterion_3(capsys=None):
    t = time.time()
    bad = []
    for name, B in _irreducible():
        r = C.check_operads(B)
        bad += [(name, k) for k, v in r["kinds"].items() if not v["pass"]]
    return _report(capsys, 3, "all four structure maps well defined and satisfy their relations", bad, t)


def criterion_4(capsys=None):
    t = time.time()
    bad = []
    count = 0
    for name, B in _irreducible():
        r = C.check_nested(B)
        count += r["round_trips"] + r["triples"]
        if not r["pass"]:
            bad.append((name, r["failures"]))
    return _report(capsys, 4, "nested-set compose/decompose laws for |S| <= 3", bad, t, f"{count} cases")


def criterion_5(capsys=None):
    t = time.time()
    bad = []
    for e in CATALOG:
        _, B = e.resolve()
        orders = atom_orders(B.lattice.n_atoms, 3)
        r = C.check_groebner(B, orders)
        if len({tuple(o["atom_order"]) for o in r["orders"]}) < min(3, _fact(B.lattice.n_atoms)):
            bad.append((e.name, "too few orders"))
        bad += [(e.name, o["atom_order"]) for o in r["orders"] if not o["verdict"]]
        if B.irreducible:
            for o in orders:
                a = check_admissibility(DirectedBuiltLattice(B, o), max_size=3)
                if not a["pass"]:
                    bad.append((e.name, "admissibility", list(o), a["failures"][:2]))
    return _report(capsys, 5, "normal monomials = dim FY under 3 atom orders; order admissible", bad, t)


def _fact(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def criterion_6(capsys=None):
    t = time.time()
    bad = []
    cases = [("partition:4", maximal_building_set(build_partition(4))),
             ("partition:4/minimal", minimal_building_set(build_partition(4))),
             ("boolean:4", maximal_building_set(build_boolean(4)))]
    pairs = 0
    for name, B in cases:
        L = B.lattice
        for o in atom_orders(L.n_atoms, 2):
            pairs += sum(len(L.upper_set(x)) - 1 for x in L.elements())
            failures = check_el(DirectedBuiltLattice(B, o))
            if failures:
                bad.append((name, list(o), failures[:2]))
    return _report(capsys, 6, "EL labelling on Pi_4 and B_4 under 2 atom orders", bad, t, f"{pairs} intervals")


def _trim(seq):
    # the reduced OS series carries an explicit zero in the top degree
    seq = list(seq)
    while len(seq) > 1 and seq[-1] == 0:
        seq.pop()
    return seq


KOSZUL_CASES = [
    ("partition:3/minimal", lambda: minimal_building_set(build_partition(3)), [1, 2], [1, 3, 2]),
    ("partition:4/minimal", lambda: minimal_building_set(build_partition(4)), None, None),
    ("boolean:3/maximal", lambda: maximal_building_set(build_boolean(3)), None, None),
    ("cycle:4/minimal", lambda: minimal_building_set(build_graphic(cycle_graph(4))), None, None),
]


def criterion_7(capsys=None):
    t = time.time()
    bad = []
    for name, make, spot_p, spot_a in KOSZUL_CASES:
        B = make()
        OS = os_algebra(B.lattice)
        for variant, expect in ((PROJECTIVE, OS.projective_hilbert()), (AFFINE, OS.hilbert)):
            M = build_leray(B, variant)
            if M.d_squared_failures():
                bad.append((name, variant, "d^2"))
            hom = M.homology()
            expect = _trim(expect)
            if hom != expect:
                bad.append((name, variant, hom, expect))
            if not M.os_comparison()["verdict"]:
                bad.append((name, variant, "comparison map"))
        if spot_p is not None:
            if build_leray(B, PROJECTIVE).homology() != spot_p or build_leray(B, AFFINE).homology() != spot_a:
                bad.append((name, "spot values"))
    return _report(capsys, 7, "Leray model homology equals reduced OS / OS", bad, t)


def criterion_8(capsys=None):
    t = time.time()
    bad = []
    for name, B in _irreducible():
        r = C.check_consistency(B)
        if not r["pass"]:
            bad.append((name, r))
    return _report(capsys, 8, "shuffle count = dim FY = Leray bottom row = decomposition formula", bad, t)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_criterion(crit, capsys):
    assert crit(capsys)


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    raise SystemExit(0 if all(results) else 1)
