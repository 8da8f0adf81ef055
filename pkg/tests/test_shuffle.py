import itertools

import pytest
from hypothesis import given, strategies as st

from matroid_operads.building import (NestedSet, enumerate_nested_sets, maximal_building_set,
                                      minimal_building_set, tubes_building_set)
from matroid_operads.fy import fy_algebra
from matroid_operads.lattice import build_boolean, build_graphic, build_partition, cycle_graph, path_graph
from matroid_operads.shuffle import (LITERAL, MM_FIRST, DirectedBuiltLattice, ShuffleMonomial, atom_orders,
                                     check_admissibility, check_el, check_total_order, el_labeling,
                                     enumerate_frames, frame, increasing_chain, is_cluster, is_normal,
                                     leading_terms, maximal_chains, monomial_compare,
                                     normal_monomials_by_division, normal_monomials_by_frames,
                                     quadratic_relations, sort_monomials, verify_quadratic_gb)

from conftest import small_irreducible


def test_rank_one():
    B = minimal_building_set(build_boolean(1))
    res = verify_quadratic_gb(B)
    assert res["normal_monomials"] == 1 and res["verdict"]


def test_p3_normal_monomials(p3min):
    D = DirectedBuiltLattice(p3min)
    L = p3min.lattice
    got = sorted(map(sorted, normal_monomials_by_division(D)))
    assert got == sorted([[L.top], [L.atom_ids[0], L.top]])
    # leading terms kill the other two atoms
    assert set(leading_terms(D)) == {L.atom_ids[1], L.atom_ids[2]}


def test_p4_normal_monomials(p4min):
    res = verify_quadratic_gb(p4min)
    assert res["normal_monomials"] == 7 == fy_algebra(p4min).dim
    assert res["characterizations_agree"]


@pytest.mark.parametrize("case", small_irreducible(), ids=lambda c: c[0])
def test_two_characterizations_agree(case):
    _, B = case
    for o in atom_orders(B.lattice.n_atoms, 3):
        D = DirectedBuiltLattice(B, o)
        assert set(normal_monomials_by_division(D)) == set(normal_monomials_by_frames(D))


@pytest.mark.parametrize("B", [minimal_building_set(build_partition(3)), maximal_building_set(build_boolean(3)),
                               minimal_building_set(build_boolean(3)), maximal_building_set(build_partition(3))],
                         ids=["p3min", "b3max", "b3min", "p3max"])
def test_count_independent_of_atom_order(B):
    dim = fy_algebra(B).dim
    for o in itertools.permutations(range(B.lattice.n_atoms)):
        assert verify_quadratic_gb(B, o)["normal_monomials"] == dim


@pytest.mark.parametrize("case", small_irreducible(), ids=lambda c: c[0])
def test_leading_terms_are_non_minimal_atoms(case):
    _, B = case
    for o in atom_orders(B.lattice.n_atoms, 2):
        D = DirectedBuiltLattice(B, o)
        expect = sorted(D.atom_element(i) for i in range(1, B.lattice.n_atoms))
        assert sorted(leading_terms(D, LITERAL)) == expect
        assert sorted(leading_terms(D, MM_FIRST)) == expect


def test_quadratic_relations_shape(p4min):
    D = DirectedBuiltLattice(p4min)
    rels = quadratic_relations(D)
    n = p4min.lattice.n_atoms
    assert len(rels) == n * (n - 1) // 2
    for r in rels:
        assert r and set(r.values()) <= {-1, 1}
        assert p4min.lattice.top not in r


@pytest.mark.parametrize("case", small_irreducible(), ids=lambda c: c[0])
def test_admissibility_literal(case):
    _, B = case
    for o in atom_orders(B.lattice.n_atoms, 2):
        res = check_admissibility(DirectedBuiltLattice(B, o), rule=LITERAL)
        assert res["pass"], res["failures"][:3]
        assert res["checked"] > 0


def test_literal_rule_is_not_transitive(p4min):
    # regression: the recursive rule is admissible but not transitive on Pi_4
    D = DirectedBuiltLattice(p4min)
    L = p4min.lattice
    F = {tuple(map(tuple, f)): i for i, f in enumerate(L.flats())}

    def el(*pairs):
        return F[tuple(pairs)]

    top = L.top
    a = {el((1, 3)), el((2, 4)), top}
    b = {el((1, 4)), el((2, 3)), top}
    c = {el((2, 4)), el((1, 2), (1, 4), (2, 4)), top}
    assert monomial_compare(D, a, b) < 0
    assert monomial_compare(D, b, c) < 0
    assert monomial_compare(D, a, c) > 0
    assert check_total_order(D, rule=LITERAL)


def test_mm_first_is_total_but_not_admissible(p4min):
    D = DirectedBuiltLattice(p4min)
    assert check_total_order(D, rule=MM_FIRST) == []
    res = check_admissibility(D, rule=MM_FIRST)
    assert not res["pass"]
    # the failure sits in the slot at the top of {23, top}
    L = p4min.lattice
    S, slot, _, _ = res["failures"][0]
    assert slot == L.top and L.flats()[S[0]] == [(2, 3)]


@pytest.mark.parametrize("case", small_irreducible(), ids=lambda c: c[0])
def test_rules_agree_up_to_size_two(case):
    _, B = case
    D = DirectedBuiltLattice(B)
    ms = [S.members for S in enumerate_nested_sets(B, irreducible_only=True, max_size=2)]
    for a, b in itertools.product(ms, repeat=2):
        if len(a) == len(b):
            assert monomial_compare(D, a, b, LITERAL) == monomial_compare(D, a, b, MM_FIRST)


def test_mm_first_total_on_catalog():
    for _, B in small_irreducible():
        assert check_total_order(DirectedBuiltLattice(B), rule=MM_FIRST) == []


def test_sort_is_deterministic(p4min):
    D = DirectedBuiltLattice(p4min)
    ms = [S.members for S in enumerate_nested_sets(p4min, irreducible_only=True)]
    a = sort_monomials(D, ms)
    b = sort_monomials(D, list(reversed(ms)))
    assert [m.members for m in a] == [m.members for m in b]


def test_normality_by_division_matches_is_normal(p4min):
    D = DirectedBuiltLattice(p4min)
    normal = set(normal_monomials_by_division(D))
    for S in enumerate_nested_sets(p4min, irreducible_only=True):
        assert is_normal(D, S.members) == (S.members in normal)


def test_clusters_and_frames(p4min):
    top = p4min.lattice.top
    for S in enumerate_nested_sets(p4min, irreducible_only=True):
        F, locs = frame(S)
        assert top in F.members
        # frames have no rank-one local intervals below the top
        assert F in enumerate_frames(p4min) or len(F) == 1
        for g, loc in locs.items():
            assert is_cluster(loc)
    single = NestedSet(p4min, {top})
    assert frame(single)[0] == single


@pytest.mark.parametrize("case", [("partition:4", maximal_building_set(build_partition(4))),
                                  ("boolean:4", maximal_building_set(build_boolean(4)))],
                         ids=lambda c: c[0])
def test_el_labelling(case):
    _, B = case
    for o in atom_orders(B.lattice.n_atoms, 2):
        D = DirectedBuiltLattice(B, o)
        assert check_el(D) == []


def test_increasing_chain_is_lexicographically_first(p4min):
    D = DirectedBuiltLattice(maximal_building_set(p4min.lattice))
    L = p4min.lattice
    lab = el_labeling(D)
    for x in L.elements():
        for y in L.elements():
            if not L.lt(x, y):
                continue
            chains = maximal_chains(L, x, y)
            words = sorted(lab.chain_labels(c) for c in chains)
            inc = [w for w in words if all(a < b for a, b in zip(w, w[1:]))]
            assert len(inc) == 1
            assert lab.chain_labels(increasing_chain(D, x, y)) == words[0] == inc[0]


def test_directed_key_top_is_minimal(p4min):
    D = DirectedBuiltLattice(p4min)
    top = p4min.lattice.top
    for g in p4min.members:
        if g != top:
            assert D.element_compare(top, g) < 0


@given(st.permutations(range(6)), st.data())
def test_compare_is_antisymmetric(order, data):
    B = minimal_building_set(build_partition(4))
    D = DirectedBuiltLattice(B, order)
    ms = [S.members for S in enumerate_nested_sets(B, irreducible_only=True)]
    a = data.draw(st.sampled_from(ms))
    b = data.draw(st.sampled_from(ms))
    for rule in (LITERAL, MM_FIRST):
        assert monomial_compare(D, a, b, rule) == -monomial_compare(D, b, a, rule)
        assert (monomial_compare(D, a, b, rule) == 0) == (a == b)


@given(st.permutations(range(6)))
def test_gb_verdict_any_order(order):
    B = minimal_building_set(build_partition(4))
    assert verify_quadratic_gb(B, order)["verdict"]
