import itertools

import pytest
from hypothesis import given, strategies as st

from matroid_operads.building import (BuildingError, BuildingSet, NestedSet, check_operad_laws, comp,
                                      compose_nested, decompose_nested, enumerate_nested_sets,
                                      induced_building_set, is_building_set, is_nested, local_intervals,
                                      maximal_building_set, minimal_building_set, singleton, tubes,
                                      tubes_building_set)
from matroid_operads.lattice import (GraphInput, build_boolean, build_graphic, build_partition, complete_graph,
                                     cycle_graph, interval, is_isomorphic, path_graph)

from conftest import small_irreducible


def elem(L, *blocks):
    """Partition-lattice element whose non-singleton blocks are ``blocks``."""
    atoms = []
    for b in blocks:
        atoms.extend(L.atom_ids[L.atom_labels.index(p)] for p in itertools.combinations(b, 2))
    return L.join_all(atoms)


def test_is_building_set_examples():
    for L in (build_boolean(3), build_partition(4)):
        assert is_building_set(L, [x for x in L.elements() if x != L.bottom])[0]
    B3 = build_boolean(3)
    assert is_building_set(B3, B3.atom_ids)[0]
    P3 = build_partition(3)
    ok, w = is_building_set(P3, P3.atom_ids)
    assert not ok and w == P3.top


def test_minimal_and_maximal():
    for n in range(1, 5):
        L = build_boolean(n)
        assert minimal_building_set(L).members == tuple(sorted(L.atom_ids))
    L = build_partition(4)
    B = minimal_building_set(L)
    assert len(B.members) == 11
    for g in B.members:
        blocks = [p for p in L.atom_labels if L.leq(L.atom_ids[L.atom_labels.index(p)], g)]
        verts = set(itertools.chain.from_iterable(blocks))
        assert len(blocks) == len(verts) * (len(verts) - 1) // 2
    assert len(maximal_building_set(build_partition(3)).members) == 4


def test_tubes_examples():
    T = tubes(path_graph(3))
    assert sorted(map(sorted, T)) == sorted([[1], [2], [3], [1, 2], [2, 3], [1, 2, 3]])
    B = tubes_building_set(GraphInput([1, 2], []))
    assert B.members == tuple(sorted(B.lattice.atom_ids))
    B = tubes_building_set(complete_graph(3))
    assert len(B.members) == 7


def test_factors_examples():
    L = build_partition(4)
    B = minimal_building_set(L)
    x = elem(L, (1, 2), (3, 4))
    assert set(B.factors(x)) == {elem(L, (1, 2)), elem(L, (3, 4))}
    g = elem(L, (1, 2, 3))
    assert B.factors(g) == (g,)
    B3 = build_boolean(3)
    assert set(minimal_building_set(B3).factors(B3.top)) == set(B3.atom_ids)
    with pytest.raises(BuildingError):
        B.factors(L.bottom)


def test_factors_are_the_unique_nested_antichain():
    for _, B in small_irreducible():
        L = B.lattice
        for S in enumerate_nested_sets(B):
            ms = sorted(S.members)
            if len(ms) < 2 or any(L.leq(a, b) for a in ms for b in ms if a != b):
                continue
            assert set(B.factors(L.join_all(ms))) == set(ms)


def test_induced_examples():
    L = build_partition(4)
    B = minimal_building_set(L)
    a = elem(L, (1, 2))
    iv, Bi = induced_building_set(B, a, L.top)
    assert is_isomorphic(iv.lattice, build_partition(3))
    assert len(Bi.members) == 4
    iv, Bi = induced_building_set(B, L.bottom, L.top)
    assert Bi.members == B.members


def test_double_induction():
    B = maximal_building_set(build_boolean(3))
    L = B.lattice
    a = L.atom_ids[0]
    for x in L.elements():
        if not (L.lt(a, x) and x != L.top):
            continue
        iv1, B1 = induced_building_set(B, a, L.top)
        iv2, B2 = induced_building_set(B1, iv1.from_parent(x), iv1.lattice.top)
        iv3, B3 = induced_building_set(B, x, L.top)
        got = sorted(iv1.to_parent(iv2.to_parent(m)) for m in B2.members)
        assert got == sorted(iv3.to_parent(m) for m in B3.members)


def test_is_nested_examples():
    L = build_partition(4)
    B = minimal_building_set(L)
    assert is_nested(B, [elem(L, (1, 2)), elem(L, (3, 4))])[0]
    ok, w = is_nested(B, [elem(L, (1, 2, 3)), elem(L, (1, 2, 4))])
    assert not ok
    chain = [elem(L, (1, 2)), elem(L, (1, 2, 3)), L.top]
    assert is_nested(B, chain)[0]


def test_enumeration_examples(p3min):
    L = p3min.lattice
    got = [sorted(S.members) for S in enumerate_nested_sets(p3min, irreducible_only=True)]
    assert got == [[L.top]] + [[a, L.top] for a in sorted(L.atom_ids)]
    with pytest.raises(BuildingError):
        enumerate_nested_sets(minimal_building_set(build_boolean(2)), irreducible_only=True)


def test_maximal_building_set_nested_sets_are_chains():
    B = maximal_building_set(build_partition(4))
    L = B.lattice
    for S in enumerate_nested_sets(B):
        ms = sorted(S.members, key=lambda g: L.rank[g])
        assert all(L.leq(a, b) for a, b in zip(ms, ms[1:]))


def test_enumeration_is_exhaustive_and_unique():
    for _, B in small_irreducible()[:4]:
        got = [S.members for S in enumerate_nested_sets(B)]
        assert len(got) == len(set(got))
        brute = {frozenset(c) for r in range(len(B.members) + 1)
                 for c in itertools.combinations(B.members, r) if is_nested(B, c)[0]}
        assert set(got) == brute


def test_comp_examples():
    B = maximal_building_set(build_boolean(3))
    L = B.lattice
    g0 = L.atom_ids[0]
    k = L.join(g0, L.atom_ids[1])
    assert comp(B, g0, k) == k
    L = build_partition(4)
    B = minimal_building_set(L)
    g0 = elem(L, (1, 2))
    assert comp(B, g0, elem(L, (1, 2), (3, 4))) == elem(L, (3, 4))
    assert comp(B, g0, elem(L, (1, 2, 3))) == elem(L, (1, 2, 3))


def test_comp_left_inverse_and_injective():
    for _, B in small_irreducible():
        L = B.lattice
        for g0 in B.members:
            if g0 == L.top:
                continue
            iv, Bi = induced_building_set(B, g0, L.top)
            images = []
            for k in Bi.members:
                K = iv.to_parent(k)
                F = comp(B, g0, K)
                assert L.join(F, g0) == K
                images.append(F)
            assert len(set(images)) == len(images)


def test_compose_examples(p3min):
    L = p3min.lattice
    S = NestedSet(p3min, [L.top])
    li = local_intervals(S)[L.top]
    a = li.from_parent(L.atom_ids[0])
    loc = NestedSet(li.building, [a, li.lattice.top])
    assert compose_nested(S, {L.top: loc}).members == {L.top, L.atom_ids[0]}
    S2 = singleton(p3min, L.atom_ids[1])
    assert compose_nested(S2, {}) == S2


def test_decompose_examples(p4min):
    L = p4min.lattice
    for S in enumerate_nested_sets(p4min, irreducible_only=True):
        same = decompose_nested(S, S.members)
        for g, loc in same.items():
            assert len(loc) == 1
        whole = decompose_nested(S, {L.top})
        assert len(whole[L.top]) == len(S)
    with pytest.raises(BuildingError):
        decompose_nested(singleton(p4min, L.atom_ids[0]), {L.atom_ids[0]})


def test_local_interval_ranks():
    for _, B in small_irreducible():
        for S in enumerate_nested_sets(B, irreducible_only=True):
            assert sum(li.rank for li in local_intervals(S).values()) == B.lattice.rk


def test_local_intervals_of_p3(p3min):
    L = p3min.lattice
    S = singleton(p3min, L.atom_ids[0])
    lis = local_intervals(S)
    assert lis[L.atom_ids[0]].rank == 1 and lis[L.top].rank == 1


def test_compose_cardinality_and_nestedness():
    for _, B in small_irreducible():
        for S in enumerate_nested_sets(B, irreducible_only=True, max_size=3):
            top = B.lattice.top
            for r in range(len(S)):
                for F in itertools.combinations(sorted(S.members - {top}), r):
                    frame = NestedSet(B, set(F) | {top})
                    locs = decompose_nested(S, frame.members)
                    out = compose_nested(frame, locs)
                    assert len(out) == len(frame) + sum(len(x) - 1 for x in locs.values())
                    assert is_nested(B, out.members)[0]


def test_operad_laws_exhaustive():
    for name, B in small_irreducible():
        res = check_operad_laws(B, 3)
        assert res["pass"], (name, res["failures"])
        assert res["triples"] > 0


def test_iterated_singleton_reconstruction(p4min):
    # every irreducible nested set is a composite of one-element nested sets
    B = p4min
    L = B.lattice
    for S in enumerate_nested_sets(B, irreducible_only=True):
        cur = NestedSet(B, {L.top})
        for g in sorted(S.members - {L.top}, key=lambda g: -L.rank[g]):
            nxt = NestedSet(B, cur.members | {g})
            pieces = decompose_nested(nxt, cur.members)
            # exactly one piece is a two-element set, the others are trivial
            assert sorted(len(p) for p in pieces.values())[-1] == 2
            assert compose_nested(cur, pieces) == nxt
            cur = nxt
        assert cur == S


@given(st.sampled_from(small_irreducible()), st.data())
def test_random_decompose_round_trip(case, data):
    _, B = case
    sets = enumerate_nested_sets(B, irreducible_only=True)
    S = data.draw(st.sampled_from(sets))
    top = B.lattice.top
    rest = sorted(S.members - {top})
    F = data.draw(st.lists(st.sampled_from(rest), unique=True)) if rest else []
    frame = set(F) | {top}
    assert compose_nested(NestedSet(B, frame), decompose_nested(S, frame)) == S
