import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from matroid_operads.lattice import build_boolean, build_graphic, build_partition, complete_graph, cycle_graph
from matroid_operads.linalg import rank
from matroid_operads.os_algebra import (OSAlgebra, circuits, delta_monomial, delta_vector, is_independent,
                                        os_oracle_hilbert, sort_sign, vadd)

LATTICES = [build_boolean(2), build_boolean(3), build_partition(3), build_partition(4),
            build_graphic(cycle_graph(4)), build_graphic(complete_graph(4))]


def test_circuits_examples():
    assert circuits(build_boolean(3)) == []
    assert circuits(build_partition(3)) == [(0, 1, 2)]
    assert circuits(build_graphic(cycle_graph(4))) == [(0, 1, 2, 3)]


def test_hilbert_examples():
    assert OSAlgebra(build_boolean(2)).hilbert == [1, 2, 1]
    A = OSAlgebra(build_partition(3))
    assert A.hilbert == [1, 3, 2]
    assert A.reduce_monomial((0, 1, 2)) == {}


def test_circuit_relation_vanishes():
    A = OSAlgebra(build_partition(3))
    assert A.reduce(delta_monomial((0, 1, 2))) == {}


@pytest.mark.parametrize("L", LATTICES, ids=repr)
def test_nbc_matches_oracle(L):
    assert OSAlgebra(L).hilbert == os_oracle_hilbert(L)


@pytest.mark.parametrize("L", LATTICES, ids=repr)
def test_dependent_products_vanish(L):
    A = OSAlgebra(L)
    for k in range(2, L.n_atoms + 1):
        for m in itertools.combinations(range(L.n_atoms), k):
            if not is_independent(L, m):
                assert A.reduce_monomial(m) == {}


def test_delta_examples():
    assert delta_monomial((3,)) == {(): 1}
    assert delta_monomial((0, 1)) == {(1,): 1, (0,): -1}
    assert delta_vector({(): Fraction(1)}) == {}


@pytest.mark.parametrize("L", LATTICES, ids=repr)
def test_projective_is_kernel_and_image(L):
    A = OSAlgebra(L)
    proj = A.projective
    for k in range(1, A.rank + 1):
        kern = proj.levels[k]
        for v in kern.basis:
            assert A.delta(v) == {}
        im = A.image_of_delta(k)
        assert rank(im) == len(kern)
        for v in im:
            assert kern.contains(v)


def test_projective_examples():
    A = OSAlgebra(build_partition(3))
    assert A.projective_hilbert() == [1, 2, 0]


@pytest.mark.parametrize("L", LATTICES, ids=repr)
def test_euler_factorization(L):
    A = OSAlgebra(L)
    ph = A.projective_hilbert()
    prod = [0] * (len(ph) + 1)
    for i, x in enumerate(ph):
        prod[i] += x
        prod[i + 1] += x
    assert prod[:len(A.hilbert)] == A.hilbert and not any(prod[len(A.hilbert):])


def test_projective_generated_by_differences():
    # OS-bar is generated as an algebra by the e_H - e_H'
    for L in LATTICES:
        A = OSAlgebra(L)
        gens = [{(0,): Fraction(1), (a,): Fraction(-1)} for a in range(1, L.n_atoms)]
        span = [[{(): Fraction(1)}]]
        for k in range(1, A.rank + 1):
            level = []
            for v in span[-1]:
                for g in gens:
                    w = A.multiply(v, g)
                    if w:
                        level.append(w)
            span.append(level)
            assert rank(level) == len(A.projective.levels[k])


@pytest.mark.parametrize("order", list(itertools.permutations(range(3))))
def test_nbc_count_independent_of_order(order):
    assert OSAlgebra(build_partition(3), order).hilbert == [1, 3, 2]


def test_sort_sign():
    assert sort_sign((2, 1)) == (-1, (1, 2))
    assert sort_sign((1, 1)) == (0, ())


algs = st.sampled_from([OSAlgebra(L) for L in LATTICES])


def _vec(A, draw):
    n = A.lattice.n_atoms
    v = {}
    for m, c in draw(st.lists(st.tuples(st.lists(st.integers(0, n - 1), unique=True, max_size=3),
                                        st.integers(-2, 2)), max_size=4)):
        s, w = sort_sign(m)
        vadd(v, {w: Fraction(c * s)})
    return v


@given(algs, st.data())
def test_delta_squared_zero(A, data):
    v = _vec(A, data.draw)
    assert A.delta(A.delta(A.reduce(v))) == {}
    assert delta_vector(delta_vector(v)) == {}


@given(algs, st.data())
def test_delta_is_a_derivation(A, data):
    a = A.reduce(_vec(A, data.draw))
    b = A.reduce(_vec(A, data.draw))
    # homogeneous pieces only, so the sign is well defined
    for k in range(A.rank + 1):
        ak = {m: c for m, c in a.items() if len(m) == k}
        lhs = A.delta(A.multiply(ak, b))
        rhs = A.multiply(A.delta(ak), b)
        vadd(rhs, A.multiply(ak, A.delta(b)), (-1) ** k)
        assert lhs == A.reduce(rhs)
