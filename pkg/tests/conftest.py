import pytest
from hypothesis import HealthCheck, settings

from matroid_operads.building import maximal_building_set, minimal_building_set, tubes_building_set
from matroid_operads.lattice import build_boolean, build_graphic, build_partition, cycle_graph, path_graph

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def p3():
    return build_partition(3)


@pytest.fixture(scope="session")
def p4():
    return build_partition(4)


@pytest.fixture(scope="session")
def p3min(p3):
    return minimal_building_set(p3)


@pytest.fixture(scope="session")
def p4min(p4):
    return minimal_building_set(p4)


@pytest.fixture(scope="session")
def b3max():
    return maximal_building_set(build_boolean(3))


@pytest.fixture(scope="session")
def c4min():
    return minimal_building_set(build_graphic(cycle_graph(4)))


def small_irreducible():
    """Irreducible built lattices small enough for exhaustive checks."""
    return [
        ("partition:3/minimal", minimal_building_set(build_partition(3))),
        ("partition:3/maximal", maximal_building_set(build_partition(3))),
        ("partition:4/minimal", minimal_building_set(build_partition(4))),
        ("boolean:3/maximal", maximal_building_set(build_boolean(3))),
        ("cycle:4/minimal", minimal_building_set(build_graphic(cycle_graph(4)))),
        ("path:3/tubes", tubes_building_set(path_graph(3))),
    ]
