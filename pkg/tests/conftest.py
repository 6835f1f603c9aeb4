import pytest

from cvrp_aoa.problem import Instance, bundled_instance


@pytest.fixture(scope="session")
def p1():
    return bundled_instance("p1")


@pytest.fixture(scope="session")
def p2():
    return bundled_instance("p2")


@pytest.fixture(scope="session")
def small3():
    # N=3 workhorse for dense-backend tests (19-qubit layout)
    return Instance.from_euclidean(
        "small3", 4, (0.2, 0.3), [(0.6, 0.1, 1), (0.8, 0.9, 3), (0.1, 0.7, 2)])
