import numpy as np
import pytest

from tspqubo.bench import load_registry_instance
from tspqubo.tsplib import Instance, ProblemKind


def make_instance(name, matrix, kind=ProblemKind.SYMMETRIC, weight_type="EXPLICIT"):
    matrix = np.asarray(matrix, dtype=np.int64)
    return Instance(name=name, kind=kind, dimension=matrix.shape[0], distances=matrix, weight_type=weight_type)


def random_instance(rng: np.random.Generator, n: int, symmetric: bool = True) -> Instance:
    """Random integer distances in 10..99 with a guaranteed non-uniform matrix."""
    while True:
        d = rng.integers(10, 100, size=(n, n))
        if symmetric:
            d = np.triu(d, 1)
            d = d + d.T
        else:
            np.fill_diagonal(d, 0)
        off = d[~np.eye(n, dtype=bool)]
        if off.min() < off.max():
            break
    kind = ProblemKind.SYMMETRIC if symmetric else ProblemKind.ASYMMETRIC
    return make_instance(f"random{n}", d, kind=kind)


@pytest.fixture
def ring4() -> Instance:
    """Directed 4-ring: the cycle 1-2-3-4 has legs of 1, every other leg is 10."""
    d = np.full((4, 4), 10, dtype=np.int64)
    np.fill_diagonal(d, 0)
    for a, b in [(0, 1), (1, 2), (2, 3), (3, 0)]:
        d[a, b] = 1
    return make_instance("ring4", d, kind=ProblemKind.ASYMMETRIC)


@pytest.fixture
def triangle3() -> Instance:
    d = [[0, 2, 3], [2, 0, 1], [3, 1, 0]]
    return make_instance("tri3", d)


@pytest.fixture(scope="session")
def burma14() -> Instance:
    return load_registry_instance("burma14")


@pytest.fixture(scope="session")
def ulysses16() -> Instance:
    return load_registry_instance("ulysses16")


@pytest.fixture(scope="session")
def ulysses22() -> Instance:
    return load_registry_instance("ulysses22")


@pytest.fixture(scope="session")
def gr17() -> Instance:
    return load_registry_instance("gr17")


@pytest.fixture(scope="session")
def br17() -> Instance:
    return load_registry_instance("br17")
