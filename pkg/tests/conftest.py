import random

import pytest

from ifalloc import Instance, is_single_round_feasible

DATA_DIR = "data"


@pytest.fixture
def overloaded_instance() -> Instance:
    """Two interfaces, one bulk service whose demand needs three rounds."""
    return Instance(
        capacity=((20, 25), (25, 30)),
        unit_cost=((35, 45), (30, 50)),
        activation_cost=(100, 210),
        demand=((100, 80),),
        resource_names=("res1", "res2"),
    )


@pytest.fixture
def three_iface_instance() -> Instance:
    """Three interfaces offering three resources to two splittable services."""
    return Instance(
        capacity=((9, 0, 0), (8, 14, 0), (0, 5, 13)),
        unit_cost=((3, 4, 5), (2, 6, 4), (6, 2, 3)),
        activation_cost=(10, 12, 8),
        demand=((8, 10, 13), (8, 5, 0)),
        resource_names=("cpu", "rate", "buffer"),
        interface_names=("eth", "wifi", "lte"),
        service_names=("stream", "telemetry"),
    )


def random_instance(rng: random.Random, max_i=3, max_j=3, max_k=2,
                    max_d=4, max_b=6, feasible=True) -> Instance:
    """Small random instance; redrawn until single-round feasible."""
    I = rng.randint(1, max_i)
    J = rng.randint(1, max_j)
    K = rng.randint(1, max_k)
    while True:
        inst = Instance(
            capacity=tuple(tuple(rng.randint(0, max_b) for _ in range(K))
                           for _ in range(I)),
            unit_cost=tuple(tuple(rng.randint(0, 9) for _ in range(K))
                            for _ in range(I)),
            activation_cost=tuple(rng.randint(0, 8) for _ in range(I)),
            demand=tuple(tuple(rng.randint(0, max_d) for _ in range(K))
                         for _ in range(J)),
        )
        if not feasible or is_single_round_feasible(inst):
            return inst
