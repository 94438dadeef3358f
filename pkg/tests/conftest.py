import random

import pytest

DEFAULT_SEED = 20260822


def pytest_addoption(parser):
    parser.addoption(
        "--seed",
        type=int,
        default=DEFAULT_SEED,
        help="seed for randomized property tests",
    )


@pytest.fixture
def rng(request) -> random.Random:
    """Deterministic RNG; override with --seed for a different sample."""
    return random.Random(request.config.getoption("--seed"))
