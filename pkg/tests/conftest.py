import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from multcorr import build_sieve, get_function  # noqa: E402


@pytest.fixture(scope="session")
def two_squares_10k():
    return build_sieve(get_function("two_squares"), 10_000)


@pytest.fixture(scope="session")
def all_one_10k():
    return build_sieve(get_function("all_one"), 10_000)


@pytest.fixture(scope="session")
def delta_half_10k():
    return build_sieve(get_function("delta_omega:0.5"), 10_000)
