import random
from pathlib import Path

import pytest

from thetalift.finite_field import FqContext

DATA = Path(__file__).parent / "data"

# z^10 + 2z^6 + 2z^5 + 2z^4 + z + 2
EX1_MODULUS = [2, 1, 0, 0, 2, 2, 2, 0, 0, 0, 1]
EX1_EXPONENTS = (9089, 18300, 8601)
# z^3 - z + 1
F27_MODULUS = [1, 2, 0, 1]


@pytest.fixture(scope="session")
def f3():
    return FqContext(3, [0, 1])


@pytest.fixture(scope="session")
def f9():
    return FqContext(3, [1, 0, 1])


@pytest.fixture(scope="session")
def f27():
    return FqContext(3, F27_MODULUS)


@pytest.fixture(scope="session")
def f3_10():
    return FqContext(3, EX1_MODULUS)


@pytest.fixture
def rng():
    return random.Random(20240611)


def read_minpolys():
    from thetalift.textio import parse_int_poly

    out = {}
    for line in (DATA / "example1_minpolys.txt").read_text().splitlines():
        name, _, body = line.partition(":")
        out[name.strip()] = parse_int_poly(body, "x")
    return out


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
