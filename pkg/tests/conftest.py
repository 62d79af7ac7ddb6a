import random
from pathlib import Path

import pytest

from nsprobe import oracle as orc

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def small_monotone_suite():
    """Monotone functions with n <= 6, the ones exact Process-D enumeration can handle."""
    return {
        "dictator6": orc.dictator(6, 2),
        "majority5": orc.majority(5),
        "majority6": orc.majority(6),
        "dnf6": orc.dnf(6, [(0, 1), (2, 3, 4), (1, 5)]),
        "threshold6": orc.threshold(6, 2),
        "dnf5": orc.dnf(5, [(0, 1, 2), (2, 3), (1, 4)]),
    }


def oracle_suite():
    """Constant, dictator, majority, parity, f0 and random DNFs."""
    rng = random.Random(2024)
    suite = {
        "const0": orc.constant(6, 0),
        "const1": orc.constant(6, 1),
        "dictator": orc.dictator(8, 3),
        "majority3": orc.majority(3),
        "majority5": orc.majority(5),
        "majority9": orc.majority(9),
        "parity3": orc.parity(3),
        "parity5": orc.parity(5),
        "f0_20": orc.make_f0(20, 2),
    }
    for k in range(10):
        suite[f"dnf10_{k}"] = orc.make_random_dnf(10, rng.randint(1, 6), rng.randint(1, 5), rng)
    return suite


@pytest.fixture
def rng():
    return random.Random(12345)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
