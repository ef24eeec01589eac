import sys

import numpy as np
import pytest

from toricroots import LaurentSystem, Support, solve
from toricroots.generators import GeneratorSpec, random_system

# Hirzebruch surface H2 example: t1^3 t2 + ... with a torus root at (-1, -1)
H2_F1 = [((0, 0), 1), ((1, 0), 1), ((0, 1), 1), ((1, 1), 1), ((2, 1), 1), ((3, 1), 1)]
H2_F2 = [((0, 0), 1), ((0, 1), 1), ((1, 1), 1), ((2, 1), 1)]
H2_RAYS = [[1, 0, -1, 0], [0, 1, 2, -1]]
# orbit representatives of the three roots in Cox coordinates
H2_Z = [(-1, -1, 1, 1), (0, -1, 1, 1), (1, -1, 0, 1)]


def h2_system() -> LaurentSystem:
    return LaurentSystem((Support.from_terms(H2_F1), Support.from_terms(H2_F2)))


@pytest.fixture(scope="session")
def h2():
    return h2_system()


@pytest.fixture(scope="session")
def h2_result(h2):
    return solve(h2)


@pytest.fixture(scope="session")
def table1_result():
    return solve(random_system(GeneratorSpec(2, 20, 10, "mixed", seed=0)))


def dense_system(degrees, seed=0) -> LaurentSystem:
    """Dense equations supported on the dilated standard simplices."""
    rng = np.random.default_rng(seed)
    n = len(degrees)
    polys = []
    for d in degrees:
        pts = [m for m in np.ndindex(*(d + 1,) * n) if sum(m) <= d]
        polys.append(Support(np.array(pts), rng.standard_normal(len(pts))))
    return LaurentSystem(tuple(polys))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORTED:
        terminalreporter.section("acceptance criteria")
        for line in mod.REPORTED:
            terminalreporter.write_line(line)
