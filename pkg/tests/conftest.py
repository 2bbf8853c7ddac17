import math
import sys

import numpy as np
import pytest

from dogfight.airframe import AircraftParams, AircraftState
from dogfight.engagement import EngagementParams, GameModel, GameState


@pytest.fixture
def params():
    return AircraftParams()


@pytest.fixture
def eng():
    return EngagementParams()


@pytest.fixture
def model():
    return GameModel()


def ac(x, y, theta, zeta=0.0, v=2.5):
    return AircraftState(float(x), float(y), v, float(theta), float(zeta))


def random_game_states(rng: np.random.Generator, n: int, half_width: float = 6.0):
    xy = rng.uniform(-half_width, half_width, size=(n, 4))
    th = rng.uniform(0, 2 * math.pi, size=(n, 2))
    zmax = math.radians(23)
    z = rng.uniform(-zmax, zmax, size=(n, 2))
    return [
        GameState(ac(a, b, t1, z1), ac(c, d, t2, z2), 0)
        for (a, b, c, d), (t1, t2), (z1, z2) in zip(xy, th, z)
    ]


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])
