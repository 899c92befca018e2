import cmath
import random

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_mobius(r):
    while True:
        a, b, c = (complex(r.uniform(-2, 2), r.uniform(-2, 2)) for _ in range(3))
        if abs(a) > 0.1:
            d = (1 + b * c) / a
            from kleinian.moebius import Mobius
            return Mobius(a, b, c, d)


def random_point(r, scale=10.0):
    return cmath.rect(r.uniform(0, scale), r.uniform(-cmath.pi, cmath.pi))
