import random

import pytest

from mppc.instance import Instance, Site

ACCEPTANCE_LINES: list[str] = []


def make_instance(points, quantities, windows=None, capacity=100.0, speed=1.0, horizon=None,
                  depot=(0.0, 0.0), name="t", **kw):
    windows = windows or [(0, horizon or 100)] * len(points)
    horizon = horizon or max([w[1] for w in windows] + [1])
    sites = tuple(Site(i, float(p[0]), float(p[1]), float(q), w[0], w[1])
                  for i, (p, q, w) in enumerate(zip(points, quantities, windows)))
    return Instance(sites, depot, float(capacity), float(speed), horizon, name=name, **kw)


def random_instance(rng: random.Random, n, horizon=10, box=10.0, q=(5.0, 40.0), capacity=60.0,
                    speed=4.0, name="r"):
    points = [(rng.uniform(0, box), rng.uniform(0, box)) for _ in range(n)]
    quantities = [round(rng.uniform(*q), 2) for _ in range(n)]
    windows = []
    for _ in range(n):
        e = rng.randint(0, horizon // 2)
        windows.append((e, rng.randint(max(e, (horizon + 1) // 2), horizon)))
    return make_instance(points, quantities, windows, capacity, speed, horizon,
                         depot=(box / 2, box / 2), name=name)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
