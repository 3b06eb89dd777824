import math

import numpy as np
import pytest
from hypothesis import settings

from qpcircle.maps import henon, standard
from qpcircle.recipe import RecipeConfig, run_recipe

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

COS_ALPHA = 0.24


@pytest.fixture(scope="session")
def henon_spec():
    return henon(cos_alpha=COS_ALPHA)


@pytest.fixture(scope="session")
def standard_spec():
    return standard(math.pi / 4)


@pytest.fixture(scope="session")
def henon_circle(henon_spec):
    """Converged period-1 circle through (0.4, 0)."""
    return run_recipe(RecipeConfig(henon_spec, (0.4, 0.0)))


@pytest.fixture(scope="session")
def standard_circle(standard_spec):
    return run_recipe(RecipeConfig(standard_spec, (math.pi, 1.0)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request):
    """``criterion(k, ok, detail)`` records a pass/fail line for the summary."""
    lines = request.config.stash[ACCEPTANCE_KEY]

    def record(k, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
        lines.append((k, line))
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines, key=lambda t: t[0]):
            terminalreporter.write_line(line)
