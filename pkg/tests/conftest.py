import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cuspbergman.bergman import build_ortho

settings.register_profile(
    "repo", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("repo")

_CACHE = {}


def ortho_for(k, y_min=0.85):
    key = (str(k), y_min)
    if key not in _CACHE:
        _CACHE[key] = build_ortho(k, y_min=y_min)
    return _CACHE[key]


@pytest.fixture(scope="session")
def ortho():
    return ortho_for


def random_points_in_F(n, seed, y_extra=2.0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-0.5, 0.5, n)
    return x + 1j * (np.sqrt(1.0 - x**2) + rng.uniform(0.0, y_extra, n))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
