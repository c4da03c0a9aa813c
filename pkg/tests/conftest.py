import os
import sys
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from lndkit import groebner
from lndkit.problem import fixture

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=1000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# every basis computed during the test run is re-checked with the
# Buchberger criterion
groebner.POSTHOC_CHECK = True


@lru_cache(maxsize=None)
def load(name):
    return fixture(name)


@pytest.fixture(scope="session")
def problem():
    return load


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    RESULTS = getattr(mod, "RESULTS", None)
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
