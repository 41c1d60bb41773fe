import os
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from opeglue.conformal import builtin_sl2, builtin_virasoro
from opeglue.enveloping import EnvelopingVA

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@lru_cache(maxsize=None)
def vir_va(cutoff: int) -> EnvelopingVA:
    return EnvelopingVA(builtin_virasoro(), cutoff)


@lru_cache(maxsize=None)
def sl2_va(cutoff: int) -> EnvelopingVA:
    return EnvelopingVA(builtin_sl2(), cutoff)


@pytest.fixture(scope="session")
def vir():
    return builtin_virasoro()


@pytest.fixture(scope="session")
def sl2():
    return builtin_sl2()


# one line per acceptance criterion, repeated at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
