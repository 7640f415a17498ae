import sys

import pytest
from hypothesis import HealthCheck, settings

from rigidcalc.fpmodules import RingPresentation
from rigidcalc.polycore import Field

settings.register_profile("ci", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

QQ = Field()


def ring(names, rels=(), inv=(), field=QQ):
    return RingPresentation(field, list(names), list(rels), list(inv))


@pytest.fixture(autouse=True)
def _fresh_caches():
    from rigidcalc.dualizing import clear_dualizing_cache
    from rigidcalc.squaring import clear_caches
    yield
    clear_caches()
    clear_dualizing_cache()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
