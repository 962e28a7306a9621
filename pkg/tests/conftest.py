import sys
from functools import lru_cache

import pytest

from cartanlab.families import FamilySpec, build_family

ALPHA_ND = (0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0)


@lru_cache(maxsize=None)
def family(name, p, n, **kw):
    """Built algebras are shared across test modules; builders are deterministic."""
    return build_family(FamilySpec(name, p, tuple(n), **kw))


@pytest.fixture(scope="session")
def fam():
    return family


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
