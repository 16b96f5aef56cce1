from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from morsetrace.generators import sphere_fixtures, zp_fixtures  # noqa: E402


@pytest.fixture(scope="session")
def spheres():
    return sphere_fixtures()


@pytest.fixture(scope="session")
def zp_spheres():
    return zp_fixtures()


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
