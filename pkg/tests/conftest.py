from __future__ import annotations

import functools

import pytest
from gmpy2 import mpq

from weylpoly.apartment import Apartment
from weylpoly.rootsys import build_root_system
from weylpoly.tessellation import Tessellation

RANK2 = ["A1xA1", "A2", "B2", "G2"]


def Q(s):
    return mpq(s)


@functools.lru_cache(maxsize=None)
def tess(spec: str, base: tuple | None = None, gram_scale: int = 1) -> Tessellation:
    """Shared, memoized tessellation objects (immutable after construction)."""
    return Tessellation(Apartment(build_root_system(spec, gram_scale=gram_scale),
                                  None if base is None else tuple(mpq(b) for b in base)))


@pytest.fixture(params=RANK2)
def rank2(request) -> Tessellation:
    return tess(request.param)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
