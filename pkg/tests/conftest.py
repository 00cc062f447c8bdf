import numpy as np
import pytest

from zaremba.domains import INNER, OUTER, DomainSpec
from zaremba.geometry import Box, PolytopeH

BOX_OUTER = (0.5, 0.75, 1.0)
BOX_INNER = (0.4, 0.65, 0.9)


def tetrahedron(inradius=1.0 / (2.0 * np.sqrt(6.0))):
    normals = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3.0)
    return PolytopeH(normals, np.full(4, inradius))


@pytest.fixture
def unit_cube():
    return Box(np.zeros(3), np.ones(3))


@pytest.fixture
def unit_square():
    return Box(np.zeros(2), np.ones(2))


@pytest.fixture
def boxes_inner_spec():
    return DomainSpec(Box.centered(BOX_OUTER), Box.centered(BOX_INNER), INNER)


@pytest.fixture
def squares_outer_spec():
    # outer side 4, inner side 1, both centred
    return DomainSpec(Box.centered((2.0, 2.0)), Box.centered((0.5, 0.5)), OUTER)


@pytest.fixture
def squares_inner_spec():
    return DomainSpec(Box.centered((2.0, 2.0)), Box.centered((0.5, 0.5)), INNER)


#: (criterion number, passed, detail) rows filled by test_acceptance.py
ACCEPTANCE = {}


def record_criterion(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
