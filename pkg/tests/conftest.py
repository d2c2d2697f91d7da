import math

import pytest

from nrulemaps import Arrangement, Line, Point, canonicalize_line


@pytest.fixture
def x3():
    """x-axis, y-axis, and y = x + 1."""
    return Arrangement.symbolic(
        [
            Line(0.0, 0.0, "L1"),
            Line(math.pi / 2, 0.0, "L2"),
            canonicalize_line(Point(0, 1), Point(1, 2), "L3"),
        ]
    )


@pytest.fixture
def y3():
    """y = 0, y = x, y = -x + 2."""
    return Arrangement.piecewise(
        [
            Line(0.0, 0.0, "A"),
            canonicalize_line(Point(0, 0), Point(1, 1), "B"),
            canonicalize_line(Point(0, 2), Point(1, 1), "C"),
        ]
    )
