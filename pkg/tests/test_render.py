from __future__ import annotations

import re
from decimal import Decimal

import pytest
from gmpy2 import mpq

from conftest import tess
from weylpoly.errors import UsageError
from weylpoly.render import clip_line_to_box, cholesky_decimal, convex_hull, fmt, render_arrangement, \
    render_tessellation, render_thickened


def test_decimal_rule():
    assert fmt(mpq(1, 8)) == "0.125"
    assert fmt(mpq(1, 3)) == "0.333333333333"
    assert fmt(mpq(2, 3)) == "0.666666666667"
    assert fmt(mpq(-5, 2)) == "-2.5"
    assert fmt(mpq(300)) == "300"
    assert fmt(0) == "0"
    # ties go to the even digit
    assert fmt(mpq(1234567890125, 10 ** 13)) == "0.123456789012"
    assert fmt(mpq(1234567890135, 10 ** 13)) == "0.123456789014"


def test_cholesky_factor():
    L = cholesky_decimal([[2, -1], [-1, 2]])
    prod = [[sum(L[i][k] * L[j][k] for k in range(2)) for j in range(2)] for i in range(2)]
    for i in range(2):
        for j in range(2):
            assert abs(prod[i][j] - Decimal([[2, -1], [-1, 2]][i][j])) < Decimal(10) ** -35


def test_hull_and_clipping():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (mpq(1, 2), mpq(1, 2)), (1, 0)]
    assert len(convex_hull(pts)) == 4
    seg = clip_line_to_box((1, 1), mpq(1), (0, 0), (1, 1))
    assert seg is not None and sorted(seg) == [(0, 1), (1, 0)]
    assert clip_line_to_box((1, 1), mpq(3), (0, 0), (1, 1)) is None


def test_arrangement_families():
    svg = render_arrangement("A2")
    assert {m for m in re.findall(r'class="wall (root\d+)"', svg)} == {"root0", "root1", "root2"}
    grid = render_arrangement("A1xA1")
    for x1, y1, x2, y2 in re.findall(r'<line class="wall root\d" x1="([^"]+)" y1="([^"]+)" x2="([^"]+)" '
                                     r'y2="([^"]+)"', grid):
        assert x1 == x2 or y1 == y2
    with pytest.raises(UsageError):
        render_arrangement("A3")
    with pytest.raises(UsageError):
        render_arrangement("A1")


def test_empty_window():
    p = (mpq(1, 7), mpq(1, 11))
    svg = render_arrangement("A2", (p, p))
    assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")
    assert "<line" not in svg


def test_determinism():
    T = tess("B2")
    assert render_tessellation(T) == render_tessellation(T)
    assert render_thickened("A2", None, mpq(1, 2), (-1, 1)) == render_thickened("A2", None, mpq(1, 2), (-1, 1))
    with pytest.raises(UsageError):
        render_thickened("A2", None, 1)


def test_tessellation_figure_has_one_polygon_per_vertex():
    T = tess("A2")
    svg = render_tessellation(T, None, (-1, 1))
    n_vertices = len(T.A.enumerate_vertices_in_window((-1, -1), (1, 1)))
    # one filled polygon per polytope, plus the window outline and clip path
    assert svg.count("<polygon") == n_vertices + 2
