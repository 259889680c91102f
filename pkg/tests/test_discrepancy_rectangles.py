"""矩形差异度测试"""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from config import config
from errors import DomainError, RectangleOutsideError
from direction_sets import Finite
from geometry import Rectangle
from pointsets import PointSet, random_points
from discrepancy import (RectangleFamilySpec, rect_discrepancy, sup_discrepancy,
                         sup_discrepancy_direction)
from discrepancy.report import CSV_COLUMNS


def _brute_sup_axis(points):
    """
    轴平行矩形上的精确上确界

    正偏差取闭矩形（半开矩形的极限），负偏差取开矩形，边只需落在点坐标或 0、1 上
    """
    N = len(points)
    xs = sorted({p[0] for p in points} | {0.0, 1.0})
    ys = sorted({p[1] for p in points} | {0.0, 1.0})
    best = 0.0
    for i, a in enumerate(xs):
        for b in xs[i:]:
            for k, c in enumerate(ys):
                for d in ys[k:]:
                    area = (b - a) * (d - c)
                    closed = sum(1 for x, y in points if a <= x <= b and c <= y <= d)
                    opened = sum(1 for x, y in points if a < x < b and c < y < d)
                    best = max(best, closed - N * area, N * area - opened)
    return best


def test_rect_discrepancy_on_half_grid(half_grid):
    assert rect_discrepancy(half_grid, Rectangle.axis_aligned(0.0, 1.0, 0.0, 1.0)) == 0
    assert rect_discrepancy(half_grid, Rectangle.axis_aligned(0.0, 0.5, 0.0, 0.5)) == 0
    assert rect_discrepancy(half_grid, Rectangle.axis_aligned(0.0, 0.75, 0.0, 0.5)) == 2 - 1.5


def test_rect_discrepancy_single_point():
    P = PointSet.from_points([(0.0, 0.0)])
    assert rect_discrepancy(P, Rectangle.axis_aligned(0.0, 0.5, 0.0, 0.5)) == pytest.approx(0.75)


def test_contained_mode_rejects_outside_rectangle(half_grid):
    with pytest.raises(RectangleOutsideError):
        rect_discrepancy(half_grid, Rectangle.axis_aligned(0.5, 1.25, 0.0, 0.5))


def test_unknown_mode(half_grid):
    with pytest.raises(DomainError):
        rect_discrepancy(half_grid, Rectangle.axis_aligned(0.0, 0.5, 0.0, 0.5), mode="sphere")


def test_torus_mode_wraps_around(half_grid):
    # [0.75, 1.125)² 绕回后只含原点
    R = Rectangle.axis_aligned(0.75, 1.125, 0.75, 1.125)
    assert rect_discrepancy(half_grid, R, "torus") == pytest.approx(1 - 4 * 0.375 ** 2)


def test_torus_mode_ignores_integer_translation():
    P = random_points(200, seed=3)
    R = Rectangle((0.875, 0.125), 0.3, 0.2, 0.4)
    base = rect_discrepancy(P, R, "torus")
    assert rect_discrepancy(P, R.translated(2, -1), "torus") == pytest.approx(base)


def test_torus_mode_rejects_large_rectangle(half_grid):
    with pytest.raises(DomainError):
        rect_discrepancy(half_grid, Rectangle((0.5, 0.5), 0.8, 0.8), "torus")


def test_sup_on_half_grid(half_grid):
    record = sup_discrepancy_direction(half_grid, 0)
    # [0, ½]² 的极限：4 个点、面积 ¼
    assert record.sup == pytest.approx(3.0)
    assert record.witness is not None
    assert record.witness.width == pytest.approx(0.5)
    assert record.witness.height == pytest.approx(0.5)


def test_sup_single_point():
    P = PointSet.from_points([(0.5, 0.5)])
    assert sup_discrepancy_direction(P, 0).sup == pytest.approx(1.0)


@settings(deadline=None, max_examples=40)
@given(st.lists(st.tuples(st.integers(0, 15), st.integers(0, 15)), min_size=1, max_size=6))
def test_sup_matches_brute_force_on_axis(cells):
    points = [(a / 16, b / 16) for a, b in cells]
    P = PointSet.from_points(points)
    assert sup_discrepancy_direction(P, 0, resolution=8).sup == pytest.approx(
        _brute_sup_axis(points), abs=1e-9)


def test_sup_is_symmetric_under_quarter_turn():
    P = random_points(20, seed=11)
    a = sup_discrepancy_direction(P, 0).sup
    b = sup_discrepancy_direction(P, math.pi / 2).sup
    assert a == pytest.approx(b, abs=1e-9)


def test_finer_resolution_never_decreases_sup():
    P = random_points(300, seed=5)
    coarse = sup_discrepancy_direction(P, 0.3, resolution=16).sup
    fine = sup_discrepancy_direction(P, 0.3, resolution=64).sup
    assert fine >= coarse - 1e-9


def test_sup_rejects_bad_arguments(half_grid):
    with pytest.raises(DomainError):
        sup_discrepancy_direction(half_grid, 0, resolution=1)
    with pytest.raises(DomainError):
        sup_discrepancy_direction(PointSet.from_points(np.zeros((0, 2))), 0)


def test_report_rows_and_summary(half_grid, single_thread):
    report = sup_discrepancy(half_grid, Finite((0,)), budget=4)
    assert len(report.records) == 2
    assert report.sup == max(r.sup for r in report.records)
    assert report.sup == pytest.approx(3.0, abs=1e-6)
    rows = report.rows()
    assert [list(row) for row in rows] == [CSV_COLUMNS, CSV_COLUMNS]
    assert [row["direction_index"] for row in rows] == ["0", "1"]
    assert rows[0]["N"] == "4"
    assert rows[0]["sup"] == repr(report.records[0].sup)
    summary = report.summary()
    assert summary["directions"] == 2
    assert summary["worst_theta"] == report.worst.theta


def test_threaded_sweep_matches_single_thread(monkeypatch):
    P = random_points(40, seed=2)
    omega = Finite((Fraction(1, 5),))
    monkeypatch.setattr(config, "threads", 1)
    serial = sup_discrepancy(P, omega, budget=8)
    monkeypatch.setattr(config, "threads", 4)
    threaded = sup_discrepancy(P, omega, budget=8)
    assert len(serial.records) == 4
    assert [r.sup for r in threaded.records] == [r.sup for r in serial.records]
    assert [r.theta for r in threaded.records] == [r.theta for r in serial.records]


def test_family_mean_square_vanishes_on_half_grid(half_grid):
    family = RectangleFamilySpec((0.0,), (0.5,), (0.5,))
    assert family.size() == 9
    assert family.mean_square(half_grid) == 0


def test_family_geometric_size():
    family = RectangleFamilySpec.geometric([0, 0.3], 0.1, 0.4, steps=3)
    assert family.widths[0] == pytest.approx(0.1)
    assert family.widths[-1] == pytest.approx(0.4)
    assert family.size() == 2 * 3 * 3 * 9
    assert family.to_dict()["mode"] == "torus"


def test_contained_family_skips_outside_rectangles(half_grid):
    family = RectangleFamilySpec((0.0,), (0.6,), (0.6,), mode="contained")
    assert family.size() == 1
    assert family.mean_square(half_grid) >= 0


@pytest.mark.parametrize("kwargs", [
    dict(directions=(), widths=(0.1,), heights=(0.1,)),
    dict(directions=(0.0,), widths=(0.8,), heights=(0.8,)),
    dict(directions=(0.0,), widths=(-0.1,), heights=(0.1,)),
    dict(directions=(0.0,), widths=(0.1,), heights=(0.1,), mode="sphere"),
])
def test_family_validation(kwargs):
    with pytest.raises(DomainError):
        RectangleFamilySpec(**kwargs)


def test_family_geometric_rejects_bad_grid():
    with pytest.raises(DomainError):
        RectangleFamilySpec.geometric([0], 0.5, 0.1, steps=3)
