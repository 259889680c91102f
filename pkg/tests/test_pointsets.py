"""点集生成测试"""
from fractions import Fraction

import numpy as np
import pytest

from errors import DomainError
from geometry import LatticeSpec, Rectangle
from pointsets import (PointSet, dyadic_centres, lattice_count_in_rect, random_points,
                       rotated_lattice, shifted_rotated_lattice)


def _as_set(P: PointSet):
    return {(float(x), float(y)) for x, y in P.points}


def test_square_grid_without_adjustment():
    P = rotated_lattice(4, 0)
    assert _as_set(P) == {(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)}
    assert P.meta.adjustment == 0
    assert P.meta.generator == "rotated"


def test_adjustment_removes_far_points():
    P = rotated_lattice(5, 0)
    assert P.N == 5
    # 5^{−1/2}·{0,1,2} 在每个方向上给出 3 个坐标
    assert P.meta.pre_count == 9
    assert P.meta.adjustment == 4
    assert (0.0, 0.0) not in _as_set(P)


def test_adjustment_breaks_ties_by_coordinates():
    P = rotated_lattice(2, 0)
    # 2^{−1/2} 间距下 [0,1)² 内有 4 个格点，删去离中心最远的两个
    assert P.meta.pre_count == 4
    assert P.meta.adjustment == 2
    assert P.N == 2
    assert (P.xs > 0.5).all()


def test_zero_shift_matches_rotated():
    slope = Fraction(1, 3)
    a = shifted_rotated_lattice(64, slope, (0, 0))
    b = rotated_lattice(64, slope)
    assert np.array_equal(a.points, b.points)


def test_shift_is_scaled():
    P = shifted_rotated_lattice(4, 0, (Fraction(1, 4), Fraction(1, 4)))
    assert _as_set(P) == {(0.125, 0.125), (0.625, 0.125), (0.125, 0.625), (0.625, 0.625)}
    assert P.meta.generator == "shifted"


def test_shift_reduced_mod_one():
    a = shifted_rotated_lattice(9, Fraction(1, 5), (Fraction(5, 4), Fraction(-3, 4)))
    b = shifted_rotated_lattice(9, Fraction(1, 5), (Fraction(1, 4), Fraction(1, 4)))
    assert np.array_equal(a.points, b.points)


@pytest.mark.parametrize("N", [1, 7, 100, 257])
def test_rotated_lattice_size_and_range(N):
    P = rotated_lattice(N, Fraction(2, 5))
    assert P.N == N
    assert (P.points >= 0).all() and (P.points < 1).all()
    assert len(_as_set(P)) == N


def test_random_points_deterministic():
    a, b = random_points(50, 7), random_points(50, 7)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, random_points(50, 8).points)
    single = random_points(1, 3)
    assert single.N == 1 and ((single.points >= 0) & (single.points < 1)).all()


def test_random_points_mean():
    P = random_points(10 ** 5, 0)
    assert abs(P.xs.mean() - 0.5) < 0.01


def test_invalid_sizes():
    with pytest.raises(DomainError):
        rotated_lattice(0, 0)
    with pytest.raises(DomainError):
        random_points(0, 1)
    with pytest.raises(DomainError):
        PointSet.from_points([(0.5, 1.0)])


def test_dyadic_centres_order():
    centres = dyadic_centres(5)
    assert centres[0] == (0.5, 0.5)
    assert centres[1:5] == [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)]


def test_lattice_count_in_rect(unit_lattice):
    R = Rectangle.axis_aligned(Fraction(-1, 2), Fraction(5, 2), Fraction(-1, 2), Fraction(1, 2))
    assert lattice_count_in_rect(unit_lattice, R) == 3
    spec = LatticeSpec(Fraction(0), 2, (0, 0))
    assert lattice_count_in_rect(spec, Rectangle.axis_aligned(0, 1, 0, 1)) == 4
