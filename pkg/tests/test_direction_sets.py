"""方向集合测试"""
import math
from fractions import Fraction

import pytest
import mpmath
from mpmath import mp, mpf

import direction_sets as ds
from errors import DomainError


def test_lacunary_cover_count():
    covering = ds.cover(ds.Lacunary(), Fraction(1, 2 ** 10))
    assert covering.count == 10
    assert covering.intervals[0] == ds.AngleInterval(Fraction(0), Fraction(1, 1024))


@pytest.mark.parametrize("k", range(1, 31))
def test_lacunary_cover_bound(k):
    covering = ds.cover(ds.Lacunary(), Fraction(1, 2 ** k))
    assert covering.count <= k + 1
    for j in range(1, 40):
        assert covering.contains(Fraction(1, 2 ** j))


def test_finite_cover():
    omega = ds.Finite((Fraction(1, 10), Fraction(1, 5), Fraction(3, 10)))
    assert ds.cover(omega, Fraction(1, 100)).count <= 3


@pytest.mark.parametrize("delta", [0, 1, Fraction(-1, 2), Fraction(3, 2)])
def test_cover_rejects_bad_delta(delta):
    with pytest.raises(DomainError):
        ds.cover(ds.Lacunary(), delta)


def test_cantor_middle_third():
    omega = ds.CantorLike(Fraction(1, 3), Fraction(0), Fraction(1))
    covering = ds.cover(omega, Fraction(1, 9))
    assert covering.count == 4
    assert [iv.lo for iv in covering.intervals] == [0, Fraction(2, 9), Fraction(2, 3), Fraction(8, 9)]
    assert all(iv.length == Fraction(1, 9) for iv in covering.intervals)


@pytest.mark.parametrize("k", range(1, 11))
def test_cantor_cover_scaling(k):
    omega = ds.CantorLike(Fraction(1, 3))
    delta = Fraction(1, 3 ** k)
    covering = ds.cover(omega, delta)
    d = ds.dimension(omega)
    assert covering.count * float(delta) ** float(d) <= 4


def test_order_m_with_m1_matches_lacunary():
    for k in range(2, 16):
        delta = Fraction(1, 2 ** k)
        assert ds.cover(ds.LacunaryOrderM(1), delta).count == ds.cover(ds.Lacunary(), delta).count


def test_order_m_cover_contains_elements():
    omega = ds.LacunaryOrderM(2)
    covering = ds.cover(omega, Fraction(1, 256))
    for j1 in range(1, 12):
        for j2 in range(j1, 12):
            assert covering.contains(Fraction(1, 2 ** j1) + Fraction(1, 2 ** j2))


def test_dimension():
    assert ds.dimension(ds.Finite((Fraction(1, 3),))) == 0
    assert ds.dimension(ds.Lacunary()) == 0
    assert ds.dimension(ds.CantorLike(Fraction(1, 64))) == Fraction(1, 6)
    d = ds.dimension(ds.CantorLike(Fraction(1, 3)))
    assert abs(d - mpmath.log(2) / mpmath.log(3)) < 1e-12
    assert abs(float(d) - 0.6309) < 1e-4


def test_tau():
    assert ds.tau(0).tau == 0
    info = ds.tau(Fraction(1, 6))
    assert info.tau == Fraction(22, 25)
    assert info.meaningful
    with mp.workprec(200):
        limit = 1 - mpmath.sqrt(mpf(2) / 3)
        assert abs(ds.tau(limit).tau - 1) < mpf(10) ** -30
    with pytest.raises(DomainError):
        ds.tau(1)


def test_representatives():
    assert ds.representatives(ds.Lacunary(), 3) == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
    angles = (Fraction(1, 10), Fraction(1, 5))
    assert ds.representatives(ds.Finite(angles), 5) == list(angles)
    assert ds.representatives(ds.LacunaryOrderM(2), 3) == [1, Fraction(3, 4), Fraction(1, 2)]


def test_representatives_deterministic():
    omega = ds.CantorLike(Fraction(1, 4))
    assert ds.representatives(omega, 16) == ds.representatives(omega, 16)
    assert len(ds.representatives(omega, 16)) == 16


def test_augment_empty_finite():
    aug = ds.augment_with_axes(ds.Finite(()))
    assert isinstance(aug, ds.Finite)
    assert aug.angles[0] == 0
    assert abs(aug.angles[1] - mp.pi / 2) < 1e-30
    assert len(aug.angles) == 2


def test_augment_single_direction():
    theta = Fraction(1, 8)
    aug = ds.augment_with_axes(ds.Finite((theta,)))
    values = sorted(float(a) for a in aug.angles)
    assert values == pytest.approx([0.0, 0.125, math.pi / 2, 0.125 + math.pi / 2])


def test_augment_lacunary_cover_count():
    delta = Fraction(1, 256)
    base = ds.cover(ds.Lacunary(), delta).count
    aug = ds.cover(ds.augment_with_axes(ds.Lacunary()), delta).count
    assert aug <= 2 * base + 2


def test_effective_honours_flag():
    omega = ds.Lacunary(include_axes=True)
    assert isinstance(ds.effective(omega), ds.AxesAugmented)
    assert ds.effective(ds.Lacunary()) == ds.Lacunary()


@pytest.mark.parametrize("omega", [
    ds.Finite((Fraction(1, 8), Fraction(1, 3))),
    ds.Lacunary(include_axes=True),
    ds.LacunaryOrderM(3),
    ds.CantorLike(Fraction(1, 64)),
])
def test_from_dict_inverts_to_dict(omega):
    assert ds.from_dict(omega.to_dict()) == omega


def test_from_dict_unknown_kind():
    with pytest.raises(DomainError):
        ds.from_dict({"kind": "spiral"})
