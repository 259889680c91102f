"""文件格式测试"""
from fractions import Fraction

import numpy as np
import pytest

import direction_sets as ds
from errors import ConfigError
from angle_search import find_angle
from pointsets import random_points, rotated_lattice, shifted_rotated_lattice
from storage import (Manifest, load_certificate, load_pointset, read_csv, read_json,
                     save_certificate, save_pointset, write_csv, write_json)
from storage.certificate import certificate_from_dict, certificate_to_dict


def test_json_output_is_sorted_and_keeps_unicode(tmp_path):
    path = write_json(str(tmp_path / "sub" / "a.json"), {"b": 1, "a": "差异度"})
    text = open(path, encoding="utf-8").read()
    assert text.index('"a"') < text.index('"b"')
    assert "差异度" in text
    assert text.endswith("\n")
    assert read_json(path) == {"a": "差异度", "b": 1}


def test_csv_fills_missing_columns(tmp_path):
    path = write_csv(str(tmp_path / "t.csv"), ["x", "y", "z"],
                     [{"x": "1", "y": "2"}, {"x": "3", "z": "4", "extra": "ignored"}])
    assert open(path, encoding="utf-8").read().splitlines()[0] == "x,y,z"
    assert read_csv(path) == [{"x": "1", "y": "2", "z": ""}, {"x": "3", "y": "", "z": "4"}]


def test_pointset_file_preserves_coordinates(tmp_path):
    P = rotated_lattice(37, Fraction(2, 5))
    path = save_pointset(P, str(tmp_path / "p.txt"))
    Q = load_pointset(path)
    assert np.array_equal(P.points, Q.points)
    assert Q.meta.slope == Fraction(2, 5)
    assert Q.meta.adjustment == P.meta.adjustment
    assert Q.meta.generator == "rotated"


def test_pointset_file_layout(tmp_path):
    P = shifted_rotated_lattice(16, Fraction(3, 7), (Fraction(1, 4), Fraction(1, 3)))
    path = save_pointset(P, str(tmp_path / "s.txt"))
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0].startswith(
        "N=16 slope=3/7 shift=0.25,0.33333333333333331 generator=shifted ")
    assert len(lines) == 1 + 16
    for line, (x, y) in zip(lines[1:], P.points):
        xs, ys = line.split(" ")
        assert (xs, ys) == (format(x, ".17g"), format(y, ".17g"))
        assert (float(xs), float(ys)) == (x, y)

    slope_zero = save_pointset(rotated_lattice(4, 0), str(tmp_path / "z.txt"))
    assert open(slope_zero, encoding="utf-8").readline().startswith("N=4 slope=0/1 ")


def test_random_pointset_keeps_seed(tmp_path):
    P = random_points(10, seed=42)
    path = save_pointset(P, str(tmp_path / "r.txt"))
    assert "slope=none" in open(path, encoding="utf-8").readline()
    Q = load_pointset(path)
    assert Q.meta.seed == 42
    assert Q.meta.slope is None
    assert np.array_equal(P.points, Q.points)


@pytest.mark.parametrize("text", [
    "",
    "N=2 slope=0/1 generator=rotated\n0.1 0.1\n0.2 0.2\n",
    "N=2 slope=0/1 shift=0,0 generator=rotated\n0.1 0.1\n",
    "N=1 slope=0/1 shift=0,0 generator=rotated\n0.1 0.1 0.1\n",
    "N=1 slope=a/b shift=0,0 generator=rotated\n0.1 0.1\n",
    "N=1 slope=0/1 shift=0 generator=rotated\n0.1 0.1\n",
    "N=1 slope=0/1 shift=0,0 generator=rotated\nx y\n",
    "N=1 slope shift=0,0 generator=rotated\n0.1 0.1\n",
])
def test_pointset_file_validation(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        load_pointset(str(path))


def test_missing_pointset_file(tmp_path):
    with pytest.raises(ConfigError):
        load_pointset(str(tmp_path / "missing.txt"))


@pytest.fixture(scope="module")
def certificate():
    _, cert = find_angle(ds.Finite((Fraction(0),)), n_max=3)
    return cert


def test_certificate_file_reloads(tmp_path, certificate):
    path = save_certificate(certificate, str(tmp_path / "c.cert"))
    loaded = load_certificate(path)
    assert loaded.slope == certificate.slope
    assert loaded.is_nested()
    assert [s.interval.to_pair() for s in loaded.chain] == \
        [s.interval.to_pair() for s in certificate.chain]
    assert [s.exclusions for s in loaded.chain] == [s.exclusions for s in certificate.chain]
    assert loaded.schedule.to_dict() == certificate.schedule.to_dict()
    assert loaded.omega.to_dict() == certificate.omega.to_dict()
    assert loaded.verified_q_range == certificate.verified_q_range


def test_certificate_rational_fields_are_exact_strings(certificate):
    data = certificate_to_dict(certificate)
    assert Fraction(data["slope"]) == certificate.slope
    lo, hi = data["chain"][-1]["interval"]
    assert Fraction(lo) < certificate.slope < Fraction(hi)


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(format="other"),
    lambda d: d.update(version=99),
    lambda d: d.update(slope="1/3"),
    lambda d: d.update(chain=[]),
    lambda d: d.pop("window"),
])
def test_certificate_validation(certificate, mutate):
    data = certificate_to_dict(certificate)
    mutate(data)
    with pytest.raises(ConfigError):
        certificate_from_dict(data)


def test_manifest_detects_changes(tmp_path):
    out = str(tmp_path)
    a = write_json(str(tmp_path / "a.json"), {"x": 1})
    cert = write_json(str(tmp_path / "c.cert"), {"format": "demo"})
    manifest = Manifest(out)
    manifest.add(a)
    manifest.set_certificate(cert)
    manifest.save()

    loaded = Manifest.load(out)
    assert loaded.certificate == "c.cert"
    assert loaded.to_dict()["certificate_sha256"] == loaded.files["c.cert"]
    assert all(loaded.verify().values())

    write_json(a, {"x": 2})
    assert loaded.verify() == {"a.json": False, "c.cert": True}
