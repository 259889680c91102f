"""配置层测试"""
import json
from fractions import Fraction

import pytest

from config import Config, DEFAULTS


@pytest.fixture
def clean_env(monkeypatch):
    for key in DEFAULTS:
        monkeypatch.delenv(key, raising=False)
    return monkeypatch


def test_defaults(clean_env, tmp_path):
    cfg = Config(env_path=str(tmp_path / "missing.env"),
                 settings_path=str(tmp_path / "missing.json"))
    assert cfg.precision == 128
    assert cfg.c0 == Fraction(1, 2 ** 20)
    assert cfg.eps0 == Fraction(1, 1024)
    assert cfg.eps_delta == Fraction(1, 2 ** 40)
    assert cfg.c_deriv == 4
    assert cfg.validate() == (True, "")


def test_priority_env_over_settings_over_env_file(clean_env, tmp_path):
    env_file = tmp_path / ".env"
    env_file.write_text("# 注释\nROTLATTICE_PRECISION=200\nROTLATTICE_C_ET=5\n",
                        encoding="utf-8")
    settings = tmp_path / "settings.json"
    settings.write_text(json.dumps({"ROTLATTICE_PRECISION": 300}), encoding="utf-8")

    cfg = Config(env_path=str(env_file), settings_path=str(settings))
    assert cfg.precision == 300
    assert cfg.c_et == 5

    clean_env.setenv("ROTLATTICE_PRECISION", "400")
    cfg = Config(env_path=str(env_file), settings_path=str(settings))
    assert cfg.precision == 400


def test_broken_settings_file_is_ignored(clean_env, tmp_path):
    settings = tmp_path / "settings.json"
    settings.write_text("{not json", encoding="utf-8")
    cfg = Config(env_path=str(tmp_path / "none"), settings_path=str(settings))
    assert cfg.precision == 128


@pytest.mark.parametrize("key,value", [
    ("ROTLATTICE_PRECISION", "abc"),
    ("ROTLATTICE_PRECISION", "32"),
    ("ROTLATTICE_C0", "2"),
    ("ROTLATTICE_C0", "1/0"),
    ("ROTLATTICE_THREADS", "-1"),
    ("ROTLATTICE_LOG_LEVEL", "LOUD"),
])
def test_invalid_values_fail_validation(clean_env, tmp_path, key, value):
    clean_env.setenv(key, value)
    cfg = Config(env_path=str(tmp_path / "none"), settings_path=str(tmp_path / "none.json"))
    ok, message = cfg.validate()
    assert not ok
    assert message


def test_workers_defaults_to_cpu_count(clean_env, tmp_path):
    cfg = Config(env_path=str(tmp_path / "none"), settings_path=str(tmp_path / "none.json"))
    assert cfg.threads == 0
    assert cfg.workers >= 1
    cfg.threads = 3
    assert cfg.workers == 3
