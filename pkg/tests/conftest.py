"""
pytest 公共夹具
"""
import os
import sys
from fractions import Fraction

import pytest

# 与 run.py 相同：项目根目录放进 sys.path
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from config import config  # noqa: E402

GOLDEN = "0.61803398874989484820458683436563811772030917980576"


@pytest.fixture
def single_thread(monkeypatch):
    """测试内固定单线程，避免线程池改变日志顺序"""
    monkeypatch.setattr(config, "threads", 1)
    return config


@pytest.fixture
def golden():
    from mpmath import mpf, mp
    with mp.workprec(256):
        return mpf(GOLDEN)


@pytest.fixture
def half_grid():
    """N = 4、斜率 0 的 {0, 1/2}² 网格"""
    from pointsets import PointSet
    return PointSet.from_points([(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)],
                                generator="explicit")


@pytest.fixture
def unit_lattice():
    from geometry import LatticeSpec
    return LatticeSpec(Fraction(0), Fraction(1), (Fraction(0), Fraction(0)))
