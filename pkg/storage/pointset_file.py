"""
点集文件
文本格式：首行 "N=<int> slope=<num>/<den> shift=<x>,<y> generator=<kind>"，
其后可跟 scale/pre_count/adjustment/seed；再接 N 行 "x y"，17 位有效数字
随机点没有斜率，写作 slope=none
"""

from fractions import Fraction
from typing import Dict

import numpy as np

from errors import ConfigError
from pointsets import PointSet, PointSetMeta
from storage.tables import ensure_dir

REQUIRED = ("N", "slope", "shift", "generator")


def _num(x: float) -> str:
    return format(float(x), ".17g")


def format_header(P: PointSet) -> str:
    m = P.meta
    slope = "none" if m.slope is None else f"{m.slope.numerator}/{m.slope.denominator}"
    fields = [
        f"N={P.N}",
        f"slope={slope}",
        f"shift={_num(m.shift[0])},{_num(m.shift[1])}",
        f"generator={m.generator}",
        f"scale={_num(m.scale)}",
        f"pre_count={m.pre_count}",
        f"adjustment={m.adjustment}",
    ]
    if m.seed is not None:
        fields.append(f"seed={m.seed}")
    return " ".join(fields)


def parse_header(line: str) -> Dict[str, str]:
    fields = {}
    for token in line.split():
        if "=" not in token:
            raise ConfigError(f"点集文件首行无法解析: {token!r}")
        key, value = token.split("=", 1)
        if not value:
            raise ConfigError(f"点集文件首行无法解析: {token!r}")
        fields[key] = value
    missing = [k for k in REQUIRED if k not in fields]
    if missing:
        raise ConfigError(f"点集文件首行缺少字段: {', '.join(missing)}")
    return fields


def _meta_from_header(fields: Dict[str, str]) -> PointSetMeta:
    try:
        sx, sy = fields["shift"].split(",")
        return PointSetMeta(
            generator=fields["generator"],
            slope=None if fields["slope"] == "none" else Fraction(fields["slope"]),
            shift=(float(sx), float(sy)),
            scale=float(fields.get("scale", "1")),
            pre_count=int(fields.get("pre_count", "0")),
            adjustment=int(fields.get("adjustment", "0")),
            seed=int(fields["seed"]) if "seed" in fields else None,
        )
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"点集文件首行内容无效: {e}") from e


def save_pointset(P: PointSet, path: str) -> str:
    ensure_dir(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_header(P) + "\n")
        if P.N:
            np.savetxt(f, P.points, fmt="%.17g", delimiter=" ")
    return path


def load_pointset(path: str) -> PointSet:
    try:
        with open(path, "r", encoding="utf-8") as f:
            header = f.readline()
            body = [line for line in f if line.strip()]
    except (IOError, UnicodeDecodeError) as e:
        raise ConfigError(f"无法读取点集 {path}: {e}") from e

    fields = parse_header(header)
    meta = _meta_from_header(fields)
    try:
        N = int(fields["N"])
        points = (np.loadtxt(body, dtype=np.float64, ndmin=2) if body
                  else np.empty((0, 2), dtype=np.float64))
    except ValueError as e:
        raise ConfigError(f"点集文件坐标无效: {e}") from e
    if points.shape[1] != 2:
        raise ConfigError("点集文件每行必须是 \"x y\"")
    if len(points) != N:
        raise ConfigError(f"点集文件的 N={N} 与坐标行数 {len(points)} 不一致")
    return PointSet(points, meta)
