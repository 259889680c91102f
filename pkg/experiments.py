"""
实验编排模块
实验配置、角度搜索 → 点集 → 测量 → 增长拟合的完整流程，以及基线比较
"""

import os
import math
import json
import logging
from dataclasses import dataclass, field, asdict, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import mpmath
from mpmath import mp

from config import config
from errors import ConfigError, DomainError, GridMismatchError, RationalDirectionError
from numtheory import to_fraction
import direction_sets as ds
import schedules
from angle_search import NestedIntervalCertificate, find_angle, natural_psi, tan_difference
from pointsets import PointSet, random_points, rotated_lattice, shifted_rotated_lattice
from discrepancy import (DiscrepancyReport, RectangleFamilySpec, Side, ThetaSequence,
                         best_shift, erdos_turan_bound, erdos_turan_optimal_m,
                         l2_fourier_side_identity, seq_discrepancy_ntheta, sup_discrepancy)
from discrepancy.report import CSV_COLUMNS
from storage import Manifest, load_certificate, read_json, save_certificate, write_csv, write_json

logger = logging.getLogger(__name__)

GENERATORS = ("rotated", "shifted", "random")
L2_COLUMNS = ["N", "slope_num", "slope_den", "Q", "mean_square", "fourier_bound", "tail_bound"]
MODELS = ("log", "power")


# ---------------------------------------------------------------- 配置

@dataclass
class MeasurementConfig:
    # 每个点集扫描的代表方向数
    budget: int = 16
    # 上确界扫描的网格分辨率
    resolution: int = 64
    family: Dict = field(default_factory=lambda: {
        "directions": 4, "w_min": 0.125, "w_max": 0.5, "steps": 3,
        "anchors": [0.25, 0.5, 0.75], "mode": "torus",
    })
    quadrature: int = 1024
    nu_max: int = 1000
    shift_candidates: int = 8
    # 拟合时排除更小的 N
    fit_min_n: int = 64
    generators: List[str] = field(default_factory=lambda: list(GENERATORS))

    def validate(self):
        checks = [
            (self.budget >= 1, "measurement.budget 必须 ≥ 1"),
            (self.resolution >= 2, "measurement.resolution 必须 ≥ 2"),
            (self.quadrature >= 1, "measurement.quadrature 必须 ≥ 1"),
            (self.nu_max >= 1, "measurement.nu_max 必须 ≥ 1"),
            (self.shift_candidates >= 1, "measurement.shift_candidates 必须 ≥ 1"),
            (self.fit_min_n >= 1, "measurement.fit_min_n 必须 ≥ 1"),
            (bool(self.generators) and set(self.generators) <= set(GENERATORS),
             f"measurement.generators 只能取 {', '.join(GENERATORS)}"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        fam = self.family
        try:
            if int(fam.get("directions", 4)) < 1 or int(fam.get("steps", 3)) < 1:
                raise ConfigError("measurement.family 的 directions 与 steps 必须 ≥ 1")
            if not 0 < float(fam.get("w_min", 0.125)) <= float(fam.get("w_max", 0.5)):
                raise ConfigError("measurement.family 需要 0 < w_min ≤ w_max")
        except (TypeError, ValueError) as e:
            raise ConfigError(f"measurement.family 无效: {e}") from e

    def family_spec(self, omega: ds.DirectionSet) -> RectangleFamilySpec:
        fam = self.family
        directions = ds.representatives(ds.augment_with_axes(omega), int(fam.get("directions", 4)))
        with mp.workprec(config.precision):
            directions = [float(d) for d in directions]
        try:
            return RectangleFamilySpec.geometric(
                directions, float(fam.get("w_min", 0.125)), float(fam.get("w_max", 0.5)),
                int(fam.get("steps", 3)), fam.get("anchors", (0.25, 0.5, 0.75)),
                fam.get("mode", "torus"))
        except DomainError as e:
            raise ConfigError(f"measurement.family 无效: {e}") from e


@dataclass
class ExperimentConfig:
    directions: Dict
    n_values: List[int]
    schedule: Dict = field(default_factory=dict)
    measurement: MeasurementConfig = field(default_factory=MeasurementConfig)
    seed: int = 0
    output_dir: str = "results"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        """解析并校验；以 "_" 开头的键是说明文字，忽略"""
        if not isinstance(data, dict):
            raise ConfigError("实验配置必须是 JSON 对象")
        data = {k: v for k, v in data.items() if not k.startswith("_")}
        known = {"directions", "n_values", "schedule", "measurement", "seed", "output_dir"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"未知配置段: {', '.join(sorted(unknown))}")
        if "directions" not in data or "n_values" not in data:
            raise ConfigError("实验配置缺少 directions 或 n_values")

        block = data.get("measurement") or {}
        block = {k: v for k, v in block.items() if not k.startswith("_")}
        try:
            measurement = MeasurementConfig(**block)
        except TypeError as e:
            raise ConfigError(f"measurement 段无效: {e}") from e

        try:
            n_values = [int(n) for n in data["n_values"]]
            seed = int(data.get("seed", 0))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"n_values 或 seed 无效: {e}") from e

        cfg = cls(
            directions={k: v for k, v in data["directions"].items() if not k.startswith("_")},
            n_values=n_values,
            schedule={k: v for k, v in (data.get("schedule") or {}).items()
                      if not k.startswith("_")},
            measurement=measurement,
            seed=seed,
            output_dir=str(data.get("output_dir", "results")),
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        try:
            data = read_json(path)
        except (json.JSONDecodeError, IOError) as e:
            raise ConfigError(f"无法读取实验配置 {path}: {e}") from e
        return cls.from_dict(data)

    def validate(self):
        if not self.n_values:
            raise ConfigError("n_values 不能为空")
        if self.n_values[0] < 1 or any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ConfigError("n_values 必须是严格递增的正整数")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed 必须位于 [0, 2^64)")
        self.measurement.validate()
        self.omega()

    def omega(self) -> ds.DirectionSet:
        try:
            return ds.from_dict(self.directions)
        except DomainError as e:
            raise ConfigError(f"directions 段无效: {e}") from e

    def build_schedule(self, omega: ds.DirectionSet) -> schedules.Schedule:
        """schedule 段给出 kind 时按字段构造，否则按方向集合选取并覆盖常数"""
        block = dict(self.schedule)
        if block.get("kind"):
            return schedules.from_dict(block)
        try:
            overrides = {k: Fraction(str(v)) for k, v in block.items() if k != "kind"}
            return schedules.schedule_for(omega, **overrides)
        except (ValueError, ZeroDivisionError, TypeError) as e:
            raise ConfigError(f"schedule 段无效: {e}") from e

    def to_dict(self) -> dict:
        return {
            "directions": self.directions,
            "n_values": self.n_values,
            "schedule": self.schedule,
            "measurement": asdict(self.measurement),
            "seed": self.seed,
            "output_dir": self.output_dir,
        }


def template() -> dict:
    """init 子命令写出的配置模板，每段的 "_doc" 说明各字段"""
    data = ExperimentConfig(
        directions={"kind": "lacunary", "base": "2", "include_axes": False},
        n_values=[64, 256, 1024, 4096],
    ).to_dict()
    data["_doc"] = "rotlattice 实验配置。以 _ 开头的键为说明文字，解析时忽略"
    data["directions"]["_doc"] = (
        "kind: finite | lacunary | lacunary_order_m | cantor。"
        "finite 用 angles（如 \"1/8\"）；lacunary 用 base；lacunary_order_m 用 M 与 base；"
        "cantor 用 ratio、lo、hi。include_axes 并入 θ+π/2 方向")
    data["schedule"]["_doc"] = (
        "留空时按方向集合选择参数表。可覆盖 c0、eps0、C_deriv、eps_delta；"
        "给出 kind（finite | lacunary | lacunary_order_m | minkowski）时按字段完整构造")
    data["measurement"]["_doc"] = (
        "budget: 每个点集扫描的方向数；resolution: 扫描网格分辨率（取 2 的幂）；"
        "family: L² 矩形族（directions 个方向、[w_min, w_max] 上 steps 个几何边长、"
        "anchors 中心网格、mode 为 torus 或 contained）；quadrature: 单边 L² 积分网格；"
        "nu_max: Fourier 截断；shift_candidates: Halton 平移候选数；"
        "fit_min_n: 拟合时排除更小的 N；generators: rotated | shifted | random")
    data["_doc_n_values"] = "严格递增的点数列表"
    data["_doc_seed"] = "随机基线的种子，同一种子输出逐字节相同"
    return data


# ---------------------------------------------------------------- 拟合

@dataclass(frozen=True)
class GrowthFit:
    """value ≈ C·log^p N（log）或 C·N^p（power），在对数数据上最小二乘"""
    model: str
    C: float
    p: float
    residual: float
    n_min: int
    n_max: int
    points: int

    def predict(self, N: float) -> float:
        x = math.log(N) if self.model == "power" else math.log(math.log(N))
        return self.C * math.exp(self.p * x)

    def to_dict(self) -> dict:
        return asdict(self)


def fit_growth(series: Sequence[Tuple[float, float]], model: str = "log") -> GrowthFit:
    if model not in MODELS:
        raise DomainError(f"未知模型 {model}")
    if len(series) < 3:
        raise DomainError("拟合至少需要 3 个点")
    Ns = np.array([float(n) for n, _ in series])
    values = np.array([float(v) for _, v in series])
    if (values <= 0).any():
        raise DomainError("拟合的取值必须为正")
    if model == "log":
        if (Ns <= 1).any():
            raise DomainError("log 模型要求 N > 1")
        x = np.log(np.log(Ns))
    else:
        if (Ns <= 0).any():
            raise DomainError("power 模型要求 N > 0")
        x = np.log(Ns)
    y = np.log(values)
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.linalg.norm(A @ coef - y))
    return GrowthFit(model, float(math.exp(coef[0])), float(coef[1]), residual,
                     int(Ns.min()), int(Ns.max()), len(series))


def predicted_growth(omega: ds.DirectionSet) -> dict:
    """
    各方向族的理论增长模型

    返回 {"linf", "l2", "one_dim"}，每项为 {"model", "p"}；有限集没有一维预测
    """
    base = omega.base if isinstance(omega, ds.AxesAugmented) else omega
    if isinstance(base, ds.Finite):
        return {"family": "finite", "linf": {"model": "log", "p": 1.0},
                "l2": {"model": "log", "p": 0.5}, "one_dim": None}
    if isinstance(base, (ds.Lacunary, ds.LacunaryOrderM)):
        M = base.M if isinstance(base, ds.LacunaryOrderM) else 1
        return {"family": base.kind, "linf": {"model": "log", "p": 2.0 * M + 1},
                "l2": {"model": "log", "p": 2.0 * M + 0.5},
                "one_dim": {"model": "log", "p": 2.0 * M + 1}}
    if isinstance(base, ds.CantorLike):
        info = ds.tau(base.dimension())
        tau_value = float(info.tau)
        if not info.meaningful:
            logger.warning("τ=%.4f ≥ 1：维数 d 超过 %.4f，Minkowski 估计没有意义",
                           tau_value, float(ds.MEANINGFUL_DIMENSION_LIMIT))
        p = tau_value / (2 * (tau_value + 1))
        return {"family": base.kind, "tau": tau_value, "meaningful": bool(info.meaningful),
                "linf": {"model": "power", "p": p}, "l2": {"model": "power", "p": p},
                "one_dim": {"model": "power", "p": tau_value / (tau_value + 1)}}
    raise DomainError(f"方向集合 {type(base).__name__} 没有理论模型")


def _safe_fit(series, model: str, n_min: int) -> Optional[dict]:
    kept = [(n, v) for n, v in series if n >= n_min and v > 0]
    try:
        return fit_growth(kept, model).to_dict()
    except DomainError as e:
        logger.warning("跳过 %s 拟合: %s", model, e)
        return None


# ---------------------------------------------------------------- 基线比较

@dataclass
class BaselineComparison:
    reference: str
    rows: List[Dict]
    fits: Dict[str, Optional[dict]]


def compare_baselines(reports: Dict[str, Sequence[DiscrepancyReport]],
                      reference: str = "rotated") -> BaselineComparison:
    """
    各生成器相对参考生成器的上确界比值及拟合指数

    Raises:
        GridMismatchError: 某个生成器没有报告，或各自的 N 网格不一致
    """
    if not reports:
        raise GridMismatchError("没有可比较的报告")
    grids = {}
    for name, items in reports.items():
        grid = [r.N for r in items]
        if not grid:
            raise GridMismatchError(f"生成器 {name} 没有任何 N")
        grids[name] = grid
    names = sorted(reports)
    if reference not in reports:
        reference = names[0]
    first = grids[reference]
    for name in names:
        if grids[name] != first:
            raise GridMismatchError(f"生成器 {name} 的 N 网格 {grids[name]} 与 {reference} 的 {first} 不一致")

    rows = []
    for i, N in enumerate(first):
        ref = reports[reference][i].sup
        row = {"N": N}
        for name in names:
            value = reports[name][i].sup
            row[f"{name}_sup"] = value
            if value == ref:
                row[f"{name}_ratio"] = 1.0
            else:
                row[f"{name}_ratio"] = value / ref if ref > 0 else math.inf
        rows.append(row)
    fits = {name: _safe_fit([(r.N, r.sup) for r in reports[name]], "log", 1) for name in names}
    return BaselineComparison(reference, rows, fits)


# ---------------------------------------------------------------- 主流程

@dataclass
class RunResult:
    out_dir: str
    certificate: NestedIntervalCertificate
    reports: Dict[str, List[DiscrepancyReport]]
    fits: dict
    files: List[str] = field(default_factory=list)


def _random_seed(seed: int, N: int) -> int:
    return int(np.random.SeedSequence([seed, N]).generate_state(1, dtype=np.uint64)[0])


def _side_slope(slope: Fraction, phi: float) -> Fraction:
    """矩形边在格点坐标系中较平缓的那个方向的斜率"""
    with mp.workprec(config.precision):
        t = -tan_difference(slope, mpmath.mpf(phi))
        if abs(t) > 1:
            t = -1 / t
        return to_fraction(t)


def l2_row(slope: Fraction, N: int, family: RectangleFamilySpec, mean_square: float,
           Q: int, nu_max: int) -> Dict:
    """
    l2.csv 的一行

    fourier_bound = 16·max_边 ∫(单边锯齿和)²：每个矩形四条边，(Σ₄)² ≤ 4·Σ₄，
    不计角单元的常数项
    """
    length = max(1, math.ceil(math.sqrt(N) * max(max(family.widths), max(family.heights))))
    worst_lhs, worst_tail = 0.0, 0.0
    for phi in sorted(set(family.directions)):
        t = _side_slope(slope, phi)
        ident = l2_fourier_side_identity(Side(0, 0, t), range(length), nu_max, Q)
        worst_lhs = max(worst_lhs, ident.lhs)
        worst_tail = max(worst_tail, ident.tail_bound)
    return {"N": str(N), "slope_num": str(slope.numerator), "slope_den": str(slope.denominator),
            "Q": str(Q), "mean_square": repr(float(mean_square)),
            "fourier_bound": repr(16.0 * worst_lhs), "tail_bound": repr(16.0 * worst_tail)}


def _one_dim_series(slope: Fraction, omega: ds.DirectionSet, Ns: Sequence[int], psi) -> List[dict]:
    """代表方向 θ 上 y = tan(α−θ) 的 {n·y} 差异度与 Erdős–Turán 上界"""
    with mp.workprec(config.precision):
        theta = ds.representatives(ds.effective(omega), 1)[0]
        y = to_fraction(tan_difference(slope, theta))
    series = []
    for N in Ns:
        m = erdos_turan_optimal_m(N, psi)
        try:
            bound = erdos_turan_bound(ThetaSequence(y, N), m)
        except RationalDirectionError:
            bound = None
        series.append({"N": N, "discrepancy": seq_discrepancy_ntheta(y, N), "m": m,
                       "erdos_turan": bound})
    return series


def _generate(name: str, N: int, slope: Fraction, cfg: ExperimentConfig,
              family: RectangleFamilySpec) -> Tuple[PointSet, Optional[float]]:
    if name == "rotated":
        return rotated_lattice(N, slope), None
    if name == "shifted":
        shift, value = best_shift(slope, N, family, cfg.measurement.shift_candidates)
        P = shifted_rotated_lattice(N, slope, shift)
        # 最优平移可能恰为 0，报告里仍按生成器标注
        P.meta = replace(P.meta, generator="shifted")
        return P, value
    return random_points(N, _random_seed(cfg.seed, N)), None


def run(cfg: ExperimentConfig, certificate_path: Optional[str] = None,
        out_dir: Optional[str] = None) -> RunResult:
    """
    完整实验：证书 → 各 N 的点集 → 上确界与 L² 报告 → 增长拟合 → 清单

    同一配置与种子得到逐字节相同的输出
    """
    out_dir = out_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    omega = cfg.omega()
    predicted = predicted_growth(ds.effective(omega))

    if certificate_path:
        cert = load_certificate(certificate_path)
        logger.info("复用证书 %s，斜率 %s", certificate_path, cert.slope)
    else:
        _, cert = find_angle(omega, cfg.build_schedule(omega))
    slope = cert.slope
    psi = cert.psi or natural_psi(cert.schedule)

    manifest = Manifest(out_dir)
    cert_file = save_certificate(cert, os.path.join(out_dir, "certificate.cert"))
    manifest.set_certificate(cert_file)

    m = cfg.measurement
    family = m.family_spec(omega)
    reports: Dict[str, List[DiscrepancyReport]] = {name: [] for name in m.generators}
    l2_rows, csv_rows = [], []
    for N in cfg.n_values:
        mean_square = None
        for name in m.generators:
            P, value = _generate(name, N, slope, cfg, family)
            if value is not None:
                mean_square = value
            report = sup_discrepancy(P, omega, m.budget, m.resolution)
            reports[name].append(report)
            csv_rows.extend(report.rows())
            logger.info("N=%d %s: sup=%.4f（调整 %d 个点）", N, name, report.sup, P.meta.adjustment)
        if mean_square is None:
            mean_square = family.mean_square(rotated_lattice(N, slope))
        l2_rows.append(l2_row(slope, N, family, mean_square, m.quadrature, m.nu_max))

    fits = {
        "fit_min_n": m.fit_min_n,
        "predicted": predicted,
        "generators": {
            name: {"log": _safe_fit([(r.N, r.sup) for r in items], "log", m.fit_min_n),
                   "power": _safe_fit([(r.N, r.sup) for r in items], "power", m.fit_min_n)}
            for name, items in reports.items()
        },
        "l2": _safe_fit([(int(r["N"]), float(r["mean_square"])) for r in l2_rows],
                        "log", m.fit_min_n),
    }
    one_dim = _one_dim_series(slope, omega, cfg.n_values, psi)
    fits["one_dim"] = {
        "series": one_dim,
        "fit": _safe_fit([(s["N"], s["discrepancy"]) for s in one_dim],
                         (predicted.get("one_dim") or {"model": "log"})["model"], m.fit_min_n),
    }
    if len(reports) > 1:
        try:
            comparison = compare_baselines(reports)
            fits["baselines"] = {"reference": comparison.reference, "rows": comparison.rows}
        except GridMismatchError as e:
            logger.warning("基线比较跳过: %s", e)

    files = [
        write_csv(os.path.join(out_dir, "report.csv"), CSV_COLUMNS, csv_rows),
        write_csv(os.path.join(out_dir, "l2.csv"), L2_COLUMNS, l2_rows),
        write_json(os.path.join(out_dir, "fits.json"), fits),
        write_json(os.path.join(out_dir, "summary.json"), {
            "slope": str(slope),
            "config": cfg.to_dict(),
            "reports": {name: [r.summary() for r in items] for name, items in reports.items()},
        }),
    ]
    for path in files:
        manifest.add(path)
    manifest.info = {"slope": str(slope), "n_values": cfg.n_values, "seed": cfg.seed}
    files.append(manifest.save())
    files.insert(0, cert_file)
    return RunResult(out_dir, cert, reports, fits, files)
