#!/usr/bin/env python3
"""
rotlattice 命令行入口
"""

import os
import sys
import logging
import argparse
from fractions import Fraction
from typing import List, Optional

import mpmath
from mpmath import mp

from config import config
from errors import ConfigError, RotLatticeError
from angle_search import certificate_psi, find_angle, verify_certificate
from pointsets import random_points, rotated_lattice, shifted_rotated_lattice
from discrepancy import sup_discrepancy
from discrepancy.report import CSV_COLUMNS
import experiments
from storage import (load_certificate, load_pointset, read_csv, save_certificate,
                     save_pointset, write_csv, write_json)

VERSION = "rotlattice 1.0.0"


class TerminalUI:
    """终端输出"""

    # 颜色代码
    COLORS = {
        'reset': '\033[0m',
        'bold': '\033[1m',
        'dim': '\033[2m',
        'red': '\033[31m',
        'green': '\033[32m',
        'yellow': '\033[33m',
        'blue': '\033[34m',
        'cyan': '\033[36m',
    }

    @classmethod
    def color(cls, text: str, color_name: str) -> str:
        """非终端输出时不加颜色"""
        if not sys.stdout.isatty():
            return text
        return f"{cls.COLORS.get(color_name, '')}{text}{cls.COLORS['reset']}"

    @classmethod
    def print_header(cls, title: str):
        width = 60
        print()
        print(cls.color('═' * width, 'cyan'))
        print(cls.color(f'  {title}', 'bold'))
        print(cls.color('═' * width, 'cyan'))
        print()

    @classmethod
    def print_error(cls, text: str):
        print(cls.color(f'错误: {text}', 'red'), file=sys.stderr)

    @classmethod
    def print_warning(cls, text: str):
        print(cls.color(f'⚠ {text}', 'yellow'))

    @classmethod
    def print_success(cls, text: str):
        print(cls.color(f'✓ {text}', 'green'))

    @classmethod
    def print_info(cls, text: str):
        print(cls.color(f'ℹ {text}', 'blue'))

    @classmethod
    def print_field(cls, name: str, value):
        print(f"  {cls.color(name, 'cyan')}: {value}")

    @classmethod
    def print_divider(cls):
        print(cls.color('─' * 60, 'dim'))


class RotLatticeCLI:
    """子命令分发"""

    def __init__(self):
        self.ui = TerminalUI()

    def run(self, args) -> int:
        valid, error = config.validate()
        if not valid:
            raise ConfigError(error)
        if args.threads is not None:
            if args.threads < 0:
                raise ConfigError("--threads 不能为负")
            config.threads = args.threads
        handler = getattr(self, "_cmd_" + args.command.replace("-", "_"))
        return handler(args) or 0

    # ------------------------------------------------------------ 辅助

    def _load_config(self, args) -> experiments.ExperimentConfig:
        if not args.config:
            raise ConfigError("需要 --config <实验配置文件>")
        cfg = experiments.ExperimentConfig.load(args.config)
        if getattr(args, "seed", None) is not None:
            cfg.seed = args.seed
            cfg.validate()
        return cfg

    def _slope(self, args) -> Fraction:
        if getattr(args, "certificate", None):
            return load_certificate(args.certificate).slope
        if getattr(args, "slope", None):
            try:
                return Fraction(args.slope)
            except (ValueError, ZeroDivisionError) as e:
                raise ConfigError(f"--slope 无效: {e}") from e
        raise ConfigError("需要 --certificate 或 --slope")

    def _out_dir(self, args, cfg: Optional[experiments.ExperimentConfig] = None) -> str:
        out = args.out or (cfg.output_dir if cfg else "results")
        os.makedirs(out, exist_ok=True)
        return out

    # ------------------------------------------------------------ 子命令

    def _cmd_angle_search(self, args) -> int:
        cfg = self._load_config(args)
        omega = cfg.omega()
        self.ui.print_header("角度搜索")
        slope, cert = find_angle(omega, cfg.build_schedule(omega), n_max=args.n_max,
                                 strict=args.strict)
        out = self._out_dir(args, cfg)
        path = save_certificate(cert, os.path.join(out, "certificate.cert"))
        q_lo, q_hi = cert.verified_q_range
        self.ui.print_field("参数表", cert.schedule.describe())
        self.ui.print_field("阶段", f"{cert.stages[0].n}..{cert.stages[-1].n}")
        self.ui.print_field("已认证 q", f"[{q_lo}, {q_hi}]")
        self.ui.print_field("slope", slope)
        with mp.workprec(config.precision):
            self.ui.print_field("α", mpmath.nstr(mpmath.atan(mpmath.mpf(slope.numerator) / slope.denominator), 30))
            self.ui.print_field("全局常数", mpmath.nstr(cert.global_constant, 10))
        failed = [s.n for s in cert.stages if s.check is not None and not s.check.ok2]
        if failed:
            self.ui.print_warning(f"阶段 {failed} 不满足第二个不等式（按实际排除集继续）")
        if args.verify:
            report = verify_certificate(slope, omega, q_hi, certificate_psi(cert),
                                        config.rep_budget, q_min=q_lo)
            self.ui.print_field("验证 margin", mpmath.nstr(report.margin, 10))
            if report.margin <= 1:
                self.ui.print_error(f"证书验证失败：q={report.q}, p={report.p}")
                return 1
        self.ui.print_success(f"证书已写入 {path}")
        return 0

    def _cmd_pointset(self, args) -> int:
        if args.generator == "random":
            seed = args.seed if args.seed is not None else 0
            P = random_points(args.N, seed)
        else:
            slope = self._slope(args)
            if args.generator == "rotated":
                P = rotated_lattice(args.N, slope)
            else:
                shift = tuple(Fraction(s) for s in (args.shift or ["0", "0"]))
                P = shifted_rotated_lattice(args.N, slope, shift)
        path = save_pointset(P, args.out or f"pointset_{args.generator}_{args.N}.txt")
        self.ui.print_field("生成器", P.meta.generator)
        self.ui.print_field("点数", P.N)
        self.ui.print_field("调整", P.meta.adjustment)
        self.ui.print_success(f"点集已写入 {path}")
        return 0

    def _cmd_measure(self, args) -> int:
        cfg = self._load_config(args)
        P = load_pointset(args.pointset)
        m = cfg.measurement
        report = sup_discrepancy(P, cfg.omega(), m.budget, m.resolution)
        out = self._out_dir(args, cfg)
        write_csv(os.path.join(out, "report.csv"), CSV_COLUMNS, report.rows())
        write_json(os.path.join(out, "report_summary.json"), report.summary())
        self.ui.print_header(f"差异度 N={P.N}")
        for index, record in enumerate(report.records):
            self.ui.print_field(f"θ[{index}]={record.theta:.6f}", f"{record.sup:.4f}")
        self.ui.print_divider()
        self.ui.print_field("sup", f"{report.sup:.4f}")
        self.ui.print_success(f"报告已写入 {out}")
        return 0

    def _cmd_l2(self, args) -> int:
        cfg = self._load_config(args)
        slope = self._slope(args)
        m = cfg.measurement
        family = m.family_spec(cfg.omega())
        rows = []
        for N in cfg.n_values:
            _, value = experiments.best_shift(slope, N, family, m.shift_candidates)
            rows.append(experiments.l2_row(slope, N, family, value, m.quadrature, m.nu_max))
            self.ui.print_field(f"N={N}", f"均方差异度 {value:.6g}")
        out = self._out_dir(args, cfg)
        write_csv(os.path.join(out, "l2.csv"), experiments.L2_COLUMNS, rows)
        self.ui.print_success(f"L² 报告已写入 {out}")
        return 0

    def _cmd_experiment(self, args) -> int:
        cfg = self._load_config(args)
        self.ui.print_header("实验")
        result = experiments.run(cfg, certificate_path=args.certificate, out_dir=args.out)
        self.ui.print_field("slope", result.certificate.slope)
        for name, fit in result.fits["generators"].items():
            log_fit = fit.get("log")
            if log_fit:
                self.ui.print_field(name, f"sup ≈ {log_fit['C']:.4g}·log^{log_fit['p']:.3f} N")
        for path in result.files:
            self.ui.print_info(path)
        self.ui.print_success(f"实验完成，输出目录 {result.out_dir}")
        return 0

    def _cmd_fit(self, args) -> int:
        rows = read_csv(args.input)
        if args.generator:
            rows = [r for r in rows if r.get("generator") == args.generator]
        best = {}
        for r in rows:
            try:
                N, value = int(r["N"]), float(r[args.column])
            except (KeyError, ValueError) as e:
                raise ConfigError(f"{args.input} 缺少列 N 或 {args.column}: {e}") from e
            best[N] = max(best.get(N, value), value)
        fit = experiments.fit_growth(sorted(best.items()), args.model)
        self.ui.print_field("模型", fit.model)
        self.ui.print_field("C", f"{fit.C:.6g}")
        self.ui.print_field("p", f"{fit.p:.6f}")
        self.ui.print_field("残差", f"{fit.residual:.3g}")
        if args.out:
            write_json(args.out, fit.to_dict())
            self.ui.print_success(f"拟合已写入 {args.out}")
        return 0

    def _cmd_init(self, args) -> int:
        path = args.out or "rotlattice.json"
        if os.path.exists(path) and not args.force:
            raise ConfigError(f"{path} 已存在（使用 --force 覆盖）")
        write_json(path, experiments.template())
        self.ui.print_success(f"配置模板已写入 {path}")
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotlattice",
        description="旋转格点差异度工具",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用示例:
  rotlattice init --out exp.json                        # 写出配置模板
  rotlattice angle-search --config exp.json --verify    # 构造并验证角度证书
  rotlattice pointset 1024 --certificate out/certificate.cert --out p.txt
  rotlattice measure --config exp.json --pointset p.txt
  rotlattice experiment --config exp.json --out out     # 完整实验
  rotlattice fit --input out/report.csv --model log

退出码:
  0 成功，2 配置错误，3 参数表不可行，4 精度耗尽
        """
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="输出 INFO 级日志")
    parser.add_argument("--threads", type=int, default=None, help="线程数（0 为自动）")
    parser.add_argument("--version", action="version", version=VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="实验配置文件（JSON）")
    common.add_argument("--out", help="输出目录或文件")
    common.add_argument("--seed", type=int, default=None, help="随机种子（覆盖配置）")
    common.add_argument("--certificate", help="复用已有的角度证书")

    p = sub.add_parser("angle-search", parents=[common], help="构造角度证书")
    p.add_argument("--n-max", type=int, default=None, help="最后一个阶段")
    p.add_argument("--strict", action="store_true", help="第二个不等式不成立时报错")
    p.add_argument("--verify", action="store_true", help="构造后独立验证")

    p = sub.add_parser("pointset", parents=[common], help="生成点集文件")
    p.add_argument("N", type=int, help="点数")
    p.add_argument("--generator", choices=experiments.GENERATORS, default="rotated")
    p.add_argument("--slope", help="旋转斜率（有理数，如 3/7）")
    p.add_argument("--shift", nargs=2, metavar=("X", "Y"), help="平移 ω")

    p = sub.add_parser("measure", parents=[common], help="测量点集的方向差异度")
    p.add_argument("--pointset", required=True, help="点集文件")

    sub.add_parser("l2", parents=[common], help="L² 平移平均报告")
    sub.add_parser("experiment", parents=[common], help="完整实验")

    p = sub.add_parser("fit", parents=[common], help="增长率拟合")
    p.add_argument("--input", required=True, help="report.csv 或 l2.csv")
    p.add_argument("--column", default="sup", help="拟合的列")
    p.add_argument("--model", choices=experiments.MODELS, default="log")
    p.add_argument("--generator", help="只拟合该生成器的行")

    p = sub.add_parser("init", parents=[common], help="写出配置模板")
    p.add_argument("--force", action="store_true", help="覆盖已有文件")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = "INFO" if args.verbose and config.log_level != "DEBUG" else config.log_level
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    cli = RotLatticeCLI()
    try:
        return cli.run(args)
    except RotLatticeError as e:
        TerminalUI.print_error(str(e))
        return e.exit_code
    except OSError as e:
        TerminalUI.print_error(f"文件读写失败: {e}")
        return 1
    except KeyboardInterrupt:
        print()
        TerminalUI.print_info("已中断")
        return 130


if __name__ == "__main__":
    sys.exit(main())
