"""
配置管理模块
优先读取环境变量，其次是用户目录下的 settings.json，再回退到 .env 文件与内置默认值
"""

import os
import json
from fractions import Fraction
from typing import Optional


SETTINGS_FILE = os.path.join(os.path.expanduser("~"), ".rotlattice", "settings.json")

# 内置默认值；有理常数用字符串保存，便于原样写回
DEFAULTS = {
    "ROTLATTICE_PRECISION": "128",
    "ROTLATTICE_C_ET": "6",
    "ROTLATTICE_RECIPROCAL_CONSTANT": "1",
    "ROTLATTICE_C0": "1/1048576",
    "ROTLATTICE_EPS0": "1/1024",
    "ROTLATTICE_EPS_DELTA": "1/1099511627776",
    "ROTLATTICE_C_DERIV": "4",
    "ROTLATTICE_R_CAP": "1000000",
    "ROTLATTICE_INTERVAL_BITS_CAP": "2048",
    "ROTLATTICE_REP_BUDGET": "64",
    "ROTLATTICE_THREADS": "0",
    "ROTLATTICE_LOG_LEVEL": "WARNING",
}


def load_env_file(env_path: str = None) -> dict:
    """
    从 .env 文件加载配置

    Args:
        env_path: .env 文件路径，默认为项目根目录下的 .env

    Returns:
        配置字典
    """
    if env_path is None:
        env_path = os.path.join(os.path.dirname(__file__), ".env")

    values = {}
    if os.path.exists(env_path):
        with open(env_path, 'r', encoding='utf-8') as f:
            for line in f:
                line = line.strip()
                # 跳过注释和空行
                if not line or line.startswith('#'):
                    continue
                if '=' in line:
                    key, value = line.split('=', 1)
                    values[key.strip()] = value.strip()
    return values


def load_settings_file(settings_path: str = None) -> Optional[dict]:
    """
    读取用户设置文件，键名与环境变量相同

    Returns:
        设置字典，文件不存在或损坏时返回 None
    """
    path = settings_path or SETTINGS_FILE
    if not os.path.exists(path):
        return None
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (json.JSONDecodeError, IOError):
        return None
    if not isinstance(data, dict):
        return None
    return {key: str(value) for key, value in data.items()}


class Config:
    """全局数值设置"""

    def __init__(self, env_path: str = None, settings_path: str = None):
        settings = load_settings_file(settings_path)
        env_values = load_env_file(env_path)

        def pick(key: str) -> str:
            # 优先级：环境变量 > settings.json > .env > 默认值
            return (
                os.getenv(key)
                or (settings.get(key) if settings else None)
                or env_values.get(key)
                or DEFAULTS[key]
            )

        self._raw = {key: pick(key) for key in DEFAULTS}
        self._errors: list = []

        # 工作精度（比特）
        self.precision: int = self._as_int("ROTLATTICE_PRECISION")
        # Erdős–Turán 常数
        self.c_et: Fraction = self._as_fraction("ROTLATTICE_C_ET")
        # 倒数和上界中被省略的绝对常数，单独报告
        self.reciprocal_sum_constant: Fraction = self._as_fraction("ROTLATTICE_RECIPROCAL_CONSTANT")
        # 嵌套区间默认常数
        self.c0: Fraction = self._as_fraction("ROTLATTICE_C0")
        self.eps0: Fraction = self._as_fraction("ROTLATTICE_EPS0")
        # 覆盖分辨率缩放（缺项族）
        self.eps_delta: Fraction = self._as_fraction("ROTLATTICE_EPS_DELTA")
        self.c_deriv: Fraction = self._as_fraction("ROTLATTICE_C_DERIV")
        # 阶段上限
        self.r_cap: int = self._as_int("ROTLATTICE_R_CAP")
        self.interval_bits_cap: int = self._as_int("ROTLATTICE_INTERVAL_BITS_CAP")
        self.rep_budget: int = self._as_int("ROTLATTICE_REP_BUDGET")
        self.threads: int = self._as_int("ROTLATTICE_THREADS")
        self.log_level: str = self._raw["ROTLATTICE_LOG_LEVEL"].upper()

        self._source = "settings" if settings else "env_file"

    @property
    def workers(self) -> int:
        """threads = 0 表示按 CPU 个数自动选择"""
        return self.threads or (os.cpu_count() or 1)

    def _as_int(self, key: str) -> int:
        try:
            return int(self._raw[key])
        except ValueError:
            self._errors.append(f"{key}={self._raw[key]!r} 不是整数")
            return int(DEFAULTS[key])

    def _as_fraction(self, key: str) -> Fraction:
        try:
            return Fraction(self._raw[key])
        except (ValueError, ZeroDivisionError):
            self._errors.append(f"{key}={self._raw[key]!r} 不是有理数")
            return Fraction(DEFAULTS[key])

    def validate(self) -> tuple[bool, str]:
        """
        验证配置是否有效

        Returns:
            (是否有效, 错误信息)
        """
        if self._errors:
            return False, self._errors[0]
        if self.precision < 64:
            return False, "ROTLATTICE_PRECISION 不能小于 64 比特"
        if self.c_et <= 0 or self.reciprocal_sum_constant <= 0:
            return False, "常数 C_ET 与倒数和常数必须为正"
        if not (0 < self.c0 < 1 and 0 < self.eps0 < 1 and 0 < self.eps_delta <= 1):
            return False, "c0、eps0 必须位于 (0, 1)，eps_delta 必须位于 (0, 1]"
        if self.c_deriv < 1:
            return False, "C_deriv 不能小于 1"
        if self.r_cap < 4 or self.interval_bits_cap < 64:
            return False, "阶段上限过小"
        if self.rep_budget < 1 or self.threads < 0:
            return False, "rep_budget 必须为正，threads 不能为负"
        if self.log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            return False, f"未知日志级别 {self.log_level}"
        return True, ""

    def __repr__(self) -> str:
        return (
            f"Config(precision={self.precision}, "
            f"c_et={self.c_et}, "
            f"c0={self.c0}, "
            f"eps0={self.eps0}, "
            f"r_cap={self.r_cap}, "
            f"source={self._source})"
        )


# 全局配置实例
config = Config()
