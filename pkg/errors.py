"""
异常定义模块
所有库内错误都从 RotLatticeError 派生，CLI 根据 exit_code 决定退出码
"""

from typing import Optional


class RotLatticeError(Exception):
    """rotlattice 基础异常"""

    exit_code: int = 1


class ConfigError(RotLatticeError):
    """配置文件或参数无效"""

    exit_code = 2


class DomainError(RotLatticeError):
    """参数超出定义域（例如 δ ∉ (0,1)、d ≥ 1）"""

    exit_code = 2


class ScheduleInfeasibleError(RotLatticeError):
    """嵌套区间构造在某一阶段找不到足够长的剩余子区间"""

    exit_code = 3

    def __init__(self, stage: int, detail: str = ""):
        self.stage = stage
        message = f"schedule infeasible at stage {stage}"
        if detail:
            message += f"：{detail}"
        super().__init__(message)


class PrecisionExhaustedError(RotLatticeError):
    """精度预算耗尽"""

    exit_code = 4

    def __init__(self, stage: Optional[int] = None, certified: Optional[int] = None,
                 detail: str = ""):
        self.stage = stage
        self.certified = certified
        if stage is not None:
            message = f"precision exhausted at stage {stage}"
        else:
            message = f"precision exhausted after {certified} certified quotients"
        if detail:
            message += f"：{detail}"
        super().__init__(message)


class RationalDirectionError(RotLatticeError):
    """‖hθ‖ = 0，θ 是分母不超过 m 的有理数"""

    def __init__(self, denominator: int):
        self.denominator = denominator
        super().__init__(f"rational direction at denominator {denominator}")


class DegeneratePositionError(RotLatticeError):
    """矩形不在一般位置（格点落在边界上或顶点落在单元格边界上）"""

    def __init__(self, detail: str = ""):
        message = "perturb inputs"
        if detail:
            message += f"：{detail}"
        super().__init__(message)


class RectangleOutsideError(RotLatticeError):
    """contained 模式下矩形不在单位正方形内"""


class GridMismatchError(RotLatticeError):
    """比较基线时 N 网格不一致"""
