"""
差异度报告
"""

from dataclasses import dataclass
from typing import Dict, List, Optional

from geometry import Rectangle
from pointsets import PointSetMeta

CSV_COLUMNS = ["generator", "N", "slope_num", "slope_den", "direction_index", "theta",
               "sup", "witness_cx", "witness_cy", "witness_w", "witness_h", "resolution"]


def _fmt(value: float) -> str:
    """浮点数统一用 repr，保证输出字节稳定"""
    return repr(float(value))


@dataclass(frozen=True)
class DirectionRecord:
    theta: float
    sup: float
    witness: Optional[Rectangle] = None


@dataclass
class DiscrepancyReport:
    """各方向上确界及其见证矩形；sup 为所有方向的最大值"""
    records: List[DirectionRecord]
    meta: PointSetMeta
    resolution: int = 64
    budget: int = 64
    N: Optional[int] = None

    @property
    def sup(self) -> float:
        return max((r.sup for r in self.records), default=0.0)

    @property
    def worst(self) -> Optional[DirectionRecord]:
        if not self.records:
            return None
        return max(self.records, key=lambda r: r.sup)

    def rows(self) -> List[Dict[str, str]]:
        """每个方向一行，列见 CSV_COLUMNS"""
        slope = self.meta.slope
        num = "" if slope is None else str(slope.numerator)
        den = "" if slope is None else str(slope.denominator)
        result = []
        for index, record in enumerate(self.records):
            w = record.witness.to_dict() if record.witness else {}
            result.append({
                "generator": self.meta.generator,
                "N": str(self.N),
                "slope_num": num,
                "slope_den": den,
                "direction_index": str(index),
                "theta": _fmt(record.theta),
                "sup": _fmt(record.sup),
                "witness_cx": _fmt(w["cx"]) if w else "",
                "witness_cy": _fmt(w["cy"]) if w else "",
                "witness_w": _fmt(w["w"]) if w else "",
                "witness_h": _fmt(w["h"]) if w else "",
                "resolution": str(self.resolution),
            })
        return result

    def summary(self) -> Dict:
        sups = [r.sup for r in self.records]
        worst = self.worst
        return {
            "generator": self.meta.generator,
            "N": self.N,
            "directions": len(self.records),
            "sup": self.sup,
            "mean_sup": sum(sups) / len(sups) if sups else 0.0,
            "worst_theta": worst.theta if worst else None,
            "resolution": self.resolution,
            "budget": self.budget,
            "adjustment": self.meta.adjustment,
        }
