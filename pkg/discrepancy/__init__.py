"""
差异度计算模块
"""

from discrepancy.one_dim import (
    ThetaSequence, erdos_turan_bound, erdos_turan_optimal_m, seq_discrepancy_ntheta,
    star_discrepancy_1d,
)
from discrepancy.report import DirectionRecord, DiscrepancyReport
from discrepancy.rectangles import (
    RectangleFamilySpec, rect_discrepancy, sup_discrepancy, sup_discrepancy_direction,
)
from discrepancy.decomposition import Side, sawtooth_side_sum, square_decomposition_check
from discrepancy.l2 import best_shift, l2_fourier_side_identity, l2_shift_discrepancy

__all__ = [
    "ThetaSequence", "erdos_turan_bound", "erdos_turan_optimal_m", "seq_discrepancy_ntheta",
    "star_discrepancy_1d", "DirectionRecord", "DiscrepancyReport", "RectangleFamilySpec",
    "rect_discrepancy", "sup_discrepancy", "sup_discrepancy_direction", "Side",
    "sawtooth_side_sum", "square_decomposition_check", "best_shift",
    "l2_fourier_side_identity", "l2_shift_discrepancy",
]
