"""
Fusion Toolkit

Aggregation functions, penalty-based medians, weight fitting, string
consensus, informetric indices and numerical characteristics of fusion
functions.
"""

__version__ = "1.0.0"

from .errors import DimensionError, DomainError, FusionError, InputFormatError, SolverError, SolveStatus
from .fusion_config import get_fusion_config, reload_fusion_config
from .core import MeanSpec, aggregate, owa, wqam, falsify_property
from .integrals import MonotoneMeasure, choquet, sugeno, shilkret
from .optim import lp_solve, qp_solve, brent_minimize, qn_minimize
from .fitting import FitData, FitResult, fit_wam, fit_wqam_lse, fit_wqam_lad, fit_powmean
from .multivariate import PointCloud, weiszfeld_1median, tukey_depth, tukey_median_2d
from .strings import levenshtein, damerau_levenshtein, hamming_median, median_string_ga
from .informetric import SortedVarVector, dpr2_centroid, impact_index, universal_impact
from .characteristics import spread, spread_leq, orness, entropy
from .exemplar import SemimetricSpace, exemplar_exact, exemplar_pruned, exemplar_approx

__all__ = [
    "FusionError", "DomainError", "DimensionError", "SolverError", "InputFormatError", "SolveStatus",
    "get_fusion_config", "reload_fusion_config",
    "MeanSpec", "aggregate", "owa", "wqam", "falsify_property",
    "MonotoneMeasure", "choquet", "sugeno", "shilkret",
    "lp_solve", "qp_solve", "brent_minimize", "qn_minimize",
    "FitData", "FitResult", "fit_wam", "fit_wqam_lse", "fit_wqam_lad", "fit_powmean",
    "PointCloud", "weiszfeld_1median", "tukey_depth", "tukey_median_2d",
    "levenshtein", "damerau_levenshtein", "hamming_median", "median_string_ga",
    "SortedVarVector", "dpr2_centroid", "impact_index", "universal_impact",
    "spread", "spread_leq", "orness", "entropy",
    "SemimetricSpace", "exemplar_exact", "exemplar_pruned", "exemplar_approx",
]
