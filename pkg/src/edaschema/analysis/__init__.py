"""Operating-point classification, parameter sensitivity and cross-stage baselines."""

from .correlation import CorrelationRow, parameter_correlation, pearson
from .matching import design_value, hpwl_baseline, match_series, worst_paths
from .metrics import (MatchedSeries, Pair, Sentinel, classification_metrics, compute_statistics,
                      directional_metrics, mae_decomposition, nearest_rank, regression_metrics,
                      tail_metrics)
from .operating import (OperatingClass, OperatingPoint, classify_operating_point, classify_scpr,
                        scpr)
from .report import METRICS, BaselineReport, Instance, ReportRow, baseline_report
from .sweep import clock_periods, sweep_manifest

__all__ = [
    "BaselineReport", "CorrelationRow", "Instance", "METRICS", "MatchedSeries", "OperatingClass",
    "OperatingPoint", "Pair", "ReportRow", "Sentinel", "baseline_report", "classification_metrics",
    "classify_operating_point", "classify_scpr", "clock_periods", "compute_statistics",
    "design_value", "directional_metrics", "hpwl_baseline", "mae_decomposition", "match_series",
    "nearest_rank", "parameter_correlation", "pearson", "regression_metrics", "scpr",
    "sweep_manifest", "tail_metrics", "worst_paths",
]
