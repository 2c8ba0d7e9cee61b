"""Evaluation metrics: top-k accuracy, feature distances, Fréchet
distance, and k-NN precision/recall/density/coverage."""

from .fid import fid, fid_from_moments, trace_sqrt_product
from .prdc import knn_radii, pairwise_distances, prdc
from .report import (METRIC_COLUMNS, MetricsReport, read_report_csv,
                     write_report_csv, write_report_json)
from .scores import acc_at_k, feature_distance, top_k_hits

__all__ = [
    "METRIC_COLUMNS", "MetricsReport", "acc_at_k", "feature_distance",
    "fid", "fid_from_moments", "knn_radii", "pairwise_distances", "prdc",
    "read_report_csv", "top_k_hits", "trace_sqrt_product",
    "write_report_csv", "write_report_json",
]
