"""Batch evaluation, breakdowns, report emission and storage."""

from camobench.harness.breakdown import (
    AttributeBreakdown,
    BreakdownRow,
    RankHistogram,
    attr_breakdown,
    display_offsets,
    emit_breakdown,
    rank_histogram,
    render_rank_histogram_csv,
)
from camobench.harness.evaluate import (
    FIX_METRICS,
    RANK_METRICS,
    SEG_METRICS,
    attribute_report,
    eval_fix,
    eval_rank,
    eval_seg,
    load_fixation_points,
    load_prediction_instances,
    resolve_pred_roots,
)
from camobench.harness.report import (
    REPORT_FORMATS,
    AggregateRow,
    DatasetRow,
    EvaluationReport,
    MetricRow,
    compute_aggregates,
    emit_report,
    render_csv,
    render_json,
    render_markdown,
    report_metadata,
)
from camobench.harness.stats import DatasetStats, dataset_stats, emit_stats
from camobench.harness.storage import FileReportStorage, ReportStorageBackend

__all__ = [
    "FIX_METRICS",
    "RANK_METRICS",
    "REPORT_FORMATS",
    "SEG_METRICS",
    "AggregateRow",
    "AttributeBreakdown",
    "BreakdownRow",
    "DatasetRow",
    "DatasetStats",
    "EvaluationReport",
    "FileReportStorage",
    "MetricRow",
    "RankHistogram",
    "ReportStorageBackend",
    "attr_breakdown",
    "attribute_report",
    "compute_aggregates",
    "dataset_stats",
    "display_offsets",
    "emit_breakdown",
    "emit_report",
    "emit_stats",
    "eval_fix",
    "eval_rank",
    "eval_seg",
    "load_fixation_points",
    "load_prediction_instances",
    "rank_histogram",
    "render_csv",
    "render_json",
    "render_markdown",
    "render_rank_histogram_csv",
    "report_metadata",
    "resolve_pred_roots",
]
