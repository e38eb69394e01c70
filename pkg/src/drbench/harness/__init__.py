"""Experiment orchestration: plans, grid-search sweep, rank aggregation, reports."""

from .plan import (
    BAYES,
    AlgorithmSpec,
    DatasetSpec,
    ExperimentPlan,
    bayes_metric_for,
    canonical_plan_json,
    default_plan,
    expand_grid,
    load_plan,
    plan_from_dict,
    validate_plan,
)
from .ranking import average_procrustes, rank_metrics
from .report import emit_report, scatter_svg
from .sweep import (
    SweepInterrupted,
    WorkItem,
    run_grid_search,
    run_search,
    run_work_item,
    score_winners,
    select_best,
    sweep_items,
)

__all__ = [
    "BAYES",
    "AlgorithmSpec",
    "DatasetSpec",
    "ExperimentPlan",
    "SweepInterrupted",
    "WorkItem",
    "average_procrustes",
    "bayes_metric_for",
    "canonical_plan_json",
    "default_plan",
    "emit_report",
    "expand_grid",
    "load_plan",
    "plan_from_dict",
    "rank_metrics",
    "run_grid_search",
    "run_search",
    "run_work_item",
    "scatter_svg",
    "score_winners",
    "select_best",
    "sweep_items",
    "validate_plan",
]
