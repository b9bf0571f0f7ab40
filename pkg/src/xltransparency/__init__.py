"""Measure how many UI steps a reviewer needs to see the values and labels
behind each spreadsheet cell."""

from __future__ import annotations

__version__ = "0.1.0"

from .config import AuditConfig, StepCosts, load_config  # noqa: E402
from .score import OPAQUE, Score, score_add, score_sum  # noqa: E402
from .workbook import CellAddress, LoadOptions, WorkbookModel, load_workbook  # noqa: E402
from .scorer import Scorer, cell_score, chain_score, model_score  # noqa: E402
from .lint import Finding, lint  # noqa: E402
from .report import AuditReport, emit, run_audit  # noqa: E402

__all__ = [
    "AuditConfig",
    "AuditReport",
    "CellAddress",
    "Finding",
    "LoadOptions",
    "OPAQUE",
    "Score",
    "Scorer",
    "StepCosts",
    "WorkbookModel",
    "cell_score",
    "chain_score",
    "emit",
    "lint",
    "load_config",
    "load_workbook",
    "model_score",
    "run_audit",
    "score_add",
    "score_sum",
]
