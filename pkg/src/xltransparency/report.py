"""Audit pipeline, report rendering and exit codes.

``run_audit`` loads, scores and lints each workbook and returns one
:class:`AuditReport` per path. ``emit`` renders reports as plain text or as a
structured JSON document whose schema is described in docs/report-schema.md.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

from . import __version__
from .catalog import FunctionCatalog, default_catalog, load_catalog
from .config import FORMAT_STRUCTURED, FORMAT_TEXT, AuditConfig
from .labeling import Lexicons, default_lexicons, load_lexicons
from .lint import ERROR, Finding, count_by_severity, lint
from .score import TRANSPARENT, Score
from .scorer import ModelScore, ScoreBreakdown, Scorer
from .workbook import LoadOptions, WorkbookError, load_workbook

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_OPAQUE = 1
EXIT_BELOW_THRESHOLD = 2
EXIT_LOAD_FAILURE = 3
# worst-wins ranking across a batch
_EXIT_RANK = {EXIT_OK: 0, EXIT_BELOW_THRESHOLD: 1, EXIT_OPAQUE: 2, EXIT_LOAD_FAILURE: 3}


@dataclass(frozen=True)
class LoadFailure:
    kind: str
    message: str


@dataclass(frozen=True)
class ChainTotal:
    address: str
    mode: str
    total: Score


@dataclass
class AuditReport:
    path: str
    digest: Optional[str]
    config: AuditConfig
    model: Optional[ModelScore] = None
    findings: List[Finding] = field(default_factory=list)
    chains: List[ChainTotal] = field(default_factory=list)
    load_error: Optional[LoadFailure] = None
    seconds: float = 0.0
    tool_version: str = __version__
    # kept for figure rendering; never serialized
    scorer: Optional[Scorer] = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.load_error is None

    def exit_code(self) -> int:
        if self.load_error is not None:
            return EXIT_LOAD_FAILURE
        assert self.model is not None
        if self.model.total.is_opaque:
            return EXIT_OPAQUE
        threshold = self.config.fail_threshold
        if threshold is not None and self.model.total.value < threshold:
            return EXIT_BELOW_THRESHOLD
        return EXIT_OK


def batch_exit_code(reports: Iterable[AuditReport]) -> int:
    worst = EXIT_OK
    for report in reports:
        code = report.exit_code()
        if _EXIT_RANK[code] > _EXIT_RANK[worst]:
            worst = code
    return worst


def _digest(path: Path) -> Optional[str]:
    try:
        return hashlib.sha256(path.read_bytes()).hexdigest()
    except OSError:
        return None


def _resources(cfg: AuditConfig):
    catalog: FunctionCatalog
    if cfg.catalog_path:
        catalog = load_catalog(cfg.catalog_path, cfg.unknown_function_grade)
    else:
        catalog = default_catalog(cfg.unknown_function_grade)
    lexicons: Lexicons = load_lexicons(cfg.lexicon_path) if cfg.lexicon_path else default_lexicons()
    return catalog, lexicons


def audit_workbook(path, cfg: Optional[AuditConfig] = None, catalog=None, lexicons=None) -> AuditReport:
    """Load, score and lint one workbook. Load failures become part of the report."""
    cfg = cfg or AuditConfig()
    if catalog is None or lexicons is None:
        default_cat, default_lex = _resources(cfg)
        catalog = catalog or default_cat
        lexicons = lexicons or default_lex
    path = Path(path)
    started = time.perf_counter()
    report = AuditReport(str(path), _digest(path), cfg)
    try:
        wb = load_workbook(path, LoadOptions(disclosed_sheets=cfg.disclosed_sheets))
    except FileNotFoundError:
        report.load_error = LoadFailure("not-found", f"no such file: {path}")
    except WorkbookError as exc:
        report.load_error = LoadFailure(type(exc).__name__, str(exc))
    except OSError as exc:
        report.load_error = LoadFailure("os-error", str(exc))
    else:
        scorer = Scorer(wb, cfg, lexicons, catalog)
        model = scorer.model_score()
        report.model = model
        report.findings = lint(scorer, model)
        report.chains = [
            ChainTotal(str(addr), cfg.chain_mode, scorer.chain_score(addr, cfg.chain_mode))
            for addr in scorer.result_cells()
        ]
        report.scorer = scorer
    report.seconds = time.perf_counter() - started
    return report


def run_audit(paths: Sequence, cfg: Optional[AuditConfig] = None) -> List[AuditReport]:
    """One report per path, in input order. A failing file never stops the batch."""
    cfg = cfg or AuditConfig()
    catalog, lexicons = _resources(cfg)
    return [audit_workbook(p, cfg, catalog, lexicons) for p in paths]


# -- summaries -------------------------------------------------------------------


def summary_line(total: Score) -> str:
    if total.is_opaque:
        return "OPAQUE (some cells cannot be inspected)"
    if total.classification == TRANSPARENT:
        return "TRANSPARENT (0 steps from transparency)"
    return f"{total.value} steps from transparency"


def _items_text(bd: ScoreBreakdown) -> str:
    parts = []
    for item in bd.counted():
        cost = "opaque" if item.is_opaque else f"-{item.steps}"
        parts.append(f"{item.rule} {cost}: {item.description}")
    return "; ".join(parts)


# -- structured --------------------------------------------------------------------


def _config_json(cfg: AuditConfig) -> dict:
    return {
        "vicinity": {
            "rows_visible": cfg.vicinity.rows_visible,
            "cols_visible": cfg.vicinity.cols_visible,
            "honor_frozen_panes": cfg.vicinity.honor_frozen_panes,
        },
        "strict_labels": cfg.strict_labels,
        "chain_mode": cfg.chain_mode,
        "fail_threshold": cfg.fail_threshold,
        "unknown_function_grade": cfg.unknown_function_grade.value,
        "costs": dict(sorted(vars(cfg.costs).items())),
        "catalog": cfg.catalog_path,
        "lexicons": cfg.lexicon_path,
        "disclosed_sheets": sorted(cfg.disclosed_sheets),
    }


def _cell_json(bd: ScoreBreakdown) -> dict:
    return {
        "cell": str(bd.address),
        "value_type": bd.value_type.value,
        "formula": bd.formula,
        "surface": bd.surface.to_json(),
        "source": bd.source.to_json(),
        "total": bd.total.to_json(),
        "classification": bd.total.classification,
        "items": [i.to_json() for i in bd.items],
    }


def report_json(report: AuditReport, timing: bool = True) -> dict:
    doc: Dict[str, object] = {
        "path": report.path,
        "sha256": report.digest,
        "status": "ok" if report.ok else "load-error",
        "exit_code": report.exit_code(),
    }
    if report.load_error is not None:
        doc["error"] = {"kind": report.load_error.kind, "message": report.load_error.message}
    else:
        model = report.model
        errors, warns, infos = count_by_severity(report.findings)
        doc["model"] = {
            "total": model.total.to_json(),
            "classification": model.total.classification,
            "summary": summary_line(model.total),
            "finite_subtotal": model.finite_subtotal,
            "scored_cells": len(model.per_cell),
            "label_cells": model.label_cells,
            "opaque_cells": [{"cell": str(a), "reason": r} for a, r in model.opaque_cells],
            "tables": [
                {"table": t.table, "connection": t.connection_kind, "steps": t.steps, "definition": t.definition}
                for t in model.table_items
            ],
            "cycles": [[str(a) for a in cycle] for cycle in model.cycles],
        }
        doc["chains"] = [{"cell": c.address, "mode": c.mode, "total": c.total.to_json()} for c in report.chains]
        doc["cells"] = [_cell_json(bd) for bd in model.per_cell.values()]
        doc["findings"] = [f.to_json() for f in report.findings]
        doc["finding_counts"] = {"error": errors, "warn": warns, "info": infos}
    if timing:
        doc["timing"] = {"seconds": round(report.seconds, 6)}
    return doc


def structured(reports: Sequence[AuditReport], timing: bool = True) -> str:
    cfg = reports[0].config if reports else AuditConfig()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "xltransparency", "version": __version__},
        "config": _config_json(cfg),
        "exit_code": batch_exit_code(reports),
        "files": [report_json(r, timing) for r in reports],
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- text ----------------------------------------------------------------------------


def _table(rows: List[List[str]], header: List[str]) -> List[str]:
    widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
    fmt = "  ".join("{:<%d}" % w for w in widths[:-1]) + "  {}"
    out = [fmt.format(*header), fmt.format(*("-" * w for w in widths[:-1]), "-" * len(header[-1]))]
    out.extend(fmt.format(*r) for r in rows)
    return out


def text_report(report: AuditReport) -> str:
    lines = [f"File: {report.path}"]
    if report.digest:
        lines.append(f"SHA-256: {report.digest}")
    if report.load_error is not None:
        lines.append(f"LOAD FAILED ({report.load_error.kind}): {report.load_error.message}")
        return "\n".join(lines) + "\n"
    model = report.model
    lines.append(f"Model: {summary_line(model.total)}")
    if model.total.is_opaque:
        lines.append(f"Finite subtotal: {model.finite_subtotal} over {len(model.per_cell) - len(model.opaque_cells)} cells")
    lines.append(f"Scored cells: {len(model.per_cell)}; label cells: {model.label_cells}")
    if model.opaque_cells:
        lines.append("")
        lines.append(f"Opaque cells ({len(model.opaque_cells)}):")
        for addr, reason in model.opaque_cells:
            lines.append(f"  {addr}: {reason}")
    by_sheet: Dict[str, List[ScoreBreakdown]] = {}
    for bd in model.per_cell.values():
        by_sheet.setdefault(bd.address.sheet, []).append(bd)
    for sheet, cells in by_sheet.items():
        lines.append("")
        lines.append(f"Sheet {sheet}")
        rows = [
            [bd.address.a1, str(bd.surface), str(bd.source), str(bd.total), _items_text(bd) or "-"] for bd in cells
        ]
        lines.extend("  " + r for r in _table(rows, ["cell", "surface", "source", "total", "reasons"]))
    if model.table_items:
        lines.append("")
        lines.append("Connected tables:")
        for t in model.table_items:
            lines.append(f"  {t.table} ({t.connection_kind}) -{t.steps}: {t.definition}")
    if report.chains:
        lines.append("")
        lines.append(f"Calculation chains ({report.config.chain_mode}):")
        for chain in report.chains:
            lines.append(f"  {chain.address}: {chain.total}")
    lines.append("")
    errors, warns, infos = count_by_severity(report.findings)
    lines.append(f"Findings: {errors} error, {warns} warn, {infos} info")
    for f in report.findings:
        lines.append(f"  {f.rule_id} {f.severity:<5} {f.location}: {f.message} [{f.tag}]")
    return "\n".join(lines) + "\n"


def text(reports: Sequence[AuditReport]) -> str:
    header = f"xltransparency {__version__}\n"
    return header + "\n".join("\n" + text_report(r) for r in reports)


def emit(reports: Sequence[AuditReport], fmt: str = FORMAT_TEXT, timing: bool = True) -> str:
    if fmt == FORMAT_STRUCTURED:
        return structured(reports, timing)
    if fmt == FORMAT_TEXT:
        return text(reports)
    raise ValueError(f"unknown format {fmt!r}")


def has_error_for_every_opaque_cell(report: AuditReport) -> bool:
    """Check that each opaque cell is backed by an error-severity finding."""
    if report.model is None:
        return True
    flagged = {f.address for f in report.findings if f.severity == ERROR}
    return all(addr in flagged for addr, _ in report.model.opaque_cells)



CSV_COLUMNS = ["file", "cell", "value_type", "surface", "source", "total", "classification", "reasons"]


def write_cells_csv(report: AuditReport, path) -> Path:
    """Per-cell scores for one workbook as comma-separated rows."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        if report.model is not None:
            for bd in report.model.per_cell.values():
                writer.writerow(
                    [
                        report.path,
                        str(bd.address),
                        bd.value_type.value,
                        str(bd.surface),
                        str(bd.source),
                        str(bd.total),
                        bd.total.classification,
                        _items_text(bd),
                    ]
                )
    return path
