"""Lint rules: turn score breakdowns and formula shapes into findings.

Rule ids
    L1  literal-in-formula          L7  freeze-panes-would-label
    L2  unconstrained-indirect      L8  structured-reference-opportunity
    L3  unhandled-error             L9  circular-reference
    L4  hidden-content              L10 unresolved-reference
    L5  daisy-chain                 L11 opaque-precedent
    L6  insufficient-label

Every opaque item in a breakdown becomes an error finding under its rule id,
so each opaque cell is backed by at least one error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from openpyxl.utils import get_column_letter

from .formula.ast import CellRef, RangeRef, walk
from .labeling import SUBJECT, co_visible
from .scorer import (
    L_CYCLE,
    L_ERROR,
    L_HIDDEN,
    L_INDIRECT,
    L_LABEL,
    L_LITERAL,
    L_OPAQUE_SOURCE,
    L_UNRESOLVED,
    ModelScore,
    Scorer,
)
from .workbook import CellAddress

L_DAISY = "L5"
L_FREEZE = "L7"
L_STRUCTURED = "L8"

ERROR = "error"
WARN = "warn"
INFO = "info"
SEVERITY_ORDER = {ERROR: 0, WARN: 1, INFO: 2}


@dataclass(frozen=True)
class Rule:
    rule_id: str
    name: str
    tag: str  # short recommendation tag shown next to findings


RULES: Dict[str, Rule] = {
    r.rule_id: r
    for r in (
        Rule(L_LITERAL, "literal-in-formula", "replace literals with named references"),
        Rule(L_INDIRECT, "unconstrained-indirect", "restrict or replace indirect references"),
        Rule(L_ERROR, "unhandled-error", "fix or handle error values"),
        Rule(L_HIDDEN, "hidden-content", "unhide content reviewers need"),
        Rule(L_DAISY, "daisy-chain", "reference the remote cell directly"),
        Rule(L_LABEL, "insufficient-label", "label the value with subject and unit"),
        Rule(L_FREEZE, "freeze-panes-would-label", "freeze the header rows or columns"),
        Rule(L_STRUCTURED, "structured-reference-opportunity", "use structured references inside tables"),
        Rule(L_CYCLE, "circular-reference", "break the circular reference"),
        Rule(L_UNRESOLVED, "unresolved-reference", "repair the formula or reference"),
        Rule(L_OPAQUE_SOURCE, "opaque-precedent", "make the precedent transparent first"),
    )
}


@dataclass(frozen=True)
class Finding:
    rule_id: str
    severity: str
    message: str
    address: Optional[CellAddress] = None
    table: Optional[str] = None

    def __post_init__(self):
        if self.rule_id not in RULES:
            raise ValueError(f"unregistered rule {self.rule_id}")
        if self.severity not in SEVERITY_ORDER:
            raise ValueError(f"unknown severity {self.severity}")

    @property
    def tag(self) -> str:
        return RULES[self.rule_id].tag

    @property
    def location(self) -> str:
        if self.address is not None:
            return str(self.address)
        return self.table or ""

    def to_json(self) -> dict:
        return {
            "rule": self.rule_id,
            "name": RULES[self.rule_id].name,
            "severity": self.severity,
            "location": self.location,
            "message": self.message,
            "recommendation": self.tag,
        }


def lint(scorer: Scorer, model: Optional[ModelScore] = None) -> List[Finding]:
    """Findings for every scored cell, ordered by sheet, row, column and rule."""
    model = model or scorer.model_score()
    wb = scorer.wb
    out: List[Finding] = []
    for addr, bd in model.per_cell.items():
        seen = set()
        for item in bd.items:
            if item.lint is None:
                continue
            if item.is_opaque:
                key = (item.lint, item.description)
                if key not in seen:
                    seen.add(key)
                    out.append(Finding(item.lint, ERROR, item.description, addr))
        for item in bd.items:
            if item.rule == "unhide":
                out.append(Finding(L_HIDDEN, WARN, item.description, addr))
            elif item.rule == "help" and item.lint is None and item.span is not None:
                out.append(Finding(L_LITERAL, WARN, f"{item.description}; a named input would label it", addr))
        rec = wb.cell(addr)
        if rec is not None and rec.formula is not None:
            out.extend(_daisy_chain(scorer, addr))
            out.extend(_structured_opportunity(scorer, addr))
        out.extend(_freeze_panes(scorer, addr))
    order = {name: i for i, name in enumerate(s.name for s in wb.sheets)}
    out.sort(
        key=lambda f: (
            order.get(f.address.sheet, len(order)) if f.address else len(order),
            f.address.row if f.address else 0,
            f.address.col if f.address else 0,
            int(f.rule_id[1:]),
            f.message,
        )
    )
    return out


def _daisy_chain(scorer: Scorer, addr: CellAddress) -> List[Finding]:
    ast = scorer.analysis(addr).ast
    if not isinstance(ast, CellRef) or ast.external:
        return []
    sheet = ast.sheet or addr.sheet
    if not scorer.wb.has_sheet(sheet):
        return []
    target = CellAddress(scorer.wb.canonical_sheet(sheet), ast.row, ast.col)
    if target.sheet == addr.sheet and co_visible(scorer.wb, (addr, target), scorer.vicinity):
        return []
    return [Finding(L_DAISY, WARN, f"formula only forwards remote cell {target}", addr)]


def _structured_opportunity(scorer: Scorer, addr: CellAddress) -> List[Finding]:
    wb = scorer.wb
    table = wb.table_at(addr)
    ast = scorer.analysis(addr).ast
    if table is None or ast is None:
        return []
    for node in walk(ast):
        if isinstance(node, (CellRef, RangeRef)) and not node.external:
            if node.sheet and wb.has_sheet(node.sheet) and wb.canonical_sheet(node.sheet) != table.sheet:
                continue
            row = node.row if isinstance(node, CellRef) else node.first_row
            col = node.col if isinstance(node, CellRef) else node.first_col
            if row is None or col is None:
                continue
            if CellAddress(table.sheet, row, col) in table.area:
                return [
                    Finding(
                        L_STRUCTURED,
                        INFO,
                        f"A1 reference into table {table.name} could name its column",
                        addr,
                        table.name,
                    )
                ]
    return []


def _freeze_panes(scorer: Scorer, addr: CellAddress) -> List[Finding]:
    """Suggest freezing when a row or column header sits out of view and
    freezing through it would bring it back."""
    res = scorer.labeler.resolve(addr)
    if not res.off_vicinity:
        return []
    missing = set(res.missing)
    wanted = [p for p in res.off_vicinity if p.address is not None and p.kind in missing]
    rows: List[int] = []
    cols: List[int] = []
    for part in wanted:
        if part.address.col == addr.col and part.address.row < addr.row:
            rows.append(part.address.row)
        elif part.address.row == addr.row and part.address.col < addr.col:
            cols.append(part.address.col)
    if not rows and not cols:
        return []
    kinds = sorted({p.kind for p in wanted}, key=lambda k: (k != SUBJECT, k))
    where = []
    if rows:
        where.append("row 1" if max(rows) == 1 else f"rows 1-{max(rows)}")
    if cols:
        where.append("column A" if max(cols) == 1 else f"columns A-{get_column_letter(max(cols))}")
    return [Finding(L_FREEZE, WARN, f"freezing {' and '.join(where)} would keep {', '.join(kinds)} in view", addr)]


def count_by_severity(findings: List[Finding]) -> Tuple[int, int, int]:
    return (
        sum(f.severity == ERROR for f in findings),
        sum(f.severity == WARN for f in findings),
        sum(f.severity == INFO for f in findings),
    )
