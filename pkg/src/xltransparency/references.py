"""Resolve formula reference nodes to worksheet areas."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .formula.ast import CellRef, Literal, NamedRef, Node, RangeRef, StructuredRef, walk
from .formula.parser import parse_formula
from .formula.tokenizer import FormulaSyntaxError
from .workbook import AreaRef, CellAddress, DefinedName, TableModel, WorkbookModel

# what a reference stands for
AREA = "area"
NAME_CONSTANT = "name-constant"
NAME_FORMULA = "name-formula"
TABLE = "table"

UNRESOLVABLE = "unresolvable"
EXTERNAL = "external"


@dataclass(frozen=True)
class Resolution:
    """Areas a reference points at.

    ``label_areas`` are header and unit-row cells that label the areas (table
    references only). ``opaque`` carries a reason when the target cannot be
    inspected at all.
    """

    areas: Tuple[AreaRef, ...] = ()
    kind: str = AREA
    label_areas: Tuple[AreaRef, ...] = ()
    name: Optional[DefinedName] = None
    table: Optional[TableModel] = None
    opaque: Optional[str] = None
    opaque_kind: Optional[str] = None

    @property
    def is_opaque(self) -> bool:
        return self.opaque is not None


def _opaque(reason: str, kind: str = UNRESOLVABLE) -> Resolution:
    return Resolution(opaque=reason, opaque_kind=kind)


def _sheet_for(wb: WorkbookModel, qualifier: Optional[str], host: CellAddress) -> Optional[str]:
    name = qualifier or host.sheet
    return wb.canonical_sheet(name) if wb.has_sheet(name) else None


def _clip_rows(wb: WorkbookModel, sheet: str) -> int:
    return max(1, wb.sheet(sheet).max_row)


def _clip_cols(wb: WorkbookModel, sheet: str) -> int:
    return max(1, wb.sheet(sheet).max_col)


def table_label_areas(table: TableModel, first_col: int, last_col: int) -> Tuple[AreaRef, ...]:
    out = []
    top = table.area.top_left.row
    if table.header_rows:
        out.append(AreaRef.from_bounds(table.sheet, top, first_col, top, last_col))
    if table.uom_row_index is not None and table.uom_row_index >= 1:
        out.append(AreaRef.from_bounds(table.sheet, table.uom_row_index, first_col, table.uom_row_index, last_col))
    return tuple(out)


def _table_data(table: TableModel) -> Resolution:
    tl, br = table.area.top_left, table.area.bottom_right
    area = table.data_area or table.area
    return Resolution((area,), TABLE, table_label_areas(table, tl.col, br.col), table=table)


def resolve_reference(wb: WorkbookModel, node: Node, host: CellAddress, _depth: int = 0) -> Resolution:
    """Resolve a CellRef, RangeRef, NamedRef or StructuredRef seen from ``host``."""
    if isinstance(node, CellRef):
        if node.external:
            return _opaque(f"external workbook reference {node.external}", EXTERNAL)
        sheet = _sheet_for(wb, node.sheet, host)
        if sheet is None:
            return _opaque(f"unknown sheet {node.sheet!r}")
        return Resolution((AreaRef.cell(CellAddress(sheet, node.row, node.col)),))
    if isinstance(node, RangeRef):
        if node.external:
            return _opaque(f"external workbook reference {node.external}", EXTERNAL)
        sheet = _sheet_for(wb, node.sheet, host)
        if sheet is None:
            return _opaque(f"unknown sheet {node.sheet!r}")
        # whole-column and whole-row ranges are clipped to the used extent
        if node.first_row is None:
            r1, r2 = 1, _clip_rows(wb, sheet)
        else:
            r1, r2 = sorted((node.first_row, node.last_row))
        if node.first_col is None:
            c1, c2 = 1, _clip_cols(wb, sheet)
        else:
            c1, c2 = sorted((node.first_col, node.last_col))
        return Resolution((AreaRef.from_bounds(sheet, r1, c1, r2, c2),))
    if isinstance(node, NamedRef):
        return _resolve_name(wb, node, host, _depth)
    if isinstance(node, StructuredRef):
        return _resolve_structured(wb, node, host)
    raise TypeError(f"not a reference node: {node!r}")


def _resolve_name(wb: WorkbookModel, node: NamedRef, host: CellAddress, depth: int) -> Resolution:
    if node.external:
        return _opaque(f"external workbook name {node.external}!{node.name}", EXTERNAL)
    scope = node.sheet or host.sheet
    dn = wb.defined_name(node.name, scope)
    if dn is None:
        if wb.has_table(node.name):
            return _table_data(wb.table(node.name))
        return _opaque(f"undefined name {node.name}")
    if dn.is_range:
        return Resolution(dn.refers_to, AREA, name=dn)
    text = str(dn.refers_to).lstrip("=")
    try:
        ast = parse_formula("=" + text)
    except FormulaSyntaxError:
        return _opaque(f"name {dn.name} has an unreadable definition")
    if isinstance(ast, Literal):
        return Resolution((), NAME_CONSTANT, name=dn)
    if depth > 8:
        return _opaque(f"name {dn.name} nests too deeply")
    areas: List[AreaRef] = []
    for sub in walk(ast):
        if isinstance(sub, (CellRef, RangeRef, NamedRef, StructuredRef)):
            inner = resolve_reference(wb, sub, host, depth + 1)
            if inner.is_opaque:
                return Resolution(opaque=inner.opaque, opaque_kind=inner.opaque_kind, name=dn)
            areas.extend(inner.areas)
    return Resolution(tuple(areas), NAME_FORMULA, name=dn)


def _resolve_structured(wb: WorkbookModel, node: StructuredRef, host: CellAddress) -> Resolution:
    if node.table is not None:
        if not wb.has_table(node.table):
            return _opaque(f"unknown table {node.table}")
        table = wb.table(node.table)
    else:
        table = wb.table_at(host)
        if table is None:
            return _opaque("table-relative reference outside any table")
    tl, br = table.area.top_left, table.area.bottom_right
    if node.columns:
        try:
            cols = [table.column_index(c) for c in node.columns]
        except KeyError as exc:
            return _opaque(f"table {table.name} has no column {exc.args[0]!r}")
        c1, c2 = min(cols), max(cols)
    else:
        c1, c2 = tl.col, br.col
    first, last = table.data_rows
    header = tl.row if table.header_rows else None
    totals = br.row if table.totals_rows else None
    rows: List[Tuple[int, int]] = []
    for special in node.specials or ("data",):
        if special == "all":
            rows.append((tl.row, br.row))
        elif special == "data":
            if last >= first:
                rows.append((first, last))
        elif special == "headers":
            if header is None:
                return _opaque(f"table {table.name} has no header row")
            rows.append((header, header))
        elif special == "totals":
            if totals is None:
                return _opaque(f"table {table.name} has no totals row")
            rows.append((totals, totals))
        elif special == "this-row":
            if host.sheet != table.sheet or not tl.row <= host.row <= br.row:
                return _opaque("this-row reference outside the table rows")
            rows.append((host.row, host.row))
    if not rows:
        return Resolution((), TABLE, table_label_areas(table, c1, c2), table=table)
    r1 = min(r for r, _ in rows)
    r2 = max(r for _, r in rows)
    area = AreaRef.from_bounds(table.sheet, r1, c1, r2, c2)
    return Resolution((area,), TABLE, table_label_areas(table, c1, c2), table=table)


def resolve_text(wb: WorkbookModel, text: str, host: CellAddress) -> Resolution:
    """Resolve reference text as INDIRECT would: an A1 address, a defined
    name, a table name or a structured reference."""
    try:
        ast = parse_formula("=" + str(text).strip())
    except FormulaSyntaxError:
        return _opaque(f"text {text!r} is not a reference")
    if not isinstance(ast, (CellRef, RangeRef, NamedRef, StructuredRef)):
        return _opaque(f"text {text!r} is not a reference")
    return resolve_reference(wb, ast, host)
