"""Immutable in-memory snapshot of an XLSX/XLSM workbook.

Cell contents, styles, comments, validations, tables and defined names come
from openpyxl. Data connections and the query tables binding them to
tables are read straight from the OOXML parts, which openpyxl ignores.
"""

from __future__ import annotations

import datetime as _dt
import posixpath
import re
import warnings
import zipfile
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from pathlib import Path
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Tuple, Union
from xml.etree import ElementTree as ET

from .formula.ast import MAX_COL, MAX_ROW, col_to_letters, letters_to_col, quote_sheet

ERROR_CODES = frozenset({"#DIV/0!", "#N/A", "#REF!", "#NAME?", "#VALUE!", "#NUM!", "#NULL!", "#SPILL!", "#CALC!", "#GETTING_DATA"})


class WorkbookError(Exception):
    """Base class for workbook loading and addressing failures."""


class NotOOXMLError(WorkbookError):
    pass


class MalformedPartError(WorkbookError):
    def __init__(self, member: str, detail: str):
        self.member = member
        super().__init__(f"malformed archive member {member}: {detail}")


class AddressError(WorkbookError, LookupError):
    pass


class UnknownTableError(WorkbookError, LookupError):
    pass


@dataclass(frozen=True, order=True)
class CellAddress:
    sheet: str
    row: int
    col: int

    def __post_init__(self):
        if not self.sheet:
            raise ValueError("sheet name must be non-empty")
        if self.row < 1 or self.col < 1:
            raise ValueError(f"row and col are 1-based, got {self.row},{self.col}")

    @property
    def a1(self) -> str:
        return f"{col_to_letters(self.col)}{self.row}"

    def __str__(self) -> str:
        return f"{quote_sheet(self.sheet)}!{self.a1}"

    @classmethod
    def parse(cls, text: str, default_sheet: Optional[str] = None) -> "CellAddress":
        """``'Sheet 1'!B3`` / ``Sheet1!B3`` / ``B3`` (needs ``default_sheet``)."""
        sheet = default_sheet
        if "!" in text:
            sheet, text = text.rsplit("!", 1)
            if sheet.startswith("'") and sheet.endswith("'"):
                sheet = sheet[1:-1].replace("''", "'")
        m = re.fullmatch(r"\$?([A-Za-z]{1,3})\$?(\d+)", text.strip())
        if not m or not sheet:
            raise AddressError(f"not a cell address: {text!r}")
        return cls(sheet, int(m.group(2)), letters_to_col(m.group(1)))


@dataclass(frozen=True)
class AreaRef:
    top_left: CellAddress
    bottom_right: CellAddress

    def __post_init__(self):
        tl, br = self.top_left, self.bottom_right
        if tl.sheet != br.sheet:
            raise ValueError("area corners must be on the same sheet")
        if tl.row > br.row or tl.col > br.col:
            raise ValueError(f"inverted area {tl.a1}:{br.a1}")

    @classmethod
    def cell(cls, addr: CellAddress) -> "AreaRef":
        return cls(addr, addr)

    @classmethod
    def from_bounds(cls, sheet: str, r1: int, c1: int, r2: int, c2: int) -> "AreaRef":
        return cls(CellAddress(sheet, min(r1, r2), min(c1, c2)), CellAddress(sheet, max(r1, r2), max(c1, c2)))

    @property
    def sheet(self) -> str:
        return self.top_left.sheet

    @property
    def height(self) -> int:
        return self.bottom_right.row - self.top_left.row + 1

    @property
    def width(self) -> int:
        return self.bottom_right.col - self.top_left.col + 1

    def __contains__(self, addr: object) -> bool:
        return (
            isinstance(addr, CellAddress)
            and addr.sheet == self.sheet
            and self.top_left.row <= addr.row <= self.bottom_right.row
            and self.top_left.col <= addr.col <= self.bottom_right.col
        )

    def cells(self) -> Iterator[CellAddress]:
        for row in range(self.top_left.row, self.bottom_right.row + 1):
            for col in range(self.top_left.col, self.bottom_right.col + 1):
                yield CellAddress(self.sheet, row, col)

    def __str__(self) -> str:
        if self.top_left == self.bottom_right:
            return str(self.top_left)
        return f"{quote_sheet(self.sheet)}!{self.top_left.a1}:{self.bottom_right.a1}"


@dataclass(frozen=True)
class ErrorValue:
    code: str

    def __str__(self) -> str:
        return self.code


Scalar = Union[int, float, str, bool, ErrorValue, _dt.datetime, _dt.date, _dt.time, _dt.timedelta, None]


@dataclass(frozen=True)
class CellRecord:
    address: CellAddress
    value: Scalar = None
    formula: Optional[str] = None
    number_format: str = "General"
    comment: Optional[str] = None
    validation_message: Optional[str] = None
    validation_list: Optional[Tuple[str, ...]] = None
    hyperlink: Optional[str] = None

    @property
    def is_error(self) -> bool:
        return isinstance(self.value, ErrorValue)

    @property
    def occupied(self) -> bool:
        return self.formula is not None or not (self.value is None or self.value == "")


@dataclass(frozen=True)
class DefinedName:
    """``refers_to`` is a tuple of areas, or the raw constant/formula text."""

    name: str
    refers_to: Union[Tuple[AreaRef, ...], str]
    scope: Optional[str] = None  # sheet name, None for workbook scope
    text: str = ""

    @property
    def is_range(self) -> bool:
        return isinstance(self.refers_to, tuple)


MS_QUERY = "ms-query"
POWER_QUERY = "power-query"
OTHER = "other"


@dataclass(frozen=True)
class DataConnection:
    kind: str
    definition_text: str
    name: str = ""
    connection_id: Optional[int] = None


@dataclass(frozen=True)
class TableModel:
    name: str
    area: AreaRef
    header_row: Tuple[str, ...]
    uom_row: Optional[Tuple[Optional[str], ...]] = None
    connection: Optional[DataConnection] = None
    header_rows: int = 1
    totals_rows: int = 0

    @property
    def sheet(self) -> str:
        return self.area.sheet

    @property
    def header_area(self) -> Optional[AreaRef]:
        if not self.header_rows:
            return None
        tl = self.area.top_left
        return AreaRef.from_bounds(tl.sheet, tl.row, tl.col, tl.row, self.area.bottom_right.col)

    @property
    def data_rows(self) -> Tuple[int, int]:
        first = self.area.top_left.row + self.header_rows
        last = self.area.bottom_right.row - self.totals_rows
        return first, last

    @property
    def data_area(self) -> Optional[AreaRef]:
        first, last = self.data_rows
        if last < first:
            return None
        return AreaRef.from_bounds(self.sheet, first, self.area.top_left.col, last, self.area.bottom_right.col)

    @property
    def totals_area(self) -> Optional[AreaRef]:
        if not self.totals_rows:
            return None
        br = self.area.bottom_right
        return AreaRef.from_bounds(self.sheet, br.row, self.area.top_left.col, br.row, br.col)

    @property
    def uom_row_index(self) -> Optional[int]:
        return self.area.top_left.row - 1 if self.uom_row is not None else None

    def column_index(self, name: str) -> int:
        """Absolute worksheet column of header ``name`` (case-insensitive)."""
        lowered = name.strip().lower()
        for offset, header in enumerate(self.header_row):
            if header.strip().lower() == lowered:
                return self.area.top_left.col + offset
        raise KeyError(name)


VISIBLE = "visible"
HIDDEN_ROW = "hidden-row"
HIDDEN_COLUMN = "hidden-column"
HIDDEN_SHEET = "hidden-sheet"
VERY_HIDDEN_SHEET = "very-hidden-sheet"

_RANK = {VISIBLE: 0, HIDDEN_ROW: 1, HIDDEN_COLUMN: 1, HIDDEN_SHEET: 2, VERY_HIDDEN_SHEET: 3}


@dataclass(frozen=True)
class VisibilityState:
    state: str = VISIBLE
    protected: bool = False
    password_disclosed: bool = False

    @property
    def rank(self) -> int:
        return _RANK[self.state]


@dataclass(frozen=True)
class SheetModel:
    name: str
    index: int
    state: str = "visible"  # visible | hidden | veryHidden
    protected: bool = False
    frozen_rows: int = 0
    frozen_cols: int = 0
    hidden_rows: FrozenSet[int] = frozenset()
    hidden_cols: FrozenSet[int] = frozenset()
    max_row: int = 0
    max_col: int = 0


@dataclass(frozen=True)
class LoadOptions:
    """``disclosed_sheets``: sheets whose protection password inspectors hold ("*" = all)."""

    disclosed_sheets: FrozenSet[str] = frozenset()

    def discloses(self, sheet: str) -> bool:
        return "*" in self.disclosed_sheets or sheet in self.disclosed_sheets


@dataclass(frozen=True)
class WorkbookModel:
    sheets: Tuple[SheetModel, ...]
    cells: Mapping[CellAddress, CellRecord]
    defined_names: Tuple[DefinedName, ...] = ()
    tables: Tuple[TableModel, ...] = ()
    connections: Tuple[DataConnection, ...] = ()
    structure_protected: bool = False
    options: LoadOptions = field(default_factory=LoadOptions)
    path: Optional[str] = field(default=None, compare=False)

    def sheet(self, name: str) -> SheetModel:
        for sheet in self.sheets:
            if sheet.name == name:
                return sheet
        for sheet in self.sheets:
            if sheet.name.lower() == name.lower():
                return sheet
        raise AddressError(f"no sheet named {name!r}")

    def has_sheet(self, name: str) -> bool:
        return any(s.name.lower() == name.lower() for s in self.sheets)

    def canonical_sheet(self, name: str) -> str:
        return self.sheet(name).name

    def cell(self, addr: CellAddress) -> Optional[CellRecord]:
        return self.cells.get(addr)

    def table(self, name: str) -> TableModel:
        for table in self.tables:
            if table.name.lower() == name.lower():
                return table
        raise UnknownTableError(f"no table named {name!r}")

    def has_table(self, name: str) -> bool:
        return any(t.name.lower() == name.lower() for t in self.tables)

    def table_at(self, addr: CellAddress) -> Optional[TableModel]:
        for table in self.tables:
            if addr in table.area:
                return table
        return None

    def table_with_uom_at(self, addr: CellAddress) -> Optional[TableModel]:
        for table in self.tables:
            if (
                table.uom_row is not None
                and addr.sheet == table.sheet
                and addr.row == table.uom_row_index
                and table.area.top_left.col <= addr.col <= table.area.bottom_right.col
            ):
                return table
        return None

    def defined_name(self, name: str, sheet: Optional[str] = None) -> Optional[DefinedName]:
        lowered = name.lower()
        if sheet is not None:
            for dn in self.defined_names:
                if dn.scope is not None and dn.scope.lower() == sheet.lower() and dn.name.lower() == lowered:
                    return dn
        for dn in self.defined_names:
            if dn.scope is None and dn.name.lower() == lowered:
                return dn
        return None

    def used_area(self, sheet: str) -> Optional[AreaRef]:
        model = self.sheet(sheet)
        if not model.max_row or not model.max_col:
            return None
        return AreaRef.from_bounds(model.name, 1, 1, model.max_row, model.max_col)


# -- queries -----------------------------------------------------------------


def occupied_cells(wb: WorkbookModel) -> List[CellAddress]:
    """Every cell with a non-empty value or a formula, sheet order then row-major."""
    order = {s.name: s.index for s in wb.sheets}
    found = [addr for addr, rec in wb.cells.items() if rec.occupied]
    found.sort(key=lambda a: (order[a.sheet], a.row, a.col))
    return found


def visibility(wb: WorkbookModel, addr: CellAddress) -> VisibilityState:
    """Most restrictive visibility applying to ``addr``; sheet state dominates."""
    if not wb.has_sheet(addr.sheet) or addr.row > MAX_ROW or addr.col > MAX_COL:
        raise AddressError(f"address out of range: {addr}")
    sheet = wb.sheet(addr.sheet)
    disclosed = wb.options.discloses(sheet.name)
    if sheet.state == "veryHidden":
        return VisibilityState(VERY_HIDDEN_SHEET, wb.structure_protected, disclosed)
    if sheet.state == "hidden":
        return VisibilityState(HIDDEN_SHEET, wb.structure_protected, disclosed)
    if addr.row in sheet.hidden_rows:
        return VisibilityState(HIDDEN_ROW, sheet.protected, disclosed)
    if addr.col in sheet.hidden_cols:
        return VisibilityState(HIDDEN_COLUMN, sheet.protected, disclosed)
    return VisibilityState(VISIBLE, False, False)


def connection_for_table(wb: WorkbookModel, table: str) -> Optional[DataConnection]:
    return wb.table(table).connection


# -- loading -----------------------------------------------------------------

_NS_MAIN = "http://schemas.openxmlformats.org/spreadsheetml/2006/main"
_NS_PKG_REL = "http://schemas.openxmlformats.org/package/2006/relationships"
_REL_QUERY_TABLE = "/queryTable"


def _check_container(path: Path) -> None:
    if not zipfile.is_zipfile(path):
        raise NotOOXMLError(f"{path} is not a ZIP container")
    with zipfile.ZipFile(path) as zf:
        names = set(zf.namelist())
        if "[Content_Types].xml" not in names or "xl/workbook.xml" not in names:
            raise NotOOXMLError(f"{path} is not an OOXML spreadsheet package")
        for member in sorted(names):
            if not member.endswith((".xml", ".rels")):
                continue
            try:
                ET.fromstring(zf.read(member))
            except ET.ParseError as exc:
                raise MalformedPartError(member, str(exc)) from exc


def _classify_connection(conn_type: Optional[str], conn_text: str, name: str) -> str:
    lowered = conn_text.lower()
    if "microsoft.mashup" in lowered or name.lower().startswith("query - "):
        return POWER_QUERY
    if conn_type == "1" or "msdasql" in lowered or "dsn=" in lowered:
        return MS_QUERY
    return OTHER


def _read_connections(zf: zipfile.ZipFile) -> Dict[int, DataConnection]:
    if "xl/connections.xml" not in zf.namelist():
        return {}
    root = ET.fromstring(zf.read("xl/connections.xml"))
    result: Dict[int, DataConnection] = {}
    for conn in root.iter(f"{{{_NS_MAIN}}}connection"):
        conn_id = int(conn.get("id", "0"))
        name = conn.get("name", "")
        db = conn.find(f"{{{_NS_MAIN}}}dbPr")
        conn_text = db.get("connection", "") if db is not None else ""
        command = db.get("command", "") if db is not None else ""
        kind = _classify_connection(conn.get("type"), conn_text, name)
        definition = command or conn_text or name
        result[conn_id] = DataConnection(kind, definition, name, conn_id)
    return result


def _rels(zf: zipfile.ZipFile, part: str) -> List[Tuple[str, str]]:
    folder, base = posixpath.split(part)
    rels_name = posixpath.join(folder, "_rels", base + ".rels")
    if rels_name not in zf.namelist():
        return []
    root = ET.fromstring(zf.read(rels_name))
    out = []
    for rel in root.iter(f"{{{_NS_PKG_REL}}}Relationship"):
        target = rel.get("Target", "")
        if target.startswith("/"):
            resolved = target.lstrip("/")
        else:
            resolved = posixpath.normpath(posixpath.join(folder, target))
        out.append((rel.get("Type", ""), resolved))
    return out


def _table_connection_ids(zf: zipfile.ZipFile) -> Dict[str, int]:
    """Table display name -> connection id, via query-table parts."""
    mapping: Dict[str, int] = {}
    for member in zf.namelist():
        if not re.fullmatch(r"xl/tables/[^/]+\.xml", member):
            continue
        root = ET.fromstring(zf.read(member))
        name = root.get("displayName") or root.get("name") or ""
        if root.get("connectionId"):
            mapping[name.lower()] = int(root.get("connectionId"))
            continue
        for rel_type, target in _rels(zf, member):
            if rel_type.endswith(_REL_QUERY_TABLE) and target in zf.namelist():
                qt = ET.fromstring(zf.read(target))
                if qt.get("connectionId"):
                    mapping[name.lower()] = int(qt.get("connectionId"))
    return mapping


def _convert_value(cell) -> Scalar:
    value = cell.value
    if cell.data_type == "e" or (isinstance(value, str) and cell.data_type == "e"):
        return ErrorValue(str(value))
    return value


def _parse_area_text(text: str, default_sheet: Optional[str], sheet_names: List[str]) -> Optional[Tuple[AreaRef, ...]]:
    """``Sheet1!$A$1:$B$2,Sheet1!$C$3`` -> areas; None when not a plain reference list."""
    from .formula.ast import CellRef, RangeRef
    from .formula.parser import parse_formula
    from .formula.tokenizer import FormulaSyntaxError

    try:
        node = parse_formula("=" + text)
    except FormulaSyntaxError:
        return None
    items = []

    def collect(n) -> bool:
        from .formula.ast import BinaryOp, Paren

        if isinstance(n, Paren):
            return collect(n.inner)
        if isinstance(n, BinaryOp) and n.op == ",":
            return collect(n.left) and collect(n.right)
        if isinstance(n, (CellRef, RangeRef)) and n.external is None:
            items.append(n)
            return True
        return False

    if not collect(node):
        # top-level union without parentheses is a comma list in name definitions
        parts = text.split(",")
        if len(parts) < 2:
            return None
        areas = []
        for part in parts:
            sub = _parse_area_text(part, default_sheet, sheet_names)
            if not sub:
                return None
            areas.extend(sub)
        return tuple(areas)
    areas = []
    lookup = {s.lower(): s for s in sheet_names}
    for ref in items:
        sheet = ref.sheet or default_sheet
        if sheet is None or sheet.lower() not in lookup:
            return None
        sheet = lookup[sheet.lower()]
        if isinstance(ref, CellRef):
            areas.append(AreaRef.cell(CellAddress(sheet, ref.row, ref.col)))
        else:
            r1 = ref.first_row or 1
            r2 = ref.last_row or MAX_ROW
            c1 = ref.first_col or 1
            c2 = ref.last_col or MAX_COL
            areas.append(AreaRef.from_bounds(sheet, r1, c1, r2, c2))
    return tuple(areas)


def _comment_text(comment) -> Optional[str]:
    if comment is None:
        return None
    text = comment.text or ""
    author = (comment.author or "").strip()
    if author and text.startswith(author + ":"):
        text = text[len(author) + 1 :]
    return text.strip() or None


def _expand_sqref(sqref, sheet: str, max_row: int = MAX_ROW, max_col: int = MAX_COL) -> Iterator[CellAddress]:
    """Cells of a space-separated range list, clipped to the sheet's used extent."""
    for rng in str(sqref).split():
        rng = rng.replace("$", "")
        if ":" in rng:
            a, b = rng.split(":")
            if a.isalpha() and b.isalpha():
                a, b = a + "1", b + str(max_row)
            elif a.isdigit() and b.isdigit():
                a, b = "A" + a, col_to_letters(max_col) + b
            start, end = CellAddress.parse(a, sheet), CellAddress.parse(b, sheet)
            r2, c2 = min(end.row, max(max_row, start.row)), min(end.col, max(max_col, start.col))
            yield from AreaRef.from_bounds(sheet, start.row, start.col, r2, c2).cells()
        else:
            yield CellAddress.parse(rng, sheet)


def load_workbook(path: Union[str, Path], options: Optional[LoadOptions] = None) -> WorkbookModel:
    """Load ``path`` into a :class:`WorkbookModel`.

    Raises FileNotFoundError, :class:`NotOOXMLError` or :class:`MalformedPartError`.
    Cached formula results are kept as values; nothing is recalculated.
    """
    import openpyxl
    from openpyxl.worksheet.formula import ArrayFormula, DataTableFormula

    options = options or LoadOptions()
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(str(path))
    _check_container(path)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            wb_f = openpyxl.load_workbook(path, data_only=False, keep_links=False)
            wb_v = openpyxl.load_workbook(path, data_only=True, keep_links=False)
        except (KeyError, ValueError, TypeError, AttributeError, zipfile.BadZipFile) as exc:
            raise MalformedPartError("<workbook>", f"{type(exc).__name__}: {exc}") from exc

    with zipfile.ZipFile(path) as zf:
        connections = _read_connections(zf)
        table_conn = _table_connection_ids(zf)

    sheet_names = list(wb_f.sheetnames)
    cells: Dict[CellAddress, CellRecord] = {}
    sheets: List[SheetModel] = []
    tables: List[TableModel] = []
    names: List[DefinedName] = []
    pending_lists: Dict[CellAddress, str] = {}

    for index, ws in enumerate(wb_f.worksheets):
        wsv = wb_v[ws.title]
        sheet = ws.title
        hidden_rows = frozenset(r for r, dim in ws.row_dimensions.items() if dim.hidden)
        hidden_cols = set()
        for key, dim in ws.column_dimensions.items():
            if dim.hidden:
                lo = dim.min or letters_to_col(key)
                hi = dim.max or lo
                hidden_cols.update(range(lo, hi + 1))
        frozen_rows = frozen_cols = 0
        if ws.freeze_panes:
            top_left = CellAddress.parse(ws.freeze_panes, sheet)
            frozen_rows, frozen_cols = top_left.row - 1, top_left.col - 1

        records: Dict[CellAddress, dict] = {}
        for row in ws.iter_rows():
            for cell in row:
                if cell.value is None and cell.comment is None and cell.hyperlink is None:
                    continue
                addr = CellAddress(sheet, cell.row, cell.column)
                raw = cell.value
                formula = None
                if isinstance(raw, ArrayFormula):
                    formula = raw.text if raw.text.startswith("=") else "=" + raw.text
                    for covered in _expand_sqref(raw.ref, sheet):
                        records.setdefault(covered, {})["formula"] = formula
                elif isinstance(raw, DataTableFormula):
                    formula = "=TABLE()"
                elif isinstance(raw, str) and cell.data_type == "f":
                    formula = raw
                rec = records.setdefault(addr, {})
                if formula is not None:
                    rec["formula"] = formula
                    cached = wsv.cell(row=cell.row, column=cell.column)
                    rec["value"] = _convert_value(cached)
                else:
                    rec["value"] = _convert_value(cell)
                rec["number_format"] = cell.number_format or "General"
                rec["comment"] = _comment_text(cell.comment)
                if cell.hyperlink is not None:
                    rec["hyperlink"] = cell.hyperlink.location or cell.hyperlink.target
        for covered, rec in records.items():
            if "value" not in rec and rec.get("formula"):
                cached = wsv.cell(row=covered.row, column=covered.col)
                rec["value"] = _convert_value(cached)
                rec["number_format"] = ws.cell(row=covered.row, column=covered.col).number_format or "General"

        for dv in ws.data_validations.dataValidation:
            message = " ".join(p for p in (dv.promptTitle, dv.prompt) if p) or None
            list_source = dv.formula1 if dv.type == "list" and dv.formula1 else None
            for addr in _expand_sqref(dv.sqref, sheet, ws.max_row, ws.max_column):
                rec = records.setdefault(addr, {})
                if message:
                    rec["validation_message"] = message
                if list_source:
                    pending_lists[addr] = list_source

        for addr, rec in records.items():
            cells[addr] = CellRecord(
                address=addr,
                value=rec.get("value"),
                formula=rec.get("formula"),
                number_format=rec.get("number_format", "General"),
                comment=rec.get("comment"),
                validation_message=rec.get("validation_message"),
                hyperlink=rec.get("hyperlink"),
            )

        occupied = [a for a, r in cells.items() if a.sheet == sheet and r.occupied]
        sheets.append(
            SheetModel(
                name=sheet,
                index=index,
                state=ws.sheet_state,
                protected=bool(ws.protection.sheet),
                frozen_rows=frozen_rows,
                frozen_cols=frozen_cols,
                hidden_rows=hidden_rows,
                hidden_cols=frozenset(hidden_cols),
                max_row=max((a.row for a in occupied), default=0),
                max_col=max((a.col for a in occupied), default=0),
            )
        )

        for table in ws.tables.values():
            tl_text, _, br_text = table.ref.partition(":")
            tl = CellAddress.parse(tl_text, sheet)
            br = CellAddress.parse(br_text or tl_text, sheet)
            area = AreaRef.from_bounds(sheet, tl.row, tl.col, br.row, br.col)
            headers = tuple(str(c.name) for c in table.tableColumns) if table.tableColumns else tuple(
                str(ws.cell(row=tl.row, column=c).value or "") for c in range(tl.col, br.col + 1)
            )
            uom = None
            if tl.row > 1:
                above = [cells.get(CellAddress(sheet, tl.row - 1, c)) for c in range(tl.col, br.col + 1)]
                values = [rec.value if rec is not None and rec.formula is None else None for rec in above]
                non_empty = [v for v in values if v not in (None, "")]
                formula_above = any(rec is not None and rec.formula is not None for rec in above)
                if non_empty and not formula_above and all(isinstance(v, str) for v in non_empty):
                    uom = tuple(v if isinstance(v, str) and v != "" else None for v in values)
            name = table.displayName or table.name
            conn_id = table_conn.get(name.lower())
            tables.append(
                TableModel(
                    name=name,
                    area=area,
                    header_row=headers,
                    uom_row=uom,
                    connection=connections.get(conn_id) if conn_id is not None else None,
                    header_rows=1 if table.headerRowCount is None else int(table.headerRowCount),
                    totals_rows=int(table.totalsRowCount or 0),
                )
            )

        for dn_name, dn in getattr(ws, "defined_names", {}).items():
            names.append(_defined_name(dn_name, dn.attr_text, sheet, sheet_names))

    for dn_name, dn in wb_f.defined_names.items():
        if dn_name.startswith("_xlnm."):
            continue
        names.append(_defined_name(dn_name, dn.attr_text, None, sheet_names))

    # resolve list validations now that every cell is known
    for addr, source in pending_lists.items():
        options_list = _validation_options(source, addr.sheet, cells, names, sheet_names)
        cells[addr] = replace(cells[addr], validation_list=options_list)

    structure = bool(getattr(wb_f.security, "lockStructure", False)) if wb_f.security else False
    return WorkbookModel(
        sheets=tuple(sheets),
        cells=MappingProxyType(cells),
        defined_names=tuple(sorted(names, key=lambda d: (d.scope or "", d.name.lower()))),
        tables=tuple(tables),
        connections=tuple(connections[k] for k in sorted(connections)),
        structure_protected=structure,
        options=options,
        path=str(path),
    )


def _defined_name(name: str, text: str, scope: Optional[str], sheet_names: List[str]) -> DefinedName:
    text = text or ""
    areas = _parse_area_text(text, scope, sheet_names)
    return DefinedName(name=name, refers_to=areas if areas else text, scope=scope, text=text)


def _validation_options(
    source: str,
    sheet: str,
    cells: Mapping[CellAddress, CellRecord],
    names: List[DefinedName],
    sheet_names: List[str],
) -> Tuple[str, ...]:
    source = source.strip()
    if source.startswith('"') and source.endswith('"'):
        return tuple(item.strip() for item in source[1:-1].split(",") if item.strip())
    source = source.lstrip("=")
    areas = _parse_area_text(source, sheet, sheet_names)
    if areas is None:
        for dn in names:
            if dn.name.lower() == source.lower() and dn.is_range:
                areas = dn.refers_to
                break
    if not areas:
        return ()
    values = []
    for area in areas:
        for addr in area.cells():
            rec = cells.get(addr)
            if rec is not None and rec.value not in (None, ""):
                values.append(str(rec.value))
    return tuple(values)
