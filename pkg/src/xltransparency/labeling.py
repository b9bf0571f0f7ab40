"""Value-type classification, label search, co-visibility and label sufficiency.

A cell's label is split into *parts*: a subject (type/kind), a unit, a format
and, for flags, the question the flag answers. Parts live in cells near the
value, in the cell's own number format, in a defined name, or behind one
gesture (comment, validation input message, linked documentation cell).
"""

from __future__ import annotations

import datetime as _dt
import enum
import itertools
import re
from bisect import bisect_left
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .workbook import AreaRef, CellAddress, CellRecord, ErrorValue, TableModel, WorkbookModel


class ValueType(str, enum.Enum):
    QUANTITY = "quantity"
    DATE = "date-time-duration"
    FLAG = "flag"
    IDENTITY = "identity"
    ATTRIBUTE = "attribute"
    LABEL = "label-text"
    ERROR = "error"
    EMPTY = "empty"


SUBJECT = "subject-type-kind"
UNIT = "unit"
FORMAT = "format"
QUESTION = "question"
PART_KINDS = (SUBJECT, UNIT, FORMAT, QUESTION)

# label locations
SAME_CELL_FORMAT = "same-cell-format"
VICINITY_CELL = "vicinity-cell"
COMMENT = "comment"
VALIDATION_MESSAGE = "validation-message"
DEFINED_NAME = "defined-name"
DOCUMENTATION_CELL = "documentation-cell"
FUNCTION_TOOLTIP = "function-tooltip"
FUNCTION_HELP = "function-help"

ZERO_STEP_LOCATIONS = frozenset({SAME_CELL_FORMAT, VICINITY_CELL, DEFINED_NAME})

REQUIRED_PARTS: Mapping[ValueType, FrozenSet[str]] = {
    ValueType.QUANTITY: frozenset({SUBJECT, UNIT}),
    ValueType.DATE: frozenset({SUBJECT, FORMAT}),
    ValueType.FLAG: frozenset({QUESTION}),
    ValueType.IDENTITY: frozenset({SUBJECT}),
    ValueType.ATTRIBUTE: frozenset({SUBJECT}),
    ValueType.ERROR: frozenset(),
}


@dataclass(frozen=True)
class LabelPart:
    kind: str
    text: str
    location: str
    steps: int = 0
    address: Optional[CellAddress] = None

    def __post_init__(self):
        if self.kind not in PART_KINDS:
            raise ValueError(f"unknown part kind {self.kind!r}")
        if self.location in ZERO_STEP_LOCATIONS and self.steps != 0:
            raise ValueError(f"{self.location} parts cost 0 steps")
        if self.location not in ZERO_STEP_LOCATIONS and self.steps < 1:
            raise ValueError(f"{self.location} parts cost at least 1 step")

    @property
    def source_key(self) -> Tuple[str, Optional[CellAddress]]:
        """Parts sharing a key are revealed by the same gesture."""
        return (self.location, self.address)


@dataclass(frozen=True)
class LabelResolution:
    parts: Tuple[LabelPart, ...] = ()
    missing: FrozenSet[str] = frozenset()
    value_type: Optional[ValueType] = None
    # label parts that exist but sit outside the vicinity window
    off_vicinity: Tuple[LabelPart, ...] = ()

    def __post_init__(self):
        if self.missing & {p.kind for p in self.parts}:
            raise ValueError("a part kind cannot be both found and missing")

    def kinds(self) -> FrozenSet[str]:
        return frozenset(p.kind for p in self.parts)


@dataclass(frozen=True)
class Sufficiency:
    sufficient: bool
    missing: FrozenSet[str] = frozenset()

    def __bool__(self) -> bool:
        return self.sufficient


SUFFICIENT = Sufficiency(True)


@dataclass(frozen=True)
class VicinityConfig:
    rows_visible: int = 40
    cols_visible: int = 20
    honor_frozen_panes: bool = True

    def __post_init__(self):
        if self.rows_visible < 1 or self.cols_visible < 1:
            raise ValueError("vicinity dimensions must be positive")

    @classmethod
    def parse(cls, text: str, honor_frozen_panes: bool = True) -> "VicinityConfig":
        """``"40x20"`` -> rows 40, cols 20."""
        m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
        if not m:
            raise ValueError(f"vicinity must look like ROWSxCOLS, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)), honor_frozen_panes)


# -- lexicons ----------------------------------------------------------------

LEXICON_FILES = ("units", "identity", "interrogative", "generic", "label_columns")


def _lines(text: str) -> List[str]:
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def _term_pattern(term: str) -> str:
    return r"(?<!\w)" + re.escape(term).replace(r"\ ", r"\s+") + r"(?!\w)"


@dataclass(frozen=True)
class Lexicons:
    units: Tuple[str, ...] = ()
    identity_patterns: Tuple[str, ...] = ()
    interrogatives: FrozenSet[str] = frozenset()
    generic: FrozenSet[str] = frozenset()
    label_columns: FrozenSet[str] = frozenset()
    _unit_re: Optional[re.Pattern] = field(default=None, compare=False, repr=False)
    _identity_re: Optional[re.Pattern] = field(default=None, compare=False, repr=False)

    @classmethod
    def build(cls, units=(), identity_patterns=(), interrogatives=(), generic=(), label_columns=()) -> "Lexicons":
        ordered = tuple(sorted(dict.fromkeys(units), key=lambda t: (-len(t), t.lower())))
        unit_re = re.compile("|".join(_term_pattern(t) for t in ordered), re.IGNORECASE) if ordered else None
        ident = tuple(identity_patterns)
        ident_re = re.compile("|".join(f"(?:{p})" for p in ident), re.IGNORECASE) if ident else None
        return cls(
            ordered,
            ident,
            frozenset(w.lower() for w in interrogatives),
            frozenset(_norm(w) for w in generic),
            frozenset(_norm(w) for w in label_columns),
            unit_re,
            ident_re,
        )

    def unit_matches(self, text: str) -> List[re.Match]:
        return list(self._unit_re.finditer(text)) if self._unit_re else []

    def is_identity_header(self, text: str) -> bool:
        return bool(self._identity_re and self._identity_re.search(text))

    def is_generic(self, text: str) -> bool:
        return _norm(text) in self.generic

    def is_label_column(self, text: str) -> bool:
        return _norm(text) in self.label_columns


def _norm(text: str) -> str:
    return " ".join(text.replace("_", " ").split()).lower()


def load_lexicons(paths: Union[str, Path, Mapping[str, Union[str, Path]]]) -> Lexicons:
    """Load lexicons from a directory holding ``<category>.txt`` files, or a
    mapping of category to file. Missing categories fall back to the defaults."""
    defaults = _default_texts()
    texts = dict(defaults)
    if isinstance(paths, Mapping):
        for category, path in paths.items():
            if category not in LEXICON_FILES:
                raise ValueError(f"unknown lexicon category {category!r}")
            texts[category] = Path(path).read_text(encoding="utf-8")
    else:
        directory = Path(paths)
        for category in LEXICON_FILES:
            candidate = directory / f"{category}.txt"
            if candidate.exists():
                texts[category] = candidate.read_text(encoding="utf-8")
    return _from_texts(texts)


def _default_texts() -> Dict[str, str]:
    base = resources.files("xltransparency.data").joinpath("lexicons")
    return {c: base.joinpath(f"{c}.txt").read_text(encoding="utf-8") for c in LEXICON_FILES}


def _from_texts(texts: Mapping[str, str]) -> Lexicons:
    return Lexicons.build(
        units=_lines(texts["units"]),
        identity_patterns=_lines(texts["identity"]),
        interrogatives=_lines(texts["interrogative"]),
        generic=_lines(texts["generic"]),
        label_columns=_lines(texts["label_columns"]),
    )


_DEFAULT_LEXICONS: Optional[Lexicons] = None


def default_lexicons() -> Lexicons:
    global _DEFAULT_LEXICONS
    if _DEFAULT_LEXICONS is None:
        _DEFAULT_LEXICONS = _from_texts(_default_texts())
    return _DEFAULT_LEXICONS


# -- text and number-format analysis -------------------------------------------

_DATE_PATTERN = re.compile(
    r"(?<![A-Za-z])(?:[dmyhs]{1,4}|am/pm)(?:[/\-.: ](?:[dmyhs]{1,4}|am/pm))+(?![A-Za-z])"
    r"|(?<![A-Za-z])(?:dddd|mmmm|yyyy)(?![A-Za-z])",
    re.IGNORECASE,
)
_CODE_LIKE = re.compile(r"^(?=[^\s]*[A-Za-z])(?=[^\s]*\d)[A-Za-z0-9_\-./#]+$")
_FLAG_TEXT = {"yes", "no", "true", "false", "y", "n"}
_FORMAT_QUOTED = re.compile(r'"([^"]*)"')
_FORMAT_BRACKET = re.compile(r"\[([^\]]*)\]")
_FORMAT_ESCAPED = re.compile(r"\\(.)")
_CURRENCY_SYMBOLS = "$€£¥₹₩₽¢"
_WORD = re.compile(r"[A-Za-z0-9][A-Za-z0-9'&.\-]*")


def text_parts(text: str, lexicons: Lexicons) -> List[Tuple[str, str]]:
    """Split label text into ``(kind, text)`` parts.

    Unit terms and date-format patterns are pulled out first; the words that
    remain form the subject. A trailing ``?`` or an interrogative first word
    adds a question part.
    """
    raw = " ".join(str(text).split())
    if not raw:
        return []
    cleaned = raw.replace("_", " ")
    if lexicons.is_generic(cleaned):
        return []
    parts: List[Tuple[str, str]] = []
    remainder = cleaned
    for m in _DATE_PATTERN.finditer(cleaned):
        parts.append((FORMAT, m.group(0)))
    remainder = _DATE_PATTERN.sub(" ", remainder)
    for m in lexicons.unit_matches(remainder):
        parts.append((UNIT, m.group(0)))
    remainder = lexicons._unit_re.sub(" ", remainder) if lexicons._unit_re else remainder
    words = _WORD.findall(remainder)
    subject = " ".join(words)
    if subject and not lexicons.is_generic(subject) and not _only_connectors(words):
        parts.insert(0, (SUBJECT, subject))
    if cleaned.rstrip().endswith("?") or (words and words[0].lower() in lexicons.interrogatives):
        parts.append((QUESTION, cleaned))
    return parts


_CONNECTORS = {"per", "in", "of", "and", "or", "the", "a", "an", "by", "to"}


def _only_connectors(words: Sequence[str]) -> bool:
    return all(w.lower() in _CONNECTORS for w in words)


def _format_skeleton(fmt: str) -> str:
    """Number format with quoted literals, escapes and bracket codes removed."""
    out = _FORMAT_QUOTED.sub("", fmt)
    out = _FORMAT_ESCAPED.sub("", out)
    return _FORMAT_BRACKET.sub("", out)


def is_date_format(fmt: Optional[str]) -> bool:
    if not fmt or fmt.strip().lower() == "general":
        return False
    skeleton = _format_skeleton(fmt.split(";", 1)[0]).lower()
    skeleton = re.sub(r"[_*].", "", skeleton)  # padding and fill codes
    skeleton = re.sub(r"e[+-]", "", skeleton)  # scientific notation
    if "am/pm" in skeleton or "a/p" in skeleton:
        return True
    return any(ch in skeleton for ch in "ymdhs")


def is_flag_format(fmt: Optional[str]) -> bool:
    if not fmt:
        return False
    literals = {lit.strip().lower() for lit in _FORMAT_QUOTED.findall(fmt)}
    return bool(literals) and literals <= _FLAG_TEXT | {"on", "off", ""}


def format_parts(fmt: Optional[str], lexicons: Lexicons) -> List[Tuple[str, str]]:
    """Unit and format parts conveyed by a cell's own number format."""
    if not fmt or fmt.strip().lower() == "general":
        return []
    parts: List[Tuple[str, str]] = []
    first = fmt.split(";", 1)[0]
    if is_date_format(first):
        parts.append((FORMAT, first))
    for code in _FORMAT_BRACKET.findall(first):
        # [$USD-409] or [$€-x-euro]
        if code.startswith("$"):
            symbol = code[1:].split("-", 1)[0]
            if symbol:
                parts.append((UNIT, symbol))
    for literal in _FORMAT_QUOTED.findall(first):
        for m in lexicons.unit_matches(literal):
            parts.append((UNIT, m.group(0)))
        for ch in literal:
            if ch in _CURRENCY_SYMBOLS:
                parts.append((UNIT, ch))
    skeleton = _format_skeleton(first)
    for ch in skeleton:
        if ch in _CURRENCY_SYMBOLS:
            parts.append((UNIT, ch))
            break
    for m in _FORMAT_ESCAPED.finditer(first):
        if m.group(1) in _CURRENCY_SYMBOLS:
            parts.append((UNIT, m.group(1)))
    return list(dict.fromkeys(parts))


def is_code_like(text: str) -> bool:
    return bool(_CODE_LIKE.match(text.strip()))


def is_label_lexeme(text: str, lexicons: Lexicons) -> bool:
    """Text that is a unit term or a date-format pattern in its entirety."""
    cleaned = " ".join(text.split())
    if not cleaned:
        return False
    if _DATE_PATTERN.fullmatch(cleaned):
        return True
    return bool(lexicons._unit_re and lexicons._unit_re.fullmatch(cleaned))


# -- co-visibility -------------------------------------------------------------


def _span(lo: int, hi: int, frozen: int) -> Optional[Tuple[int, int]]:
    """Part of ``lo..hi`` outside the first ``frozen`` rows/cols."""
    lo = max(lo, frozen + 1)
    return (lo, hi) if lo <= hi else None


def co_visible_areas(wb: WorkbookModel, areas: Iterable[AreaRef], cfg: VicinityConfig) -> bool:
    """True iff every cell of ``areas`` fits in one window.

    Rows inside frozen panes never stretch the row extent and frozen columns
    never stretch the column extent: those stay on screen while scrolling.
    """
    areas = list(areas)
    if not areas:
        return True
    sheets = {a.sheet for a in areas}
    if len(sheets) != 1:
        return False
    fr = fc = 0
    if cfg.honor_frozen_panes and wb.has_sheet(areas[0].sheet):
        sheet = wb.sheet(areas[0].sheet)
        fr, fc = sheet.frozen_rows, sheet.frozen_cols
    row_lo = col_lo = None
    row_hi = col_hi = None
    for area in areas:
        tl, br = area.top_left, area.bottom_right
        rows = _span(tl.row, br.row, fr)
        cols = _span(tl.col, br.col, fc)
        if rows:
            row_lo = rows[0] if row_lo is None else min(row_lo, rows[0])
            row_hi = rows[1] if row_hi is None else max(row_hi, rows[1])
        if cols:
            col_lo = cols[0] if col_lo is None else min(col_lo, cols[0])
            col_hi = cols[1] if col_hi is None else max(col_hi, cols[1])
    if row_lo is not None and row_hi - row_lo + 1 > cfg.rows_visible:
        return False
    if col_lo is not None and col_hi - col_lo + 1 > cfg.cols_visible:
        return False
    return True


def co_visible(wb: WorkbookModel, cells: Iterable[CellAddress], cfg: VicinityConfig) -> bool:
    return co_visible_areas(wb, (AreaRef.cell(c) for c in cells), cfg)


# -- classification and label search -------------------------------------------


class Labeler:
    """Per-workbook label analysis with memoized classification and search."""

    def __init__(
        self,
        wb: WorkbookModel,
        cfg: Optional[VicinityConfig] = None,
        lexicons: Optional[Lexicons] = None,
        strict: bool = False,
    ):
        self.wb = wb
        self.cfg = cfg or VicinityConfig()
        self.lexicons = lexicons or default_lexicons()
        self.strict = strict
        self._types: Dict[CellAddress, ValueType] = {}
        self._resolutions: Dict[CellAddress, LabelResolution] = {}
        self._rows: Dict[Tuple[str, int], List[int]] = {}
        self._cols: Dict[Tuple[str, int], List[int]] = {}
        for addr, rec in wb.cells.items():
            if rec.occupied:
                self._rows.setdefault((addr.sheet, addr.row), []).append(addr.col)
                self._cols.setdefault((addr.sheet, addr.col), []).append(addr.row)
        for index in (self._rows, self._cols):
            for key in index:
                index[key].sort()

    # classification

    def value_type(self, addr: CellAddress) -> ValueType:
        found = self._types.get(addr)
        if found is None:
            found = self._types[addr] = self._classify(addr)
        return found

    def is_label(self, addr: CellAddress) -> bool:
        return self.value_type(addr) is ValueType.LABEL

    def _table_header(self, addr: CellAddress) -> Tuple[Optional[TableModel], Optional[str]]:
        table = self.wb.table_at(addr)
        if table is None:
            return None, None
        offset = addr.col - table.area.top_left.col
        header = table.header_row[offset] if offset < len(table.header_row) else None
        return table, header

    def _classify(self, addr: CellAddress) -> ValueType:
        rec = self.wb.cell(addr)
        if rec is None or not rec.occupied:
            return ValueType.EMPTY
        value = rec.value
        if isinstance(value, ErrorValue):
            return ValueType.ERROR
        if self.wb.table_with_uom_at(addr) is not None:
            return ValueType.LABEL
        table, header = self._table_header(addr)
        in_header = table is not None and table.header_rows and addr.row == table.area.top_left.row
        if in_header:
            return ValueType.LABEL
        if isinstance(value, bool):
            return ValueType.FLAG
        if isinstance(value, (_dt.datetime, _dt.date, _dt.time, _dt.timedelta)):
            return ValueType.DATE
        if isinstance(value, (int, float)):
            return self._classify_number(rec, header)
        if value is None:
            # formula without a cached result: judge by its number format
            return self._classify_number(rec, header)
        text = str(value).strip()
        if rec.formula is not None:
            return ValueType.IDENTITY if is_code_like(text) else ValueType.ATTRIBUTE
        return self._classify_text(rec, text, table, header)

    def _classify_number(self, rec: CellRecord, header: Optional[str]) -> ValueType:
        if is_flag_format(rec.number_format):
            return ValueType.FLAG
        if is_date_format(rec.number_format):
            return ValueType.DATE
        if header is not None and self.lexicons.is_identity_header(header):
            return ValueType.IDENTITY
        return ValueType.QUANTITY

    def _classify_text(self, rec: CellRecord, text: str, table: Optional[TableModel], header: Optional[str]) -> ValueType:
        lex = self.lexicons
        if is_label_lexeme(text, lex):
            return ValueType.LABEL
        if table is not None:
            if header is not None and lex.is_label_column(header):
                return ValueType.LABEL
            if text.lower() in _FLAG_TEXT:
                return ValueType.FLAG
            if (header is not None and lex.is_identity_header(header)) or is_code_like(text):
                return ValueType.IDENTITY
            return ValueType.ATTRIBUTE
        if text.lower() in _FLAG_TEXT:
            return ValueType.FLAG
        if rec.validation_list is not None or is_code_like(text):
            return ValueType.IDENTITY if is_code_like(text) else ValueType.ATTRIBUTE
        return ValueType.LABEL

    # label search

    def _visible_with(self, addr: CellAddress, other: CellAddress) -> bool:
        return co_visible(self.wb, (addr, other), self.cfg)

    def _parts_from_cell(self, target: CellAddress) -> List[LabelPart]:
        rec = self.wb.cell(target)
        if rec is None or rec.value is None:
            return []
        return [LabelPart(k, t, VICINITY_CELL, 0, target) for k, t in text_parts(str(rec.value), self.lexicons)]

    def _row_candidates(self, addr: CellAddress) -> Tuple[List[CellAddress], List[CellAddress]]:
        """Label cells left (nearest first) then right (nearest first) of
        ``addr``, stopping at the first value cell in each direction."""
        cols = self._rows.get((addr.sheet, addr.row), [])
        pos = bisect_left(cols, addr.col)
        near: List[CellAddress] = []
        far: List[CellAddress] = []
        for seq in (reversed(cols[:pos]), cols[pos + 1 :] if pos < len(cols) and cols[pos] == addr.col else cols[pos:]):
            for col in seq:
                cand = CellAddress(addr.sheet, addr.row, col)
                if not self.is_label(cand):
                    break
                (near if self._visible_with(addr, cand) else far).append(cand)
        return near, far

    def _column_candidates(self, addr: CellAddress) -> Tuple[List[CellAddress], List[CellAddress]]:
        """First label cell above ``addr`` (skipping value cells) plus the
        label cells stacked directly on top of it."""
        rows = self._cols.get((addr.sheet, addr.col), [])
        pos = bisect_left(rows, addr.row)
        found: List[CellAddress] = []
        for row in reversed(rows[:pos]):
            cand = CellAddress(addr.sheet, row, addr.col)
            if self.is_label(cand):
                if found and found[-1].row != row + 1:
                    break
                found.append(cand)
            elif found:
                break
        near = [c for c in found if self._visible_with(addr, c)]
        far = [c for c in found if c not in near]
        return near, far

    def resolve(self, addr: CellAddress) -> LabelResolution:
        found = self._resolutions.get(addr)
        if found is None:
            found = self._resolutions[addr] = self._resolve(addr)
        return found

    def _resolve(self, addr: CellAddress) -> LabelResolution:
        wb = self.wb
        vt = self.value_type(addr)
        rec = wb.cell(addr)
        parts: List[LabelPart] = []
        off: List[LabelPart] = []

        def take(cells: Sequence[CellAddress], into: List[LabelPart]) -> None:
            for c in cells:
                into.extend(self._parts_from_cell(c))

        # table header and UOM row
        table, _header = self._table_header(addr)
        if table is not None and table.header_rows and addr.row > table.area.top_left.row:
            cells = [CellAddress(addr.sheet, table.area.top_left.row, addr.col)]
            if table.uom_row_index is not None and table.uom_row_index >= 1:
                cells.append(CellAddress(addr.sheet, table.uom_row_index, addr.col))
            for c in cells:
                (parts if self._visible_with(addr, c) else off).extend(self._parts_from_cell(c))
        # same row, then same column
        near, far = self._row_candidates(addr)
        take(near, parts)
        take(far, off)
        near, far = self._column_candidates(addr)
        take(near, parts)
        take(far, off)
        # a defined name covering the cell is its own label
        for dn in wb.defined_names:
            if dn.is_range and (dn.scope is None or dn.scope.lower() == addr.sheet.lower()):
                if any(addr in area for area in dn.refers_to):
                    for kind, text in text_parts(dn.name, self.lexicons):
                        parts.append(LabelPart(kind, text, DEFINED_NAME, 0))
        # the cell's own number format
        if not self.strict and rec is not None:
            for kind, text in format_parts(rec.number_format, self.lexicons):
                parts.append(LabelPart(kind, text, SAME_CELL_FORMAT, 0))
        # one gesture away
        if rec is not None:
            if rec.comment:
                parts.extend(LabelPart(k, t, COMMENT, 1) for k, t in text_parts(rec.comment, self.lexicons))
            if rec.validation_message:
                parts.extend(
                    LabelPart(k, t, VALIDATION_MESSAGE, 1) for k, t in text_parts(rec.validation_message, self.lexicons)
                )
            doc = self._documentation_target(rec)
            if doc is not None:
                doc_rec = wb.cell(doc)
                if doc_rec is not None and isinstance(doc_rec.value, str):
                    parts.extend(
                        LabelPart(k, t, DOCUMENTATION_CELL, 1, doc) for k, t in text_parts(doc_rec.value, self.lexicons)
                    )
        parts = list(dict.fromkeys(parts))
        required = REQUIRED_PARTS.get(vt, frozenset())
        missing = required - {p.kind for p in parts}
        return LabelResolution(tuple(parts), frozenset(missing), vt, tuple(dict.fromkeys(off)))

    def _documentation_target(self, rec: CellRecord) -> Optional[CellAddress]:
        if not rec.hyperlink:
            return None
        try:
            target = CellAddress.parse(rec.hyperlink.lstrip("#"), rec.address.sheet)
        except Exception:
            return None
        return target if self.wb.has_sheet(target.sheet) else None


# -- sufficiency -----------------------------------------------------------------


def sufficiency(vt: ValueType, res: LabelResolution) -> Sufficiency:
    if vt in (ValueType.LABEL, ValueType.EMPTY):
        raise ValueError(f"sufficiency is undefined for {vt.value} cells")
    if vt is ValueType.ERROR:
        return Sufficiency(False, frozenset())
    missing = REQUIRED_PARTS[vt] - res.kinds()
    return Sufficiency(not missing, frozenset(missing))


def cheapest_parts(
    vt: ValueType, res: LabelResolution, cost: Optional[Callable[[LabelPart], int]] = None
) -> Optional[Tuple[int, Tuple[LabelPart, ...]]]:
    """Minimum-step choice of one part per required kind.

    A gesture that reveals several parts (one comment holding both subject and
    unit) is paid once. Returns ``(steps, parts)`` or None when insufficient.
    """
    cost = cost or (lambda p: p.steps)
    required = sorted(REQUIRED_PARTS.get(vt, frozenset()))
    if vt is ValueType.ERROR:
        return None
    options = []
    for kind in required:
        found = [p for p in res.parts if p.kind == kind]
        if not found:
            return None
        options.append(found)
    best: Optional[Tuple[int, Tuple[LabelPart, ...]]] = None
    for combo in itertools.product(*options):
        steps = sum(dict((p.source_key, cost(p)) for p in combo).values())
        if best is None or steps < best[0]:
            best = (steps, tuple(combo))
    return best if best is not None else (0, ())


# -- module-level conveniences -------------------------------------------------


def classify_value_type(wb: WorkbookModel, addr: CellAddress, lexicons: Optional[Lexicons] = None) -> ValueType:
    from .workbook import AddressError

    if not wb.has_sheet(addr.sheet):
        raise AddressError(f"address out of range: {addr}")
    return Labeler(wb, lexicons=lexicons).value_type(addr)


def resolve_labels(
    wb: WorkbookModel,
    addr: CellAddress,
    cfg: Optional[VicinityConfig] = None,
    lexicons: Optional[Lexicons] = None,
    strict: bool = False,
) -> LabelResolution:
    return Labeler(wb, cfg, lexicons, strict).resolve(addr)


def is_label_cell(wb: WorkbookModel, addr: CellAddress, lexicons: Optional[Lexicons] = None) -> bool:
    return classify_value_type(wb, addr, lexicons) is ValueType.LABEL
