"""AST node types for spreadsheet formulas and a canonical serializer.

Nodes are frozen dataclasses. Character spans are carried for reporting but
excluded from equality, so two parses of equivalent text compare equal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple, Union

Span = Tuple[int, int]

MAX_ROW = 1048576
MAX_COL = 16384


def col_to_letters(col: int) -> str:
    letters = ""
    while col:
        col, rem = divmod(col - 1, 26)
        letters = chr(65 + rem) + letters
    return letters


def letters_to_col(letters: str) -> int:
    col = 0
    for ch in letters.upper():
        col = col * 26 + (ord(ch) - 64)
    return col


_PLAIN_SHEET = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")
_A1_LIKE = re.compile(r"^[A-Za-z]{1,3}\d+$|^[RrCc]\d*$")


def quote_sheet(sheet: str) -> str:
    """Quote a sheet name for use as a reference prefix, if it needs it."""
    if _PLAIN_SHEET.match(sheet) and not _A1_LIKE.match(sheet):
        return sheet
    return "'" + sheet.replace("'", "''") + "'"


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Literal(Node):
    """A constant. ``kind`` is one of number, text, boolean, error, array, missing."""

    value: object
    kind: str
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class CellRef(Node):
    row: int
    col: int
    sheet: Optional[str] = None
    row_abs: bool = False
    col_abs: bool = False
    external: Optional[str] = None
    span: Span = field(default=(0, 0), compare=False, repr=False)

    @property
    def a1(self) -> str:
        return (
            ("$" if self.col_abs else "")
            + col_to_letters(self.col)
            + ("$" if self.row_abs else "")
            + str(self.row)
        )


@dataclass(frozen=True)
class RangeRef(Node):
    """A rectangular area. Whole-column ranges leave rows None, whole-row ranges leave cols None."""

    first_row: Optional[int]
    first_col: Optional[int]
    last_row: Optional[int]
    last_col: Optional[int]
    sheet: Optional[str] = None
    absolute: Tuple[bool, bool, bool, bool] = (False, False, False, False)
    external: Optional[str] = None
    span: Span = field(default=(0, 0), compare=False, repr=False)

    @property
    def a1(self) -> str:
        fr_abs, fc_abs, lr_abs, lc_abs = self.absolute

        def part(row, col, row_abs, col_abs):
            text = ""
            if col is not None:
                text += ("$" if col_abs else "") + col_to_letters(col)
            if row is not None:
                text += ("$" if row_abs else "") + str(row)
            return text

        return (
            part(self.first_row, self.first_col, fr_abs, fc_abs)
            + ":"
            + part(self.last_row, self.last_col, lr_abs, lc_abs)
        )


@dataclass(frozen=True)
class NamedRef(Node):
    name: str
    sheet: Optional[str] = None
    external: Optional[str] = None
    span: Span = field(default=(0, 0), compare=False, repr=False)


STRUCTURED_REGIONS = ("all", "data", "headers", "totals", "this-row")


@dataclass(frozen=True)
class StructuredRef(Node):
    """Table-relative reference such as ``tbl[@EBIT]`` or ``[[#Headers],[A]:[C]]``.

    ``table`` is None for the unqualified form used inside a table.
    ``columns`` is empty (whole table width), one name, or a (first, last) pair.
    ``specials`` holds normalized region items in source order.
    """

    table: Optional[str]
    columns: Tuple[str, ...] = ()
    specials: Tuple[str, ...] = ()
    span: Span = field(default=(0, 0), compare=False, repr=False)

    @property
    def region(self) -> str:
        if not self.specials:
            return "data"
        if "all" in self.specials:
            return "all"
        if len(self.specials) == 1:
            return self.specials[0]
        if set(self.specials) == {"headers", "data"}:
            return "all"
        return self.specials[-1]


@dataclass(frozen=True)
class FuncCall(Node):
    name: str
    args: Tuple[Node, ...]
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class BinaryOp(Node):
    op: str
    left: Node
    right: Node
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class UnaryOp(Node):
    op: str
    operand: Node
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class PercentOp(Node):
    operand: Node
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Paren(Node):
    inner: Node
    span: Span = field(default=(0, 0), compare=False, repr=False)


REFERENCE_NODES = (CellRef, RangeRef, NamedRef, StructuredRef)
LEAF_NODES = (Literal,) + REFERENCE_NODES
Formula = Node
AnyRef = Union[CellRef, RangeRef, NamedRef, StructuredRef]


def children(node: Node) -> Tuple[Node, ...]:
    if isinstance(node, FuncCall):
        return node.args
    if isinstance(node, BinaryOp):
        return (node.left, node.right)
    if isinstance(node, (UnaryOp, PercentOp)):
        return (node.operand,)
    if isinstance(node, Paren):
        return (node.inner,)
    return ()


def walk(node: Node) -> Iterator[Node]:
    """Pre-order, left-to-right traversal."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(children(current)))


def is_leaf(node: Node) -> bool:
    return isinstance(node, LEAF_NODES)


# -- serialization ----------------------------------------------------------

_SIMPLE_COLUMN = re.compile(r"^[^\[\]'#@,:]+$")


def _escape_column(name: str) -> str:
    return re.sub(r"([\[\]'#@])", r"'\1", name)


_SPECIAL_TEXT = {
    "all": "#All",
    "data": "#Data",
    "headers": "#Headers",
    "totals": "#Totals",
    "this-row": "#This Row",
}


def _prefix(sheet: Optional[str], external: Optional[str]) -> str:
    if external is not None:
        inner = "[" + external + "]" + (sheet or "")
        return "'" + inner.replace("'", "''") + "'!"
    if sheet is not None:
        return quote_sheet(sheet) + "!"
    return ""


def _literal_text(value: object, kind: str) -> str:
    if kind == "number":
        return _number_text(value)
    if kind == "text":
        return '"' + str(value).replace('"', '""') + '"'
    if kind == "boolean":
        return "TRUE" if value else "FALSE"
    if kind == "error":
        return str(value)
    if kind == "missing":
        return ""
    if kind == "array":
        rows = []
        for row in value:  # type: ignore[attr-defined]
            rows.append(",".join(_literal_text(v, k) for v, k in row))
        return "{" + ";".join(rows) + "}"
    raise ValueError(f"unknown literal kind {kind!r}")


def _number_text(value: object) -> str:
    if isinstance(value, float) and value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value) if isinstance(value, float) else str(value)


def _structured_text(ref: StructuredRef) -> str:
    prefix = ref.table or ""
    items = [_SPECIAL_TEXT[s] for s in ref.specials]
    if len(ref.columns) == 1:
        col_items = ["[" + _escape_column(ref.columns[0]) + "]"]
    elif len(ref.columns) == 2:
        col_items = [
            "[" + _escape_column(ref.columns[0]) + "]:[" + _escape_column(ref.columns[1]) + "]"
        ]
    else:
        col_items = []
    if not items and len(ref.columns) == 1 and _SIMPLE_COLUMN.match(ref.columns[0]):
        return prefix + "[" + ref.columns[0] + "]"
    if not items and not col_items:
        return prefix + "[]"
    if items == ["#This Row"] and len(ref.columns) == 1:
        col = ref.columns[0]
        if _SIMPLE_COLUMN.match(col) and col.strip() == col and " " not in col:
            return prefix + "[@" + col + "]"
        return prefix + "[@[" + _escape_column(col) + "]]"
    if len(items) == 1 and not col_items:
        return prefix + "[" + items[0] + "]"
    parts = ["[" + item + "]" for item in items] + col_items
    return prefix + "[" + ",".join(parts) + "]"


def serialize(node: Node, leading_equals: bool = True) -> str:
    """Render an AST back to formula text in a whitespace-normalized form."""
    text = _serialize(node)
    return "=" + text if leading_equals else text


def _serialize(node: Node) -> str:
    if isinstance(node, Literal):
        return _literal_text(node.value, node.kind)
    if isinstance(node, CellRef):
        return _prefix(node.sheet, node.external) + node.a1
    if isinstance(node, RangeRef):
        return _prefix(node.sheet, node.external) + node.a1
    if isinstance(node, NamedRef):
        return _prefix(node.sheet, node.external) + node.name
    if isinstance(node, StructuredRef):
        return _structured_text(node)
    if isinstance(node, FuncCall):
        return node.name + "(" + ",".join(_serialize(a) for a in node.args) + ")"
    if isinstance(node, BinaryOp):
        return _serialize(node.left) + node.op + _serialize(node.right)
    if isinstance(node, UnaryOp):
        return node.op + _serialize(node.operand)
    if isinstance(node, PercentOp):
        return _serialize(node.operand) + "%"
    if isinstance(node, Paren):
        return "(" + _serialize(node.inner) + ")"
    raise TypeError(f"not a formula node: {node!r}")


def dump(node: Node, indent: str = "  ") -> str:
    """Indented, one-node-per-line rendering used by the ``ast`` CLI command."""
    lines = []

    def visit(n: Node, depth: int) -> None:
        pad = indent * depth
        if isinstance(n, Literal):
            lines.append(f"{pad}Literal[{n.kind}] {_literal_text(n.value, n.kind) or '<missing>'}")
        elif isinstance(n, CellRef):
            lines.append(f"{pad}CellRef {_serialize(n)}")
        elif isinstance(n, RangeRef):
            lines.append(f"{pad}RangeRef {_serialize(n)}")
        elif isinstance(n, NamedRef):
            lines.append(f"{pad}NamedRef {_serialize(n)}")
        elif isinstance(n, StructuredRef):
            cols = ",".join(n.columns) or "*"
            lines.append(
                f"{pad}StructuredRef table={n.table or '<this>'} columns={cols} region={n.region}"
            )
        elif isinstance(n, FuncCall):
            lines.append(f"{pad}FuncCall {n.name} ({len(n.args)} args)")
        elif isinstance(n, BinaryOp):
            lines.append(f"{pad}BinaryOp {n.op!r}")
        elif isinstance(n, UnaryOp):
            lines.append(f"{pad}UnaryOp {n.op!r}")
        elif isinstance(n, PercentOp):
            lines.append(f"{pad}PercentOp")
        elif isinstance(n, Paren):
            lines.append(f"{pad}Paren")
        for child in children(n):
            visit(child, depth + 1)

    visit(node, 0)
    return "\n".join(lines)
