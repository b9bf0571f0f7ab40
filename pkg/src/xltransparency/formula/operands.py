"""Flatten a formula AST into scoring operands and indirect-reference uses."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Tuple

from .ast import (
    CellRef,
    FuncCall,
    Literal,
    NamedRef,
    Node,
    Paren,
    PercentOp,
    RangeRef,
    Span,
    StructuredRef,
    UnaryOp,
    children,
    walk,
)

LITERAL = "literal"
CELL_AREA = "cell-area"
NAMED = "named"
STRUCTURED = "structured"

INDIRECT_FUNCTIONS = frozenset({"INDIRECT", "OFFSET", "LOOKUP", "VLOOKUP", "HLOOKUP", "INDEX"})

LITERAL_RANGE = "literal-range-argument"
TABLE_ARGUMENT = "table-argument"
VALIDATION_INPUT = "validation-constrained-input"
SINGLE_CELL_OFFSET = "single-cell-offset"

# argument positions holding the searched/indexed area
LOOKUP_RANGE_ARGS = {
    "VLOOKUP": (1,),
    "HLOOKUP": (1,),
    "LOOKUP": (1, 2),
    "INDEX": (0,),
}


@dataclass(frozen=True)
class SourceOperand:
    """One literal or reference leaf of a formula.

    ``function_context`` is ``(FUNCTION, arg_index)`` when the leaf is a
    direct argument of a call, looking through parentheses, a sign or a
    trailing percent. ``enclosing_functions`` lists every call above the
    leaf, outermost first.
    """

    kind: str
    node: Node
    function_context: Optional[Tuple[str, int]]
    span: Span
    enclosing_functions: Tuple[str, ...] = ()

    @property
    def is_reference(self) -> bool:
        return self.kind != LITERAL


@dataclass(frozen=True)
class IndirectUse:
    function_name: str
    evidence: FrozenSet[str]
    span: Span
    node: FuncCall


def _kind(node: Node) -> str:
    if isinstance(node, Literal):
        return LITERAL
    if isinstance(node, (CellRef, RangeRef)):
        return CELL_AREA
    if isinstance(node, NamedRef):
        return NAMED
    if isinstance(node, StructuredRef):
        return STRUCTURED
    raise TypeError(node)


_TRANSPARENT_WRAPPERS = (Paren, UnaryOp, PercentOp)


def operands(ast: Node) -> List[SourceOperand]:
    """Depth-first, left-to-right leaves of ``ast`` with their call context.

    Omitted arguments (``f(a,,b)``) are not leaves and yield no operand.
    """
    out: List[SourceOperand] = []

    def visit(node: Node, context: Optional[Tuple[str, int]], enclosing: Tuple[str, ...]) -> None:
        if isinstance(node, FuncCall):
            inner = enclosing + (node.name,)
            for index, arg in enumerate(node.args):
                visit(arg, (node.name, index), inner)
            return
        if isinstance(node, Literal) and node.kind == "missing":
            return
        if isinstance(node, (Literal, CellRef, RangeRef, NamedRef, StructuredRef)):
            out.append(SourceOperand(_kind(node), node, context, node.span, enclosing))
            return
        keep = context if isinstance(node, _TRANSPARENT_WRAPPERS) else None
        for child in children(node):
            visit(child, keep, enclosing)

    visit(ast, None, ())
    return out


def unwrap(node: Node) -> Node:
    while isinstance(node, Paren):
        node = node.inner
    return node


def is_literal_one(node: Node) -> bool:
    node = unwrap(node)
    return isinstance(node, Literal) and node.kind == "number" and node.value == 1


def _range_evidence(node: Node) -> FrozenSet[str]:
    node = unwrap(node)
    if isinstance(node, (RangeRef, CellRef)):
        return frozenset({LITERAL_RANGE})
    if isinstance(node, StructuredRef):
        return frozenset({LITERAL_RANGE, TABLE_ARGUMENT})
    return frozenset()


def indirect_uses(ast: Node) -> List[IndirectUse]:
    """One entry per call to INDIRECT/OFFSET/LOOKUP/VLOOKUP/HLOOKUP/INDEX.

    Only structural evidence is gathered here; validation-list evidence
    needs the workbook and is added by the scorer.
    """
    uses: List[IndirectUse] = []
    for node in walk(ast):
        if not isinstance(node, FuncCall) or node.name not in INDIRECT_FUNCTIONS:
            continue
        evidence: set = set()
        args = node.args
        if node.name == "INDIRECT":
            if args and isinstance(unwrap(args[0]), Literal) and unwrap(args[0]).kind == "text":
                evidence.add(LITERAL_RANGE)
        elif node.name == "OFFSET":
            if args:
                base = unwrap(args[0])
                if isinstance(base, StructuredRef):
                    evidence.add(TABLE_ARGUMENT)
                elif isinstance(base, (RangeRef, CellRef)):
                    evidence.add(LITERAL_RANGE)
            height = args[3] if len(args) > 3 else None
            width = args[4] if len(args) > 4 else None
            if height is not None and width is not None and is_literal_one(height) and is_literal_one(width):
                evidence.add(SINGLE_CELL_OFFSET)
        else:
            positions = [p for p in LOOKUP_RANGE_ARGS[node.name] if p < len(args)]
            found = [_range_evidence(args[p]) for p in positions if not _is_missing(args[p])]
            if found and all(found):
                evidence.update(*found)
        uses.append(IndirectUse(node.name, frozenset(evidence), node.span, node))
    return uses


def _is_missing(node: Node) -> bool:
    return isinstance(node, Literal) and node.kind == "missing"
