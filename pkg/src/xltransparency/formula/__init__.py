"""Spreadsheet formula parsing: tokens, AST, operands."""

from .ast import (
    BinaryOp,
    CellRef,
    FuncCall,
    Literal,
    NamedRef,
    Node,
    Paren,
    PercentOp,
    RangeRef,
    StructuredRef,
    UnaryOp,
    dump,
    serialize,
    walk,
)
from .operands import IndirectUse, SourceOperand, indirect_uses, operands
from .parser import parse_formula
from .tokenizer import FormulaSyntaxError, UnknownTokenError, leaf_token_count

__all__ = [
    "BinaryOp",
    "CellRef",
    "FormulaSyntaxError",
    "FuncCall",
    "IndirectUse",
    "Literal",
    "NamedRef",
    "Node",
    "Paren",
    "PercentOp",
    "RangeRef",
    "SourceOperand",
    "StructuredRef",
    "UnaryOp",
    "UnknownTokenError",
    "dump",
    "indirect_uses",
    "leaf_token_count",
    "operands",
    "parse_formula",
    "serialize",
    "walk",
]
