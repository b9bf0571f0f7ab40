"""Recursive-descent parser producing :mod:`xltransparency.formula.ast` trees.

Precedence, loosest first: comparison, ``&``, ``+ -``, ``* /``, ``^``,
postfix ``%``, prefix ``+ -``, then the reference operators (``:``, the
space intersection, and ``,`` union inside a parenthesized group).
"""

from __future__ import annotations

from functools import lru_cache
from typing import List, Tuple

from . import tokenizer as tk
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
)
from .tokenizer import FormulaSyntaxError, Token

_COMPARISON = ("=", "<>", "<", ">", "<=", ">=")
_FN_PREFIXES = ("_XLFN._XLWS.", "_XLFN.", "_XLWS.")


class Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        token = self.tokens[self.i]
        self.i += 1
        return token

    def expect(self, kind: str) -> Token:
        if self.cur.kind != kind:
            raise FormulaSyntaxError(f"unexpected {self._describe(self.cur)}", self.cur.start, frozenset({kind}))
        return self.advance()

    @staticmethod
    def _describe(token: Token) -> str:
        return "end of formula" if token.kind == tk.EOF else repr(token.text)

    def _is_op(self, *ops: str) -> bool:
        return self.cur.kind == tk.OP and self.cur.text in ops

    def parse(self) -> Node:
        if self.cur.kind == tk.EOF:
            raise FormulaSyntaxError("empty formula", self.cur.start, frozenset({"expression"}))
        node = self.expression()
        if self.cur.kind != tk.EOF:
            raise FormulaSyntaxError(
                f"unexpected {self._describe(self.cur)}", self.cur.start, frozenset({"operator", "end of formula"})
            )
        return node

    def expression(self) -> Node:
        return self._binary_level(0)

    _LEVELS: Tuple[Tuple[str, ...], ...] = (_COMPARISON, ("&",), ("+", "-"), ("*", "/"), ("^",))

    def _binary_level(self, level: int) -> Node:
        if level == len(self._LEVELS):
            return self.percent()
        left = self._binary_level(level + 1)
        while self._is_op(*self._LEVELS[level]):
            op = self.advance().text
            right = self._binary_level(level + 1)
            left = BinaryOp(op, left, right, span=(left.span[0], right.span[1]))
        return left

    def percent(self) -> Node:
        node = self.unary()
        while self.cur.kind == tk.PERCENT:
            end = self.advance().end
            node = PercentOp(node, span=(node.span[0], end))
        return node

    def unary(self) -> Node:
        if self._is_op("+", "-"):
            token = self.advance()
            operand = self.unary()
            return UnaryOp(token.text, operand, span=(token.start, operand.span[1]))
        return self.reference_expr()

    def reference_expr(self) -> Node:
        node = self.primary()
        while self.cur.kind in (tk.COLON, tk.INTERSECT):
            op = self.advance().text
            right = self.primary()
            node = BinaryOp(op, node, right, span=(node.span[0], right.span[1]))
        return node

    def primary(self) -> Node:
        token = self.cur
        kind = token.kind
        span = (token.start, token.end)
        if kind == tk.NUMBER:
            self.advance()
            return Literal(token.value, "number", span=span)
        if kind == tk.STRING:
            self.advance()
            return Literal(token.value, "text", span=span)
        if kind == tk.BOOL:
            self.advance()
            return Literal(token.value, "boolean", span=span)
        if kind == tk.ERROR:
            self.advance()
            return Literal(token.value, "error", span=span)
        if kind == tk.REF:
            self.advance()
            return _ref_node(token)
        if kind == tk.NAME:
            self.advance()
            return NamedRef(token.value, sheet=token.sheet, external=token.external, span=span)
        if kind == tk.STRUCT:
            self.advance()
            table, columns, specials = token.value
            return StructuredRef(table, tuple(columns), tuple(specials), span=span)
        if kind == tk.FUNC:
            return self.call()
        if kind == tk.LPAREN:
            return self.group()
        if kind == tk.LBRACE:
            return self.array()
        raise FormulaSyntaxError(
            f"unexpected {self._describe(token)}",
            token.start,
            frozenset({"number", "string", "reference", "function", "("}),
        )

    def call(self) -> Node:
        name_token = self.advance()
        name = name_token.text.upper()
        for prefix in _FN_PREFIXES:
            if name.startswith(prefix):
                name = name[len(prefix) :]
                break
        self.expect(tk.LPAREN)
        args: List[Node] = []
        if self.cur.kind == tk.RPAREN:
            end = self.advance().end
            return FuncCall(name, (), span=(name_token.start, end))
        while True:
            if self.cur.kind in (tk.COMMA, tk.RPAREN):
                args.append(Literal(None, "missing", span=(self.cur.start, self.cur.start)))
            else:
                args.append(self.expression())
            if self.cur.kind == tk.COMMA:
                self.advance()
                continue
            if self.cur.kind == tk.RPAREN:
                end = self.advance().end
                return FuncCall(name, tuple(args), span=(name_token.start, end))
            raise FormulaSyntaxError(
                f"unexpected {self._describe(self.cur)} in argument list",
                self.cur.start,
                frozenset({",", ")"}),
            )

    def group(self) -> Node:
        start = self.advance().start
        inner = self.expression()
        while self.cur.kind == tk.COMMA:
            self.advance()
            right = self.expression()
            inner = BinaryOp(",", inner, right, span=(inner.span[0], right.span[1]))
        end = self.expect(tk.RPAREN).end
        return Paren(inner, span=(start, end))

    def array(self) -> Node:
        start = self.advance().start
        rows: List[Tuple[Tuple[object, str], ...]] = []
        row: List[Tuple[object, str]] = []
        while True:
            row.append(self._array_item())
            if self.cur.kind == tk.COMMA:
                self.advance()
            elif self.cur.kind == tk.SEMI:
                self.advance()
                rows.append(tuple(row))
                row = []
            elif self.cur.kind == tk.RBRACE:
                end = self.advance().end
                rows.append(tuple(row))
                return Literal(tuple(rows), "array", span=(start, end))
            else:
                raise FormulaSyntaxError(
                    f"unexpected {self._describe(self.cur)} in array constant",
                    self.cur.start,
                    frozenset({",", ";", "}"}),
                )

    def _array_item(self) -> Tuple[object, str]:
        sign = 1
        if self._is_op("-", "+"):
            sign = -1 if self.advance().text == "-" else 1
            if self.cur.kind != tk.NUMBER:
                raise FormulaSyntaxError("sign must precede a number", self.cur.start, frozenset({"number"}))
        token = self.advance()
        if token.kind == tk.NUMBER:
            return (sign * token.value, "number")
        if token.kind == tk.STRING:
            return (token.value, "text")
        if token.kind == tk.BOOL:
            return (token.value, "boolean")
        if token.kind == tk.ERROR:
            return (token.value, "error")
        raise FormulaSyntaxError(
            f"unexpected {self._describe(token)} in array constant",
            token.start,
            frozenset({"number", "string", "boolean", "error"}),
        )


def _ref_node(token: Token) -> Node:
    value = token.value
    span = (token.start, token.end)
    if value[0] == "cell":
        _, row, col, row_abs, col_abs = value
        return CellRef(row, col, sheet=token.sheet, row_abs=row_abs, col_abs=col_abs, external=token.external, span=span)
    _, r1, c1, r2, c2, absolute = value
    return RangeRef(r1, c1, r2, c2, sheet=token.sheet, absolute=absolute, external=token.external, span=span)


@lru_cache(maxsize=4096)
def parse_formula(text: str) -> Node:
    """Parse formula ``text`` (which must begin with ``=``) into an AST.

    >>> parse_formula("=A11 * 12")
    BinaryOp(op='*', left=CellRef(row=11, col=1, sheet=None, row_abs=False, col_abs=False, external=None), right=Literal(value=12, kind='number'))
    """
    return Parser(tk.tokenize(text)).parse()
