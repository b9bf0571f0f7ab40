"""Lexer for A1-style spreadsheet formulas (comma separators, period decimals)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .ast import MAX_COL, MAX_ROW, letters_to_col


class FormulaSyntaxError(ValueError):
    """Raised for malformed formula text.

    ``position`` is a 0-based index into the formula text (including the
    leading ``=``); ``expected`` names what the parser would have accepted.
    """

    def __init__(self, message: str, position: int, expected: frozenset = frozenset()):
        self.position = position
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at position {position}{detail}")


class UnknownTokenError(FormulaSyntaxError):
    pass


ERROR_CODES = (
    "#GETTING_DATA",
    "#BLOCKED!",
    "#CONNECT!",
    "#UNKNOWN!",
    "#DIV/0!",
    "#VALUE!",
    "#SPILL!",
    "#FIELD!",
    "#NULL!",
    "#NAME?",
    "#CALC!",
    "#BUSY!",
    "#REF!",
    "#NUM!",
    "#N/A",
)

# token kinds
NUMBER = "number"
STRING = "string"
BOOL = "bool"
ERROR = "error"
REF = "ref"
NAME = "name"
STRUCT = "struct"
FUNC = "func"
OP = "op"
LPAREN = "("
RPAREN = ")"
COMMA = ","
SEMI = ";"
LBRACE = "{"
RBRACE = "}"
COLON = ":"
INTERSECT = "intersect"
PERCENT = "%"
EOF = "eof"

LEAF_KINDS = frozenset({NUMBER, STRING, BOOL, ERROR, REF, NAME, STRUCT})


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int
    # REF: ("cell", row, col, row_abs, col_abs) or ("range", r1, c1, r2, c2, abs4)
    # NAME: name text; STRUCT: (table, columns, specials)
    value: object = None
    sheet: Optional[str] = None
    external: Optional[str] = None


_TAIL = r"(?![A-Za-z0-9_.(\[!\\?])"
_CELL = r"(\$?)([A-Za-z]{1,3})(\$?)([0-9]+)"
CELL_RE = re.compile(_CELL + _TAIL)
RANGE_RE = re.compile(_CELL + ":" + _CELL + _TAIL)
COLRANGE_RE = re.compile(r"(\$?)([A-Za-z]{1,3}):(\$?)([A-Za-z]{1,3})" + _TAIL)
ROWRANGE_RE = re.compile(r"(\$?)([0-9]+):(\$?)([0-9]+)(?![A-Za-z0-9_.(])")
NUMBER_RE = re.compile(r"(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")
IDENT_RE = re.compile(r"[A-Za-z_\\][A-Za-z0-9_.\\?]*")
SHEET_RE = re.compile(r"([A-Za-z0-9_.\\]+(?::[A-Za-z0-9_.\\]+)?)!")
BOOL_RE = re.compile(r"(TRUE|FALSE)(?![A-Za-z0-9_.(\\?\[])", re.IGNORECASE)
WS_RE = re.compile(r"[ \t\r\n]+")

_OPERATORS = ("<>", "<=", ">=", "<", ">", "=", "+", "-", "*", "/", "^", "&")
_SINGLE = {"(": LPAREN, ")": RPAREN, ",": COMMA, ";": SEMI, "{": LBRACE, "}": RBRACE, ":": COLON, "%": PERCENT}

_SPECIALS = {
    "#all": "all",
    "#data": "data",
    "#headers": "headers",
    "#totals": "totals",
    "#this row": "this-row",
}


def _valid_cell(letters: str, row: str) -> bool:
    return letters_to_col(letters) <= MAX_COL and 1 <= int(row) <= MAX_ROW


def _matching_bracket(text: str, start: int) -> int:
    """Index of the bracket closing ``text[start] == '['``; honours ``'`` escapes."""
    depth = 0
    i = start
    while i < len(text):
        ch = text[i]
        if ch == "'":
            i += 2
            continue
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                return i
        i += 1
    raise FormulaSyntaxError("unterminated '['", start, frozenset({"]"}))


def _unescape(name: str) -> str:
    return re.sub(r"'(.)", r"\1", name)


def _split_top(content: str) -> List[str]:
    parts, depth, buf, i = [], 0, "", 0
    while i < len(content):
        ch = content[i]
        if ch == "'" and i + 1 < len(content):
            buf += content[i : i + 2]
            i += 2
            continue
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(buf)
            buf = ""
        else:
            buf += ch
        i += 1
    parts.append(buf)
    return [p.strip() for p in parts]


def _bracket_items(item: str, position: int) -> Tuple[str, ...]:
    """'[A]' -> ('A',); '[A]:[C]' -> ('A', 'C')."""
    m = re.fullmatch(r"\[((?:'.|[^\]])*)\](?:\s*:\s*\[((?:'.|[^\]])*)\])?", item)
    if not m:
        raise FormulaSyntaxError(f"malformed structured reference item {item!r}", position)
    first = _unescape(m.group(1))
    if m.group(2) is None:
        return (first,)
    return (first, _unescape(m.group(2)))


def parse_structured(content: str, position: int) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """Parse the text between a structured reference's outer brackets.

    Returns (columns, specials).
    """
    content = content.strip()
    if not content:
        return (), ()
    if content.startswith("@"):
        rest = content[1:].strip()
        if not rest:
            return (), ("this-row",)
        if rest.startswith("["):
            return _bracket_items(rest, position), ("this-row",)
        return (_unescape(rest),), ("this-row",)
    if content.startswith("#"):
        special = _SPECIALS.get(content.lower())
        if special is None:
            raise FormulaSyntaxError(f"unknown table region {content!r}", position)
        return (), (special,)
    if not content.startswith("["):
        return (_unescape(content),), ()
    columns: Tuple[str, ...] = ()
    specials: List[str] = []
    for item in _split_top(content):
        inner = item
        if inner.startswith("[") and inner.endswith("]") and inner[1:2] == "#":
            special = _SPECIALS.get(inner[1:-1].lower())
            if special is None:
                raise FormulaSyntaxError(f"unknown table region {inner!r}", position)
            specials.append(special)
        elif inner.startswith("[@") or inner == "@":
            specials.append("this-row")
            tail = inner[2:-1] if inner.startswith("[@") else ""
            if tail:
                columns = (_unescape(tail),)
        else:
            if columns:
                raise FormulaSyntaxError("more than one column selector", position)
            columns = _bracket_items(inner, position)
    return columns, tuple(specials)


def _read_quoted_sheet(text: str, pos: int) -> Tuple[str, int]:
    i = pos + 1
    buf = ""
    while i < len(text):
        if text[i] == "'":
            if text[i + 1 : i + 2] == "'":
                buf += "'"
                i += 2
                continue
            return buf, i + 1
        buf += text[i]
        i += 1
    raise FormulaSyntaxError("unterminated quoted sheet name", pos, frozenset({"'"}))


def _split_external(prefix: str) -> Tuple[Optional[str], str]:
    m = re.fullmatch(r"\[([^\]]+)\](.*)", prefix)
    if m:
        return m.group(1), m.group(2)
    return None, prefix


class Lexer:
    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Token] = []

    def run(self) -> List[Token]:
        text = self.text
        if not text.startswith("="):
            raise FormulaSyntaxError("formula must begin with '='", 0, frozenset({"="}))
        pos = 1
        raw: List[Tuple[Token, bool]] = []  # (token, preceded_by_whitespace)
        space = False
        while pos < len(text):
            m = WS_RE.match(text, pos)
            if m:
                space = True
                pos = m.end()
                continue
            token = self._next(pos)
            raw.append((token, space))
            space = False
            pos = token.end
        tokens: List[Token] = []
        for token, spaced in raw:
            if spaced and tokens and _ends_operand(tokens[-1]) and _starts_operand(token):
                tokens.append(Token(INTERSECT, " ", token.start - 1, token.start))
            tokens.append(token)
        tokens.append(Token(EOF, "", len(text), len(text)))
        return tokens

    def _next(self, pos: int) -> Token:
        text = self.text
        ch = text[pos]
        if ch == '"':
            return self._string(pos)
        if ch == "#":
            for code in ERROR_CODES:
                if text.startswith(code, pos) or text[pos : pos + len(code)].upper() == code:
                    return Token(ERROR, code, pos, pos + len(code), value=code)
            raise UnknownTokenError(f"unknown error literal {text[pos:pos + 8]!r}", pos)
        if ch == "'":
            sheet, after = _read_quoted_sheet(text, pos)
            if text[after : after + 1] != "!":
                raise FormulaSyntaxError("quoted sheet name must be followed by '!'", after, frozenset({"!"}))
            external, sheet = _split_external(sheet)
            return self._qualified(pos, after + 1, sheet or None, external)
        if ch == "[":
            close = _matching_bracket(text, pos)
            m = re.compile(r"([A-Za-z0-9_.\\]*)!").match(text, close + 1)
            if m and "[" not in text[pos + 1 : close]:
                return self._qualified(pos, m.end(), m.group(1) or None, text[pos + 1 : close])
            columns, specials = parse_structured(text[pos + 1 : close], pos)
            return Token(STRUCT, text[pos : close + 1], pos, close + 1, value=(None, columns, specials))
        if ch.isdigit() or (ch == "." and text[pos + 1 : pos + 2].isdigit()):
            m = ROWRANGE_RE.match(text, pos)
            if m:
                return self._row_range(m, pos, None, None)
            m = NUMBER_RE.match(text, pos)
            lexeme = m.group(0)
            if re.fullmatch(r"[0-9]+", lexeme):
                value: object = int(lexeme)
            else:
                value = float(lexeme)
            return Token(NUMBER, lexeme, pos, m.end(), value=value)
        if ch.isalpha() or ch in "_\\$":
            m = SHEET_RE.match(text, pos)
            if m:
                return self._qualified(pos, m.end(), m.group(1), None)
            ref = self._reference(pos, pos, None, None)
            if ref is not None:
                return ref
            m = BOOL_RE.match(text, pos)
            if m:
                return Token(BOOL, m.group(0), pos, m.end(), value=m.group(1).upper() == "TRUE")
            m = IDENT_RE.match(text, pos)
            if m:
                ident = m.group(0)
                nxt = text[m.end() : m.end() + 1]
                if nxt == "(":
                    return Token(FUNC, ident, pos, m.end(), value=ident)
                if nxt == "[":
                    close = _matching_bracket(text, m.end())
                    columns, specials = parse_structured(text[m.end() + 1 : close], m.end())
                    return Token(STRUCT, text[pos : close + 1], pos, close + 1, value=(ident, columns, specials))
                return Token(NAME, ident, pos, m.end(), value=ident)
        for op in _OPERATORS:
            if text.startswith(op, pos):
                return Token(OP, op, pos, pos + len(op))
        if ch in _SINGLE:
            return Token(_SINGLE[ch], ch, pos, pos + 1)
        raise UnknownTokenError(f"unexpected character {ch!r}", pos)

    def _string(self, pos: int) -> Token:
        text = self.text
        i = pos + 1
        buf = []
        while i < len(text):
            if text[i] == '"':
                if text[i + 1 : i + 2] == '"':
                    buf.append('"')
                    i += 2
                    continue
                return Token(STRING, text[pos : i + 1], pos, i + 1, value="".join(buf))
            buf.append(text[i])
            i += 1
        raise FormulaSyntaxError("unterminated string literal", pos, frozenset({'"'}))

    def _qualified(self, start: int, pos: int, sheet: Optional[str], external: Optional[str]) -> Token:
        text = self.text
        if text.startswith("#REF!", pos):
            return Token(ERROR, "#REF!", start, pos + 5, value="#REF!")
        ref = self._reference(start, pos, sheet, external)
        if ref is not None:
            return ref
        m = ROWRANGE_RE.match(text, pos)
        if m:
            return self._row_range(m, start, sheet, external)
        m = IDENT_RE.match(text, pos)
        if m and text[m.end() : m.end() + 1] != "(":
            return Token(NAME, text[start : m.end()], start, m.end(), value=m.group(0), sheet=sheet, external=external)
        raise FormulaSyntaxError("expected a reference after sheet qualifier", pos, frozenset({"reference"}))

    def _reference(self, start: int, pos: int, sheet, external) -> Optional[Token]:
        text = self.text
        m = RANGE_RE.match(text, pos)
        if m and _valid_cell(m.group(2), m.group(4)) and _valid_cell(m.group(6), m.group(8)):
            value = (
                "range",
                int(m.group(4)),
                letters_to_col(m.group(2)),
                int(m.group(8)),
                letters_to_col(m.group(6)),
                (bool(m.group(3)), bool(m.group(1)), bool(m.group(7)), bool(m.group(5))),
            )
            return Token(REF, text[start : m.end()], start, m.end(), value=value, sheet=sheet, external=external)
        m = CELL_RE.match(text, pos)
        if m and _valid_cell(m.group(2), m.group(4)):
            value = ("cell", int(m.group(4)), letters_to_col(m.group(2)), bool(m.group(3)), bool(m.group(1)))
            return Token(REF, text[start : m.end()], start, m.end(), value=value, sheet=sheet, external=external)
        m = COLRANGE_RE.match(text, pos)
        if m and letters_to_col(m.group(2)) <= MAX_COL and letters_to_col(m.group(4)) <= MAX_COL:
            value = (
                "range",
                None,
                letters_to_col(m.group(2)),
                None,
                letters_to_col(m.group(4)),
                (False, bool(m.group(1)), False, bool(m.group(3))),
            )
            return Token(REF, text[start : m.end()], start, m.end(), value=value, sheet=sheet, external=external)
        return None

    def _row_range(self, m, start, sheet, external) -> Token:
        value = (
            "range",
            int(m.group(2)),
            None,
            int(m.group(4)),
            None,
            (bool(m.group(1)), False, bool(m.group(3)), False),
        )
        return Token(REF, self.text[start : m.end()], start, m.end(), value=value, sheet=sheet, external=external)


def _ends_operand(token: Token) -> bool:
    return token.kind in (REF, NAME, STRUCT, RPAREN)


def _starts_operand(token: Token) -> bool:
    return token.kind in (REF, NAME, STRUCT, FUNC, LPAREN)


def tokenize(text: str) -> List[Token]:
    return Lexer(text).run()


def leaf_token_count(text: str) -> int:
    """Number of literal and reference tokens; an array constant counts once."""
    count = 0
    depth = 0
    for token in tokenize(text):
        if token.kind == LBRACE:
            depth += 1
            count += 1
        elif token.kind == RBRACE:
            depth -= 1
        elif depth == 0 and token.kind in LEAF_KINDS:
            count += 1
    return count
