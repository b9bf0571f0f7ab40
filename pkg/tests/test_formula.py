from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import FIXTURES
from xltransparency.formula import (
    BinaryOp,
    CellRef,
    FormulaSyntaxError,
    FuncCall,
    Literal,
    NamedRef,
    Paren,
    PercentOp,
    RangeRef,
    StructuredRef,
    UnaryOp,
    indirect_uses,
    leaf_token_count,
    operands,
    parse_formula,
    serialize,
    walk,
)
from xltransparency.formula.ast import LEAF_NODES
from xltransparency.formula.operands import (
    LITERAL_RANGE,
    SINGLE_CELL_OFFSET,
    TABLE_ARGUMENT,
)

# every formula string printed in the worked examples
WORKED_EXAMPLE_FORMULAS = [
    "=A11 * 12",
    "=VLOOKUP([@Label],INDIRECT(OFFSET([#Headers],1,1, 1, 1)),2,FALSE)",
    "=VLOOKUP(A1,A3:B5,2,FALSE)",
    "=PMT(Rate/MPP, Periods, Loan_Amount)",
    "=[@EBIT]+[@Tax]",
]

SYNTHETIC = (FIXTURES / "formulas_synthetic.txt").read_text(encoding="utf-8").splitlines()

NODE_KINDS = {Literal, CellRef, RangeRef, NamedRef, StructuredRef, FuncCall, BinaryOp, UnaryOp, PercentOp, Paren}


def test_vlookup_grid_formula_shape():
    ast = parse_formula("=VLOOKUP(A1,A3:B5,2,FALSE)")
    assert isinstance(ast, FuncCall) and ast.name == "VLOOKUP"
    a1, rng, two, false = ast.args
    assert a1 == CellRef(1, 1)
    assert rng == RangeRef(3, 1, 5, 2)
    assert two == Literal(2, "number")
    assert false == Literal(False, "boolean")


def test_structured_sum_shape():
    ast = parse_formula("=[@EBIT]+[@Tax]")
    assert isinstance(ast, BinaryOp) and ast.op == "+"
    assert ast.left == StructuredRef(None, ("EBIT",), ("this-row",))
    assert ast.right == StructuredRef(None, ("Tax",), ("this-row",))
    assert ast.left.region == "this-row"


def test_pmt_shape():
    ast = parse_formula("=PMT(Rate/MPP, Periods, Loan_Amount)")
    assert ast.name == "PMT"
    assert ast.args[0] == BinaryOp("/", NamedRef("Rate"), NamedRef("MPP"))
    assert ast.args[1:] == (NamedRef("Periods"), NamedRef("Loan_Amount"))


def test_bare_literal_shape():
    assert parse_formula("=A11 * 12") == BinaryOp("*", CellRef(11, 1), Literal(12, "number"))


def test_precedence():
    ast = parse_formula("=1+2*3^2%")
    # exponent binds tighter than multiply; percent tighter than exponent
    assert ast == BinaryOp(
        "+",
        Literal(1, "number"),
        BinaryOp("*", Literal(2, "number"), BinaryOp("^", Literal(3, "number"), PercentOp(Literal(2, "number")))),
    )
    assert parse_formula("=-A1^2") == BinaryOp("^", UnaryOp("-", CellRef(1, 1)), Literal(2, "number"))
    assert parse_formula('="a"&1=2').op == "="
    assert parse_formula("=A1:B2 B2:C3").op == " "


def test_function_names_uppercase_and_prefix_stripped():
    assert parse_formula("=sum(a1)").name == "SUM"
    assert parse_formula("=_xlfn.XLOOKUP(A1,B:B,C:C)").name == "XLOOKUP"


def test_operands_for_vlookup_grid():
    ops = operands(parse_formula("=VLOOKUP(A1,A3:B5,2,FALSE)"))
    assert len(ops) == 4
    assert [o.kind for o in ops] == ["cell-area", "cell-area", "literal", "literal"]
    assert ops[2].function_context == ("VLOOKUP", 2)
    assert ops[3].function_context == ("VLOOKUP", 3)


def test_operand_of_trivial_and_bare_literal():
    (one,) = operands(parse_formula("=1"))
    assert one.kind == "literal" and one.function_context is None
    ops = operands(parse_formula("=A11 * 12"))
    assert ops[1].node == Literal(12, "number") and ops[1].function_context is None
    assert ops[1].span == (7, 9)


def test_parenthesized_argument_keeps_context():
    ops = operands(parse_formula("=ROUND((A1),(2))"))
    assert ops[1].function_context == ("ROUND", 1)


def test_nested_expression_records_innermost_call():
    ops = operands(parse_formula("=PMT(Rate/MPP, Periods, Loan_Amount)"))
    assert [o.kind for o in ops] == ["named", "named", "named", "named"]
    # Rate sits inside Rate/MPP, not directly in an argument slot
    assert ops[0].function_context is None
    assert ops[0].enclosing_functions == ("PMT",)
    assert ops[2].function_context == ("PMT", 1)


def test_indirect_uses():
    assert indirect_uses(parse_formula("=SUM(A1:A3)")) == []
    (use,) = indirect_uses(parse_formula("=VLOOKUP(A1,A3:B5,2,FALSE)"))
    assert use.function_name == "VLOOKUP" and use.evidence == frozenset({LITERAL_RANGE})
    uses = indirect_uses(parse_formula(WORKED_EXAMPLE_FORMULAS[1]))
    assert sorted(u.function_name for u in uses) == ["INDIRECT", "OFFSET", "VLOOKUP"]
    offset = next(u for u in uses if u.function_name == "OFFSET")
    assert offset.evidence == frozenset({TABLE_ARGUMENT, SINGLE_CELL_OFFSET})


@pytest.mark.parametrize(
    "text",
    ["", "=", "=1+", "=SUM(1", "=(1", "=1)", "={1,", "=A1 +* 2", "=@@"],
)
def test_syntax_errors_carry_position(text):
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula(text)
    assert info.value.position >= 0


def _roundtrips(text: str) -> bool:
    ast = parse_formula(text)
    again = parse_formula(serialize(ast))
    return again == ast and serialize(again) == serialize(ast)


@pytest.mark.parametrize("text", WORKED_EXAMPLE_FORMULAS)
def test_worked_example_formulas_parse_and_roundtrip(text):
    assert _roundtrips(text)


def test_synthetic_corpus_parses_and_roundtrips():
    assert len(SYNTHETIC) == 200
    failures = [t for t in SYNTHETIC if not _roundtrips(t)]
    assert failures == []


def test_synthetic_corpus_covers_every_node_kind():
    seen = set()
    for text in SYNTHETIC:
        seen.update(type(n) for n in walk(parse_formula(text)))
    assert NODE_KINDS <= seen
    literal_kinds = {n.kind for t in SYNTHETIC for n in walk(parse_formula(t)) if isinstance(n, Literal)}
    assert {"number", "text", "boolean", "error", "array", "missing"} <= literal_kinds


@pytest.mark.parametrize("text", WORKED_EXAMPLE_FORMULAS + SYNTHETIC[:60])
def test_leaf_completeness(text):
    ast = parse_formula(text)
    leaves = [n for n in walk(ast) if isinstance(n, LEAF_NODES) and not (isinstance(n, Literal) and n.kind == "missing")]
    ops = [o for o in operands(ast) if not (isinstance(o.node, Literal) and o.node.kind == "missing")]
    assert len(ops) == len(leaves) == leaf_token_count(text)


# -- generated ASTs ----------------------------------------------------------------

_names = st.sampled_from(["Rate", "Loan_Amount", "tax.rate", "MPP", "x1y"])
_sheets = st.sampled_from([None, "Sheet2", "My Sheet", "It's", "2017"])
_cols = st.sampled_from(["EBIT", "Tax", "Net Income", "Unit Price", "a[b]"])


@st.composite
def _cell(draw):
    return CellRef(
        draw(st.integers(1, 1048576)),
        draw(st.integers(1, 16384)),
        sheet=draw(_sheets),
        row_abs=draw(st.booleans()),
        col_abs=draw(st.booleans()),
    )


@st.composite
def _range(draw):
    r1, r2 = sorted(draw(st.tuples(st.integers(1, 5000), st.integers(1, 5000))))
    c1, c2 = sorted(draw(st.tuples(st.integers(1, 200), st.integers(1, 200))))
    return RangeRef(r1, c1, r2, c2, sheet=draw(_sheets))


@st.composite
def _structured(draw):
    table = draw(st.sampled_from([None, "tblTax", "tblSales"]))
    cols = draw(st.sampled_from([(), ("EBIT",), ("Net Income",), ("EBIT", "Tax"), ("a[b]",)]))
    specials = draw(st.sampled_from([(), ("headers",), ("all",), ("totals",), ("headers", "data")]))
    if table is None and not specials and len(cols) == 1:
        specials = ("this-row",)
    return StructuredRef(table, cols, specials)


_literals = st.one_of(
    st.integers(0, 10**9).map(lambda n: Literal(n, "number")),
    st.text(st.characters(blacklist_categories=("Cs", "Cc")), max_size=8).map(lambda s: Literal(s, "text")),
    st.booleans().map(lambda b: Literal(b, "boolean")),
    st.sampled_from(["#N/A", "#DIV/0!", "#REF!"]).map(lambda e: Literal(e, "error")),
)
_leaves = st.one_of(_literals, _cell(), _range(), _names.map(NamedRef), _structured())


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from(["+", "-", "*", "/", "^", "&", "=", "<>", "<="]), children, children).map(
            lambda t: BinaryOp(t[0], Paren(t[1]), Paren(t[2]))
        ),
        children.map(lambda c: Paren(c)),
        children.map(lambda c: UnaryOp("-", Paren(c))),
        children.map(lambda c: PercentOp(Paren(c))),
        st.tuples(st.sampled_from(["SUM", "IF", "VLOOKUP", "INDEX"]), st.lists(children, min_size=1, max_size=4)).map(
            lambda t: FuncCall(t[0], tuple(t[1]))
        ),
    )


_asts = st.recursive(_leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(_asts)
def test_generated_ast_roundtrip(ast):
    text = serialize(ast)
    assert parse_formula(text) == ast
