from __future__ import annotations

import datetime as dt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import FIXTURES, build_wb
from xltransparency.labeling import (
    COMMENT,
    DOCUMENTATION_CELL,
    FORMAT,
    FUNCTION_HELP,
    QUESTION,
    REQUIRED_PARTS,
    SUBJECT,
    UNIT,
    VALIDATION_MESSAGE,
    VICINITY_CELL,
    ZERO_STEP_LOCATIONS,
    LabelPart,
    LabelResolution,
    Labeler,
    ValueType,
    VicinityConfig,
    cheapest_parts,
    classify_value_type,
    co_visible,
    is_label_cell,
    resolve_labels,
    sufficiency,
)
from xltransparency.workbook import AddressError, CellAddress, load_workbook, occupied_cells


def A(text):
    return CellAddress.parse(text)


def load(name):
    return load_workbook(FIXTURES / name)


# -- classification ---------------------------------------------------------------


def test_classify_examples():
    wb = build_wb(
        {
            "A1": "Model Start",
            "B1": {"value": dt.datetime(2017, 1, 1), "number_format": "mm/dd/yyyy"},
            "A2": "Done?",
            "B2": False,
            "A3": "Initial Investment",
            "B3": 100000,
            "B4": "#DIV/0!",
        }
    )
    assert classify_value_type(wb, A("Sheet1!B1")) is ValueType.DATE
    assert classify_value_type(wb, A("Sheet1!B2")) is ValueType.FLAG
    assert classify_value_type(wb, A("Sheet1!B3")) is ValueType.QUANTITY
    assert classify_value_type(wb, A("Sheet1!B4")) is ValueType.ERROR
    assert classify_value_type(wb, A("Sheet1!C9")) is ValueType.EMPTY
    assert classify_value_type(wb, A("Sheet1!A3")) is ValueType.LABEL


def test_classify_out_of_range():
    with pytest.raises(AddressError):
        classify_value_type(build_wb({"A1": 1}), CellAddress("Missing", 1, 1))


def test_identity_and_attribute_in_tables():
    wb = load("import.xlsx")
    assert classify_value_type(wb, A("Ledger!A3")) is ValueType.IDENTITY
    assert classify_value_type(wb, A("Ledger!B3")) is ValueType.ATTRIBUTE
    # the UOM row above the header labels the columns below it
    assert classify_value_type(wb, A("Ledger!D1")) is ValueType.LABEL


def test_is_label_cell_examples():
    wb = load("vlookup_grid.xlsx")
    assert is_label_cell(wb, A("Model!A1"))
    assert not is_label_cell(wb, A("Model!B1"))
    assert is_label_cell(load("import.xlsx"), A("Ledger!B2"))


@pytest.mark.parametrize("fixture", sorted(p.name for p in FIXTURES.glob("*.xlsx") if p.stem not in {"not_a_zip", "malformed"}))
def test_classification_is_total(fixture):
    wb = load(fixture)
    labeler = Labeler(wb)
    for a in occupied_cells(wb):
        vt = labeler.value_type(a)
        assert isinstance(vt, ValueType) and vt is not ValueType.EMPTY
        assert (vt is ValueType.ERROR) == wb.cell(a).is_error


# -- label resolution ----------------------------------------------------------


def test_inputs_row_is_fully_labeled_at_zero_steps():
    res = resolve_labels(load("inputs.xlsx"), A("Inputs!B2"))
    found = {(p.kind, p.text) for p in res.parts if p.location == VICINITY_CELL}
    assert found == {(SUBJECT, "Model Start"), (FORMAT, "mm/dd/yyyy")}
    assert all(p.steps == 0 for p in res.parts)
    assert res.missing == frozenset()


def test_lone_number_has_nothing():
    res = resolve_labels(build_wb({"C7": 42}), A("Sheet1!C7"))
    assert res.parts == ()
    assert res.missing == {SUBJECT, UNIT}


def test_unit_found_only_in_comment_costs_one_step():
    res = resolve_labels(load("label_channels.xlsx"), A("Inputs!B1"))
    (unit,) = [p for p in res.parts if p.kind == UNIT]
    assert (unit.location, unit.steps, unit.text) == (COMMENT, 1, "employees")
    steps, _ = cheapest_parts(ValueType.QUANTITY, res)
    assert steps == 1


def test_other_label_channels():
    wb = load("label_channels.xlsx")
    budget = resolve_labels(wb, A("Inputs!B2"))
    assert any(p.location == VALIDATION_MESSAGE and p.kind == UNIT for p in budget.parts)
    rate = resolve_labels(wb, A("Inputs!B3"))
    assert any(p.location == DOCUMENTATION_CELL and p.text == "APR" for p in rate.parts)
    # one comment revealing both parts is paid once
    weight = resolve_labels(wb, A("Inputs!B4"))
    assert cheapest_parts(ValueType.QUANTITY, weight)[0] == 1


def test_frozen_header_labels_a_distant_row():
    wb = load("freeze.xlsx")
    assert resolve_labels(wb, A("Frozen!B500")).missing == frozenset()
    assert resolve_labels(wb, A("Unfrozen!B500")).missing == {SUBJECT, UNIT}
    unfrozen = resolve_labels(wb, A("Unfrozen!B500"))
    assert {p.text for p in unfrozen.off_vicinity} >= {"Revenue", "USD"}


def test_currency_format_supplies_unit_unless_strict():
    wb = build_wb({"A1": "Price", "B1": {"value": 12.5, "number_format": '"$"#,##0.00'}})
    assert resolve_labels(wb, A("Sheet1!B1")).missing == frozenset()
    assert resolve_labels(wb, A("Sheet1!B1"), strict=True).missing == {UNIT}


@pytest.mark.parametrize("fixture", ["inputs.xlsx", "label_channels.xlsx", "import.xlsx", "scenarios.xlsx", "pmt_far.xlsx"])
def test_resolved_parts_respect_step_minimums(fixture):
    wb = load(fixture)
    labeler = Labeler(wb)
    for a in occupied_cells(wb):
        if labeler.is_label(a):
            continue
        res = labeler.resolve(a)
        for part in res.parts + res.off_vicinity:
            assert part.steps >= (0 if part.location in ZERO_STEP_LOCATIONS else 1)
        assert not (res.missing & res.kinds())


# -- sufficiency -------------------------------------------------------------------


def test_requirement_table():
    assert REQUIRED_PARTS[ValueType.QUANTITY] == {SUBJECT, UNIT}
    assert REQUIRED_PARTS[ValueType.DATE] == {SUBJECT, FORMAT}
    assert REQUIRED_PARTS[ValueType.FLAG] == {QUESTION}
    assert REQUIRED_PARTS[ValueType.IDENTITY] == {SUBJECT}
    assert REQUIRED_PARTS[ValueType.ATTRIBUTE] == {SUBJECT}


def test_sufficiency_examples():
    subject = LabelPart(SUBJECT, "Initial Investment", VICINITY_CELL)
    unit = LabelPart(UNIT, "USD", VICINITY_CELL)
    assert sufficiency(ValueType.QUANTITY, LabelResolution((subject, unit)))
    short = sufficiency(ValueType.QUANTITY, LabelResolution((subject,)))
    assert not short and short.missing == {UNIT}
    param_name = LabelPart(SUBJECT, "range_lookup", FUNCTION_HELP, steps=1)
    assert not sufficiency(ValueType.FLAG, LabelResolution((param_name,)))
    assert not sufficiency(ValueType.ERROR, LabelResolution())
    with pytest.raises(ValueError):
        sufficiency(ValueType.LABEL, LabelResolution())


_parts_pool = [
    LabelPart(SUBJECT, "s", VICINITY_CELL),
    LabelPart(UNIT, "u", COMMENT, steps=1),
    LabelPart(FORMAT, "f", VICINITY_CELL),
    LabelPart(QUESTION, "q?", VICINITY_CELL),
]


@given(
    st.sampled_from([vt for vt in ValueType if vt not in (ValueType.LABEL, ValueType.EMPTY, ValueType.ERROR)]),
    st.sets(st.sampled_from(range(len(_parts_pool)))),
)
def test_sufficiency_matches_requirement_table(vt, chosen):
    parts = tuple(_parts_pool[i] for i in sorted(chosen))
    verdict = sufficiency(vt, LabelResolution(parts))
    kinds = {p.kind for p in parts}
    assert bool(verdict) == (REQUIRED_PARTS[vt] <= kinds)
    assert verdict.missing == REQUIRED_PARTS[vt] - kinds


def test_label_part_invariants():
    with pytest.raises(ValueError):
        LabelPart(SUBJECT, "x", VICINITY_CELL, steps=1)
    with pytest.raises(ValueError):
        LabelPart(UNIT, "x", COMMENT, steps=0)
    with pytest.raises(ValueError):
        LabelPart("colour", "x", VICINITY_CELL)
    with pytest.raises(ValueError):
        LabelResolution((LabelPart(UNIT, "USD", VICINITY_CELL),), missing=frozenset({UNIT}))


def test_vicinity_config():
    assert VicinityConfig.parse("40x20") == VicinityConfig(40, 20)
    with pytest.raises(ValueError):
        VicinityConfig(0, 20)
    with pytest.raises(ValueError):
        VicinityConfig.parse("forty")


# -- co-visibility -------------------------------------------------------------------


def test_co_visible_examples():
    wb = load("freeze.xlsx")
    cfg = VicinityConfig()
    assert co_visible(wb, [A("Unfrozen!B500")], cfg)
    assert not co_visible(wb, [A("Unfrozen!B1"), A("Unfrozen!B101")], cfg)
    assert co_visible(wb, [A("Frozen!B1"), A("Frozen!B500")], cfg)
    assert not co_visible(wb, [A("Frozen!B1"), A("Frozen!B500")], VicinityConfig(honor_frozen_panes=False))
    assert not co_visible(wb, [A("Frozen!B1"), A("Unfrozen!B1")], cfg)


_PANES = [(0, 0), (1, 0), (0, 1), (3, 2)]
_PANE_BOOKS = {p: build_wb({"A1": 1}, frozen={"Sheet1": p}) for p in _PANES}

_cells = st.lists(
    st.builds(lambda r, c: CellAddress("Sheet1", r, c), st.integers(1, 120), st.integers(1, 60)),
    min_size=1,
    max_size=6,
)
_dims = st.integers(1, 80)


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from(_PANES), _cells, _dims, _dims, _dims, _dims, st.booleans())
def test_co_visible_is_monotone(panes, cells, rows, cols, more_rows, more_cols, honor):
    wb = _PANE_BOOKS[panes]
    small = VicinityConfig(rows, cols, honor)
    big = VicinityConfig(rows + more_rows, cols + more_cols, honor)
    if co_visible(wb, cells, small):
        assert co_visible(wb, cells, big)


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from(_PANES), _cells, _dims, _dims, st.data())
def test_co_visible_is_hereditary(panes, cells, rows, cols, data):
    wb = _PANE_BOOKS[panes]
    cfg = VicinityConfig(rows, cols)
    subset = data.draw(st.lists(st.sampled_from(cells), max_size=len(cells)))
    if co_visible(wb, cells, cfg):
        assert co_visible(wb, subset, cfg)
