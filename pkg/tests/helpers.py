"""In-memory workbook construction for tests that do not need an XLSX file."""

from __future__ import annotations

import datetime as dt
import json
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Tuple

from xltransparency.workbook import (
    AreaRef,
    CellAddress,
    CellRecord,
    DefinedName,
    ErrorValue,
    LoadOptions,
    SheetModel,
    TableModel,
    WorkbookModel,
)

FIXTURES = Path(__file__).resolve().parent / "fixtures"
ERROR_CODES = {"#DIV/0!", "#N/A", "#REF!", "#NAME?", "#VALUE!", "#NUM!"}


def addr(text: str, sheet: str = "Sheet1") -> CellAddress:
    return CellAddress.parse(text, sheet)


def area(text: str, sheet: str = "Sheet1") -> AreaRef:
    if "!" in text:
        sheet, text = text.rsplit("!", 1)
    if ":" not in text:
        return AreaRef.cell(CellAddress.parse(text, sheet))
    a, b = text.split(":")
    tl, br = CellAddress.parse(a, sheet), CellAddress.parse(b, sheet)
    return AreaRef.from_bounds(sheet, tl.row, tl.col, br.row, br.col)


def record(address: CellAddress, entry) -> CellRecord:
    """``entry`` is a value, a formula string, or a dict of CellRecord fields.

    A formula dict may carry ``value`` as its cached result.
    """
    if isinstance(entry, dict):
        fields = dict(entry)
        if isinstance(fields.get("value"), str) and fields["value"] in ERROR_CODES:
            fields["value"] = ErrorValue(fields["value"])
        if "validation_list" in fields and fields["validation_list"] is not None:
            fields["validation_list"] = tuple(fields["validation_list"])
        return CellRecord(address, **fields)
    if isinstance(entry, str) and entry.startswith("="):
        return CellRecord(address, formula=entry)
    if isinstance(entry, str) and entry in ERROR_CODES:
        return CellRecord(address, ErrorValue(entry))
    if isinstance(entry, (dt.datetime, dt.date)):
        return CellRecord(address, entry, number_format="mm/dd/yyyy")
    return CellRecord(address, entry)


def build_wb(
    cells: Mapping[str, object],
    sheets: Iterable[str] = ("Sheet1",),
    names: Mapping[str, str] = (),
    tables: Iterable[Tuple[str, str, Optional[Tuple[str, ...]]]] = (),
    frozen: Mapping[str, Tuple[int, int]] = (),
    hidden_rows: Mapping[str, Iterable[int]] = (),
    hidden_cols: Mapping[str, Iterable[int]] = (),
    states: Mapping[str, str] = (),
    protected: Iterable[str] = (),
    options: Optional[LoadOptions] = None,
) -> WorkbookModel:
    """Build a WorkbookModel from ``{"Sheet!A1": entry}`` (sheet defaults to the first).

    ``names`` maps a name to ``"Sheet!A1:B2"`` or a constant such as ``"=12"``.
    ``tables`` holds ``(name, "Sheet!A1:C4", uom_row_or_None)``; headers are
    read from the first row of the area.
    """
    sheets = list(sheets)
    names = dict(names)
    frozen, hidden_rows, hidden_cols, states = dict(frozen), dict(hidden_rows), dict(hidden_cols), dict(states)
    protected = set(protected)
    records: Dict[CellAddress, CellRecord] = {}
    for key, entry in cells.items():
        a = CellAddress.parse(key, sheets[0])
        if a.sheet not in sheets:
            sheets.append(a.sheet)
        records[a] = record(a, entry)
    sheet_models = []
    for index, name in enumerate(sheets):
        occupied = [a for a, r in records.items() if a.sheet == name and r.occupied]
        fr, fc = frozen.get(name, (0, 0))
        sheet_models.append(
            SheetModel(
                name,
                index,
                state=states.get(name, "visible"),
                protected=name in protected,
                frozen_rows=fr,
                frozen_cols=fc,
                hidden_rows=frozenset(hidden_rows.get(name, ())),
                hidden_cols=frozenset(hidden_cols.get(name, ())),
                max_row=max((a.row for a in occupied), default=0),
                max_col=max((a.col for a in occupied), default=0),
            )
        )
    defined = []
    for name, target in names.items():
        if target.startswith("="):
            defined.append(DefinedName(name, target, text=target))
        else:
            defined.append(DefinedName(name, (area(target, sheets[0]),), text=target))
    table_models = []
    for name, ref, uom in tables:
        a = area(ref, sheets[0])
        headers = tuple(
            str(records[CellAddress(a.sheet, a.top_left.row, c)].value)
            for c in range(a.top_left.col, a.bottom_right.col + 1)
        )
        table_models.append(TableModel(name, a, headers, uom_row=uom))
    return WorkbookModel(
        tuple(sheet_models),
        records,
        tuple(defined),
        tuple(table_models),
        options=options or LoadOptions(),
    )


FAR_ROW = 300


def eviction_book(spots, unit_in_comment, move=None):
    """One formula in B1 summing named inputs; each input carries its own labels.

    ``spots[i]`` is the row of input i; ``move`` relocates one input far away.
    """
    cells = {"A1": "Total Cost", "C1": "USD"}
    names = {}
    terms = []
    for i, row in enumerate(spots):
        if i == move:
            row = FAR_ROW + i
        name = f"Input_{i}"
        cells[f"A{row}"] = f"Cost Item {i}"
        if unit_in_comment[i]:
            cells[f"B{row}"] = {"value": 10 + i, "comment": "USD"}
        else:
            cells[f"B{row}"] = 10 + i
            cells[f"C{row}"] = "USD"
        names[name] = f"Sheet1!B{row}"
        terms.append(name)
    cells["B1"] = "=" + "+".join(terms)
    return build_wb(cells, names=names)


def eviction_cases():
    """Hypothesis strategy of ``(spots, unit_in_comment, move)`` for eviction_book."""
    from hypothesis import strategies as st

    return st.integers(1, 4).flatmap(
        lambda n: st.tuples(
            st.lists(st.integers(2, 35), min_size=n, max_size=n, unique=True),
            st.lists(st.booleans(), min_size=n, max_size=n),
            st.integers(0, n - 1),
        )
    )


def eviction_delta(case) -> Tuple[int, int]:
    """Score change of B1 when one input moves out of view, and the change
    predicted by one navigation step plus the moved input's label-step delta."""
    from xltransparency.scorer import Scorer

    spots, unit_in_comment, move = case
    before = Scorer(eviction_book(spots, unit_in_comment))
    after = Scorer(eviction_book(spots, unit_in_comment, move))
    host = CellAddress("Sheet1", 1, 2)
    label_delta = (
        after.surface_score(CellAddress("Sheet1", FAR_ROW + move, 2)).value
        - before.surface_score(CellAddress("Sheet1", spots[move], 2)).value
    )
    diff = after.cell_score(host).total.value - before.cell_score(host).total.value
    return diff, -1 + label_delta


def ledger(name: str) -> dict:
    return json.loads((FIXTURES / f"{name}.ledger.json").read_text(encoding="utf-8"))


def score_json(score) -> object:
    return score.to_json()
