"""The acceptance criteria, one test per criterion.

Each test prints its own PASS/FAIL line (visible with ``-s``); conftest.py
repeats them in the terminal summary of every run.
"""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import FIXTURES, build_wb, eviction_cases, eviction_delta, ledger
from xltransparency.catalog import Grade, default_catalog, parameter_grade
from xltransparency.cli import main
from xltransparency.formula import parse_formula, serialize
from xltransparency.labeling import VicinityConfig, co_visible
from xltransparency.score import OPAQUE, ZERO, Score, score_add
from xltransparency.scorer import Scorer
from xltransparency.workbook import CellAddress, load_workbook, occupied_cells

WORKED_EXAMPLE_FORMULAS = [
    "=A11 * 12",
    "=VLOOKUP([@Label],INDIRECT(OFFSET([#Headers],1,1, 1, 1)),2,FALSE)",
    "=VLOOKUP(A1,A3:B5,2,FALSE)",
    "=PMT(Rate/MPP, Periods, Loan_Amount)",
    "=[@EBIT]+[@Tax]",
]


def A(text):
    return CellAddress.parse(text)


def scorer(name):
    return Scorer(load_workbook(FIXTURES / f"{name}.xlsx"))


def verdict(number, title, checks):
    """Print the criterion line, then fail with the first failing check."""
    failures = [what for what, ok in checks if not ok]
    print(f"{'FAIL' if failures else 'PASS'} criterion {number}: {title}")
    assert not failures, failures


@pytest.mark.criterion(1, "VLOOKUP grid B1 scores -2 as inspect -1 plus range_lookup help -1")
def test_criterion_1_vlookup_grid():
    bd = scorer("vlookup_grid").cell_score(A("Model!B1"))
    counted = sorted((i.rule, i.steps) for i in bd.counted())
    help_items = [i for i in bd.counted() if i.rule == "help"]
    verdict(
        1,
        "VLOOKUP grid",
        [
            ("total is -2", bd.total == Score(-2)),
            ("items are inspect and help", counted == [("help", 1), ("inspect", 1)]),
            ("help item names range_lookup", len(help_items) == 1 and "range_lookup" in help_items[0].description),
        ],
    )


@pytest.mark.criterion(2, "PMT in view scores 0, out of view -4 as four name navigations")
def test_criterion_2_pmt_pair():
    near = scorer("pmt_near").cell_score(A("Loan!B1"))
    far = scorer("pmt_far").cell_score(A("Loan!B1"))
    delta = [i for i in far.counted() if i not in near.counted()]
    verdict(
        2,
        "PMT pair",
        [
            ("in view scores 0", near.total == ZERO),
            ("out of view scores -4", far.total == Score(-4)),
            ("delta is four navigations", sorted((i.rule, i.steps) for i in delta) == [("navigate", 1)] * 4),
            (
                "one navigation per name",
                sorted(i.description.rsplit(" ", 1)[1] for i in delta) == ["Loan_Amount", "MPP", "Periods", "Rate"],
            ),
        ],
    )


@pytest.mark.criterion(3, "structured-reference net income scores 0")
def test_criterion_3_structured():
    ms = scorer("structured").model_score()
    net = [bd for bd in ms.per_cell.values() if bd.formula == "=[@EBIT]+[@Tax]"]
    verdict(3, "structured reference", [("net income cells found", bool(net)), ("all score 0", all(bd.total == ZERO for bd in net))])


@pytest.mark.criterion(4, "bare literal, unhandled #DIV/0! and free INDIRECT are opaque; constrained lookup is finite")
def test_criterion_4_opaque_classification():
    constrained = scorer("scenarios")
    verdict(
        4,
        "opaque classification",
        [
            ("=A11 * 12 is opaque", scorer("literal").cell_score(A("Inputs!B11")).total == OPAQUE),
            ("unhandled #DIV/0! is opaque", scorer("errors").cell_score(A("Errors!B1")).total == OPAQUE),
            ("free INDIRECT is opaque", scorer("indirect_unconstrained").cell_score(A("Sheet1!B2")).total == OPAQUE),
            (
                "constrained VLOOKUP/INDIRECT/OFFSET is finite",
                all(not constrained.cell_score(A(c)).total.is_opaque for c in ("Model!B21", "Model!B22", "Model!B23")),
            ),
        ],
    )


@pytest.mark.criterion(5, "seed catalog reproduces the four stated parameter grades")
def test_criterion_5_catalog():
    cat = default_catalog()
    verdict(
        5,
        "catalog fidelity",
        [
            ("VLOOKUP col_index_num tooltip", parameter_grade(cat, "VLOOKUP", 2) is Grade.TOOLTIP),
            ("VLOOKUP range_lookup help", parameter_grade(cat, "VLOOKUP", 3) is Grade.HELP),
            ("PMT rate help", parameter_grade(cat, "PMT", 0) is Grade.HELP),
            ("PMT nper insufficient", parameter_grade(cat, "PMT", 1) is Grade.INSUFFICIENT),
        ],
    )


_BOOK = build_wb({"A1": 1}, frozen={"Sheet1": (2, 1)})
_cells = st.lists(
    st.builds(lambda r, c: CellAddress("Sheet1", r, c), st.integers(1, 150), st.integers(1, 60)), min_size=1, max_size=6
)


@pytest.mark.criterion(6, "absorption, co-visibility monotonicity and heredity, vicinity eviction")
def test_criterion_6_properties():
    absorption = all(
        score_add(OPAQUE, s) == OPAQUE and score_add(s, OPAQUE) == OPAQUE for s in [Score(-n) for n in range(51)] + [OPAQUE]
    )
    cases = {"monotone": 0, "hereditary": 0, "eviction": 0}

    @settings(max_examples=1000, deadline=None, database=None)
    @given(_cells, st.integers(1, 60), st.integers(1, 30), st.integers(0, 40), st.integers(0, 40), st.booleans())
    def monotone(cells, rows, cols, more_rows, more_cols, honor):
        cases["monotone"] += 1
        if co_visible(_BOOK, cells, VicinityConfig(rows, cols, honor)):
            assert co_visible(_BOOK, cells, VicinityConfig(rows + more_rows, cols + more_cols, honor))

    @settings(max_examples=1000, deadline=None, database=None)
    @given(_cells, st.integers(1, 60), st.integers(1, 30), st.data())
    def hereditary(cells, rows, cols, data):
        cases["hereditary"] += 1
        subset = data.draw(st.lists(st.sampled_from(cells), max_size=len(cells)))
        if co_visible(_BOOK, cells, VicinityConfig(rows, cols)):
            assert co_visible(_BOOK, subset, VicinityConfig(rows, cols))

    @settings(max_examples=100, deadline=None, database=None)
    @given(eviction_cases())
    def eviction(case):
        cases["eviction"] += 1
        diff, expected = eviction_delta(case)
        assert diff == expected

    results = []
    for name, check in (("monotone", monotone), ("hereditary", hereditary), ("eviction", eviction)):
        try:
            check()
            results.append((name, True))
        except AssertionError:
            results.append((name, False))
    verdict(
        6,
        "property suite",
        [("absorption over [-50, 0]", absorption)]
        + results
        + [("at least 1000 co-visibility cases each", cases["monotone"] >= 1000 and cases["hereditary"] >= 1000)],
    )


_SMALL = sorted(
    p.name[: -len(".ledger.json")]
    for p in FIXTURES.glob("*.ledger.json")
    if ledger(p.name[: -len(".ledger.json")])["occupied_cells"] <= 30
)


@pytest.mark.criterion(7, "model score equals the hand ledger on every fixture of at most 30 occupied cells")
def test_criterion_7_oracle_equivalence():
    checks = []
    for name in _SMALL:
        expected = ledger(name)
        wb = load_workbook(FIXTURES / f"{name}.xlsx")
        ms = Scorer(wb).model_score()
        nonzero = {str(a): bd.total.to_json() for a, bd in ms.per_cell.items() if bd.total != ZERO}
        checks.append((f"{name} occupied count", len(occupied_cells(wb)) == expected["occupied_cells"]))
        checks.append((f"{name} total", ms.total.to_json() == expected["model_total"]))
        checks.append((f"{name} per-cell", nonzero == expected["nonzero_cells"]))
    checks.append(("at least 15 ledgers", len(_SMALL) >= 15))
    verdict(7, "oracle equivalence", checks)


@pytest.mark.criterion(8, "parser accepts and round-trips every worked-example formula and the 200-formula corpus")
def test_criterion_8_parser_corpus():
    synthetic = (FIXTURES / "formulas_synthetic.txt").read_text(encoding="utf-8").splitlines()

    def stable(text):
        try:
            ast = parse_formula(text)
            return parse_formula(serialize(ast)) == ast
        except Exception:  # a parse failure is a criterion failure, reported below
            return False

    bad = [t for t in WORKED_EXAMPLE_FORMULAS + synthetic if not stable(t)]
    verdict(8, "parser corpus", [("200 synthetic formulas", len(synthetic) == 200), (f"round-trip failures {bad}", not bad)])


@pytest.mark.criterion(9, "two batch runs produce byte-identical structured reports")
def test_criterion_9_determinism(tmp_path, capsys):
    files = sorted(str(p) for p in FIXTURES.glob("*.xlsx"))
    outputs = []
    for run in ("first", "second"):
        out = tmp_path / f"{run}.json"
        main(["audit", *files, "--format", "structured", "--no-timing", "--out", str(out)])
        outputs.append(out.read_bytes())
    capsys.readouterr()
    verdict(9, "determinism", [("byte-identical", outputs[0] == outputs[1]), ("non-empty", len(outputs[0]) > 1000)])
