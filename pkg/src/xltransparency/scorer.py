"""Steps-from-transparency scoring for cells, calculation chains and models.

Every score is assembled from :class:`Item` records so a reader can replay each
counted step. Surface items cover unhiding a cell and reaching its labels.
Source items cover inspecting a formula's references and literals:

* ``inspect``: one shared click into the formula bar, charged once when the
  formula has an A1 reference or a literal argument of a function;
* ``navigate``: one jump per named reference, table area or worksheet area
  that does not fit on screen together with the formula cell;
* ``target-surface``: label steps of every referenced value cell;
* ``help``: one visit to function help per literal whose parameter name alone
  does not label it.

Opaque items carry the lint rule id that reports them.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple

import networkx as nx

from .catalog import FunctionCatalog, Grade, default_catalog
from .config import CHAIN_PER_PATH, AuditConfig, StepCosts
from .formula.ast import CellRef, FuncCall, Literal, NamedRef, Node, RangeRef, StructuredRef, UnaryOp, serialize
from .formula.operands import (
    CELL_AREA,
    LITERAL,
    LOOKUP_RANGE_ARGS,
    NAMED,
    STRUCTURED,
    IndirectUse,
    SourceOperand,
    indirect_uses,
    operands,
    unwrap,
)
from .formula.parser import parse_formula
from .formula.tokenizer import FormulaSyntaxError
from .labeling import (
    COMMENT,
    DOCUMENTATION_CELL,
    VALIDATION_MESSAGE,
    Labeler,
    LabelPart,
    Lexicons,
    ValueType,
    cheapest_parts,
    co_visible_areas,
)
from .references import AREA, NAME_CONSTANT, NAME_FORMULA, TABLE, Resolution, resolve_reference, resolve_text
from .score import OPAQUE, ZERO, Score, score_add, score_sum
from .workbook import (
    VERY_HIDDEN_SHEET,
    VISIBLE,
    AreaRef,
    CellAddress,
    WorkbookModel,
    occupied_cells,
    visibility,
)

SURFACE = "surface"
SOURCE = "source"

# lint rule ids attached to opaque items
L_LITERAL = "L1"
L_INDIRECT = "L2"
L_ERROR = "L3"
L_HIDDEN = "L4"
L_LABEL = "L6"
L_CYCLE = "L9"
L_UNRESOLVED = "L10"
L_OPAQUE_SOURCE = "L11"

# a large area is scanned through the occupied-cell index instead of cell by cell
_AREA_SCAN_LIMIT = 4096


@dataclass(frozen=True)
class Item:
    """One counted step (or the reason a level is opaque)."""

    level: str
    rule: str
    description: str
    steps: Optional[int] = 0  # None means opaque
    lint: Optional[str] = None
    span: Optional[Tuple[int, int]] = None
    target: Optional[str] = None

    @property
    def score(self) -> Score:
        return OPAQUE if self.steps is None else Score.steps(self.steps)

    @property
    def is_opaque(self) -> bool:
        return self.steps is None

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "rule": self.rule,
            "description": self.description,
            "steps": "opaque" if self.steps is None else self.steps,
            "lint": self.lint,
            "span": list(self.span) if self.span else None,
            "target": self.target,
        }


@dataclass(frozen=True)
class ScoreBreakdown:
    address: CellAddress
    value_type: ValueType
    surface: Score
    source: Score
    total: Score
    items: Tuple[Item, ...] = ()
    formula: Optional[str] = None

    @property
    def opaque_reason(self) -> Optional[str]:
        for item in self.items:
            if item.is_opaque:
                return item.description
        return None

    def counted(self) -> Tuple[Item, ...]:
        """Items that cost steps or make the cell opaque."""
        return tuple(i for i in self.items if i.steps != 0)


@dataclass(frozen=True)
class TableItem:
    table: str
    connection_kind: str
    steps: int
    definition: str = ""


@dataclass
class ModelScore:
    total: Score
    per_cell: "OrderedDict[CellAddress, ScoreBreakdown]"
    table_items: List[TableItem] = field(default_factory=list)
    opaque_cells: List[Tuple[CellAddress, str]] = field(default_factory=list)
    finite_subtotal: int = 0
    label_cells: int = 0
    cycles: List[Tuple[CellAddress, ...]] = field(default_factory=list)


@dataclass(frozen=True)
class _Ref:
    operand: SourceOperand
    resolution: Resolution
    handled: bool


@dataclass
class _Analysis:
    ast: Optional[Node] = None
    error: Optional[str] = None
    operands: List[SourceOperand] = field(default_factory=list)
    refs: List[_Ref] = field(default_factory=list)
    # areas reached through INDIRECT and OFFSET: (function name, resolution)
    computed: List[Tuple[str, Resolution]] = field(default_factory=list)
    unconstrained: List[Tuple[IndirectUse, str]] = field(default_factory=list)
    constrained: List[Tuple[IndirectUse, str]] = field(default_factory=list)


def _area_text(area: AreaRef) -> str:
    if area.top_left == area.bottom_right:
        return str(area.top_left)
    return str(area)


class Scorer:
    """Scores one workbook. Results are memoized; the workbook is read-only."""

    def __init__(
        self,
        wb: WorkbookModel,
        config: Optional[AuditConfig] = None,
        lexicons: Optional[Lexicons] = None,
        catalog: Optional[FunctionCatalog] = None,
    ):
        self.wb = wb
        self.config = config or AuditConfig()
        self.costs: StepCosts = self.config.costs
        self.labeler = Labeler(wb, self.config.vicinity, lexicons, self.config.strict_labels)
        base = catalog or default_catalog()
        self.catalog = base.with_unknown_grade(self.config.unknown_function_grade)
        self._analysis: Dict[CellAddress, _Analysis] = {}
        self._surface: Dict[CellAddress, Tuple[Score, Tuple[Item, ...]]] = {}
        self._cells: Dict[CellAddress, ScoreBreakdown] = {}
        self._dependents: Optional[Dict[CellAddress, List[Tuple[CellAddress, bool]]]] = None
        self._cycle_members: Optional[Dict[CellAddress, Tuple[CellAddress, ...]]] = None
        self._chain_memo: Dict[CellAddress, Score] = {}

    # -- helpers ---------------------------------------------------------------

    @property
    def vicinity(self):
        return self.config.vicinity

    def occupied_in(self, area: AreaRef) -> Iterator[CellAddress]:
        """Occupied cells of ``area`` in row-major order."""
        if area.height * area.width <= _AREA_SCAN_LIMIT:
            for addr in area.cells():
                rec = self.wb.cell(addr)
                if rec is not None and rec.occupied:
                    yield addr
            return
        found = [a for a, rec in self.wb.cells.items() if rec.occupied and a in area]
        yield from sorted(found, key=lambda a: (a.row, a.col))

    def _fits(self, host: CellAddress, areas: Iterable[AreaRef]) -> bool:
        return co_visible_areas(self.wb, [AreaRef.cell(host), *areas], self.vicinity)

    def is_label(self, addr: CellAddress) -> bool:
        return self.labeler.is_label(addr)

    # -- formula analysis ------------------------------------------------------

    def analysis(self, addr: CellAddress) -> _Analysis:
        found = self._analysis.get(addr)
        if found is None:
            found = self._analysis[addr] = self._analyze(addr)
        return found

    def _analyze(self, addr: CellAddress) -> _Analysis:
        rec = self.wb.cell(addr)
        out = _Analysis()
        if rec is None or rec.formula is None:
            return out
        try:
            ast = parse_formula(rec.formula)
        except FormulaSyntaxError as exc:
            out.error = f"formula does not parse: {exc}"
            return out
        out.ast = ast
        out.operands = operands(ast)
        for op in out.operands:
            if op.kind == LITERAL:
                continue
            handled = any(self.catalog.is_error_handling(f) for f in op.enclosing_functions)
            out.refs.append(_Ref(op, resolve_reference(self.wb, op.node, addr), handled))
        memo: Dict[FuncCall, Tuple[bool, str, List[Resolution]]] = {}
        for use in indirect_uses(ast):
            ok, reason, results = self._constrain(use.node, addr, memo)
            if ok:
                out.constrained.append((use, reason))
                for res in results:
                    out.computed.append((use.function_name, res))
            else:
                out.unconstrained.append((use, reason))
        return out

    def _constrain(
        self, call: FuncCall, host: CellAddress, memo: Dict[FuncCall, Tuple[bool, str, List[Resolution]]]
    ) -> Tuple[bool, str, List[Resolution]]:
        if call not in memo:
            memo[call] = self._constrain_uncached(call, host, memo)
        return memo[call]

    def _constrain_uncached(self, call, host, memo) -> Tuple[bool, str, List[Resolution]]:
        name, args = call.name, call.args
        if name == "OFFSET":
            return self._offset_target(call, host)
        if name == "INDIRECT":
            return self._indirect_targets(call, host, memo)
        for pos in LOOKUP_RANGE_ARGS[name]:
            if pos >= len(args):
                continue
            arg = unwrap(args[pos])
            if isinstance(arg, Literal) and arg.kind == "missing":
                continue
            if isinstance(arg, (CellRef, RangeRef, StructuredRef)):
                continue
            if isinstance(arg, NamedRef):
                res = resolve_reference(self.wb, arg, host)
                if res.is_opaque or res.kind not in (AREA, TABLE) or not res.areas:
                    return False, f"{name} range {arg.name} is not a fixed range", []
                continue
            if isinstance(arg, FuncCall) and arg.name in ("INDIRECT", "OFFSET"):
                ok, reason, _ = self._constrain(arg, host, memo)
                if not ok:
                    return False, f"{name} range comes from an unconstrained {arg.name}: {reason}", []
                continue
            return False, f"{name} range argument is computed", []
        return True, "lookup range is a fixed range", []

    def _offset_target(self, call: FuncCall, host: CellAddress) -> Tuple[bool, str, List[Resolution]]:
        args = call.args
        if len(args) < 3:
            return False, "OFFSET lacks row and column offsets", []
        base = unwrap(args[0])
        if not isinstance(base, (CellRef, RangeRef, StructuredRef, NamedRef)):
            return False, "OFFSET base is not a fixed range or table", []
        res = resolve_reference(self.wb, base, host)
        if res.is_opaque or not res.areas:
            return False, "OFFSET base does not resolve to an area", []

        def number(node: Node) -> Optional[int]:
            node = unwrap(node)
            sign = 1
            while isinstance(node, UnaryOp):
                sign = -sign if node.op == "-" else sign
                node = unwrap(node.operand)
            if isinstance(node, Literal) and node.kind == "number" and float(node.value).is_integer():
                return sign * int(node.value)
            return None

        rows, cols = number(args[1]), number(args[2])
        if rows is None or cols is None:
            return False, "OFFSET row or column offset is not a literal", []
        base_area = res.areas[0]
        height, width = base_area.height, base_area.width
        for index, default in ((3, height), (4, width)):
            if index < len(args) and not (isinstance(args[index], Literal) and args[index].kind == "missing"):
                value = number(args[index])
                if value is None or value < 1:
                    return False, "OFFSET height or width is not a positive literal", []
                if index == 3:
                    height = value
                else:
                    width = value
        top = base_area.top_left.row + rows
        left = base_area.top_left.col + cols
        if top < 1 or left < 1:
            return False, "OFFSET points above or left of the sheet", []
        area = AreaRef.from_bounds(base_area.sheet, top, left, top + height - 1, left + width - 1)
        return True, "OFFSET target is fixed by literal offsets", [Resolution((area,))]

    def _indirect_targets(self, call, host, memo) -> Tuple[bool, str, List[Resolution]]:
        if not call.args:
            return False, "INDIRECT has no argument", []
        arg = unwrap(call.args[0])
        if isinstance(arg, Literal) and arg.kind == "text":
            res = resolve_text(self.wb, arg.value, host)
            if res.is_opaque:
                return False, f"INDIRECT text {arg.value!r} does not resolve", []
            return True, "INDIRECT text is a literal reference", [res]
        if isinstance(arg, FuncCall) and arg.name == "OFFSET":
            ok, reason, found = self._constrain(arg, host, memo)
            if not ok:
                return False, reason, []
            inputs = [a for r in found for a in r.areas]
        elif isinstance(arg, (CellRef, RangeRef, NamedRef, StructuredRef)):
            res = resolve_reference(self.wb, arg, host)
            if res.is_opaque:
                return False, "INDIRECT input does not resolve", []
            inputs = list(res.areas)
        else:
            return False, "INDIRECT text is computed", []
        if len(inputs) != 1 or inputs[0].height * inputs[0].width != 1:
            return False, "INDIRECT input is not a single cell", []
        cell = inputs[0].top_left
        rec = self.wb.cell(cell)
        if rec is None or not rec.validation_list:
            return False, f"INDIRECT input {cell} is not restricted by a validation list", []
        results = []
        for choice in rec.validation_list:
            res = resolve_text(self.wb, choice, host)
            if res.is_opaque or not res.areas:
                return False, f"validation choice {choice!r} in {cell} does not resolve", []
            results.append(res)
        return True, f"INDIRECT input {cell} is restricted to {len(results)} validated choices", results

    # -- precedents and cycles --------------------------------------------------

    def precedents(self, addr: CellAddress) -> List[CellAddress]:
        """Occupied cells a formula draws on, in first-seen order."""
        an = self.analysis(addr)
        seen: "OrderedDict[CellAddress, None]" = OrderedDict()
        for ref in an.refs:
            for area in ref.resolution.areas:
                for cell in self.occupied_in(area):
                    seen.setdefault(cell)
        for _fn, res in an.computed:
            for area in res.areas:
                for cell in self.occupied_in(area):
                    seen.setdefault(cell)
        return list(seen)

    def _cycles(self) -> Dict[CellAddress, Tuple[CellAddress, ...]]:
        if self._cycle_members is None:
            graph = nx.DiGraph()
            for addr, rec in self.wb.cells.items():
                if rec.formula is None:
                    continue
                graph.add_node(addr)
                for p in self.precedents(addr):
                    graph.add_edge(addr, p)
            members: Dict[CellAddress, Tuple[CellAddress, ...]] = {}
            for comp in nx.strongly_connected_components(graph):
                if len(comp) > 1 or any(graph.has_edge(a, a) for a in comp):
                    ordered = tuple(sorted(comp, key=self._order_key))
                    for a in comp:
                        members[a] = ordered
            self._cycle_members = members
        return self._cycle_members

    def cycles(self) -> List[Tuple[CellAddress, ...]]:
        return sorted(set(self._cycles().values()), key=lambda c: self._order_key(c[0]))

    def _order_key(self, addr: CellAddress):
        index = {s.name: s.index for s in self.wb.sheets}.get(addr.sheet, 0)
        return (index, addr.row, addr.col)

    # -- errors ----------------------------------------------------------------

    def _dependent_index(self) -> Dict[CellAddress, List[Tuple[CellAddress, bool]]]:
        if self._dependents is None:
            index: Dict[CellAddress, List[Tuple[CellAddress, bool]]] = {}
            for addr, rec in self.wb.cells.items():
                if rec.formula is None:
                    continue
                for ref in self.analysis(addr).refs:
                    for area in ref.resolution.areas:
                        for cell in self.occupied_in(area):
                            index.setdefault(cell, []).append((addr, ref.handled))
            self._dependents = index
        return self._dependents

    def dependents(self, addr: CellAddress) -> List[CellAddress]:
        """Formula cells that reference ``addr``, in workbook order, without repeats."""
        found = dict.fromkeys(dep for dep, _ in self._dependent_index().get(addr, ()))
        return sorted(found, key=self._order_key)

    def result_cells(self) -> List[CellAddress]:
        """Formula cells no other formula refers to: the ends of calculation chains."""
        index = self._dependent_index()
        return sorted(
            (a for a, rec in self.wb.cells.items() if rec.formula is not None and not index.get(a)),
            key=self._order_key,
        )

    def downstream_error_handled(self, addr: CellAddress) -> bool:
        """True iff ``addr`` has dependents and every reference to it passes
        through an error-handling function."""
        uses = self._dependent_index().get(addr, [])
        return bool(uses) and all(handled for _dep, handled in uses)

    # -- surface level ---------------------------------------------------------

    def _label_cost(self, part: LabelPart) -> int:
        if part.location == COMMENT:
            return self.costs.comment
        if part.location == VALIDATION_MESSAGE:
            return self.costs.validation
        if part.location == DOCUMENTATION_CELL:
            return self.costs.documentation
        return part.steps

    def surface(self, addr: CellAddress) -> Tuple[Score, Tuple[Item, ...]]:
        found = self._surface.get(addr)
        if found is None:
            found = self._surface[addr] = self._surface_uncached(addr)
        return found

    def _surface_uncached(self, addr: CellAddress) -> Tuple[Score, Tuple[Item, ...]]:
        items: List[Item] = []
        rec = self.wb.cell(addr)
        if rec is None or not rec.occupied:
            return ZERO, ()
        vis = visibility(self.wb, addr)
        if vis.state == VERY_HIDDEN_SHEET:
            items.append(Item(SURFACE, "hidden", f"cell is on very hidden sheet {addr.sheet}", None, L_HIDDEN))
        elif vis.state != VISIBLE:
            if vis.protected and not vis.password_disclosed:
                items.append(
                    Item(SURFACE, "hidden", f"cell is {vis.state} under protection without a disclosed password", None, L_HIDDEN)
                )
            else:
                items.append(Item(SURFACE, "unhide", f"unhide ({vis.state})", self.costs.unhide))
        vt = self.labeler.value_type(addr)
        if vt is ValueType.LABEL:
            pass
        elif vt is ValueType.ERROR:
            if self.downstream_error_handled(addr):
                items.append(Item(SURFACE, "error-handled", f"error {rec.value} is handled by every dependent", 0))
            else:
                items.append(Item(SURFACE, "error", f"cell shows error {rec.value}", None, L_ERROR))
        else:
            res = self.labeler.resolve(addr)
            choice = cheapest_parts(vt, res, self._label_cost)
            if choice is None:
                missing = ", ".join(sorted(res.missing)) or "label"
                items.append(Item(SURFACE, "label-missing", f"{vt.value} lacks {missing}", None, L_LABEL))
            else:
                charged: Set[Tuple[str, Optional[CellAddress]]] = set()
                for part in choice[1]:
                    cost = 0 if part.source_key in charged else self._label_cost(part)
                    charged.add(part.source_key)
                    where = part.location + (f" {part.address}" if part.address else "")
                    items.append(Item(SURFACE, "label", f"{part.kind} {part.text!r} from {where}", cost, target=None))
        return score_sum(i.score for i in items), tuple(items)

    def surface_score(self, addr: CellAddress) -> Score:
        return self.surface(addr)[0]

    # -- source level ----------------------------------------------------------

    def source(self, addr: CellAddress) -> Tuple[Score, Tuple[Item, ...]]:
        rec = self.wb.cell(addr)
        if rec is None or rec.formula is None:
            return ZERO, ()
        items: List[Item] = []
        an = self.analysis(addr)
        if an.error is not None:
            items.append(Item(SOURCE, "unparseable", an.error, None, L_UNRESOLVED))
            return OPAQUE, tuple(items)
        cycle = self._cycles().get(addr)
        if cycle is not None:
            members = ", ".join(str(c) for c in cycle)
            items.append(Item(SOURCE, "cycle", f"circular reference through {members}", None, L_CYCLE))

        # R1: one click into the formula bar reveals A1 references and tooltips
        needs_click = any(
            op.kind == CELL_AREA or (op.kind == LITERAL and op.function_context is not None) for op in an.operands
        )
        if needs_click:
            items.append(Item(SOURCE, "inspect", "click into the formula bar", self.costs.inspect))

        # R5, R6 and literal errors
        literals_only = all(op.kind == LITERAL for op in an.operands) and bool(an.operands)
        named_host = self._name_covers(addr)
        for op in an.operands:
            if op.kind != LITERAL:
                continue
            node: Literal = op.node
            text = serialize(node, leading_equals=False)
            if node.kind == "error":
                handled = any(self.catalog.is_error_handling(f) for f in op.enclosing_functions)
                if not handled:
                    items.append(Item(SOURCE, "error-source", f"literal error {text}", None, L_ERROR, op.span))
                continue
            if op.function_context is None:
                if literals_only and named_host is not None:
                    items.append(Item(SOURCE, "named-literal", f"literal {text} labeled by name {named_host}", 0, span=op.span))
                else:
                    items.append(Item(SOURCE, "bare-literal", f"literal {text} has no label", None, L_LITERAL, op.span))
                continue
            fn, index = op.function_context
            grade = self.catalog.parameter_grade(fn, index)
            pname = self.catalog.parameter_name(fn, index)
            if grade is Grade.TOOLTIP:
                items.append(Item(SOURCE, "tooltip", f"literal {text} labeled {fn} {pname} by the tooltip", 0, span=op.span))
            elif grade is Grade.HELP:
                items.append(Item(SOURCE, "help", f"literal {text} needs {fn} help for {pname}", self.costs.help, span=op.span))
            else:
                items.append(
                    Item(SOURCE, "literal-insufficient", f"literal {text}: {fn} {pname} does not label it", None, L_LITERAL, op.span)
                )

        # R8: indirect-reference functions
        for use, reason in an.unconstrained:
            items.append(Item(SOURCE, "indirect-unconstrained", f"{use.function_name}: {reason}", None, L_INDIRECT, use.span))
        for use, reason in an.constrained:
            items.append(Item(SOURCE, "indirect-constrained", f"{use.function_name}: {reason}", 0, span=use.span))

        # R2-R4: references, then the areas INDIRECT and OFFSET reach
        targets: "OrderedDict[CellAddress, bool]" = OrderedDict()  # cell -> error handled
        navigated: Set[object] = set()
        for ref in an.refs:
            res = ref.resolution
            op = ref.operand
            label = serialize(op.node, leading_equals=False)
            if res.is_opaque:
                items.append(Item(SOURCE, "unresolved", f"{label}: {res.opaque}", None, L_UNRESOLVED, op.span))
                continue
            if op.kind == NAMED and res.kind in (NAME_CONSTANT, NAME_FORMULA):
                key = ("name", res.name.name.lower())
                if key not in navigated:
                    navigated.add(key)
                    items.append(
                        Item(SOURCE, "navigate", f"open the definition of name {res.name.name}", self.costs.navigate, span=op.span)
                    )
            elif op.kind == NAMED:
                key = ("name", res.name.name.lower() if res.name else label.lower())
                if key not in navigated and not self._fits(addr, (*res.areas, *res.label_areas)):
                    navigated.add(key)
                    items.append(Item(SOURCE, "navigate", f"go to name {label}", self.costs.navigate, span=op.span))
            elif op.kind == STRUCTURED:
                for area in res.areas:
                    key = ("area", area)
                    if key not in navigated and not self._fits(addr, (area, *res.label_areas)):
                        navigated.add(key)
                        items.append(
                            Item(SOURCE, "navigate", f"go to {label} ({_area_text(area)})", self.costs.navigate, span=op.span)
                        )
            else:
                for area in res.areas:
                    key = ("area", area)
                    if key not in navigated and not self._fits(addr, (area,)):
                        navigated.add(key)
                        items.append(Item(SOURCE, "navigate", f"go to {_area_text(area)}", self.costs.navigate, span=op.span))
            for area in res.areas:
                for cell in self.occupied_in(area):
                    targets[cell] = targets.get(cell, True) and ref.handled
        for fn, res in an.computed:
            for area in res.areas:
                key = ("area", area)
                if key not in navigated and not self._fits(addr, (area, *res.label_areas)):
                    navigated.add(key)
                    items.append(Item(SOURCE, "navigate", f"go to {_area_text(area)} reached by {fn}", self.costs.navigate))
                for cell in self.occupied_in(area):
                    targets.setdefault(cell, False)

        for cell, handled in targets.items():
            if cell == addr:
                continue
            target_rec = self.wb.cell(cell)
            if target_rec is not None and target_rec.is_error:
                if handled:
                    continue
                items.append(
                    Item(SOURCE, "error-source", f"{cell} shows error {target_rec.value}", None, L_ERROR, target=str(cell))
                )
                continue
            score, _ = self.surface(cell)
            if score.is_opaque:
                items.append(Item(SOURCE, "opaque-source", f"{cell} is opaque at surface level", None, L_OPAQUE_SOURCE, target=str(cell)))
            elif score.value:
                items.append(Item(SOURCE, "target-surface", f"labels of {cell}", -score.value, target=str(cell)))
        return score_sum(i.score for i in items), tuple(items)

    def source_score(self, addr: CellAddress) -> Score:
        return self.source(addr)[0]

    def _name_covers(self, addr: CellAddress) -> Optional[str]:
        for dn in self.wb.defined_names:
            if dn.is_range and (dn.scope is None or dn.scope.lower() == addr.sheet.lower()):
                if any(addr in area for area in dn.refers_to):
                    return dn.name
        return None

    # -- cell, chain and model -------------------------------------------------

    def cell_score(self, addr: CellAddress) -> ScoreBreakdown:
        found = self._cells.get(addr)
        if found is None:
            found = self._cells[addr] = self._cell_uncached(addr)
        return found

    def _cell_uncached(self, addr: CellAddress) -> ScoreBreakdown:
        rec = self.wb.cell(addr)
        vt = self.labeler.value_type(addr)
        formula = rec.formula if rec is not None else None
        if vt in (ValueType.LABEL, ValueType.EMPTY) and formula is None:
            return ScoreBreakdown(addr, vt, ZERO, ZERO, ZERO, (), formula)
        surface, s_items = self.surface(addr)
        source, f_items = self.source(addr)
        return ScoreBreakdown(addr, vt, surface, source, score_add(surface, source), s_items + f_items, formula)

    def chain_members(self, addr: CellAddress) -> List[CellAddress]:
        """``addr`` plus its transitive precedents, each once, in visit order."""
        seen: "OrderedDict[CellAddress, None]" = OrderedDict()
        stack = [addr]
        while stack:
            cell = stack.pop()
            if cell in seen:
                continue
            seen[cell] = None
            stack.extend(reversed(self.precedents(cell)))
        return list(seen)

    def chain_score(self, addr: CellAddress, mode: Optional[str] = None) -> Score:
        mode = mode or self.config.chain_mode
        if mode == CHAIN_PER_PATH:
            return self._per_path(addr, set())
        return score_sum(self.cell_score(c).total for c in self.chain_members(addr) if not self._skip_in_chain(c))

    def _skip_in_chain(self, addr: CellAddress) -> bool:
        rec = self.wb.cell(addr)
        return rec is None or not rec.occupied or (self.is_label(addr) and rec.formula is None)

    def _per_path(self, addr: CellAddress, active: Set[CellAddress]) -> Score:
        """Recursion over every path; a precedent shared by two paths counts twice."""
        if addr in self._chain_memo:
            return self._chain_memo[addr]
        if addr in active or addr in self._cycles():
            return OPAQUE
        own = ZERO if self._skip_in_chain(addr) else self.cell_score(addr).total
        active.add(addr)
        total = score_sum([own] + [self._per_path(p, active) for p in self.precedents(addr)])
        active.discard(addr)
        self._chain_memo[addr] = total
        return total

    def model_score(self) -> ModelScore:
        per_cell: "OrderedDict[CellAddress, ScoreBreakdown]" = OrderedDict()
        opaque: List[Tuple[CellAddress, str]] = []
        finite = 0
        labels = 0
        for addr in occupied_cells(self.wb):
            if self._skip_in_chain(addr):
                labels += 1
                continue
            bd = self.cell_score(addr)
            per_cell[addr] = bd
            if bd.total.is_opaque:
                opaque.append((addr, bd.opaque_reason or "opaque"))
            else:
                finite += bd.total.value
        tables = [
            TableItem(t.name, t.connection.kind, self.costs.connection, t.connection.definition_text)
            for t in self.wb.tables
            if t.connection is not None
        ]
        table_total = score_sum(Score.steps(t.steps) for t in tables)
        total = score_add(score_sum(bd.total for bd in per_cell.values()), table_total)
        return ModelScore(total, per_cell, tables, opaque, finite + (table_total.value or 0), labels, self.cycles())


# -- functional API --------------------------------------------------------------


def _scorer(wb, cfg=None, lexicons=None, catalog=None) -> Scorer:
    return Scorer(wb, cfg, lexicons, catalog)


def surface_score(wb: WorkbookModel, addr: CellAddress, cfg=None, lexicons=None) -> Score:
    return _scorer(wb, cfg, lexicons).surface_score(addr)


def source_score(wb: WorkbookModel, addr: CellAddress, cfg=None, lexicons=None, catalog=None) -> Score:
    return _scorer(wb, cfg, lexicons, catalog).source_score(addr)


def cell_score(wb: WorkbookModel, addr: CellAddress, cfg=None, lexicons=None, catalog=None) -> ScoreBreakdown:
    return _scorer(wb, cfg, lexicons, catalog).cell_score(addr)


def downstream_error_handled(wb: WorkbookModel, addr: CellAddress, catalog=None) -> bool:
    return _scorer(wb, catalog=catalog).downstream_error_handled(addr)


def chain_score(wb: WorkbookModel, addr: CellAddress, cfg=None, lexicons=None, catalog=None) -> Score:
    return _scorer(wb, cfg, lexicons, catalog).chain_score(addr)


def model_score(wb: WorkbookModel, cfg=None, lexicons=None, catalog=None) -> ModelScore:
    return _scorer(wb, cfg, lexicons, catalog).model_score()
