"""Command-line front end.

    xltransparency audit BOOK.xlsx [BOOK2.xlsx ...] [options]
    xltransparency chain BOOK.xlsx 'Sheet1!B3' [--chain-mode per-path]
    xltransparency ast '=VLOOKUP(A1,A3:B5,2,FALSE)'

``audit`` exit codes: 0 scores at or above the threshold, 1 some cell is
opaque, 2 finite score below ``--fail-threshold``, 3 a file failed to load.
A batch reports the worst code: 3 over 1 over 2 over 0. Bad arguments and
unreadable configuration or catalog files also exit with 3.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .catalog import CatalogError, Grade
from .config import CHAIN_PER_PATH, CHAIN_SET, FORMAT_STRUCTURED, FORMAT_TEXT, AuditConfig, ConfigError, load_config
from .formula import FormulaSyntaxError, dump, parse_formula, serialize
from .labeling import VicinityConfig
from .report import EXIT_LOAD_FAILURE, batch_exit_code, emit, run_audit, write_cells_csv
from .scorer import Scorer
from .workbook import AddressError, CellAddress, LoadOptions, WorkbookError, load_workbook

# bad arguments, configuration or catalogs count as load failures so that
# argparse's default status 2 never collides with the threshold code
EXIT_USAGE = EXIT_LOAD_FAILURE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _threshold(text: str) -> int:
    value = int(text)
    if value > 0:
        raise argparse.ArgumentTypeError("threshold must be zero or negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xltransparency", description="Steps-from-transparency audits for XLSX workbooks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    audit = sub.add_parser("audit", help="score and lint workbooks")
    audit.add_argument("files", nargs="+", type=Path)
    audit.add_argument("--config", type=Path, help="key = value configuration file")
    audit.add_argument("--catalog", type=Path, help="function catalog replacing the bundled one")
    audit.add_argument("--lexicons", type=Path, help="directory of label lexicon files")
    audit.add_argument("--strict-labels", action="store_true", default=None, help="ignore number formats as labels")
    audit.add_argument("--vicinity", help="visible window as ROWSxCOLS, e.g. 40x20")
    audit.add_argument("--no-frozen-panes", action="store_true", help="treat frozen panes as ordinary rows and columns")
    audit.add_argument("--chain-mode", choices=[CHAIN_SET, CHAIN_PER_PATH])
    audit.add_argument("--fail-threshold", type=_threshold, help="minimum acceptable finite model score (<= 0)")
    audit.add_argument("--unknown-function-grade", choices=[g.value for g in Grade])
    audit.add_argument("--disclose", action="append", default=[], metavar="SHEET", help="sheet whose password is known")
    audit.add_argument("--format", choices=[FORMAT_TEXT, FORMAT_STRUCTURED])
    audit.add_argument("--out", type=Path, help="write the report here instead of stdout")
    audit.add_argument("--figures", type=Path, metavar="DIR", help="write per-cell CSV and PNG figures into DIR")
    audit.add_argument("--no-timing", action="store_true", help="omit timing from structured output")

    chain = sub.add_parser("chain", help="score the calculation chain ending at one cell")
    chain.add_argument("file", type=Path)
    chain.add_argument("cell", help="address such as Sheet1!B3")
    chain.add_argument("--chain-mode", choices=[CHAIN_SET, CHAIN_PER_PATH], default=CHAIN_SET)
    chain.add_argument("--config", type=Path)

    ast = sub.add_parser("ast", help="parse a formula and print its tree")
    ast.add_argument("formula")
    return parser


def config_from_args(args: argparse.Namespace) -> AuditConfig:
    cfg = load_config(args.config) if args.config else AuditConfig()
    updates = {}
    if args.catalog:
        updates["catalog_path"] = str(args.catalog)
    if args.lexicons:
        updates["lexicon_path"] = str(args.lexicons)
    if args.strict_labels:
        updates["strict_labels"] = True
    if args.vicinity or args.no_frozen_panes:
        v = VicinityConfig.parse(args.vicinity) if args.vicinity else cfg.vicinity
        honor = False if args.no_frozen_panes else cfg.vicinity.honor_frozen_panes
        updates["vicinity"] = VicinityConfig(v.rows_visible, v.cols_visible, honor)
    if args.chain_mode:
        updates["chain_mode"] = args.chain_mode
    if args.fail_threshold is not None:
        updates["fail_threshold"] = args.fail_threshold
    if args.unknown_function_grade:
        updates["unknown_function_grade"] = Grade(args.unknown_function_grade)
    if args.disclose:
        updates["disclosed_sheets"] = cfg.disclosed_sheets | frozenset(args.disclose)
    if args.format:
        updates["output_format"] = args.format
    return dataclasses.replace(cfg, **updates)


def _audit(args) -> int:
    cfg = config_from_args(args)
    reports = run_audit(args.files, cfg)
    output = emit(reports, cfg.output_format, timing=not args.no_timing)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    if args.figures:
        from .figures import render_figures

        args.figures.mkdir(parents=True, exist_ok=True)
        for report in reports:
            if report.model is None:
                continue
            stem = Path(report.path).stem
            write_cells_csv(report, args.figures / f"{stem}.cells.csv")
            render_figures(report, args.figures)
    return batch_exit_code(reports)


def _chain(args) -> int:
    cfg = load_config(args.config) if args.config else AuditConfig()
    try:
        wb = load_workbook(args.file, LoadOptions(disclosed_sheets=cfg.disclosed_sheets))
    except (WorkbookError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD_FAILURE
    scorer = Scorer(wb, cfg)
    addr = CellAddress.parse(args.cell)
    if not wb.has_sheet(addr.sheet):
        print(f"error: no sheet {addr.sheet!r}", file=sys.stderr)
        return EXIT_USAGE
    addr = CellAddress(wb.canonical_sheet(addr.sheet), addr.row, addr.col)
    for member in scorer.chain_members(addr):
        bd = scorer.cell_score(member)
        print(f"{member}\t{bd.total}")
    total = scorer.chain_score(addr, args.chain_mode)
    print(f"chain {addr} ({args.chain_mode}): {total}")
    return 1 if total.is_opaque else 0


def _ast(args) -> int:
    try:
        node = parse_formula(args.formula)
    except FormulaSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(dump(node))
    print(serialize(node))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help and --version exit 0; usage errors carry EXIT_USAGE
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "audit":
            return _audit(args)
        if args.command == "chain":
            return _chain(args)
        return _ast(args)
    except (ConfigError, CatalogError, AddressError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
