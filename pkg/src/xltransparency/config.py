"""Audit configuration: step costs, vicinity, modes and the key=value file format.

Config file example::

    # comments start with '#'
    vicinity = 40x20
    honor_frozen_panes = true
    strict_labels = false
    chain_mode = set
    fail_threshold = -10
    unknown_function_grade = insufficient
    catalog = path/to/functions.catalog
    lexicons = path/to/lexicon/dir
    disclosed_sheets = Payroll, Tax
    cost.navigate = 1
    cost.unhide = 2
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, FrozenSet, Optional, Union

from .catalog import Grade
from .labeling import VicinityConfig

CHAIN_SET = "set"
CHAIN_PER_PATH = "per-path"
FORMAT_TEXT = "text"
FORMAT_STRUCTURED = "structured"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class StepCosts:
    """Steps charged per gesture. All values are non-negative step counts."""

    inspect: int = 1  # click into the formula bar, once per formula
    navigate: int = 1  # jump to an off-screen name or area
    help: int = 1  # open function help or the arguments dialog
    comment: int = 1
    validation: int = 1
    documentation: int = 1
    unhide: int = 2
    connection: int = 1  # open a table's connection definition

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ConfigError(f"step cost {f.name} must be non-negative")


@dataclass(frozen=True)
class AuditConfig:
    vicinity: VicinityConfig = field(default_factory=VicinityConfig)
    strict_labels: bool = False
    catalog_path: Optional[str] = None
    lexicon_path: Optional[str] = None
    costs: StepCosts = field(default_factory=StepCosts)
    chain_mode: str = CHAIN_SET
    fail_threshold: Optional[int] = None
    output_format: str = FORMAT_TEXT
    unknown_function_grade: Grade = Grade.INSUFFICIENT
    disclosed_sheets: FrozenSet[str] = frozenset()

    def __post_init__(self):
        if self.chain_mode not in (CHAIN_SET, CHAIN_PER_PATH):
            raise ConfigError(f"chain_mode must be set or per-path, got {self.chain_mode!r}")
        if self.fail_threshold is not None and self.fail_threshold > 0:
            raise ConfigError("fail_threshold must be zero or negative")
        if self.output_format not in (FORMAT_TEXT, FORMAT_STRUCTURED):
            raise ConfigError(f"format must be text or structured, got {self.output_format!r}")


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _bool(key: str, value: str) -> bool:
    lowered = value.lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def parse_config_text(text: str, base: Optional[AuditConfig] = None, relative_to: Optional[Path] = None) -> AuditConfig:
    cfg = base or AuditConfig()
    updates: Dict[str, object] = {}
    costs: Dict[str, int] = {}
    rows = cfg.vicinity.rows_visible
    cols = cfg.vicinity.cols_visible
    honor = cfg.vicinity.honor_frozen_panes

    def path_value(value: str) -> str:
        p = Path(value).expanduser()
        if relative_to is not None and not p.is_absolute():
            p = relative_to / p
        return str(p)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        key = key.strip().lower().replace("-", "_")
        value = value.strip()
        if key == "vicinity":
            v = VicinityConfig.parse(value)
            rows, cols = v.rows_visible, v.cols_visible
        elif key == "rows_visible":
            rows = _int(key, value)
        elif key == "cols_visible":
            cols = _int(key, value)
        elif key == "honor_frozen_panes":
            honor = _bool(key, value)
        elif key == "strict_labels":
            updates["strict_labels"] = _bool(key, value)
        elif key == "chain_mode":
            updates["chain_mode"] = value
        elif key == "fail_threshold":
            updates["fail_threshold"] = None if value.lower() in ("", "none") else _int(key, value)
        elif key in ("format", "output_format"):
            updates["output_format"] = value
        elif key == "catalog":
            updates["catalog_path"] = path_value(value)
        elif key == "lexicons":
            updates["lexicon_path"] = path_value(value)
        elif key == "unknown_function_grade":
            try:
                updates["unknown_function_grade"] = Grade(value)
            except ValueError:
                raise ConfigError(f"{key}: unknown grade {value!r}") from None
        elif key == "disclosed_sheets":
            updates["disclosed_sheets"] = frozenset(s.strip() for s in value.split(",") if s.strip())
        elif key.startswith("cost."):
            name = key[len("cost.") :]
            if name not in {f.name for f in fields(StepCosts)}:
                raise ConfigError(f"line {lineno}: unknown step cost {name!r}")
            costs[name] = _int(key, value)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    try:
        updates["vicinity"] = VicinityConfig(rows, cols, honor)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if costs:
        updates["costs"] = replace(cfg.costs, **costs)
    return replace(cfg, **updates)


def load_config(path: Union[str, Path], base: Optional[AuditConfig] = None) -> AuditConfig:
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), base, path.parent)
