"""Function catalog: per-parameter label grades for literal arguments.

File format, one function per line::

    FUNCTION;min;max;param=grade,param=grade,...;flags

``grade`` is ``tooltip-sufficient``, ``help-sufficient`` or ``insufficient``.
``max`` may be ``*`` for variadic functions, whose trailing parameter grade
repeats. ``flags`` is a comma list drawn from ``error-handling`` and
``indirect``. ``#`` starts a comment.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Iterator, Optional, Tuple, Union

VARIADIC_MAX = 255


class Grade(str, enum.Enum):
    TOOLTIP = "tooltip-sufficient"
    HELP = "help-sufficient"
    INSUFFICIENT = "insufficient"


class CatalogError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DuplicateFunctionError(CatalogError):
    pass


@dataclass(frozen=True)
class Parameter:
    name: str
    grade: Grade


@dataclass(frozen=True)
class CatalogEntry:
    function_name: str
    min_arity: int
    max_arity: int
    params: Tuple[Parameter, ...]
    error_handling: bool = False
    indirect_class: bool = False

    def grade(self, index: int) -> Optional[Grade]:
        if index < 0 or index >= self.max_arity or not self.params:
            return None
        if index < len(self.params):
            return self.params[index].grade
        if self.max_arity > len(self.params):
            return self.params[-1].grade
        return None

    def param_name(self, index: int) -> str:
        if not self.params:
            return f"arg{index + 1}"
        if index < len(self.params):
            return self.params[index].name
        return self.params[-1].name


class FunctionCatalog:
    def __init__(self, entries: Dict[str, CatalogEntry], unknown_grade: Grade = Grade.INSUFFICIENT):
        self._entries = dict(entries)
        self.unknown_grade = unknown_grade

    def __contains__(self, name: str) -> bool:
        return name.upper() in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[CatalogEntry]:
        return iter(self._entries.values())

    def get(self, name: str) -> Optional[CatalogEntry]:
        return self._entries.get(name.upper())

    def with_unknown_grade(self, grade: Grade) -> "FunctionCatalog":
        return FunctionCatalog(self._entries, grade)

    def is_error_handling(self, name: str) -> bool:
        entry = self.get(name)
        return bool(entry and entry.error_handling)

    def parameter_grade(self, function_name: str, arg_index: int) -> Grade:
        entry = self.get(function_name)
        if entry is None:
            return self.unknown_grade
        grade = entry.grade(arg_index)
        return self.unknown_grade if grade is None else grade

    def parameter_name(self, function_name: str, arg_index: int) -> str:
        entry = self.get(function_name)
        return entry.param_name(arg_index) if entry else f"arg{arg_index + 1}"


def parameter_grade(cat: FunctionCatalog, fn: str, arg_index: int) -> Grade:
    return cat.parameter_grade(fn, arg_index)


def parse_catalog(text: str, unknown_grade: Grade = Grade.INSUFFICIENT) -> FunctionCatalog:
    entries: Dict[str, CatalogEntry] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(";")]
        if len(fields) < 3:
            raise CatalogError("expected FUNCTION;min;max;params;flags", lineno)
        fields += [""] * (5 - len(fields))
        name, min_text, max_text, params_text, flags_text = fields[:5]
        name = name.upper()
        if not name:
            raise CatalogError("missing function name", lineno)
        try:
            min_arity = int(min_text)
            max_arity = VARIADIC_MAX if max_text == "*" else int(max_text)
        except ValueError:
            raise CatalogError(f"bad arity {min_text!r}/{max_text!r}", lineno) from None
        if min_arity < 0 or max_arity < min_arity:
            raise CatalogError("arity bounds out of order", lineno)
        params = []
        for item in filter(None, (p.strip() for p in params_text.split(","))):
            pname, sep, grade_text = item.rpartition("=")
            if not sep:
                raise CatalogError(f"parameter {item!r} lacks '=grade'", lineno)
            try:
                grade = Grade(grade_text.strip())
            except ValueError:
                raise CatalogError(f"unknown grade {grade_text!r}", lineno) from None
            params.append(Parameter(pname.strip(), grade))
        if len(params) > max_arity:
            raise CatalogError("more parameters than max arity", lineno)
        if len(params) < min_arity and max_arity != VARIADIC_MAX:
            raise CatalogError("fewer parameters than min arity", lineno)
        flags = {f.strip().lower() for f in flags_text.split(",") if f.strip()}
        unknown_flags = flags - {"error-handling", "indirect"}
        if unknown_flags:
            raise CatalogError(f"unknown flags {sorted(unknown_flags)}", lineno)
        if name in entries:
            raise DuplicateFunctionError(f"duplicate function {name}", lineno)
        entries[name] = CatalogEntry(
            name,
            min_arity,
            max_arity,
            tuple(params),
            error_handling="error-handling" in flags,
            indirect_class="indirect" in flags,
        )
    return FunctionCatalog(entries, unknown_grade)


def load_catalog(path: Union[str, Path], unknown_grade: Grade = Grade.INSUFFICIENT) -> FunctionCatalog:
    return parse_catalog(Path(path).read_text(encoding="utf-8"), unknown_grade)


def default_catalog(unknown_grade: Grade = Grade.INSUFFICIENT) -> FunctionCatalog:
    text = resources.files("xltransparency.data").joinpath("functions.catalog").read_text(encoding="utf-8")
    return parse_catalog(text, unknown_grade)
