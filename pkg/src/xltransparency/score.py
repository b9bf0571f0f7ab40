"""Steps-from-transparency scores: non-positive integers plus an absorbing Opaque."""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Optional

TRANSPARENT = "transparent"
TRANSLUCENT = "translucent"
OPAQUE_CLASS = "opaque"


@total_ordering
@dataclass(frozen=True)
class Score:
    """A finite score (``value <= 0``) or Opaque (``value is None``, i.e. minus infinity)."""

    value: Optional[int] = 0

    def __post_init__(self):
        if self.value is not None and self.value > 0:
            raise ValueError(f"scores are never positive, got {self.value}")

    @classmethod
    def steps(cls, n: int) -> "Score":
        """Score for ``n`` required steps."""
        if n < 0:
            raise ValueError("step counts are non-negative")
        return cls(-n)

    @property
    def is_opaque(self) -> bool:
        return self.value is None

    @property
    def classification(self) -> str:
        if self.value is None:
            return OPAQUE_CLASS
        return TRANSPARENT if self.value == 0 else TRANSLUCENT

    def __add__(self, other: "Score") -> "Score":
        return score_add(self, other)

    def __lt__(self, other: "Score") -> bool:
        if not isinstance(other, Score):
            return NotImplemented
        if self.value is None:
            return other.value is not None
        if other.value is None:
            return False
        return self.value < other.value

    def __str__(self) -> str:
        return "opaque" if self.value is None else str(self.value)

    def to_json(self):
        return "opaque" if self.value is None else self.value


OPAQUE = Score(None)
ZERO = Score(0)


def score_add(a: Score, b: Score) -> Score:
    if a.value is None or b.value is None:
        return OPAQUE
    return Score(a.value + b.value)


def score_sum(scores: Iterable[Score]) -> Score:
    total = 0
    for s in scores:
        if s.value is None:
            return OPAQUE
        total += s.value
    return Score(total)
