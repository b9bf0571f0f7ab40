"""PNG figures for an audit: a per-sheet score heatmap and a steps-by-rule chart.

Rendering uses the non-interactive Agg backend so it works on headless hosts.
"""

from __future__ import annotations

import re
from collections import Counter
from pathlib import Path
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402
from matplotlib.patches import Patch  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402
from openpyxl.utils import get_column_letter  # noqa: E402

from .report import AuditReport  # noqa: E402
from .scorer import ScoreBreakdown  # noqa: E402

# PNG metadata without the matplotlib version keeps files stable across runs
_PNG_META = {"Software": None}


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text).strip("_") or "sheet"


def _sheet_heatmap(sheet: str, cells: List[ScoreBreakdown], path: Path) -> Path:
    rows = [bd.address.row for bd in cells]
    cols = [bd.address.col for bd in cells]
    r0, r1, c0, c1 = min(rows), max(rows), min(cols), max(cols)
    grid = np.full((r1 - r0 + 1, c1 - c0 + 1), np.nan)
    opaque = np.zeros_like(grid, dtype=bool)
    for bd in cells:
        r, c = bd.address.row - r0, bd.address.col - c0
        if bd.total.is_opaque:
            opaque[r, c] = True
        else:
            grid[r, c] = bd.total.value
    worst = min([v for v in grid.flat if not np.isnan(v)] + [-1])
    height = min(12.0, 1.5 + 0.25 * grid.shape[0])
    width = min(14.0, max(5.5, 2.5 + 0.6 * grid.shape[1]))
    fig, ax = plt.subplots(figsize=(width, height))
    image = ax.imshow(grid, cmap="YlOrRd_r", vmin=worst, vmax=0, aspect="auto", interpolation="nearest")
    if opaque.any():
        ax.imshow(
            np.where(opaque, 1.0, np.nan), cmap=ListedColormap(["#222222"]), aspect="auto", interpolation="nearest"
        )
    ax.set_xticks(range(grid.shape[1]))
    ax.set_xticklabels([get_column_letter(c) for c in range(c0, c1 + 1)])
    step = max(1, grid.shape[0] // 30)
    ax.set_yticks(range(0, grid.shape[0], step))
    ax.set_yticklabels([str(r) for r in range(r0, r1 + 1, step)])
    ax.set_title(f"{sheet}: score per cell")
    fig.colorbar(image, ax=ax, label="steps (0 = transparent)")
    ax.legend(handles=[Patch(color="#222222", label="opaque")], loc="upper right", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
    return path


def _steps_chart(report: AuditReport, path: Path) -> Path:
    steps: Counter = Counter()
    opaque: Counter = Counter()
    for bd in report.model.per_cell.values():
        for item in bd.counted():
            if item.is_opaque:
                opaque[item.rule] += 1
            else:
                steps[item.rule] += item.steps
    for table in report.model.table_items:
        steps["connection"] += table.steps
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    for ax, counts, title, color in (
        (left, steps, "Steps charged by rule", "#d98c3a"),
        (right, opaque, "Opaque items by rule", "#444444"),
    ):
        names = sorted(counts)
        ax.barh(names, [counts[n] for n in names], color=color)
        ax.set_title(title)
        ax.xaxis.set_major_locator(MaxNLocator(integer=True))
        if not names:
            ax.text(0.5, 0.5, "none", ha="center", va="center", transform=ax.transAxes)
            ax.set_yticks([])
    fig.suptitle(f"{Path(report.path).name}: {report.model.total} overall")
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
    return path


def render_figures(report: AuditReport, out_dir) -> List[Path]:
    """Write figures for one audited workbook into ``out_dir``; returns the paths."""
    if report.model is None:
        return []
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = _slug(Path(report.path).stem)
    by_sheet: Dict[str, List[ScoreBreakdown]] = {}
    for bd in report.model.per_cell.values():
        by_sheet.setdefault(bd.address.sheet, []).append(bd)
    written = [
        _sheet_heatmap(sheet, cells, out_dir / f"{stem}.{_slug(sheet)}.heatmap.png") for sheet, cells in by_sheet.items()
    ]
    written.append(_steps_chart(report, out_dir / f"{stem}.steps.png"))
    return written
