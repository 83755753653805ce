"""Distributional summaries over datasets.

Three views: a grid-size heatmap over the 5..30 dimension window, a
per-grid feature table (foreground bounding-box center, area, dominant
color), and a diversity report based on exact-serialization uniqueness
of inputs and whole episodes.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .dataset import Dataset
from .grid import Episode, Grid, WINDOW_MAX, WINDOW_MIN, serialize_arc_json

_WINDOW_SPAN = WINDOW_MAX - WINDOW_MIN + 1  # 26 bins per axis

INPUTS = "inputs"
OUTPUTS = "outputs"


@dataclass(frozen=True)
class SizeHeatmap:
    """Counts of grids by (height, width) within the display window."""

    counts: tuple[tuple[int, ...], ...]  # [height - 5][width - 5]
    out_of_window: int

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts) + self.out_of_window

    def in_window(self) -> int:
        return sum(sum(row) for row in self.counts)

    def to_csv(self) -> str:
        """Labeled matrix: header row/column give the dimension values."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rows\\cols"] + [str(c) for c in range(WINDOW_MIN, WINDOW_MAX + 1)])
        for i, row in enumerate(self.counts):
            w.writerow([str(WINDOW_MIN + i)] + [str(v) for v in row])
        w.writerow(["out_of_window", str(self.out_of_window)])
        return buf.getvalue()


def _iter_role_grids(episode: Episode, which: str) -> list[Grid]:
    if which == INPUTS:
        return [p.input for p in episode.all_pairs()]
    if which == OUTPUTS:
        return [p.output for p in episode.all_pairs()]
    raise ValueError(f"unknown grid role {which!r}; expected {INPUTS!r} or {OUTPUTS!r}")


def size_heatmap(dataset: Dataset, which: str = INPUTS) -> SizeHeatmap:
    """One increment per grid of the selected role, across train and test."""
    counts = [[0] * _WINDOW_SPAN for _ in range(_WINDOW_SPAN)]
    out = 0
    for stored in dataset.samples:
        for g in _iter_role_grids(stored.episode(), which):
            if WINDOW_MIN <= g.height <= WINDOW_MAX and WINDOW_MIN <= g.width <= WINDOW_MAX:
                counts[g.height - WINDOW_MIN][g.width - WINDOW_MIN] += 1
            else:
                out += 1
    return SizeHeatmap(counts=tuple(tuple(r) for r in counts), out_of_window=out)


@dataclass(frozen=True)
class GridFeatureRow:
    """Whole-grid summary treating all foreground cells as one mass."""

    sample_id: str
    split: str  # train | test
    pair_index: int
    role: str  # input | output
    center: tuple[float, float] | None  # None when the grid has no foreground
    area: int
    dominant: int | None


def _grid_features(g: Grid, background: int = 0) -> tuple[tuple[float, float] | None, int, int | None]:
    cells = [(r, c, v) for r in range(g.height) for c, v in enumerate(g.cells[r]) if v != background]
    if not cells:
        return None, 0, None
    rows = [r for r, _, _ in cells]
    cols = [c for _, c, _ in cells]
    center = ((min(rows) + max(rows)) / 2, (min(cols) + max(cols)) / 2)
    counts = Counter(v for _, _, v in cells)
    dominant = min(counts, key=lambda v: (-counts[v], v))
    return center, len(cells), dominant


def extract_features(dataset: Dataset) -> list[GridFeatureRow]:
    """One row per individual grid, ordered by sample id then pair position."""
    rows: list[GridFeatureRow] = []
    for stored in sorted(dataset.samples, key=lambda s: s.stem):
        episode = stored.episode()
        for split, pairs in (("train", episode.train), ("test", episode.test)):
            for i, pair in enumerate(pairs):
                for role, g in (("input", pair.input), ("output", pair.output)):
                    center, area, dominant = _grid_features(g)
                    rows.append(
                        GridFeatureRow(stored.stem, split, i, role, center, area, dominant)
                    )
    return rows


def _num(x: float) -> str:
    return str(int(x)) if x == int(x) else str(x)


def features_csv(rows: list[GridFeatureRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["sample_id", "split", "pair_index", "role", "center_row", "center_col", "area", "dominant"]
    )
    for r in rows:
        cr = _num(r.center[0]) if r.center is not None else "undefined"
        cc = _num(r.center[1]) if r.center is not None else "undefined"
        dom = str(r.dominant) if r.dominant is not None else "undefined"
        w.writerow([r.sample_id, r.split, str(r.pair_index), r.role, cr, cc, str(r.area), dom])
    return buf.getvalue()


@dataclass(frozen=True)
class GeneratorDiversity:
    generator_id: str
    samples: int
    unique_inputs: float
    unique_episodes: float
    taskvar_coverage: dict[str, int]
    duplicate_episode_groups: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class DiversityReport:
    method: str
    generators: tuple[GeneratorDiversity, ...]

    def to_json(self) -> bytes:
        doc = {
            "method": self.method,
            "generators": {
                g.generator_id: {
                    "samples": g.samples,
                    "unique_inputs": g.unique_inputs,
                    "unique_episodes": g.unique_episodes,
                    "taskvar_coverage": g.taskvar_coverage,
                    "duplicate_episode_groups": [list(grp) for grp in g.duplicate_episode_groups],
                }
                for g in self.generators
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True).encode() + b"\n"


def diversity(dataset: Dataset) -> DiversityReport:
    """Uniqueness fractions by exact canonical serialization, per generator."""
    report: list[GeneratorDiversity] = []
    for gid in sorted(dataset.generator_ids()):
        group = [s for s in dataset.samples if s.generator_id == gid]
        input_keys: list[bytes] = []
        episode_by_key: dict[bytes, list[str]] = {}
        coverage: dict[str, set] = {}
        for stored in group:
            episode = stored.episode()
            for p in episode.all_pairs():
                input_keys.append(json.dumps(p.input.to_lists(), separators=(",", ":")).encode())
            episode_by_key.setdefault(serialize_arc_json(episode), []).append(stored.stem)
            for name, value in stored.taskvars.items():
                coverage.setdefault(name, set()).add(str(value))
        dupes = tuple(
            tuple(sorted(stems)) for stems in episode_by_key.values() if len(stems) > 1
        )
        report.append(
            GeneratorDiversity(
                generator_id=gid,
                samples=len(group),
                unique_inputs=len(set(input_keys)) / len(input_keys) if input_keys else 1.0,
                unique_episodes=len(episode_by_key) / len(group) if group else 1.0,
                taskvar_coverage={k: len(v) for k, v in sorted(coverage.items())},
                duplicate_episode_groups=tuple(sorted(dupes)),
            )
        )
    return DiversityReport(method="exact-serialization uniqueness", generators=tuple(report))


def heatmap_figure(heatmap: SizeHeatmap, out_path: Path, which: str = INPUTS) -> None:
    """Render the size heatmap to an image file next to the CSV output."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    dims = list(range(WINDOW_MIN, WINDOW_MAX + 1))
    fig, ax = plt.subplots(figsize=(7, 6))
    data = [list(row) for row in heatmap.counts]
    im = ax.imshow(
        data,
        origin="lower",
        extent=(WINDOW_MIN - 0.5, WINDOW_MAX + 0.5, WINDOW_MIN - 0.5, WINDOW_MAX + 0.5),
        cmap="viridis",
    )
    ax.set_xlabel("columns")
    ax.set_ylabel("rows")
    ax.set_title(f"Grid sizes ({which}); {heatmap.out_of_window} outside window")
    ax.set_xticks(dims[::5])
    ax.set_yticks(dims[::5])
    fig.colorbar(im, ax=ax, label="grids")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
