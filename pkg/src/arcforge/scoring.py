"""Exact-match scoring of solver predictions against a dataset.

A prediction file is a JSON map from sample id to a list of predicted
output grids, one per test pair. A sample is solved only when every one
of its test predictions matches the stored output cell for cell.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import Dataset
from .errors import (
    ArityMismatch,
    EngineError,
    GeneratorSetMismatch,
    MalformedJson,
    UnknownSampleId,
)
from .grid import Grid, grid_equal


@dataclass(frozen=True)
class GeneratorScore:
    generator_id: str
    solved: int
    total: int

    @property
    def accuracy(self) -> float:
        return self.solved / self.total if self.total else 0.0


@dataclass(frozen=True)
class ScoreTable:
    per_sample: dict[str, bool]
    per_generator: tuple[GeneratorScore, ...]
    warnings: tuple[str, ...] = field(default=())
    skipped: tuple[str, ...] = field(default=())  # excluded by the cell-count cap

    @property
    def overall_accuracy(self) -> float:
        """Mean of per-sample solved indicators."""
        if not self.per_sample:
            return 0.0
        return sum(self.per_sample.values()) / len(self.per_sample)

    @property
    def mean_generator_accuracy(self) -> float:
        """Mean of per-generator accuracies (a different statistic; both reported)."""
        if not self.per_generator:
            return 0.0
        return sum(g.accuracy for g in self.per_generator) / len(self.per_generator)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["generator_id", "solved", "total", "accuracy"])
        for g in self.per_generator:
            w.writerow([g.generator_id, str(g.solved), str(g.total), f"{g.accuracy:.6f}"])
        return buf.getvalue()

    def overall_json(self) -> bytes:
        doc = {
            "overall_accuracy": self.overall_accuracy,
            "mean_generator_accuracy": self.mean_generator_accuracy,
            "samples_scored": len(self.per_sample),
            "samples_skipped": len(self.skipped),
            "warnings": list(self.warnings),
        }
        return json.dumps(doc, indent=2, sort_keys=True).encode() + b"\n"


def parse_predictions(raw: bytes) -> dict[str, list[Grid]]:
    """Parse the prediction JSON map; grid validation happens here."""
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        raise MalformedJson(f"predictions file is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise MalformedJson("predictions must be a JSON object keyed by sample id")
    out: dict[str, list[Grid]] = {}
    for sample_id, grids in doc.items():
        if not isinstance(grids, list):
            raise MalformedJson(f"prediction for {sample_id!r} must be a list of grids")
        try:
            out[sample_id] = [Grid.from_rows(g) for g in grids]
        except (EngineError, TypeError, ValueError) as e:
            raise MalformedJson(f"prediction for {sample_id!r} is not a valid grid list: {e}") from e
    return out


def _episode_cells(dataset_sample) -> int:
    episode = dataset_sample.episode()
    return sum(g.height * g.width for g in episode.all_grids())


def score(
    dataset: Dataset,
    predictions: dict[str, list[Grid]],
    strict_predictions: bool = False,
    strict_ids: bool = False,
    max_cells: int | None = None,
) -> ScoreTable:
    """Score predictions; missing entries count unsolved with a warning.

    max_cells drops episodes whose grids together exceed that many cells.
    It is a crude size proxy only; it does not measure tokens of any
    model's encoding.
    """
    warnings: list[str] = []
    skipped: list[str] = []
    per_sample: dict[str, bool] = {}
    by_generator: dict[str, list[bool]] = {}
    known_ids = {s.stem for s in dataset.samples}
    for sample_id in sorted(predictions):
        if sample_id not in known_ids:
            if strict_ids:
                raise UnknownSampleId(f"prediction for unknown sample {sample_id!r}")
            warnings.append(f"prediction for unknown sample {sample_id!r} ignored")
    for stored in sorted(dataset.samples, key=lambda s: s.stem):
        if max_cells is not None and _episode_cells(stored) > max_cells:
            skipped.append(stored.stem)
            continue
        episode = stored.episode()
        predicted = predictions.get(stored.stem)
        if predicted is None:
            if strict_predictions:
                raise UnknownSampleId(f"no prediction for sample {stored.stem!r}")
            warnings.append(f"no prediction for sample {stored.stem!r}; counted unsolved")
            solved = False
        else:
            if len(predicted) != len(episode.test):
                raise ArityMismatch(
                    f"sample {stored.stem!r} has {len(episode.test)} test pairs "
                    f"but {len(predicted)} predictions"
                )
            solved = all(
                grid_equal(p, pair.output) for p, pair in zip(predicted, episode.test)
            )
        per_sample[stored.stem] = solved
        by_generator.setdefault(stored.generator_id, []).append(solved)
    per_generator = tuple(
        GeneratorScore(gid, sum(flags), len(flags))
        for gid, flags in sorted(by_generator.items())
    )
    return ScoreTable(
        per_sample=per_sample,
        per_generator=per_generator,
        warnings=tuple(warnings),
        skipped=tuple(skipped),
    )


@dataclass(frozen=True)
class DifficultyMatrix:
    """Model-by-generator accuracy grid with the ordering used for display."""

    row_labels: tuple[str, ...]
    column_generators: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model"] + list(self.column_generators))
        for label, row in zip(self.row_labels, self.values):
            w.writerow([label] + [f"{v:.6f}" for v in row])
        return buf.getvalue()


def difficulty_matrix(
    tables: list[tuple[str, ScoreTable]], reference: str | None = None
) -> DifficultyMatrix:
    """Rows sorted by mean accuracy (desc); columns by the reference row (desc).

    The reference defaults to the highest-mean row. All tables must cover
    the same generator set.
    """
    if not tables:
        raise GeneratorSetMismatch("no score tables given")
    gen_sets = [frozenset(g.generator_id for g in t.per_generator) for _, t in tables]
    if len(set(gen_sets)) != 1:
        raise GeneratorSetMismatch("score tables cover different generator sets")
    acc: dict[str, dict[str, float]] = {
        label: {g.generator_id: g.accuracy for g in t.per_generator} for label, t in tables
    }

    def mean(label: str) -> float:
        vals = acc[label]
        return sum(vals.values()) / len(vals) if vals else 0.0

    labels = sorted(acc, key=lambda label: (-mean(label), label))
    if reference is None:
        reference = labels[0]
    if reference not in acc:
        raise GeneratorSetMismatch(f"reference row {reference!r} is not among the tables")
    gens = sorted(gen_sets[0], key=lambda gid: (-acc[reference][gid], gid))
    values = tuple(tuple(acc[label][gid] for gid in gens) for label in labels)
    return DifficultyMatrix(tuple(labels), tuple(gens), values)


def load_predictions(path: Path) -> dict[str, list[Grid]]:
    return parse_predictions(Path(path).read_bytes())
