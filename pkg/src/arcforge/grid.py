"""Core grid model and canonical task JSON.

Grids are immutable rectangles of color values 0..9 with dimensions
1..30 on each side. Value 0 is the background color unless a generator
says otherwise. Serialization is canonical: fixed key order, no
whitespace, so equal episodes always produce identical bytes.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator

from .errors import EmptySplit, GridBoundsViolation, MalformedJson

MIN_SIDE = 1
MAX_SIDE = 30

# Preferred visualization window; generators should stay inside it but
# the hard bounds above are what validation enforces.
WINDOW_MIN = 5
WINDOW_MAX = 30


class Color(IntEnum):
    """The ten cell colors with their canonical display names."""

    BLACK = 0
    BLUE = 1
    RED = 2
    GREEN = 3
    YELLOW = 4
    GREY = 5
    MAGENTA = 6
    ORANGE = 7
    CYAN = 8
    MAROON = 9

    @property
    def display_name(self) -> str:
        return self.name.lower()


def color_name(value: int) -> str:
    """Canonical lowercase name for a cell value."""
    return Color(value).display_name


@dataclass(frozen=True)
class Grid:
    """Immutable rectangular grid of cell colors."""

    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        h = len(self.cells)
        if not MIN_SIDE <= h <= MAX_SIDE:
            raise GridBoundsViolation(f"grid height {h} outside {MIN_SIDE}..{MAX_SIDE}")
        w = len(self.cells[0])
        if not MIN_SIDE <= w <= MAX_SIDE:
            raise GridBoundsViolation(f"grid width {w} outside {MIN_SIDE}..{MAX_SIDE}")
        for row in self.cells:
            if len(row) != w:
                raise MalformedJson("grid rows have unequal lengths")
            for v in row:
                if not isinstance(v, int) or isinstance(v, bool):
                    raise MalformedJson(f"cell value {v!r} is not an integer")
                if not 0 <= v <= 9:
                    raise GridBoundsViolation(f"cell value {v} outside 0..9")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> Grid:
        return cls(tuple(tuple(int(v) for v in row) for row in rows))

    @classmethod
    def filled(cls, height: int, width: int, color: int = 0) -> Grid:
        return cls(tuple(tuple(int(color) for _ in range(width)) for _ in range(height)))

    @property
    def height(self) -> int:
        return len(self.cells)

    @property
    def width(self) -> int:
        return len(self.cells[0])

    def cell(self, r: int, c: int) -> int:
        return self.cells[r][c]

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.cells]

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.cells)


def grid_equal(a: Grid, b: Grid) -> bool:
    """Exact cell-by-cell equality. The only grid comparison the engine uses."""
    return a.cells == b.cells


def color_histogram(g: Grid) -> dict[int, int]:
    """Count of each cell value present, keyed by value, ascending."""
    counts = Counter(v for row in g.cells for v in row)
    return {k: counts[k] for k in sorted(counts)}


@dataclass(frozen=True)
class Pair:
    """One input grid and the output its rule produces."""

    input: Grid
    output: Grid


@dataclass(frozen=True)
class Episode:
    """Train and test pairs that share a single latent rule."""

    train: tuple[Pair, ...]
    test: tuple[Pair, ...]

    def __post_init__(self):
        if not self.train:
            raise EmptySplit("episode has no train pairs")
        if not self.test:
            raise EmptySplit("episode has no test pairs")

    def all_pairs(self) -> tuple[Pair, ...]:
        return self.train + self.test

    def all_grids(self) -> tuple[Grid, ...]:
        out: list[Grid] = []
        for p in self.all_pairs():
            out.append(p.input)
            out.append(p.output)
        return tuple(out)


def _grid_from_json(obj: object) -> Grid:
    if not isinstance(obj, list) or not obj:
        raise MalformedJson("grid must be a non-empty list of rows")
    for row in obj:
        if not isinstance(row, list) or not row:
            raise MalformedJson("grid row must be a non-empty list")
    return Grid(tuple(tuple(_require_cell(v) for v in row) for row in obj))


def _require_cell(v: object) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise MalformedJson(f"cell value {v!r} is not an integer")
    return v


def _pair_from_json(obj: object) -> Pair:
    if not isinstance(obj, dict):
        raise MalformedJson("pair must be an object")
    missing = {"input", "output"} - set(obj)
    if missing:
        raise MalformedJson(f"pair missing keys: {sorted(missing)}")
    return Pair(input=_grid_from_json(obj["input"]), output=_grid_from_json(obj["output"]))


def parse_arc_json(text: str | bytes) -> Episode:
    """Parse task JSON into an Episode, validating grid bounds."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise MalformedJson(f"not valid UTF-8: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedJson(f"not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise MalformedJson("top level must be an object")
    missing = {"train", "test"} - set(data)
    if missing:
        raise MalformedJson(f"missing keys: {sorted(missing)}")
    for split in ("train", "test"):
        if not isinstance(data[split], list):
            raise MalformedJson(f"'{split}' must be a list")
    return Episode(
        train=tuple(_pair_from_json(p) for p in data["train"]),
        test=tuple(_pair_from_json(p) for p in data["test"]),
    )


def serialize_arc_json(e: Episode) -> bytes:
    """Canonical byte serialization: train then test, input then output, no whitespace."""
    doc = {
        "train": [{"input": p.input.to_lists(), "output": p.output.to_lists()} for p in e.train],
        "test": [{"input": p.input.to_lists(), "output": p.output.to_lists()} for p in e.test],
    }
    return json.dumps(doc, separators=(",", ":")).encode("ascii")
