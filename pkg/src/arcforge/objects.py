"""Connected objects and the geometry operations that act on them.

An object is a set of colored cells extracted from a grid. Extraction
walks the grid row by row, flood-filling each unvisited foreground
cell, so the extraction order (topmost cell first, leftmost breaking
ties) is deterministic for any grid.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator

from .errors import DegenerateResult, OutOfBounds
from .grid import Grid
from .errors import GridBoundsViolation


class Connectivity(Enum):
    FOUR = "four"
    EIGHT = "eight"

    @property
    def offsets(self) -> tuple[tuple[int, int], ...]:
        if self is Connectivity.FOUR:
            return ((-1, 0), (1, 0), (0, -1), (0, 1))
        return ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


class ModeKind(Enum):
    SAME_COLOR = "same_color"
    ANY_FOREGROUND = "any_foreground"


@dataclass(frozen=True)
class ExtractionMode:
    """How cells group into objects: per color, or any non-background run."""

    kind: ModeKind
    background: int = 0


SAME_COLOR = ExtractionMode(ModeKind.SAME_COLOR)
ANY_FOREGROUND = ExtractionMode(ModeKind.ANY_FOREGROUND)


@dataclass(frozen=True)
class GridObject:
    """A set of (row, col, color) cells with its tight bounding box."""

    cells: frozenset[tuple[int, int, int]]
    bbox: tuple[int, int, int, int]  # top, left, bottom, right (inclusive)

    @classmethod
    def from_cells(cls, cells) -> GridObject:
        cs = frozenset((int(r), int(c), int(v)) for r, c, v in cells)
        if not cs:
            raise DegenerateResult("object must have at least one cell")
        rows = [r for r, _, _ in cs]
        cols = [c for _, c, _ in cs]
        return cls(cells=cs, bbox=(min(rows), min(cols), max(rows), max(cols)))

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def top(self) -> int:
        return self.bbox[0]

    @property
    def left(self) -> int:
        return self.bbox[1]

    @property
    def height(self) -> int:
        return self.bbox[2] - self.bbox[0] + 1

    @property
    def width(self) -> int:
        return self.bbox[3] - self.bbox[1] + 1

    def sorted_cells(self) -> list[tuple[int, int, int]]:
        return sorted(self.cells)

    def colors(self) -> set[int]:
        return {v for _, _, v in self.cells}

    def anchor(self) -> tuple[int, int]:
        """Topmost cell, leftmost on ties. Used for deterministic ordering."""
        return min((r, c) for r, c, _ in self.cells)


@dataclass(frozen=True)
class GridObjects:
    """Ordered collection of objects from one extraction."""

    items: tuple[GridObject, ...]

    def __iter__(self) -> Iterator[GridObject]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i: int) -> GridObject:
        return self.items[i]


def find_connected_objects(g: Grid, connectivity: Connectivity, mode: ExtractionMode) -> GridObjects:
    """Extract connected components of non-background cells.

    same_color groups only equal-colored neighbors; any_foreground groups
    every non-background neighbor. Components are ordered by their
    topmost-then-leftmost cell.
    """
    h, w = g.height, g.width
    bg = mode.background
    seen = [[False] * w for _ in range(h)]
    found: list[GridObject] = []
    for r0 in range(h):
        for c0 in range(w):
            if seen[r0][c0] or g.cells[r0][c0] == bg:
                continue
            color0 = g.cells[r0][c0]
            comp: list[tuple[int, int, int]] = []
            queue = deque([(r0, c0)])
            seen[r0][c0] = True
            while queue:
                r, c = queue.popleft()
                comp.append((r, c, g.cells[r][c]))
                for dr, dc in connectivity.offsets:
                    nr, nc = r + dr, c + dc
                    if not (0 <= nr < h and 0 <= nc < w) or seen[nr][nc]:
                        continue
                    v = g.cells[nr][nc]
                    if v == bg:
                        continue
                    if mode.kind is ModeKind.SAME_COLOR and v != color0:
                        continue
                    seen[nr][nc] = True
                    queue.append((nr, nc))
            found.append(GridObject.from_cells(comp))
    found.sort(key=lambda o: o.anchor())
    return GridObjects(items=tuple(found))


def translate(o: GridObject, dr: int, dc: int) -> GridObject:
    """Shift an object. May move it out of any grid; bounds are checked on paste."""
    return GridObject.from_cells((r + dr, c + dc, v) for r, c, v in o.cells)


def recolor_object(o: GridObject, color: int) -> GridObject:
    return GridObject.from_cells((r, c, int(color)) for r, c, _ in o.cells)


def rotate(g: Grid, quarter_turns: int) -> Grid:
    """Rotate clockwise by quarter turns in 0..3."""
    if quarter_turns not in (0, 1, 2, 3):
        raise ValueError(f"quarter_turns must be in 0..3, got {quarter_turns}")
    cells = g.cells
    for _ in range(quarter_turns):
        cells = tuple(tuple(row[i] for row in reversed(cells)) for i in range(len(cells[0])))
    return Grid(cells)


class Axis(Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


def reflect(g: Grid, axis: Axis) -> Grid:
    """Mirror across the named axis: horizontal flips top-bottom, vertical flips left-right."""
    if axis is Axis.HORIZONTAL:
        return Grid(tuple(reversed(g.cells)))
    return Grid(tuple(tuple(reversed(row)) for row in g.cells))


def crop_to_bbox(g: Grid, o: GridObject) -> Grid:
    """Subgrid of g covering the object's bounding box."""
    top, left, bottom, right = o.bbox
    if top < 0 or left < 0 or bottom >= g.height or right >= g.width:
        raise OutOfBounds(f"bbox {o.bbox} outside grid {g.height}x{g.width}")
    return Grid(tuple(row[left : right + 1] for row in g.cells[top : bottom + 1]))


def paint(g: Grid, o: GridObject, color: int) -> Grid:
    """Recolor exactly the object's cells in the grid."""
    return _write_cells(g, ((r, c, int(color)) for r, c, _ in o.cells))


def overlay(base: Grid, o: GridObject) -> Grid:
    """Write the object's colored cells over the base grid."""
    return _write_cells(base, o.cells)


def _write_cells(g: Grid, cells) -> Grid:
    rows = [list(row) for row in g.cells]
    for r, c, v in sorted(cells):
        if not (0 <= r < g.height and 0 <= c < g.width):
            raise OutOfBounds(f"cell ({r}, {c}) outside grid {g.height}x{g.width}")
        rows[r][c] = v
    return Grid.from_rows(rows)


# --- fixed object predicates -------------------------------------------------

@dataclass(frozen=True)
class SizeEquals:
    n: int


@dataclass(frozen=True)
class SizeLargest:
    pass


@dataclass(frozen=True)
class SizeSmallest:
    pass


@dataclass(frozen=True)
class ColorEquals:
    color: int


@dataclass(frozen=True)
class BboxDims:
    height: int
    width: int


ObjectPredicate = SizeEquals | SizeLargest | SizeSmallest | ColorEquals | BboxDims


def filter_objects(objs: GridObjects, pred: ObjectPredicate) -> GridObjects:
    """Keep objects matching the predicate, preserving order. Ties all survive."""
    items = objs.items
    if isinstance(pred, SizeEquals):
        kept = [o for o in items if o.size == pred.n]
    elif isinstance(pred, SizeLargest):
        best = max((o.size for o in items), default=None)
        kept = [o for o in items if o.size == best]
    elif isinstance(pred, SizeSmallest):
        best = min((o.size for o in items), default=None)
        kept = [o for o in items if o.size == best]
    elif isinstance(pred, ColorEquals):
        kept = [o for o in items if o.colors() == {int(pred.color)}]
    elif isinstance(pred, BboxDims):
        kept = [o for o in items if o.height == pred.height and o.width == pred.width]
    else:
        raise TypeError(f"unknown predicate {pred!r}")
    return GridObjects(items=tuple(kept))


@dataclass(frozen=True)
class ObjectFeatures:
    """Scalar descriptors: bbox center (may be half-integral), area, dominant color."""

    center: tuple[float, float]
    area: int
    dominant_color: int


def object_features(o: GridObject) -> ObjectFeatures:
    top, left, bottom, right = o.bbox
    counts = Counter(v for _, _, v in o.cells)
    # Most frequent color; ties break toward the smaller value.
    dominant = min(counts, key=lambda v: (-counts[v], v))
    return ObjectFeatures(
        center=((top + bottom) / 2, (left + right) / 2),
        area=o.size,
        dominant_color=dominant,
    )


# --- whole-grid transformations used by latent rules --------------------------

class Direction(Enum):
    TOP = "top"
    BOTTOM = "bottom"
    LEFT = "left"
    RIGHT = "right"


def gravity(g: Grid, direction: Direction, background: int = 0) -> Grid:
    """Slide cells to the named edge, per column (or row), preserving order."""
    h, w = g.height, g.width
    rows = [[background] * w for _ in range(h)]
    if direction in (Direction.TOP, Direction.BOTTOM):
        for c in range(w):
            col = [g.cells[r][c] for r in range(h) if g.cells[r][c] != background]
            if direction is Direction.BOTTOM:
                for i, v in enumerate(col):
                    rows[h - len(col) + i][c] = v
            else:
                for i, v in enumerate(col):
                    rows[i][c] = v
    else:
        for r in range(h):
            line = [v for v in g.cells[r] if v != background]
            if direction is Direction.RIGHT:
                for i, v in enumerate(line):
                    rows[r][w - len(line) + i] = v
            else:
                for i, v in enumerate(line):
                    rows[r][i] = v
    return Grid.from_rows(rows)


class SortKey(Enum):
    SIZE = "by_size"
    COLOR = "by_color"
    ROW = "by_row"
    COL = "by_col"


_SORT_FNS: dict[SortKey, Callable[[GridObject], int]] = {
    SortKey.SIZE: lambda o: o.size,
    SortKey.COLOR: lambda o: object_features(o).dominant_color,
    SortKey.ROW: lambda o: o.top,
    SortKey.COL: lambda o: o.left,
}


def sort_objects_by(objs: GridObjects, key: SortKey, ascending: bool = True) -> GridObjects:
    """Stable sort by the named feature."""
    items = sorted(objs.items, key=_SORT_FNS[key], reverse=not ascending)
    return GridObjects(items=tuple(items))


def stack(canvas: Grid, objs: GridObjects, direction: Direction, alignment: Direction) -> Grid:
    """Pile object shapes against one edge, in order, flush to the aligned side.

    The first object sits on the stacking edge, each later object directly
    against the previous one. Stacking toward top/bottom takes left/right
    alignment and vice versa.
    """
    vertical = direction in (Direction.TOP, Direction.BOTTOM)
    if vertical == (alignment in (Direction.TOP, Direction.BOTTOM)):
        raise ValueError(f"alignment {alignment.value} is parallel to stacking {direction.value}")
    h, w = canvas.height, canvas.width
    out = canvas
    cursor = 0
    for o in objs:
        top, left, _, _ = o.bbox
        if vertical:
            if alignment is Direction.LEFT:
                dc = -left
            else:
                dc = (w - o.width) - left
            if direction is Direction.BOTTOM:
                dr = (h - cursor - o.height) - top
            else:
                dr = cursor - top
            cursor += o.height
        else:
            if alignment is Direction.TOP:
                dr = -top
            else:
                dr = (h - o.height) - top
            if direction is Direction.RIGHT:
                dc = (w - cursor - o.width) - left
            else:
                dc = cursor - left
            cursor += o.width
        out = overlay(out, translate(o, dr, dc))
    return out


def make_canvas(height: int, width: int, color: int) -> Grid:
    if height < 1 or width < 1:
        raise DegenerateResult(f"canvas {height}x{width} would be empty")
    try:
        return Grid.filled(height, width, color)
    except GridBoundsViolation:
        raise
    except Exception as e:  # pragma: no cover
        raise DegenerateResult(str(e)) from e


def recolor_map(g: Grid, mapping: dict[int, int]) -> Grid:
    """Cell-wise color substitution; unmapped values pass through."""
    return Grid(tuple(tuple(mapping.get(v, v) for v in row) for row in g.cells))
