"""Deterministic random sampling utilities.

All randomness flows through RngStream, a thin wrapper around the
Mersenne Twister with SHA-256 seed derivation for child streams. The
same seed and derivation labels produce the same draw sequence on any
platform, which is what makes sampled datasets byte-reproducible.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

from .errors import BudgetExhausted, InsufficientPalette
from .grid import Color
from .objects import Connectivity, GridObject

# Stamped into dataset manifests so a reader knows how draws were made.
PRNG_ALGORITHM = "mt19937/sha256-derive/v1"

DEFAULT_RETRY_BUDGET = 1000
PER_GRID_BUDGET = 200

T = TypeVar("T")


def derive_seed(*parts: object) -> int:
    """64-bit seed from hashing the textual form of the parts."""
    text = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class RngStream:
    """Seeded random stream with deterministic child derivation."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._rng = random.Random(self.seed)

    def derive(self, *labels: object) -> RngStream:
        """Independent child stream; same labels always give the same child."""
        return RngStream(derive_seed(self.seed, *labels))

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], inclusive."""
        return self._rng.randint(lo, hi)

    def random(self) -> float:
        return self._rng.random()

    def choice(self, seq: Sequence[T]) -> T:
        return self._rng.choice(seq)

    def sample(self, seq: Sequence[T], k: int) -> list[T]:
        """k distinct elements, order randomized."""
        return self._rng.sample(list(seq), k)

    def shuffle(self, seq: Sequence[T]) -> list[T]:
        out = list(seq)
        self._rng.shuffle(out)
        return out


def retry(
    rng: RngStream,
    sample: Callable[[RngStream], T],
    accept: Callable[[T], bool],
    max_attempts: int = DEFAULT_RETRY_BUDGET,
) -> T:
    """Draw candidates until one is accepted.

    The stream advances once per attempt, so a retried pipeline stays
    deterministic. Raises BudgetExhausted when no candidate passes.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be at least 1")
    for _ in range(max_attempts):
        candidate = sample(rng)
        if accept(candidate):
            return candidate
    raise BudgetExhausted(f"no accepted candidate in {max_attempts} attempts", max_attempts)


@dataclass(frozen=True)
class ExtentConstraint:
    """Cell-count range and bounding-box cap for synthesized objects."""

    min_size: int
    max_size: int
    max_bbox: tuple[int, int]


def synthesize_contiguous_object(
    rng: RngStream,
    connectivity: Connectivity,
    extent: ExtentConstraint,
    color: int,
) -> GridObject:
    """Grow a random connected blob of one color, anchored at (0, 0).

    Growth adds uniformly chosen frontier cells and rejects any step that
    would push the bounding box past the cap. The result is connected
    under the requested connectivity by construction.
    """
    max_h, max_w = extent.max_bbox
    if extent.min_size < 1 or extent.min_size > extent.max_size:
        raise ValueError("size range is empty")
    if extent.min_size > max_h * max_w:
        raise ValueError("min_size cannot fit in max_bbox")

    def grow(r: RngStream) -> set[tuple[int, int]] | None:
        target = r.randint(extent.min_size, extent.max_size)
        cells = {(0, 0)}
        while len(cells) < target:
            frontier = set()
            for cr, cc in cells:
                for dr, dc in connectivity.offsets:
                    nxt = (cr + dr, cc + dc)
                    if nxt in cells:
                        continue
                    rows = [x for x, _ in cells] + [nxt[0]]
                    cols = [y for _, y in cells] + [nxt[1]]
                    if max(rows) - min(rows) + 1 > max_h or max(cols) - min(cols) + 1 > max_w:
                        continue
                    frontier.add(nxt)
            if not frontier:
                return None
            cells.add(r.choice(sorted(frontier)))
        return cells

    cells = retry(rng, grow, lambda cs: cs is not None, PER_GRID_BUDGET)
    assert cells is not None
    top = min(r for r, _ in cells)
    left = min(c for _, c in cells)
    return GridObject.from_cells((r - top, c - left, int(color)) for r, c in cells)


def place_non_overlapping(
    rng: RngStream,
    canvas_size: tuple[int, int],
    objects: Sequence[GridObject],
    min_gap: int = 0,
    max_attempts: int = PER_GRID_BUDGET,
) -> list[GridObject]:
    """Drop each object at a random in-bounds offset with no overlaps.

    With min_gap > 0, every pair of cells from different objects must be
    more than min_gap apart in Chebyshev distance. The whole layout is
    retried from scratch on failure.
    """
    h, w = canvas_size

    def attempt(r: RngStream) -> list[GridObject] | None:
        placed: list[GridObject] = []
        occupied: set[tuple[int, int]] = set()
        for o in objects:
            if o.height > h or o.width > w:
                return None
            dr = r.randint(0, h - o.height) - o.top
            dc = r.randint(0, w - o.width) - o.left
            moved = GridObject.from_cells((cr + dr, cc + dc, v) for cr, cc, v in o.cells)
            for cr, cc, _ in moved.cells:
                for gr in range(cr - min_gap, cr + min_gap + 1):
                    for gc in range(cc - min_gap, cc + min_gap + 1):
                        if (gr, gc) in occupied:
                            return None
            occupied.update((cr, cc) for cr, cc, _ in moved.cells)
            placed.append(moved)
        return placed

    result = retry(rng, attempt, lambda p: p is not None, max_attempts)
    assert result is not None
    return result


def random_subset_colors(rng: RngStream, k: int, exclude: frozenset[int] = frozenset()) -> list[Color]:
    """k distinct colors outside the excluded set, in random order."""
    pool = [Color(v) for v in range(10) if v not in exclude]
    if k > len(pool):
        raise InsufficientPalette(f"requested {k} colors, only {len(pool)} available")
    return rng.sample(pool, k)
