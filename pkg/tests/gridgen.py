"""Random-grid builders shared by tests: hypothesis strategies and a plain PRNG maker."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from arcforge.grid import Grid


def grid_strategy(max_side: int = 8, colors: int = 10):
    side = st.integers(min_value=1, max_value=max_side)
    return side.flatmap(
        lambda h: side.flatmap(
            lambda w: st.lists(
                st.lists(st.integers(min_value=0, max_value=colors - 1), min_size=w, max_size=w),
                min_size=h,
                max_size=h,
            ).map(Grid.from_rows)
        )
    )


def random_grid(rng: random.Random, max_side: int = 10, density: float | None = None) -> Grid:
    h = rng.randint(1, max_side)
    w = rng.randint(1, max_side)
    p = rng.uniform(0.1, 0.9) if density is None else density
    rows = [
        [rng.randint(1, 9) if rng.random() < p else 0 for _ in range(w)] for _ in range(h)
    ]
    return Grid.from_rows(rows)
