"""SVG and ANSI rendering: rectangle accounting, palette fidelity, layout."""

from __future__ import annotations

import re

from arcforge.families import GRAVITY
from arcforge.generator import create_task
from arcforge.grid import Color, Episode, Grid, Pair, color_name
from arcforge.render import PALETTE_HEX, episode_ansi, episode_svg


def tiny_episode(n_train: int = 2, n_test: int = 1) -> Episode:
    pairs = [
        Pair(Grid.from_rows([[i % 10]]), Grid.from_rows([[(i + 1) % 10]]))
        for i in range(n_train + n_test)
    ]
    return Episode(tuple(pairs[:n_train]), tuple(pairs[n_train:]))


def test_svg_has_exactly_one_rect_per_cell():
    episode = tiny_episode(3, 1)  # 1x1 grids: 2 rects per pair
    svg = episode_svg(episode)
    assert svg.count("<rect") == 2 * 4
    sample = create_task(GRAVITY, 0)
    cells = sum(
        p.input.height * p.input.width + p.output.height * p.output.width
        for p in sample.episode.all_pairs()
    )
    assert episode_svg(sample.episode).count("<rect") == cells


def test_svg_is_well_formed_and_labeled():
    svg = episode_svg(tiny_episode(2, 1))
    assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg"')
    assert svg.rstrip().endswith("</svg>")
    labels = re.findall(r">([a-z]+ \d+)</text>", svg)
    assert labels == ["train 1", "train 2", "test 1"]


def test_svg_uses_palette_hex_values():
    grid = Grid.from_rows([list(range(10))])
    svg = episode_svg(Episode((Pair(grid, grid),), (Pair(grid, grid),)))
    for hexval in PALETTE_HEX:
        assert f'fill="{hexval}"' in svg
    fills = set(re.findall(r'<rect[^>]*fill="(#[0-9A-F]{6})"', svg))
    assert fills == set(PALETTE_HEX)


def test_palette_order_matches_color_names():
    named = {
        "black": "#000000",
        "blue": "#0074D9",
        "red": "#FF4136",
        "green": "#2ECC40",
        "yellow": "#FFDC00",
        "grey": "#AAAAAA",
        "magenta": "#F012BE",
        "orange": "#FF851B",
        "cyan": "#7FDBFF",
        "maroon": "#870C25",
    }
    assert len(PALETTE_HEX) == 10
    for v in range(10):
        assert PALETTE_HEX[v] == named[color_name(v)]
        assert Color(v).display_name == color_name(v)


def test_ansi_truecolor_escapes():
    grid = Grid.from_rows([[2, 0]])
    text = episode_ansi(Episode((Pair(grid, grid),), (Pair(grid, grid),)))
    assert "\x1b[48;2;255;65;54m  \x1b[0m" in text  # red cell
    assert "\x1b[48;2;0;0;0m  \x1b[0m" in text  # black cell
    assert text.count("\x1b[48;2;") == 4 * 2  # four grids, two cells each
    assert "train 1 input" in text and "test 1 output" in text


def test_ansi_line_count():
    episode = tiny_episode(1, 1)
    lines = episode_ansi(episode).splitlines()
    # per pair: input label, 1 grid row, output label, 1 grid row
    assert len(lines) == 2 * 4
