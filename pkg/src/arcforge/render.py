"""Static episode rendering: SVG and ANSI block art.

The SVG contains exactly one rectangle per grid cell (labels are text
elements), uses the canonical ten-color palette, and lays the pairs out
left to right with each input above its output.
"""

from __future__ import annotations

from .grid import Episode, Grid

# Hex values follow the de facto web palette for these ten colors.
PALETTE_HEX = (
    "#000000",  # 0 black
    "#0074D9",  # 1 blue
    "#FF4136",  # 2 red
    "#2ECC40",  # 3 green
    "#FFDC00",  # 4 yellow
    "#AAAAAA",  # 5 grey
    "#F012BE",  # 6 magenta
    "#FF851B",  # 7 orange
    "#7FDBFF",  # 8 cyan
    "#870C25",  # 9 maroon
)

_CELL = 14
_GAP = 18
_LABEL_H = 16


def _grid_rects(g: Grid, x0: int, y0: int) -> list[str]:
    rects = []
    for r in range(g.height):
        for c in range(g.width):
            color = PALETTE_HEX[g.cells[r][c]]
            rects.append(
                f'<rect x="{x0 + c * _CELL}" y="{y0 + r * _CELL}" '
                f'width="{_CELL}" height="{_CELL}" fill="{color}" '
                f'stroke="#555555" stroke-width="0.5"/>'
            )
    return rects


def episode_svg(episode: Episode) -> str:
    """Render all pairs side by side; one <rect> per cell, nothing more."""
    columns = [("train", i, p) for i, p in enumerate(episode.train)]
    columns += [("test", i, p) for i, p in enumerate(episode.test)]
    body: list[str] = []
    x = _GAP
    max_bottom = 0
    for split, i, pair in columns:
        width_px = max(pair.input.width, pair.output.width) * _CELL
        y = _GAP + _LABEL_H
        body.append(
            f'<text x="{x}" y="{y - 5}" font-family="monospace" font-size="12" '
            f'fill="#888888">{split} {i + 1}</text>'
        )
        body.extend(_grid_rects(pair.input, x, y))
        y += pair.input.height * _CELL + _GAP
        body.extend(_grid_rects(pair.output, x, y))
        y += pair.output.height * _CELL
        max_bottom = max(max_bottom, y)
        x += width_px + _GAP
    svg_w = x
    svg_h = max_bottom + _GAP
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{svg_w}" height="{svg_h}" '
        f'viewBox="0 0 {svg_w} {svg_h}">'
    )
    return head + "\n" + "\n".join(body) + "\n</svg>\n"


def _hex_to_rgb(h: str) -> tuple[int, int, int]:
    return int(h[1:3], 16), int(h[3:5], 16), int(h[5:7], 16)


def _ansi_grid(g: Grid) -> str:
    lines = []
    for row in g.cells:
        parts = []
        for v in row:
            r, gr, b = _hex_to_rgb(PALETTE_HEX[v])
            parts.append(f"\x1b[48;2;{r};{gr};{b}m  \x1b[0m")
        lines.append("".join(parts))
    return "\n".join(lines)


def episode_ansi(episode: Episode) -> str:
    """Block-art rendering with truecolor backgrounds, one pair after another."""
    sections = []
    for split, pairs in (("train", episode.train), ("test", episode.test)):
        for i, pair in enumerate(pairs):
            sections.append(f"{split} {i + 1} input")
            sections.append(_ansi_grid(pair.input))
            sections.append(f"{split} {i + 1} output")
            sections.append(_ansi_grid(pair.output))
    return "\n".join(sections) + "\n"
