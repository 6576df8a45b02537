"""Minimal SVG rendering of per-state values on a maze grid.

Cells below a display threshold are left blank, the rest shade linearly
from white to red between the threshold and the maximum value. Walls are
dark, start and goal lettered.
"""

from __future__ import annotations

import numpy as np

from .maze import GridMaze

__all__ = ["render_heatmap_svg"]

_WALL = "#3a3a3a"
_HI = (215, 48, 39)  # saturated end of the ramp
_LO = (255, 255, 255)


def _ramp(frac: float) -> str:
    r, g, b = (round(l + (h - l) * frac) for l, h in zip(_LO, _HI))
    return f"#{r:02x}{g:02x}{b:02x}"


def render_heatmap_svg(maze: GridMaze, values, threshold: float = 0.005,
                       cell: int = 24) -> str:
    """SVG heatmap of one value per open state (row-major state order)."""
    values = np.asarray(values, dtype=float)
    if values.shape != (maze.n_open,):
        raise ValueError("need exactly one value per open cell")
    vmax = float(values.max()) if values.size else 0.0
    span = vmax - threshold
    ids = maze.state_ids()
    w, h = maze.width * cell, maze.height * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]
    for r in range(maze.height):
        for c in range(maze.width):
            x, y = c * cell, r * cell
            if maze.walls[r, c]:
                fill, title = _WALL, None
            else:
                v = float(values[ids[r, c]])
                title = f"state {ids[r, c]} ({r},{c}): {v:.6g}"
                if v < threshold:
                    fill = "white"
                else:
                    frac = 1.0 if span <= 0 else (v - threshold) / span
                    fill = _ramp(min(max(frac, 0.0), 1.0))
            rect = (f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                    f'fill="{fill}" stroke="#b0b0b0" stroke-width="0.5"')
            parts.append(f"{rect}><title>{title}</title></rect>" if title
                         else f"{rect}/>")
    for label, (r, c) in (("S", maze.start), ("G", maze.goal)):
        parts.append(
            f'<text x="{c * cell + cell // 2}" y="{r * cell + cell // 2 + 5}" '
            f'font-family="sans-serif" font-size="{cell // 2}" '
            f'text-anchor="middle" fill="#1a1a1a">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
