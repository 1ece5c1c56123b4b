"""Minimal orthographic voxel renderer for resemblance checks.

Three fixed axis-aligned views (front, side, top) drawn back-to-front
with depth shading. Deliberately small: the verification providers only
need a recognizable silhouette, not a physically based render.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image, ImageDraw

from .voxel import VoxelGrid

_PANEL = 220
_PAD = 12
_BG = (245, 245, 245)
# base fill per view; shaded darker with depth
_VIEW_COLORS = ((70, 110, 180), (90, 150, 100), (170, 120, 70))


def _draw_view(draw: ImageDraw.ImageDraw, grid: VoxelGrid, view: int, x0: int, y0: int) -> None:
    """view 0: front (x up-axis z), 1: side (y/z), 2: top (x/y)."""
    dims = grid.dims
    if view == 0:
        u_dim, v_dim, depth_dim = dims[0], dims[2], dims[1]
        project = lambda c: (c[0], c[2], c[1])
    elif view == 1:
        u_dim, v_dim, depth_dim = dims[1], dims[2], dims[0]
        project = lambda c: (c[1], c[2], dims[0] - 1 - c[0])
    else:
        u_dim, v_dim, depth_dim = dims[0], dims[1], dims[2]
        project = lambda c: (c[0], c[1], c[2])

    scale = max(1, min((_PANEL - 2 * _PAD) // max(u_dim, 1), (_PANEL - 2 * _PAD) // max(v_dim, 1)))
    ox = x0 + (_PANEL - u_dim * scale) // 2
    oy = y0 + (_PANEL - v_dim * scale) // 2

    base = _VIEW_COLORS[view]
    cells = sorted(grid.occupied, key=lambda c: project(c)[2])  # far first
    for cell in cells:
        u, v, d = project(cell)
        shade = 0.55 + 0.45 * ((d + 1) / max(depth_dim, 1))
        color = tuple(min(255, int(ch * shade)) for ch in base)
        px = ox + u * scale
        py = oy + (v_dim - 1 - v) * scale
        draw.rectangle([px, py, px + scale - 1, py + scale - 1], fill=color, outline=(30, 30, 30))


def render_grid(grid: VoxelGrid) -> bytes:
    """PNG with front, side, and top orthographic views side by side."""
    width = 3 * _PANEL + 4 * _PAD
    height = _PANEL + 2 * _PAD
    image = Image.new("RGB", (width, height), _BG)
    draw = ImageDraw.Draw(image)
    for view in range(3):
        x0 = _PAD + view * (_PANEL + _PAD)
        draw.rectangle([x0, _PAD, x0 + _PANEL - 1, _PAD + _PANEL - 1], fill=(255, 255, 255),
                       outline=(180, 180, 180))
        _draw_view(draw, grid, view, x0, _PAD)
    buf = io.BytesIO()
    image.save(buf, format="PNG")
    return buf.getvalue()
