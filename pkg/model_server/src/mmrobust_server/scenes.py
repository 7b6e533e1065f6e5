"""Synthetic scene convention shared by the renderer and the blob detector.

An object name hashes to a (color, shape) signature; rendering draws that
signature and detection inverts it, so the detector is open-vocabulary over
any prompt without any learned weights. The convention exists to drive the
missing-object-rate pipeline end to end in self-contained environments.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["COLORS", "SHAPES", "object_signature", "draw_scene"]

COLORS = (
    (220, 40, 40),    # red
    (40, 170, 60),    # green
    (50, 80, 220),    # blue
    (230, 180, 30),   # yellow
    (170, 60, 190),   # purple
    (40, 190, 190),   # teal
    (240, 120, 30),   # orange
    (150, 90, 40),    # brown
)

SHAPES = ("circle", "square", "triangle")

BACKGROUND = 235


def object_signature(name: str) -> tuple:
    digest = hashlib.md5(name.strip().lower().encode("utf-8")).digest()
    return digest[0] % len(COLORS), digest[1] % len(SHAPES)


def _paint(canvas, mask, color):
    for c in range(3):
        canvas[:, :, c][mask] = color[c]


def draw_scene(object_names, size: int = 128, seed: int = 0) -> np.ndarray:
    """Render the named objects into a grid of colored shapes."""
    rng = np.random.default_rng(seed)
    canvas = np.full((size, size, 3), BACKGROUND, np.uint8)
    noise = rng.integers(-4, 5, size=(size, size, 1))
    canvas = np.clip(canvas.astype(int) + noise, 0, 255).astype(np.uint8)

    names = list(object_names)
    if not names:
        return canvas
    cells = int(np.ceil(np.sqrt(len(names))))
    cell = size // cells
    yy, xx = np.mgrid[0:size, 0:size]
    for index, name in enumerate(names):
        color_idx, shape_idx = object_signature(name)
        color = COLORS[color_idx]
        row, col = divmod(index, cells)
        cy = row * cell + cell // 2
        cx = col * cell + cell // 2
        radius = max(4, int(cell * 0.32))
        if SHAPES[shape_idx] == "circle":
            mask = (yy - cy) ** 2 + (xx - cx) ** 2 <= radius ** 2
        elif SHAPES[shape_idx] == "square":
            mask = (np.abs(yy - cy) <= radius) & (np.abs(xx - cx) <= radius)
        else:  # triangle (upward)
            dy = yy - (cy - radius)
            mask = (dy >= 0) & (dy <= 2 * radius) & \
                (np.abs(xx - cx) <= dy / 2.0)
        _paint(canvas, mask, color)
    return canvas
