"""Stylization backend: adaptive instance normalization on the color channels.

Each bundled style carries target per-channel statistics; the input's channel
statistics are renormalized to the style's and the result is blended with the
original using the severity-mapped interpolation weight {0.2, 0.4, 0.6, 0.8,
1.0}. The style is chosen from the image content hash so results are
deterministic per (image, severity).
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["ColorAdainStylizer", "STYLE_PALETTES"]

# (name, per-channel mean, per-channel std), loosely after classic palettes
STYLE_PALETTES = (
    ("night", (0.18, 0.22, 0.38), (0.14, 0.15, 0.22)),
    ("autumn", (0.55, 0.38, 0.22), (0.24, 0.20, 0.14)),
    ("fresco", (0.62, 0.55, 0.45), (0.16, 0.16, 0.18)),
    ("verdure", (0.30, 0.48, 0.32), (0.18, 0.24, 0.16)),
    ("maritime", (0.40, 0.52, 0.62), (0.20, 0.22, 0.26)),
)


class ColorAdainStylizer:
    def stylize(self, image: np.ndarray, severity: int) -> np.ndarray:
        if severity not in (1, 2, 3, 4, 5):
            raise ValueError(f"severity must be in 1..5, got {severity}")
        img = np.asarray(image)
        x = img.astype(np.float64) / 255.0
        index = hashlib.md5(img.tobytes()).digest()[0] % len(STYLE_PALETTES)
        _, target_mean, target_std = STYLE_PALETTES[index]
        mean = x.mean(axis=(0, 1))
        std = x.std(axis=(0, 1))
        std = np.where(std < 1e-6, 1.0, std)
        normalized = (x - mean[None, None, :]) / std[None, None, :]
        styled = normalized * np.asarray(target_std)[None, None, :] \
            + np.asarray(target_mean)[None, None, :]
        weight = severity / 5.0
        out = (1.0 - weight) * x + weight * styled
        return (np.clip(out, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
