"""Language-guided detection over the synthetic scene convention.

For each prompted object name the detector segments pixels near the name's
signature color, labels connected components, and scores each blob by how
well its geometry matches the signature shape. Only detections clearing the
request threshold are returned, and labels always come from the prompt
vocabulary.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .scenes import COLORS, SHAPES, object_signature

__all__ = ["ShapeBlobDetector", "parse_prompt"]

_COLOR_TOLERANCE = 60.0
_MIN_AREA = 16


def parse_prompt(prompt: str) -> list:
    names = prompt.replace(",", ".").split(".")
    return [n.strip() for n in names if n.strip()]


def _shape_score(mask, shape: str) -> float:
    ys, xs = np.nonzero(mask)
    height = ys.max() - ys.min() + 1
    width = xs.max() - xs.min() + 1
    area = float(mask.sum())
    fill = area / (height * width)
    aspect = min(height, width) / max(height, width)
    expected_fill = {"circle": np.pi / 4.0, "square": 1.0, "triangle": 0.5}[shape]
    fill_score = max(0.0, 1.0 - abs(fill - expected_fill) / expected_fill)
    return float(np.clip(0.75 * fill_score + 0.25 * aspect, 0.0, 1.0))


class ShapeBlobDetector:
    def detect(self, image: np.ndarray, prompt: str, threshold: float) -> list:
        names = parse_prompt(prompt)
        if not names:
            raise ValueError("detection prompt must be nonempty")
        if not 0.0 < threshold < 1.0:
            raise ValueError("detection threshold must be in (0, 1)")
        img = np.asarray(image, dtype=np.float64)
        detections = []
        for name in names:
            color_idx, shape_idx = object_signature(name)
            color = np.array(COLORS[color_idx], dtype=np.float64)
            distance = np.sqrt(((img - color[None, None, :]) ** 2).sum(axis=2))
            candidate = distance < _COLOR_TOLERANCE
            if not candidate.any():
                continue
            labeled, count = ndimage.label(candidate)
            for blob_id in range(1, count + 1):
                mask = labeled == blob_id
                if mask.sum() < _MIN_AREA:
                    continue
                score = _shape_score(mask, SHAPES[shape_idx])
                if score < threshold:
                    continue
                ys, xs = np.nonzero(mask)
                bbox = (int(xs.min()), int(ys.min()),
                        int(xs.max() - xs.min() + 1), int(ys.max() - ys.min() + 1))
                detections.append({
                    "label": name, "score": round(score, 4), "bbox": list(bbox),
                })
        return detections
