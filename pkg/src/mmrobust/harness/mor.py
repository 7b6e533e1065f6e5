"""Missing Object Rate pipeline.

For every image the detector is prompted with that image's ground-truth
object names; an object counts as generated when at least one detection of
its label clears the confidence threshold. Per method,
MOR = 100 * (N_P - N_GT) / N_GT over the summed counts, and the GT column is
pinned at 0.00 by construction.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import DataError, MissingLabelsError
from ..metrics import mor

__all__ = ["mor_pipeline", "count_detected_objects"]

PROMPT_SEPARATOR = ". "


def _load_image(path) -> np.ndarray:
    return np.asarray(Image.open(path).convert("RGB"))


def _image_files(directory) -> dict:
    files = {}
    for path in sorted(Path(directory).iterdir()):
        if path.suffix.lower() in (".png", ".jpg", ".jpeg"):
            files[path.stem.split("__")[0]] = path
    if not files:
        raise DataError(f"no images under {directory}")
    return files


def count_detected_objects(image, labels, detector, threshold) -> int:
    """Distinct ground-truth labels with at least one detection >= threshold."""
    prompt = PROMPT_SEPARATOR.join(labels)
    detections = detector.detect(image, prompt, threshold)
    wanted = {label.lower() for label in labels}
    return len({d.label.lower() for d in detections if d.label.lower() in wanted})


def mor_pipeline(gt_images_dir, perturbed_images_dirs, gt_object_labels,
                 detector, thresholds=(0.7, 0.5)) -> dict:
    """MOR table: {threshold: {"GT": 0.0, method: mor_percent}}.

    ``perturbed_images_dirs`` maps method name -> directory of images generated
    from that method's perturbed captions; ``gt_object_labels`` maps
    image_id -> list of object names.
    """
    gt_files = _image_files(gt_images_dir)
    for image_id in gt_files:
        if image_id not in gt_object_labels:
            raise MissingLabelsError(f"no object labels for image {image_id!r}")

    table = {}
    for threshold in thresholds:
        n_gt = 0
        for image_id, path in gt_files.items():
            n_gt += count_detected_objects(
                _load_image(path), gt_object_labels[image_id], detector, threshold
            )
        if n_gt < 1:
            raise DataError(
                f"no ground-truth detections at threshold {threshold}; MOR undefined"
            )
        row = {"GT": mor(n_gt, n_gt)}
        for method, directory in perturbed_images_dirs.items():
            files = _image_files(directory)
            n_p = 0
            for image_id, path in files.items():
                if image_id not in gt_object_labels:
                    raise MissingLabelsError(f"no object labels for image {image_id!r}")
                n_p += count_detected_objects(
                    _load_image(path), gt_object_labels[image_id], detector, threshold
                )
            row[method] = mor(n_gt, n_p)
        table[threshold] = row
    return table
