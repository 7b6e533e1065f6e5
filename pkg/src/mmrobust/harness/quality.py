"""Image-quality audit: mean SSIM between originals and every materialized
(method, severity) image set, in the severity-rows-by-method-columns layout."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import DataError, DimensionMismatchError
from ..metrics import ssim

__all__ = ["audit_ssim", "format_ssim_table"]


def _load(path) -> np.ndarray:
    return np.asarray(Image.open(path).convert("RGB"))


def audit_ssim(original_dir, perturbed_tree) -> dict:
    """Returns {"table": {method: {severity: mean_ssim}}, "skipped": int}.

    Pairs are matched by the image id encoded in the output filename; pairs
    with mismatched dimensions are skipped and counted.
    """
    original_dir = Path(original_dir)
    perturbed_tree = Path(perturbed_tree)
    originals = {
        p.stem: p for p in sorted(original_dir.iterdir())
        if p.suffix.lower() in (".png", ".jpg", ".jpeg")
    }
    if not originals:
        raise DataError(f"no original images under {original_dir}")

    table = {}
    skipped = 0
    for method_dir in sorted(p for p in perturbed_tree.iterdir() if p.is_dir()):
        severities = {}
        for sev_dir in sorted(method_dir.iterdir()):
            if not sev_dir.is_dir() or not sev_dir.name.startswith("s"):
                continue
            scores = []
            for path in sorted(sev_dir.glob("*.png")):
                image_id = path.stem.split("__")[0]
                original = originals.get(image_id)
                if original is None:
                    continue
                try:
                    scores.append(ssim(_load(original), _load(path)))
                except DimensionMismatchError:
                    skipped += 1
            if scores:
                severities[int(sev_dir.name[1:])] = float(np.mean(scores))
        if severities:
            table[method_dir.name] = severities
    if not table:
        raise DataError(f"no perturbed images under {perturbed_tree}")
    return {"table": table, "skipped": skipped}


def format_ssim_table(audit: dict) -> str:
    """Severity rows x method columns, matching the quality-table layout."""
    table = audit["table"]
    methods = sorted(table)
    severities = sorted({s for per in table.values() for s in per})
    header = "severity," + ",".join(methods)
    lines = [header]
    for s in severities:
        cells = [f"{table[m].get(s, float('nan')):.4f}" for m in methods]
        lines.append(f"{s}," + ",".join(cells))
    return "\n".join(lines) + "\n"
