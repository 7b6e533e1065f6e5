"""Caption dataset ingestion.

Captions live in JSON lines files, one object per line:
``{"image_id": str, "caption_index": int, "text": str}``. Image files are
``<image_id>.png`` or ``<image_id>.jpg`` inside the images directory. A small
importer converts COCO-style annotation JSON into this format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..core import CaptionRecord
from ..errors import MalformedCaptionsError, MissingImageError

__all__ = ["CaptionDataset", "load_caption_dataset", "write_captions", "import_coco_annotations"]

_IMAGE_EXTS = (".png", ".jpg", ".jpeg")


@dataclass(frozen=True)
class CaptionDataset:
    records: tuple  # CaptionRecord, sorted by (image_id, caption_index)
    image_paths: dict  # image_id -> Path

    @property
    def image_ids(self) -> tuple:
        return tuple(sorted(self.image_paths))

    def captions_for(self, image_id: str) -> tuple:
        return tuple(r for r in self.records if r.image_id == image_id)

    def load_image(self, image_id: str) -> np.ndarray:
        path = self.image_paths.get(image_id)
        if path is None:
            raise MissingImageError(f"unknown image id {image_id!r}")
        return np.asarray(Image.open(path).convert("RGB"))


def _parse_caption_line(line: str, lineno: int) -> CaptionRecord:
    try:
        obj = json.loads(line)
        return CaptionRecord(
            image_id=str(obj["image_id"]),
            caption_index=int(obj["caption_index"]),
            text=str(obj["text"]),
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise MalformedCaptionsError(f"captions line {lineno}: {exc}") from exc


def load_caption_dataset(images_dir, captions_file) -> CaptionDataset:
    """Read captions and resolve every referenced image file."""
    images_dir = Path(images_dir)
    captions_file = Path(captions_file)
    if not captions_file.is_file():
        raise MalformedCaptionsError(f"captions file not found: {captions_file}")

    records = []
    seen = set()
    for lineno, line in enumerate(captions_file.read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        record = _parse_caption_line(line, lineno)
        key = (record.image_id, record.caption_index)
        if key in seen:
            raise MalformedCaptionsError(f"duplicate caption key {key}")
        seen.add(key)
        records.append(record)

    image_paths = {}
    for record in records:
        if record.image_id in image_paths:
            continue
        for ext in _IMAGE_EXTS:
            candidate = images_dir / f"{record.image_id}{ext}"
            if candidate.is_file():
                image_paths[record.image_id] = candidate
                break
        else:
            raise MissingImageError(
                f"no image file for id {record.image_id!r} under {images_dir}"
            )

    records.sort(key=lambda r: (r.image_id, r.caption_index))
    return CaptionDataset(records=tuple(records), image_paths=image_paths)


def write_captions(records, path) -> None:
    lines = [
        json.dumps(
            {"image_id": r.image_id, "caption_index": r.caption_index, "text": r.text}
        )
        for r in records
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def import_coco_annotations(annotations_file, out_captions_file) -> int:
    """Convert a COCO captions annotation JSON to the JSONL format; returns
    the number of records written. Caption order within an image follows the
    annotation file."""
    try:
        payload = json.loads(Path(annotations_file).read_text("utf-8"))
        annotations = payload["annotations"]
    except (ValueError, KeyError) as exc:
        raise MalformedCaptionsError(f"bad COCO annotations: {exc}") from exc
    counters = {}
    records = []
    for ann in annotations:
        try:
            image_id = str(ann["image_id"])
            text = str(ann["caption"]).strip()
        except (KeyError, TypeError) as exc:
            raise MalformedCaptionsError(f"bad COCO annotation entry: {exc}") from exc
        if not text:
            continue
        index = counters.get(image_id, 0)
        counters[image_id] = index + 1
        records.append(CaptionRecord(image_id=image_id, caption_index=index, text=text))
    write_captions(records, out_captions_file)
    return len(records)
