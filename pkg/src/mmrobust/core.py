"""Core domain types, benchmark manifests, and the deterministic seeding contract.

Image payload conventions used throughout the package:

* ``Rgb8Image`` -- an ``(H, W, 3)`` ``uint8`` numpy array (row-major RGB).
* ``FloatImage`` -- an ``(H, W, 3)`` ``float64`` array with values in [0, 1].

All perturbations compute in normalized float and convert at the boundaries
(:func:`to_float` / :func:`to_uint8`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "IMAGE_METHODS",
    "TEXT_METHODS",
    "CHARACTER_METHODS",
    "WORD_METHODS",
    "SENTENCE_METHODS",
    "PerturbationSpec",
    "BenchmarkManifest",
    "CaptionRecord",
    "build_manifest",
    "derive_seed",
    "severity_levels",
    "to_float",
    "to_uint8",
    "require_rgb8",
]

# Category order follows the benchmark tables: noise, blur, weather, digital, stylize.
IMAGE_METHODS = (
    "gaussian_noise",
    "shot_noise",
    "impulse_noise",
    "speckle_noise",
    "defocus_blur",
    "glass_blur",
    "motion_blur",
    "zoom_blur",
    "snow",
    "frost",
    "fog",
    "brightness",
    "contrast",
    "elastic",
    "pixelate",
    "jpeg_compression",
    "stylize",
)

CHARACTER_METHODS = (
    "keyboard",
    "ocr",
    "character_insert",
    "character_replace",
    "character_swap",
    "character_delete",
)

WORD_METHODS = (
    "synonym_replace",
    "word_insert",
    "word_swap",
    "word_delete",
    "insert_punctuation",
)

SENTENCE_METHODS = (
    "formal",
    "casual",
    "passive",
    "active",
    "back_translate",
)

TEXT_METHODS = CHARACTER_METHODS + WORD_METHODS + SENTENCE_METHODS


def severity_levels(modality: str, method: str) -> range:
    """Severity ladder for a method: 1..5, except sentence-level text (single level)."""
    if modality == "image":
        if method not in IMAGE_METHODS:
            raise ValueError(f"unknown image method: {method!r}")
        return range(1, 6)
    if modality == "text":
        if method in SENTENCE_METHODS:
            return range(1, 2)
        if method in CHARACTER_METHODS or method in WORD_METHODS:
            return range(1, 6)
        raise ValueError(f"unknown text method: {method!r}")
    raise ValueError(f"unknown modality: {modality!r}")


@dataclass(frozen=True)
class PerturbationSpec:
    """A (modality, method, severity) triple -- one entry of a benchmark manifest."""

    modality: str
    method: str
    severity: int

    def __post_init__(self):
        levels = severity_levels(self.modality, self.method)
        if self.severity not in levels:
            raise ValueError(
                f"severity {self.severity} out of range {levels.start}..{levels.stop - 1} "
                f"for {self.modality}/{self.method}"
            )

    def to_dict(self) -> dict:
        return {"modality": self.modality, "method": self.method, "severity": self.severity}

    @classmethod
    def from_dict(cls, d: dict) -> "PerturbationSpec":
        return cls(modality=d["modality"], method=d["method"], severity=int(d["severity"]))


@dataclass(frozen=True)
class CaptionRecord:
    """One caption of one image; (image_id, caption_index) is unique within a dataset."""

    image_id: str
    caption_index: int
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("caption text must be nonempty")
        if self.caption_index < 0:
            raise ValueError("caption_index must be >= 0")

    @property
    def sample_key(self) -> str:
        return f"{self.image_id}#{self.caption_index}"


@dataclass(frozen=True)
class BenchmarkManifest:
    """The full set of perturbation specs to materialize for one dataset."""

    dataset_id: str
    global_seed: int
    entries: tuple = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> str:
        return json.dumps(
            {
                "dataset_id": self.dataset_id,
                "global_seed": self.global_seed,
                "entries": [e.to_dict() for e in self.entries],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "BenchmarkManifest":
        d = json.loads(text)
        return cls(
            dataset_id=d["dataset_id"],
            global_seed=int(d["global_seed"]),
            entries=tuple(PerturbationSpec.from_dict(e) for e in d["entries"]),
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "BenchmarkManifest":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def build_manifest(modality: str, global_seed: int, dataset_id: str = "") -> BenchmarkManifest:
    """Cross product of methods x severities for a modality, in table order.

    Image manifests always have 17 x 5 = 85 entries; text manifests
    6*5 + 5*5 + 5*1 = 60. Entry order is category order, severity ascending,
    and does not depend on the seed.
    """
    if modality == "image":
        methods = IMAGE_METHODS
    elif modality == "text":
        methods = TEXT_METHODS
    else:
        raise ValueError(f"unknown modality: {modality!r}")
    entries = tuple(
        PerturbationSpec(modality, m, s) for m in methods for s in severity_levels(modality, m)
    )
    return BenchmarkManifest(dataset_id=dataset_id, global_seed=int(global_seed), entries=entries)


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def _fnv1a(data: bytes, h: int = _FNV_OFFSET) -> int:
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def derive_seed(global_seed: int, sample_key: str, spec: PerturbationSpec) -> int:
    """Per-sample 64-bit seed: FNV-1a over a canonical encoding of the inputs.

    Stable across runs and platforms; any field change changes the seed.
    """
    payload = b"\x00".join(
        [
            (global_seed & _MASK64).to_bytes(8, "little"),
            sample_key.encode("utf-8"),
            spec.modality.encode("utf-8"),
            spec.method.encode("utf-8"),
            spec.severity.to_bytes(2, "little"),
        ]
    )
    return _fnv1a(payload)


def to_float(img: np.ndarray) -> np.ndarray:
    """uint8 RGB -> float64 in [0, 1]."""
    require_rgb8(img)
    return img.astype(np.float64) / 255.0


def to_uint8(img: np.ndarray) -> np.ndarray:
    """float image -> uint8, clamping to [0, 1] first."""
    return (np.clip(img, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def require_rgb8(img: np.ndarray) -> np.ndarray:
    if not isinstance(img, np.ndarray) or img.ndim != 3 or img.shape[2] != 3:
        raise ValueError("expected an (H, W, 3) RGB array")
    if img.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {img.dtype}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError("image must be at least 1x1")
    return img
