"""mmrobust: multimodal robustness benchmark toolkit.

Materializes severity-laddered image and text perturbation benchmarks over
image-caption datasets, enforces semantic fidelity of perturbed text, and
scores models under distribution shift.
"""

from .core import (
    IMAGE_METHODS,
    TEXT_METHODS,
    CHARACTER_METHODS,
    WORD_METHODS,
    SENTENCE_METHODS,
    PerturbationSpec,
    BenchmarkManifest,
    CaptionRecord,
    build_manifest,
    derive_seed,
)
from .image_perturb import apply_image_perturbation, IMAGE_SEVERITY
from .text_perturb import apply_text_perturbation, perturb_characters, perturb_words
from .fidelity import FidelityConfig, GateOutcome, cosine_similarity, fidelity_gate
from . import metrics
from .services import ServiceBundle

__version__ = "0.1.0"

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
    "apply_image_perturbation",
    "IMAGE_SEVERITY",
    "apply_text_perturbation",
    "perturb_characters",
    "perturb_words",
    "FidelityConfig",
    "GateOutcome",
    "cosine_similarity",
    "fidelity_gate",
    "metrics",
    "ServiceBundle",
]
