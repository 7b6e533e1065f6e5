"""Semantic fidelity gate: accept a perturbed caption only if its embedding
similarity to the original clears the tolerance threshold, retrying up to the
cap, otherwise drop the sample from the benchmark.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ZeroVectorError
from .text_perturb import IdentityFallback

__all__ = ["FidelityConfig", "GateOutcome", "cosine_similarity", "fidelity_gate"]


@dataclass(frozen=True)
class FidelityConfig:
    """Tolerance threshold and retry cap of the gate.

    The benchmark convention fixes the retry cap at 100; the threshold default
    of 0.75 is a configurable convention (no canonical value exists).
    """

    alpha0: float = 0.75
    n_max: int = 100

    def __post_init__(self):
        if not 0.0 < self.alpha0 <= 1.0:
            raise ValueError("alpha0 must be in (0, 1]")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")


@dataclass(frozen=True)
class GateOutcome:
    """Result of gating one sample: accepted text with its score, or a drop."""

    status: str  # "accepted" | "dropped"
    text: str | None
    score: float | None
    attempts: int
    flagged_identity: bool = False

    @property
    def accepted(self) -> bool:
        return self.status == "accepted"


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"vector shapes differ: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError("cosine similarity undefined for zero vectors")
    return float(np.dot(a, b) / (na * nb))


def fidelity_gate(original, generator, embedder, cfg: FidelityConfig | None = None,
                  cache: dict | None = None) -> GateOutcome:
    """Loop fresh candidates from ``generator`` until one clears alpha0.

    The generator may return an :class:`IdentityFallback` marker to signal that
    the sample cannot actually be perturbed; the gate passes it through as
    accepted with score 1.0. The original's embedding is cached (optionally in
    a shared per-run ``cache``) so each retry costs one embedding call.
    """
    cfg = cfg or FidelityConfig()
    if cache is not None and original in cache:
        original_vec = cache[original]
    else:
        original_vec = np.asarray(embedder.embed([original])[0], dtype=np.float64)
        if cache is not None:
            cache[original] = original_vec

    for attempt in range(1, cfg.n_max + 1):
        candidate = generator()
        if isinstance(candidate, IdentityFallback):
            return GateOutcome("accepted", candidate.text, 1.0, attempt, flagged_identity=True)
        candidate_vec = np.asarray(embedder.embed([candidate])[0], dtype=np.float64)
        score = cosine_similarity(original_vec, candidate_vec)
        if score >= cfg.alpha0 and math.isfinite(score):
            return GateOutcome("accepted", candidate, score, attempt)
    return GateOutcome("dropped", None, None, cfg.n_max)
