"""Sentence embedding backends.

The self-contained ``char-ngram`` backend hashes word unigrams plus character
3- and 4-grams into a fixed 768-dimensional L2-normalized vector. Character
n-grams make the similarity robust to small typos while word features keep it
sensitive to substituted content words, which is what the fidelity gate
needs. The ``neural`` backend wraps sentence-transformers when the configured
model is loadable.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .config import CapabilityStartupError

_BLOCK = 256  # per-feature-family block size; total dim = 3 * _BLOCK
DIM = 3 * _BLOCK


def _tokens(text):
    word = []
    for ch in text.lower():
        if ch.isalnum():
            word.append(ch)
        elif word:
            yield "".join(word)
            word = []
    if word:
        yield "".join(word)


def _bucket(feature: str) -> int:
    digest = hashlib.md5(feature.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little") % _BLOCK


class CharNgramEmbedder:
    dim = DIM

    def embed_one(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim)
        seen = False
        for token in _tokens(text):
            seen = True
            vec[_bucket("w:" + token)] += 1.0
            padded = f"^{token}$"
            for n, offset in ((3, _BLOCK), (4, 2 * _BLOCK)):
                for i in range(max(1, len(padded) - n + 1)):
                    gram = padded[i:i + n]
                    vec[offset + _bucket(f"{n}:{gram}")] += 1.0
        if not seen:
            vec[0] = 1.0
        return vec / np.linalg.norm(vec)

    def embed(self, texts) -> list:
        return [self.embed_one(t) for t in texts]


class NeuralEmbedder:
    def __init__(self, model_id: str, device: str = "cpu"):
        try:
            from sentence_transformers import SentenceTransformer

            self._model = SentenceTransformer(model_id, device=device)
            self.dim = int(self._model.get_sentence_embedding_dimension())
        except Exception as exc:
            raise CapabilityStartupError("embed", f"cannot load {model_id!r}: {exc}")

    def embed(self, texts) -> list:
        vectors = self._model.encode(list(texts), normalize_embeddings=True)
        return [np.asarray(v, dtype=np.float64) for v in vectors]


def build_embedder(backend: str, model_id: str | None, device: str):
    if backend == "char-ngram":
        return CharNgramEmbedder()
    if backend == "neural":
        return NeuralEmbedder(model_id or "paraphrase-mpnet-base-v2", device)
    raise CapabilityStartupError("embed", f"unknown backend {backend!r}")
