"""Clients and deterministic stubs for the four neural capabilities the
pipeline consumes: text embedding, language-guided object detection, text
style transform, and image stylization.

Wire protocol (HTTP/JSON, UTF-8, all POST):

    /v1/embed     {"texts": [s, ...]}                             -> {"dim": int, "vectors": [[f, ...], ...]}
    /v1/detect    {"image_png_b64": s, "prompt": s, "threshold": f} -> {"detections": [{"label": s, "score": f, "bbox": [x, y, w, h]}, ...]}
    /v1/transform {"text": s, "style": s}                          -> {"text": s}
    /v1/stylize   {"image_png_b64": s, "severity": int}            -> {"image_png_b64": s}

4xx responses carry {"error": s} and are not retried; 5xx and transport
failures are retried up to the configured count, then surface
ServiceUnavailableError. Clients never fall back to stubs.
"""

from __future__ import annotations

import base64
import hashlib
import io
import os
from dataclasses import dataclass, field

import numpy as np
import requests
from PIL import Image

from .core import require_rgb8, to_float, to_uint8
from .errors import (
    DataError,
    MalformedResponseError,
    ServiceUnavailableError,
    UnknownMethodError,
)

__all__ = [
    "Detection",
    "ServiceEndpointConfig",
    "ServiceBundle",
    "encode_image_png_b64",
    "decode_image_png_b64",
    "HashedBagOfWordsEmbedder",
    "ScriptedDetector",
    "StubTransformer",
    "LutStylizer",
    "HttpEmbedClient",
    "HttpDetectClient",
    "HttpTransformClient",
    "HttpStylizeClient",
    "STYLE_FIXTURE_TABLE",
]

ENV_VARS = {
    "embed": "MMR_EMBED_URL",
    "detect": "MMR_DETECT_URL",
    "transform": "MMR_TRANSFORM_URL",
    "stylize": "MMR_STYLIZE_URL",
}


@dataclass(frozen=True)
class Detection:
    label: str
    score: float
    bbox: tuple  # (x, y, w, h) in pixels

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError("detection score must be in [0, 1]")
        if len(self.bbox) != 4 or self.bbox[2] <= 0 or self.bbox[3] <= 0:
            raise ValueError("bbox must be (x, y, w, h) with positive size")

    def to_dict(self) -> dict:
        return {"label": self.label, "score": self.score, "bbox": list(self.bbox)}

    @classmethod
    def from_dict(cls, d: dict) -> "Detection":
        return cls(label=d["label"], score=float(d["score"]), bbox=tuple(d["bbox"]))


@dataclass(frozen=True)
class ServiceEndpointConfig:
    base_url: str
    timeout_ms: int = 30_000
    retries: int = 2

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")


def encode_image_png_b64(img: np.ndarray) -> str:
    require_rgb8(img)
    buf = io.BytesIO()
    Image.fromarray(img).save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def decode_image_png_b64(data: str) -> np.ndarray:
    raw = base64.b64decode(data)
    img = Image.open(io.BytesIO(raw)).convert("RGB")
    return np.asarray(img)


# ------------------------------------------------------------------- stubs

class HashedBagOfWordsEmbedder:
    """Deterministic test embedder: L2-normalized hashed bag-of-words, dim 256.

    Token hashing uses a stable digest so vectors are identical across runs
    and platforms; similarity is monotone in token overlap.
    """

    dim = 256

    def _tokens(self, text):
        word = []
        for ch in text.lower():
            if ch.isalnum():
                word.append(ch)
            elif word:
                yield "".join(word)
                word = []
        if word:
            yield "".join(word)

    def embed_one(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        count = 0
        for tok in self._tokens(text):
            digest = hashlib.md5(tok.encode("utf-8")).digest()
            idx = int.from_bytes(digest[:4], "little") % self.dim
            vec[idx] += 1.0
            count += 1
        if count == 0:
            vec[0] = 1.0
        return vec / np.linalg.norm(vec)

    def embed(self, texts) -> list:
        return [self.embed_one(t) for t in texts]


class ScriptedDetector:
    """Fixture detector keyed by image content; returns scripted detections
    filtered by the request threshold and prompt vocabulary."""

    def __init__(self):
        self._by_key = {}

    @staticmethod
    def image_key(img: np.ndarray) -> str:
        require_rgb8(img)
        return hashlib.sha1(img.tobytes()).hexdigest()

    def register(self, img: np.ndarray, detections) -> None:
        self._by_key[self.image_key(img)] = list(detections)

    def detect(self, img: np.ndarray, prompt: str, threshold: float) -> list:
        _check_prompt(prompt, threshold)
        vocab = _prompt_vocabulary(prompt)
        found = self._by_key.get(self.image_key(img), [])
        return [d for d in found if d.score >= threshold and d.label in vocab]


def _check_prompt(prompt: str, threshold: float):
    if not prompt or not prompt.strip():
        raise DataError("detection prompt must be nonempty")
    if not 0.0 < threshold < 1.0:
        raise DataError("detection threshold must be in (0, 1)")


def _prompt_vocabulary(prompt: str) -> set:
    # Accept both ". " and "," joined prompts.
    names = prompt.replace(",", ".").split(".")
    return {n.strip().lower() for n in names if n.strip()}


# The benchmark's running example sentence and its five admissible rewrites.
STYLE_FIXTURE_TABLE = {
    ("An orange metal bowl strainer filled with apples.", "formal"):
        "An orange metal bowl strainer contains apples.",
    ("An orange metal bowl strainer filled with apples.", "casual"):
        "An orange metal bowl is filled with apples.",
    ("An orange metal bowl strainer filled with apples.", "passive"):
        "Some apples are in an orange metal bowl strainer.",
    ("An orange metal bowl strainer filled with apples.", "active"):
        "There are apples in an orange metal bowl strainer.",
    ("An orange metal bowl strainer filled with apples.", "back_translate"):
        "Apples are placed in an orange metal bowl strainer.",
}

_KNOWN_STYLES = ("formal", "casual", "passive", "active", "back_translate")


class StubTransformer:
    """Identity transform stub, optionally overridden by a fixture table."""

    def __init__(self, fixture_table: dict | None = None):
        self.fixture_table = dict(fixture_table or {})

    def transform(self, text: str, style: str) -> str:
        if style not in _KNOWN_STYLES:
            raise UnknownMethodError(f"unknown transform style: {style!r}")
        return self.fixture_table.get((text, style), text)


class LutStylizer:
    """Deterministic stylize stub: channel permutation plus a severity-scaled
    monotone tone curve, so the output is a non-identity color LUT of the input.
    """

    _PERMUTATION = (1, 2, 0)  # RGB -> GBR

    def stylize(self, img: np.ndarray, severity: int) -> np.ndarray:
        require_rgb8(img)
        if severity not in (1, 2, 3, 4, 5):
            raise DataError(f"severity must be in 1..5, got {severity}")
        weight = severity / 5.0
        x = to_float(img)
        permuted = x[:, :, self._PERMUTATION]
        # Per-channel gamma spread keeps the curve strictly non-identity
        # on (0, 1) while staying monotone.
        gammas = np.array([0.55, 1.0, 1.8])
        curved = np.power(permuted, gammas[None, None, :])
        out = (1.0 - weight) * x + weight * (0.08 + 0.84 * curved)
        return to_uint8(out)


# ------------------------------------------------------------- HTTP clients

class _HttpClient:
    path = ""

    def __init__(self, config: ServiceEndpointConfig, session=None):
        self.config = config
        self.session = session or requests.Session()

    def _post(self, payload: dict) -> dict:
        url = self.config.base_url.rstrip("/") + self.path
        timeout = self.config.timeout_ms / 1000.0
        last_error = None
        for _ in range(self.config.retries + 1):
            try:
                resp = self.session.post(url, json=payload, timeout=timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if 400 <= resp.status_code < 500:
                try:
                    message = resp.json().get("error", resp.text)
                except ValueError:
                    message = resp.text
                raise MalformedResponseError(f"{url} rejected request: {message}")
            if resp.status_code >= 500:
                last_error = RuntimeError(f"HTTP {resp.status_code}")
                continue
            try:
                return resp.json()
            except ValueError as exc:
                raise MalformedResponseError(f"{url} returned non-JSON body") from exc
        raise ServiceUnavailableError(f"{url} unreachable after retries: {last_error}")


class HttpEmbedClient(_HttpClient):
    path = "/v1/embed"

    def embed(self, texts) -> list:
        body = self._post({"texts": list(texts)})
        try:
            vectors = [np.asarray(v, dtype=np.float64) for v in body["vectors"]]
            dim = int(body["dim"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponseError(f"bad embed response: {exc}") from exc
        if len(vectors) != len(texts) or any(v.shape != (dim,) for v in vectors):
            raise MalformedResponseError("embed response misaligned with request")
        return vectors


class HttpDetectClient(_HttpClient):
    path = "/v1/detect"

    def detect(self, img: np.ndarray, prompt: str, threshold: float) -> list:
        _check_prompt(prompt, threshold)
        body = self._post({
            "image_png_b64": encode_image_png_b64(img),
            "prompt": prompt,
            "threshold": float(threshold),
        })
        try:
            return [Detection.from_dict(d) for d in body["detections"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponseError(f"bad detect response: {exc}") from exc


class HttpTransformClient(_HttpClient):
    path = "/v1/transform"

    def transform(self, text: str, style: str) -> str:
        body = self._post({"text": text, "style": style})
        try:
            return str(body["text"])
        except (KeyError, TypeError) as exc:
            raise MalformedResponseError(f"bad transform response: {exc}") from exc


class HttpStylizeClient(_HttpClient):
    path = "/v1/stylize"

    def stylize(self, img: np.ndarray, severity: int) -> np.ndarray:
        body = self._post({
            "image_png_b64": encode_image_png_b64(img),
            "severity": int(severity),
        })
        try:
            out = decode_image_png_b64(body["image_png_b64"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponseError(f"bad stylize response: {exc}") from exc
        return require_rgb8(out)


# ------------------------------------------------------------------ bundle

@dataclass
class ServiceBundle:
    """The four capabilities the pipeline consumes, stub- or HTTP-backed."""

    embedder: object
    detector: object
    transformer: object
    stylizer: object
    backed_by: str = field(default="stub")

    @classmethod
    def stubs(cls, transform_fixture: dict | None = None) -> "ServiceBundle":
        return cls(
            embedder=HashedBagOfWordsEmbedder(),
            detector=ScriptedDetector(),
            transformer=StubTransformer(transform_fixture),
            stylizer=LutStylizer(),
            backed_by="stub",
        )

    @classmethod
    def from_urls(cls, embed_url: str, detect_url: str, transform_url: str,
                  stylize_url: str, timeout_ms: int = 30_000, retries: int = 2) -> "ServiceBundle":
        def cfg(url):
            return ServiceEndpointConfig(base_url=url, timeout_ms=timeout_ms, retries=retries)

        return cls(
            embedder=HttpEmbedClient(cfg(embed_url)),
            detector=HttpDetectClient(cfg(detect_url)),
            transformer=HttpTransformClient(cfg(transform_url)),
            stylizer=HttpStylizeClient(cfg(stylize_url)),
            backed_by="http",
        )

    @classmethod
    def from_env(cls, environ=None) -> "ServiceBundle":
        """HTTP clients when all four MMR_*_URL env vars are set, else stubs."""
        environ = environ if environ is not None else os.environ
        urls = {k: environ.get(v) for k, v in ENV_VARS.items()}
        if all(urls.values()):
            return cls.from_urls(urls["embed"], urls["detect"], urls["transform"],
                                 urls["stylize"])
        return cls.stubs()
