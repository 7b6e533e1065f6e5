"""FastAPI application exposing the four model-service endpoints.

Wire protocol (all POST, JSON, UTF-8):

    /v1/embed     {"texts": [s, ...]}                               -> {"dim": int, "vectors": [[f, ...], ...]}
    /v1/detect    {"image_png_b64": s, "prompt": s, "threshold": f} -> {"detections": [...]}
    /v1/transform {"text": s, "style": s}                           -> {"text": s}
    /v1/stylize   {"image_png_b64": s, "severity": int}             -> {"image_png_b64": s}

Client errors return 4xx with {"error": reason}; requests are stateless.
"""

from __future__ import annotations

import base64
import io

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from PIL import Image
from pydantic import BaseModel, Field

from .config import CapabilityStartupError, ServerConfig
from .detect import ShapeBlobDetector
from .embedding import build_embedder
from .stylize import ColorAdainStylizer
from .transforms import STYLES, RuleBasedTransformer


class EmbedRequest(BaseModel):
    texts: list[str]


class DetectRequest(BaseModel):
    image_png_b64: str
    prompt: str
    threshold: float


class TransformRequest(BaseModel):
    text: str
    style: str


class StylizeRequest(BaseModel):
    image_png_b64: str
    severity: int = Field(ge=1, le=5)


class ClientError(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


def _decode_image(data: str) -> np.ndarray:
    try:
        raw = base64.b64decode(data, validate=True)
        img = Image.open(io.BytesIO(raw)).convert("RGB")
    except Exception as exc:
        raise ClientError(f"bad image payload: {exc}")
    return np.asarray(img)


def _encode_image(img: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(img).save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def build_app(config: ServerConfig | None = None) -> FastAPI:
    config = config or ServerConfig()

    backends = {}
    try:
        if config.backends.get("embed", "char-ngram") != "disabled":
            backends["embed"] = build_embedder(
                config.backends.get("embed", "char-ngram"),
                config.model_ids.get("embed"), config.device)
        if config.backends.get("detect", "shape-blob") != "disabled":
            backends["detect"] = ShapeBlobDetector()
        if config.backends.get("transform", "rule-based") != "disabled":
            backends["transform"] = RuleBasedTransformer()
        if config.backends.get("stylize", "color-adain") != "disabled":
            backends["stylize"] = ColorAdainStylizer()
    except CapabilityStartupError:
        raise

    app = FastAPI(title="mmrobust reference model server")

    @app.exception_handler(ClientError)
    async def client_error_handler(request: Request, exc: ClientError):
        return JSONResponse(status_code=400, content={"error": exc.message})

    @app.exception_handler(Exception)
    async def server_error_handler(request: Request, exc: Exception):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    @app.post("/v1/embed")
    def embed(request: EmbedRequest):
        if not request.texts:
            raise ClientError("texts must be nonempty")
        if any(not t for t in request.texts):
            raise ClientError("every text must be nonempty")
        embedder = backends["embed"]
        vectors = embedder.embed(request.texts)
        return {"dim": int(embedder.dim),
                "vectors": [np.asarray(v).tolist() for v in vectors]}

    @app.post("/v1/detect")
    def detect(request: DetectRequest):
        if not request.prompt.strip():
            raise ClientError("prompt must be nonempty")
        if not 0.0 < request.threshold < 1.0:
            raise ClientError("threshold must be in (0, 1)")
        image = _decode_image(request.image_png_b64)
        detections = backends["detect"].detect(image, request.prompt, request.threshold)
        return {"detections": detections}

    @app.post("/v1/transform")
    def transform(request: TransformRequest):
        if not request.text:
            raise ClientError("text must be nonempty")
        if request.style not in STYLES:
            raise ClientError(f"unknown style {request.style!r}; "
                              f"expected one of {', '.join(STYLES)}")
        return {"text": backends["transform"].transform(request.text, request.style)}

    @app.post("/v1/stylize")
    def stylize(request: StylizeRequest):
        image = _decode_image(request.image_png_b64)
        out = backends["stylize"].stylize(image, request.severity)
        return {"image_png_b64": _encode_image(out)}

    return app
