"""Command-line entry: mmrobust-server --port 8008 --device cpu."""

from __future__ import annotations

import argparse
import sys

import uvicorn

from .app import build_app
from .config import CapabilityStartupError, ServerConfig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mmrobust-server",
        description="Reference server for the mmrobust model-service protocol")
    parser.add_argument("--port", type=int, default=8008)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--embed-backend", default="char-ngram",
                        choices=["char-ngram", "neural"])
    parser.add_argument("--embed-model", default="paraphrase-mpnet-base-v2",
                        help="model id when --embed-backend neural")
    args = parser.parse_args(argv)

    config = ServerConfig(port=args.port, host=args.host, device=args.device)
    config.backends["embed"] = args.embed_backend
    config.model_ids["embed"] = args.embed_model
    try:
        app = build_app(config)
    except CapabilityStartupError as exc:
        print(f"mmrobust-server: {exc}", file=sys.stderr)
        return 1
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
