"""Server configuration.

Each capability names a backend. The self-contained backends ship with the
package and need no downloads; ``neural`` backends resolve the configured
model id at startup and fail fast (exit nonzero, capability named) when the
model cannot be loaded, which is the expected outcome in offline
environments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

SELF_CONTAINED = {
    "embed": "char-ngram",
    "detect": "shape-blob",
    "transform": "rule-based",
    "stylize": "color-adain",
}

NEURAL_DEFAULT_MODELS = {
    "embed": "paraphrase-mpnet-base-v2",
}


@dataclass
class ServerConfig:
    port: int = 8008
    host: str = "127.0.0.1"
    device: str = "cpu"
    backends: dict = field(default_factory=lambda: dict(SELF_CONTAINED))
    model_ids: dict = field(default_factory=lambda: dict(NEURAL_DEFAULT_MODELS))

    def __post_init__(self):
        if not 0 < self.port < 65536:
            raise ValueError(f"port out of range: {self.port}")
        unknown = set(self.backends) - set(SELF_CONTAINED)
        if unknown:
            raise ValueError(f"unknown capabilities: {sorted(unknown)}")


class CapabilityStartupError(RuntimeError):
    """Raised when a configured backend cannot start; names the capability."""

    def __init__(self, capability: str, reason: str):
        super().__init__(f"capability {capability!r} failed to start: {reason}")
        self.capability = capability
