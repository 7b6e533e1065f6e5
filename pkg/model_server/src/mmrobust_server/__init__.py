"""Reference implementation of the mmrobust model-service wire protocol."""

from .app import build_app
from .config import ServerConfig

__version__ = "0.1.0"

__all__ = ["build_app", "ServerConfig"]
