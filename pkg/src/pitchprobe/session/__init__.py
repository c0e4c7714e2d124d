"""Session management: storage, calibration, HTTP service, CLI."""

from .store import SessionStore

__all__ = ["SessionStore"]
