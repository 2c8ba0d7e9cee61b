"""Typed orchestration failures with stable machine-readable codes.

The CLI and service surface these as JSON; the code string is the
contract, the message is for humans.
"""

from __future__ import annotations


class HarnessError(RuntimeError):
    """Base class; every subclass pins a short error code."""

    code = "harness-error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self), **(
            {"details": self.details} if self.details else {})}


class ConfigError(HarnessError):
    code = "bad-config"


class MissingArtifactError(HarnessError):
    code = "missing-artifact"


class ArtifactMismatchError(HarnessError):
    """Existing artifacts were produced under a different config."""

    code = "config-mismatch"


class TrainingFailedError(HarnessError):
    code = "training-diverged"
