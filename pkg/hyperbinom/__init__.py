"""Project metadata for the hyper-binom toolkit."""

from __future__ import annotations

from importlib import metadata

__all__ = ["__version__", "get_version"]

try:
    __version__ = metadata.version("hyper-binom")
except metadata.PackageNotFoundError:  # pragma: no cover - source checkout without install
    __version__ = "0.1.0"


def get_version() -> str:
    """Return the installed hyper-binom version string."""

    return __version__
