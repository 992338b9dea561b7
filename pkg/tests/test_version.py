from __future__ import annotations

import importlib
import sys
import tomllib
from importlib import metadata
from pathlib import Path

import pytest

import hyperbinom

PYPROJECT = Path(__file__).resolve().parents[1] / "pyproject.toml"


@pytest.fixture
def reload_package(monkeypatch):
    """Re-import hyperbinom under patched metadata, then put the original module back."""

    original = sys.modules["hyperbinom"]

    def reload():
        monkeypatch.delitem(sys.modules, "hyperbinom", raising=False)
        return importlib.import_module("hyperbinom")

    yield reload
    sys.modules["hyperbinom"] = original


def test_get_version_matches_dunder():
    assert hyperbinom.get_version() == hyperbinom.__version__
    assert isinstance(hyperbinom.__version__, str)


def test_version_metadata_override(monkeypatch, reload_package):
    def fake_version(name: str) -> str:
        assert name == "hyper-binom"
        return "9.9.9"

    monkeypatch.setattr(metadata, "version", fake_version)
    reloaded = reload_package()
    assert reloaded.get_version() == "9.9.9"


def test_source_checkout_falls_back_to_the_project_version(monkeypatch, reload_package):
    def missing(name: str) -> str:
        raise metadata.PackageNotFoundError(name)

    monkeypatch.setattr(metadata, "version", missing)
    reloaded = reload_package()
    declared = tomllib.loads(PYPROJECT.read_text(encoding="utf-8"))["project"]["version"]
    assert reloaded.__version__ == declared
