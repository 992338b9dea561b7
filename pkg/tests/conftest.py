from __future__ import annotations

import sys
from pathlib import Path

import pytest
from mpmath import mp

# Ensure project root is importable during tests
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))


@pytest.fixture(autouse=True)
def restore_mp_precision():
    """mpmath precision is process-global; give every test the default back."""
    saved = mp.dps
    yield
    mp.dps = saved
