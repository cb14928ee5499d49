import os
import sys
from pathlib import Path

import pytest

ROOT = Path(os.environ.get("DUET_SOURCE_ROOT", Path(__file__).resolve().parents[2]))

# In-tree builds put the package under build/python; an installed wheel
# needs nothing.
_build_pkg = os.environ.get("DUET_PYTHON_PATH")
if _build_pkg:
    sys.path.insert(0, _build_pkg)


@pytest.fixture
def root():
    return ROOT


@pytest.fixture
def cli():
    path = os.environ.get("DUET_CLI")
    if not path:
        pytest.skip("DUET_CLI not set")
    return path
