import os
import sys

import pytest

# tests import the package as src.* from the repository root
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.data.run_state import RunState  # noqa: E402


@pytest.fixture(autouse=True)
def fresh_run_state():
    RunState.reset()
    yield
    RunState.reset()


