import sys
from pathlib import Path

import pytest

from nsdi import toy_atom

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def toy():
    """The canonical toy atom: I_A = 1 ha, I_B = 2 ha, flat unit curves."""
    return toy_atom()
