import os
import sys

import numpy as np
import pytest

# Same import layout as src/main.py
sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from forms6 import normal_form  # noqa: E402


@pytest.fixture
def standard_structure():
    return normal_form()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
