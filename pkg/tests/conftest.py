from pathlib import Path

import numpy as np
import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def iris_csv() -> Path:
    return DATA_DIR / "iris.csv"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240521)
