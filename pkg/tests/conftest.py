import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from proxysel import datasets  # noqa: E402
from proxysel.core_data import ModelId, ScoreMatrix  # noqa: E402


@pytest.fixture
def small_models():
    return datasets.small_models()


@pytest.fixture
def rankings():
    return datasets.rankings_table()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_matrix(values, tasks=None, models=None):
    values = np.asarray(values, dtype=float)
    m, n = values.shape
    tasks = tasks or [f"T{j + 1}" for j in range(n)]
    models = models or [f"M{i + 1}" for i in range(m)]
    return ScoreMatrix(tuple(ModelId(x) for x in models), tuple(tasks), values)
