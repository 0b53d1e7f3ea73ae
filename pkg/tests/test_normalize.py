import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import make_matrix
from proxysel import datasets
from proxysel.errors import DegenerateStatisticError, ValidationError
from proxysel.normalize import (
    NormalizedMatrix,
    Stage,
    feature_normalize,
    mean_std,
    normalize_pipeline,
    sample_normalize,
)

# two-pass exact-rational oracle over the CMMLU random-noise scores
CMMLU_NOISE_Z = [0.9230312316137658, -1.0623567005365984, 0.13932546892283257]


def test_feature_symmetric_column():
    out = feature_normalize(make_matrix([[1], [2], [3]]))
    np.testing.assert_allclose(out.values[:, 0], [-1, 0, 1], atol=1e-15)
    assert out.task_stats == ((2.0, 1.0),)
    assert out.stage is Stage.feature_normalized


def test_feature_cmmlu_noise_rows():
    out = feature_normalize(make_matrix([[25.20], [24.82], [25.05]]))
    np.testing.assert_allclose(out.values[:, 0], CMMLU_NOISE_Z, rtol=0, atol=1e-9)


def test_feature_post_condition(rng):
    out = feature_normalize(make_matrix(rng.normal(50, 10, (7, 4))))
    np.testing.assert_allclose(out.values.mean(axis=0), 0, atol=1e-9)
    np.testing.assert_allclose(out.values.std(axis=0, ddof=1), 1, atol=1e-9)


def test_feature_constant_column_names_task():
    with pytest.raises(DegenerateStatisticError, match="'T2'"):
        feature_normalize(make_matrix([[1, 5], [2, 5], [3, 5]]))


def test_feature_rejects_missing():
    m = make_matrix([[1.0, np.nan], [2.0, 3.0]])
    with pytest.raises(ValidationError, match="missing"):
        feature_normalize(m)


def test_sample_single_task_is_error():
    with pytest.raises(DegenerateStatisticError):
        sample_normalize(feature_normalize(make_matrix([[1], [2], [3]])))


def test_sample_already_standard_row():
    f = NormalizedMatrix.from_matrix(make_matrix([[-1, 0, 1], [3, 1, 2]]))
    f = NormalizedMatrix(f.models, f.tasks, f.values, Stage.feature_normalized)
    out = sample_normalize(f)
    np.testing.assert_allclose(out.values[0], [-1, 0, 1], atol=1e-15)


def test_sample_requires_feature_stage():
    with pytest.raises(ValidationError, match="feature_normalized"):
        sample_normalize(NormalizedMatrix.from_matrix(make_matrix([[1, 2], [3, 5]])))


def test_sample_rows_standardized(rng):
    f = feature_normalize(make_matrix(rng.normal(size=(4, 5))))
    out = sample_normalize(f)
    for i in range(4):
        np.testing.assert_allclose(out.values[i], oracles.standardize(list(f.values[i])), atol=1e-12)
    np.testing.assert_allclose(out.values.mean(axis=1), 0, atol=1e-9)
    np.testing.assert_allclose(out.values.std(axis=1, ddof=1), 1, atol=1e-9)


def test_sample_constant_row_names_model():
    # row 1 is constant after feature normalization
    f = feature_normalize(make_matrix([[0, 0], [1, 1], [2, 5]]))
    f = NormalizedMatrix(f.models, f.tasks, np.array([[0.0, 0.0], [1.0, -1.0], [2.0, 1.0]]),
                         Stage.feature_normalized)
    with pytest.raises(DegenerateStatisticError, match="'M1'"):
        sample_normalize(f)


def test_pipeline_two_by_two():
    out = normalize_pipeline(make_matrix([[0, 10], [10, 0]]))
    h = 1 / np.sqrt(2)
    expected = [[-h, h], [h, -h]]
    np.testing.assert_allclose(feature_normalize(make_matrix([[0, 10], [10, 0]])).values, expected, atol=1e-12)
    np.testing.assert_allclose(out.values, expected, atol=1e-12)
    assert out.stage is Stage.fully_normalized


def test_pipeline_leaderboard_shape():
    board = datasets.leaderboard()
    out = normalize_pipeline(board)
    assert out.shape == board.shape == (34, 43)
    assert out.tasks == board.tasks and out.models == board.models


def test_pipeline_order_fixed():
    f = feature_normalize(make_matrix([[1, 2, 4], [2, 2, 9], [3, 1, 1]]))
    with pytest.raises(ValidationError):
        feature_normalize(f)


def test_json_roundtrip():
    out = normalize_pipeline(datasets.small_models())
    back = NormalizedMatrix.from_json(out.to_json())
    assert back.values.tobytes() == out.values.tobytes()
    assert back.task_stats == out.task_stats and back.model_stats == out.model_stats


@settings(max_examples=100, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(1e-3, 1e3))
def test_variance_of_two_points(x, d):
    _, sd = mean_std([x, x + d])
    # sd of [x, x + d] is |d| / sqrt(2) under the count-1 divisor
    assert sd**2 == pytest.approx(d**2 / 2, rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100), st.floats(-100, 100))
def test_feature_affine_invariance(seed, a, b):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(6, 3))
    f1 = feature_normalize(make_matrix(x)).values
    f2 = feature_normalize(make_matrix(a * x + b)).values
    np.testing.assert_allclose(f1, f2, atol=1e-9)
