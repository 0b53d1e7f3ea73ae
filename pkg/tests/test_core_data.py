import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_matrix
from proxysel import datasets
from proxysel.core_data import (
    EvaluationRecord,
    Group,
    ModelId,
    ScoreMatrix,
    Variant,
    load_manifest,
    load_matrix,
    save_matrix,
    submatrix,
)
from proxysel.errors import ValidationError


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_small_csv(tmp_path):
    p = write(tmp_path, "m.csv", "model,X,Y\na,1,2\nb,3,4\nc,5,6.5\n")
    m = load_matrix(p, "csv")
    assert m.shape == (3, 2)
    assert not m.has_missing
    assert m.tasks == ("X", "Y")
    assert m.scores[2, 1] == 6.5


def test_duplicate_task_header(tmp_path):
    p = write(tmp_path, "m.csv", "model,C3,C3\na,1,2\nb,3,4\n")
    with pytest.raises(ValidationError, match="C3"):
        load_matrix(p)


@pytest.mark.parametrize(
    "text, needle",
    [
        ("model,X,Y\na,1\nb,3,4\n", "row 2"),
        ("model,X\na,1\na,2\n", "'a'"),
        ("model,X\na,1\nb,abc\n", "column 'X'"),
        ("model,X\na,1\nb,nan\n", "non-finite"),
        ("", "empty"),
        ("model,X\n", "empty"),
    ],
)
def test_parse_errors(tmp_path, text, needle):
    with pytest.raises(ValidationError, match=needle):
        load_matrix(write(tmp_path, "m.csv", text))


def test_missing_cells_flagged_not_zero(tmp_path):
    m = load_matrix(write(tmp_path, "m.csv", "model,X,Y\na,1,\nb,3,4\n"))
    assert m.missing[0, 1]
    assert np.isnan(m.scores[0, 1])
    with pytest.raises(ValidationError, match="missing"):
        m.require_complete()


def test_json_null_is_missing(tmp_path):
    doc = {"tasks": ["X"], "models": [{"name": "a", "variant": "chat", "group": None}, {"name": "b"}],
           "scores": [[None], [2.0]]}
    m = load_matrix(write(tmp_path, "m.json", json.dumps(doc)))
    assert m.missing.tolist() == [[True], [False]]
    assert m.models[0].variant is Variant.chat


def test_table4_fixture():
    m = datasets.small_models()
    assert m.shape == (8, 6)
    assert m.scores[m.model_index("A"), m.task_index("C3")] == 31.18
    assert m.models_where(group="random_noise") == ["A", "B", "C"]
    assert m.models_where(group=Group.data_variability) == ["D", "E", "F", "G", "H"]


def test_submatrix_identity():
    m = datasets.small_models()
    assert submatrix(m) == m
    assert submatrix(m, m.model_names, list(m.tasks)) == m


def test_submatrix_random_noise_rows():
    m = datasets.small_models()
    sub = submatrix(m, m.models_where(group="random_noise"))
    assert sub.shape == (3, 6)
    assert sub.model_names == ["A", "B", "C"]
    np.testing.assert_array_equal(sub.scores, m.scores[:3])


def test_submatrix_keeps_original_order():
    m = datasets.small_models()
    sub = submatrix(m, ["H", "A"], ["RTE", "C3"])
    assert sub.model_names == ["A", "H"]
    assert sub.tasks == ("C3", "RTE")


def test_submatrix_unknown_label():
    m = datasets.small_models()
    with pytest.raises(ValidationError, match="unknown model Z"):
        submatrix(m, ["Z"])
    with pytest.raises(ValidationError, match="unknown task"):
        submatrix(m, None, ["nope"])


def test_matrix_is_immutable():
    m = make_matrix([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        m.scores[0, 0] = 9


def test_constructor_rejects_nan_when_mask_says_present():
    with pytest.raises(ValidationError, match="non-finite"):
        ScoreMatrix((ModelId("a"), ModelId("b")), ("X",), np.array([[1.0], [np.inf]]))


def test_metadata_not_inferred_from_name():
    m = make_matrix([[1], [2]], models=["Qwen-7B-Chat", "Qwen-7B"])
    assert all(x.variant is Variant.unspecified for x in m.models)


def test_manifest_layouts(tmp_path):
    a = write(tmp_path, "a.json", json.dumps({"models": [{"name": "x", "variant": "base"}]}))
    b = write(tmp_path, "b.json", json.dumps({"x": {"variant": "base"}}))
    assert load_manifest(a) == load_manifest(b) == {"x": {"variant": "base"}}


def test_records_skip_missing():
    m = ScoreMatrix((ModelId("a"), ModelId("b")), ("X", "Y"), np.array([[1.0, np.nan], [2.0, 3.0]]))
    recs = m.records("fixture:test")
    assert len(recs) == 3
    assert all(isinstance(r, EvaluationRecord) and r.source == "fixture:test" for r in recs)


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@st.composite
def matrices(draw):
    m = draw(st.integers(2, 6))
    n = draw(st.integers(1, 5))
    vals = draw(st.lists(st.lists(st.one_of(finite, st.none()), min_size=n, max_size=n), min_size=m, max_size=m))
    grid = np.array([[np.nan if v is None else v for v in row] for row in vals], dtype=float)
    return make_matrix(grid)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_json_roundtrip_bit_exact(tmp_path_factory, m):
    p = tmp_path_factory.mktemp("rt") / "m.json"
    save_matrix(m, p)
    back = load_matrix(p)
    assert back == m
    assert back.scores.tobytes() == m.scores.tobytes()


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_csv_roundtrip(tmp_path_factory, m):
    p = tmp_path_factory.mktemp("rt") / "m.csv"
    save_matrix(m, p)
    back = load_matrix(p)
    assert back.model_names == m.model_names and back.tasks == m.tasks
    np.testing.assert_array_equal(back.missing, m.missing)
    np.testing.assert_allclose(back.scores, m.scores, rtol=0, atol=1e-12, equal_nan=True)
