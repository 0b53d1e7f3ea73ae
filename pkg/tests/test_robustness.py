import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from proxysel import datasets
from proxysel.core_data import Group
from proxysel.errors import DegenerateStatisticError, ValidationError
from proxysel.robustness import (
    GroupScores,
    RobustnessReport,
    robustness_from_matrix,
    robustness_scores,
    sample_variance,
)

# published noise-group variances that do reproduce from the small-model table
PUBLISHED_VAR_NOISE = {"C3": 0.91, "CMNLI": 0.40, "CMMLU": 0.04}

# (var_noise, var_data, ratio) recomputed with exact fractions over the
# small-model table; noise rows A-C, data rows D-H
ORACLE = {
    "C3": (0.9081333333333333, 54.6974, 60.230582880634266),
    "CMNLI": (0.4034333333333333, 27.08513, 67.136569445592),
    "OCNLI": (1.4108333333333334, 43.56503, 30.87893443591258),
    "CHID": (1.8907, 95.19665, 50.349949754059345),
    "RTE": (1.7902333333333333, 11.77312, 6.5763047647420265),
    "CMMLU": (0.03663333333333333, 0.39522, 10.788535031847134),
}


@pytest.fixture(scope="module")
def report():
    return robustness_from_matrix(datasets.small_models())


def test_sample_variance_examples():
    assert sample_variance([31.18, 30.36, 32.26]) == pytest.approx(0.91, abs=0.005)
    assert sample_variance([31.78, 32.99, 32.05]) == pytest.approx(0.40, abs=0.005)
    assert sample_variance([4.2, 4.2]) == 0.0


def test_sample_variance_too_short():
    with pytest.raises(DegenerateStatisticError):
        sample_variance([1.0])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e4, 1e4, allow_nan=False), min_size=2, max_size=40))
def test_sample_variance_matches_oracle(xs):
    assert sample_variance(xs) == pytest.approx(oracles.sample_variance(xs), rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("task", sorted(PUBLISHED_VAR_NOISE))
def test_published_noise_variance(report, task):
    assert report[task].var_noise == pytest.approx(PUBLISHED_VAR_NOISE[task], abs=0.005)


@pytest.mark.parametrize("task", sorted(ORACLE))
def test_small_model_table_against_oracle(report, task):
    vr, vd, ratio = ORACLE[task]
    e = report[task]
    assert e.var_noise == pytest.approx(vr, rel=1e-12)
    assert e.var_data == pytest.approx(vd, rel=1e-12)
    assert e.ratio == pytest.approx(ratio, rel=1e-12)
    assert (e.n_data, e.n_noise) == (5, 3)


def test_ocnli_is_not_below_two(report):
    # the published 0.88 comes from variances that do not follow from the table
    assert report["OCNLI"].ratio == pytest.approx(30.8789, abs=1e-4)


def test_fixture_note_records_deltas():
    pub = datasets.published_robustness()
    assert set(pub["reproduces"]["var_noise"]) == set(PUBLISHED_VAR_NOISE)
    for task, (vr, vd, ratio) in ORACLE.items():
        assert pub["recomputed_from_small_models"][task] == pytest.approx([vr, vd, ratio], rel=1e-12)


def test_sorted_descending(report):
    ratios = [e.ratio for e in report.entries]
    assert ratios == sorted(ratios, reverse=True)
    assert report.entries[0].task == "CMNLI"


def test_equal_variance_gives_one():
    rep = robustness_scores({"T": [1.0, 3.0]}, {"T": [5.0, 7.0]})
    assert rep["T"].ratio == 1.0


def test_unequal_group_sizes():
    rep = robustness_scores({"T": [1.0, 2.0, 3.0, 4.0, 5.0]}, {"T": [0.0, 1.0]})
    assert rep["T"].ratio == pytest.approx(2.5 / 0.5)
    assert (rep["T"].n_data, rep["T"].n_noise) == (5, 2)


def test_task_in_one_group_only():
    with pytest.raises(ValidationError, match="'X'.*data_variability"):
        robustness_scores({"T": [1, 2], "X": [1, 2]}, {"T": [1, 3]})


def test_group_mislabel():
    with pytest.raises(ValidationError, match="expected random_noise"):
        robustness_scores([GroupScores("data_variability", "T", [1, 2])],
                          [GroupScores("data_variability", "T", [1, 2])])


def test_group_scores_invariants():
    with pytest.raises(ValidationError):
        GroupScores(Group.random_noise, "T", [1.0])
    with pytest.raises(ValidationError):
        GroupScores(Group.random_noise, "T", [1.0, math.nan])


def test_degenerate_noise_flagged():
    with pytest.warns(RuntimeWarning, match="'FLAT'"):
        rep = robustness_scores({"FLAT": [1, 2, 3], "T": [1, 2, 9]}, {"FLAT": [5, 5, 5], "T": [1, 2, 3]})
    flat = rep["FLAT"]
    assert flat.degenerate and math.isinf(flat.ratio)
    assert rep.entries[0].task == "FLAT"
    assert not rep["T"].degenerate
    doc = rep.to_json()
    assert doc["entries"][0]["ratio"] is None
    back = RobustnessReport.from_json(doc)
    assert back == rep


def test_no_warning_when_healthy():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        robustness_scores({"T": [1, 2, 3]}, {"T": [1, 2, 4]})


def test_matrix_needs_both_groups():
    m = datasets.small_models()
    from proxysel.core_data import submatrix

    with pytest.raises(ValidationError, match="per group"):
        robustness_from_matrix(submatrix(m, ["A", "D", "E"]))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100))
def test_scale_invariance(seed, c):
    rng = np.random.default_rng(seed)
    d = {f"T{j}": rng.normal(50, 10, 5) for j in range(4)}
    r = {f"T{j}": rng.normal(50, 1, 3) for j in range(4)}
    a = robustness_scores(d, r).ratios()
    b = robustness_scores({k: c * v for k, v in d.items()}, {k: c * v for k, v in r.items()}).ratios()
    for k in a:
        assert b[k] == pytest.approx(a[k], rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-100, 100))
def test_shift_one_task_keeps_order(seed, shift):
    rng = np.random.default_rng(seed)
    d = {f"T{j}": rng.normal(50, rng.uniform(1, 10), 5) for j in range(4)}
    r = {f"T{j}": rng.normal(50, 1, 3) for j in range(4)}
    a = robustness_scores(d, r)
    d2, r2 = dict(d), dict(r)
    d2["T2"] = d["T2"] + shift
    r2["T2"] = r["T2"] + shift
    b = robustness_scores(d2, r2)
    assert [e.task for e in a.entries] == [e.task for e in b.entries]
