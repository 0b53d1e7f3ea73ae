import json

import numpy as np
import pytest

from proxysel.correlation import kendall, pearson
from proxysel.errors import ValidationError
from proxysel.experiments import emergence_masking, relevance_recovery
from proxysel.rng import generator, mix
from proxysel.synth import Link, SynthConfig, generate, write_outputs


def test_fixed_seed_bit_identical():
    cfg = SynthConfig(n_models=15, n_tasks=7, n_factors=3, noise_sd=2.0, seed=2**63 + 11)
    a, ta = generate(cfg)
    b, tb = generate(cfg)
    assert a.scores.tobytes() == b.scores.tobytes()
    assert ta.loadings.tobytes() == tb.loadings.tobytes()


def test_philox_stream_is_pinned():
    # frozen first draws: a change here means fixtures are no longer reproducible
    assert generator(42, 0).integers(0, 2**63, 3).tolist() == [
        2164141705551706032, 4051056382171243847, 5083673696577322977]
    assert generator(42).integers(0, 2**63, 2).tolist() == [7564992661660189703, 1745482797296139455]
    first = generator(42, 0).standard_normal(3)
    assert generator(42, 1).standard_normal(3).tobytes() != first.tobytes()
    assert mix(42, 0) != mix(42, 1) != mix(43, 0)


def test_identical_loadings_noise_free():
    cfg = SynthConfig(n_models=25, n_tasks=2, n_factors=2, loadings=((0.6, 0.8), (0.6, 0.8)), seed=3)
    m, _ = generate(cfg)
    x, y = m.column("T1"), m.column("T2")
    assert pearson(x, y) == pytest.approx(1.0, abs=1e-12)
    assert kendall(x, y) == 1.0


def test_orthogonal_loadings_uncorrelated():
    hits = 0
    for seed in range(100):
        cfg = SynthConfig(n_models=200, n_tasks=2, n_factors=2, loadings=((1, 0), (0, 1)), seed=seed)
        m, _ = generate(cfg)
        hits += abs(pearson(m.column("T1"), m.column("T2"))) < 0.2
    assert hits >= 95


def test_logistic_link_range_and_floor():
    cfg = SynthConfig(n_models=50, n_tasks=1, loadings=((1.0,),), link="logistic_emergence",
                      emergence_threshold=3.0, steepness=4.0, seed=1)
    m, truth = generate(cfg)
    s = m.column("T1")
    assert np.all((s > 0) & (s < 100))
    low = truth.latent[:, 0] < 1.0
    assert np.all(s[low] < 0.1)


def test_clipping_recorded():
    cfg = SynthConfig(n_models=40, n_tasks=2, n_factors=1, loadings=((6.0,), (0.1,)), seed=4)
    m, truth = generate(cfg)
    assert truth.clipped > 0
    assert m.scores.min() >= 0 and m.scores.max() <= 100


def test_ability_override():
    cfg = SynthConfig(n_models=3, n_tasks=1, loadings=((1.0,),))
    m, _ = generate(cfg, abilities=[[-1.0], [0.0], [2.0]])
    np.testing.assert_allclose(m.column("T1"), [40.0, 50.0, 70.0])


def test_config_validation():
    with pytest.raises(ValidationError, match="shape"):
        SynthConfig(n_models=5, n_tasks=2, n_factors=2, loadings=((1, 0),))
    with pytest.raises(ValidationError):
        SynthConfig(n_models=5, n_tasks=2, noise_sd=-1)
    with pytest.raises(ValueError):
        SynthConfig(n_models=5, n_tasks=2, link="quadratic")


def test_from_json_and_truth(tmp_path):
    doc = {"n_models": 6, "n_tasks": 3, "n_factors": 2, "task_links": ["linear", "logistic_emergence", "linear"],
           "task_names": ["a", "b", "c"], "seed": 9}
    cfg = SynthConfig.from_json(doc)
    assert cfg.links()[1] is Link.logistic_emergence
    m, truth = generate(cfg)
    write_outputs(m, truth, tmp_path / "m.csv", tmp_path / "t.json")
    t = json.loads((tmp_path / "t.json").read_text())
    assert t["tasks"] == ["a", "b", "c"]
    sim = np.array(t["task_similarity"])
    np.testing.assert_allclose(np.diag(sim), 1.0)


def test_relevance_recovery_rate():
    taus = [relevance_recovery(seed) for seed in range(100)]
    assert sum(t >= 0.5 for t in taus) >= 90


def test_emergence_masking_medians():
    runs = [emergence_masking(seed) for seed in range(100)]
    proxy = np.median([r["proxy_discordant"] for r in runs])
    target = np.median([r["target_discordant"] for r in runs])
    assert proxy < target
    assert all(r["n_proxies"] >= 1 for r in runs)
