"""Synthetic experiments with known ground truth.

These drive the property tests and the demo scripts; each takes a seed and
returns plain numbers so callers can aggregate over many seeds.
"""

from __future__ import annotations

import numpy as np

from .core_data import Group, ModelId, ScoreMatrix
from .correlation import kendall, relevance_ranking
from .normalize import normalize_pipeline
from .rng import generator, mix
from .robustness import robustness_from_matrix
from .selection import ScoredRanking, SelectionConfig, count_discordant_pairs, predict, select_proxies
from .synth import Link, SynthConfig, generate


def relevance_recovery(seed: int, n_models: int = 20, n_tasks: int = 10, n_factors: int = 2,
                       noise_ratio: float = 0.3, metric="kendall") -> float:
    """Kendall tau between measured relevance and true loading similarity.

    Loadings are unit vectors and abilities unit-variance, so the linear-link
    signal sd is ``LINEAR_SCALE``; noise sd is ``noise_ratio`` times that.
    Task ``T1`` is the baseline.
    """
    from .synth import LINEAR_SCALE

    cfg = SynthConfig(n_models=n_models, n_tasks=n_tasks, n_factors=n_factors,
                      noise_sd=noise_ratio * LINEAR_SCALE, seed=seed)
    matrix, truth = generate(cfg)
    ranking = relevance_ranking(normalize_pipeline(matrix), "T1", metric)
    measured = ranking.relevance()
    names = matrix.tasks[1:]
    sim = truth.task_similarity()[0, 1:]
    return kendall([measured[t] for t in names], sim)


def _with_groups(matrix: ScoreMatrix, group: Group, prefix: str) -> ScoreMatrix:
    models = tuple(ModelId(f"{prefix}{i + 1}", group=group) for i in range(matrix.shape[0]))
    return ScoreMatrix(models, matrix.tasks, matrix.scores)


def emergence_masking(seed: int, n_reference: int = 30, n_checkpoints: int = 8, n_proxies: int = 6,
                      n_filler: int = 12, noise_sd: float = 2.0, threshold: float = 1.0) -> dict:
    """Compare proxy-based and direct target rankings of weak checkpoints.

    A target task with a steep logistic link sits at the floor for every
    checkpoint (their latent target ability is below ``threshold``); the
    proxies are linear tasks. Relevance is measured on a reference population
    that spans the threshold, robustness on two synthetic small-model groups.
    Returns discordant-pair counts of the proxy prediction and of the
    observed target scores, both against the latent target ability.
    """
    rng = generator(mix(seed, 7))
    # factor 1 drives the target; factors 2-3 only shape the filler tasks,
    # which keep the per-model standardization from cancelling factor 1
    names = ("TARGET",) + tuple(f"P{j + 1}" for j in range(n_proxies)) + tuple(
        f"F{j + 1}" for j in range(n_filler))
    n_tasks = len(names)
    first = rng.uniform(0.3, 1.0, n_proxies)
    angle = rng.uniform(0.0, 2 * np.pi, n_filler)
    loadings = np.vstack([
        [1.0, 0.0, 0.0],
        np.column_stack([first, np.sqrt(1 - first**2), np.zeros(n_proxies)]),
        np.column_stack([np.zeros(n_filler), np.cos(angle), np.sin(angle)]),
    ])
    links = (Link.logistic_emergence,) + (Link.linear,) * (n_tasks - 1)

    def population(n, abilities, stream, prefix):
        cfg = SynthConfig(n_models=n, n_tasks=n_tasks, n_factors=3, loadings=loadings,
                          noise_sd=noise_sd, task_links=links, emergence_threshold=threshold,
                          seed=mix(seed, stream), task_names=names, model_prefix=prefix)
        return generate(cfg, abilities)

    ref_abilities = np.column_stack([rng.uniform(-1.5, 3.0, n_reference), rng.standard_normal((n_reference, 2))])
    reference, _ = population(n_reference, ref_abilities, 1, "R")

    # data-variability group: different abilities; random-noise group: one ability + noise
    dv_abilities = np.column_stack([rng.uniform(-2.0, 0.0, 5), rng.standard_normal((5, 2))])
    rn_abilities = np.tile([[-1.0, 0.0, 0.0]], (3, 1))
    dv, _ = population(5, dv_abilities, 2, "D")
    rn, _ = population(3, rn_abilities, 3, "N")
    small = ScoreMatrix(
        _with_groups(dv, Group.data_variability, "D").models + _with_groups(rn, Group.random_noise, "N").models,
        names, np.vstack([dv.scores, rn.scores]),
    )
    robustness = robustness_from_matrix(small, tasks=names[1 : 1 + n_proxies])

    ranking = relevance_ranking(normalize_pipeline(reference), "TARGET", "kendall")
    proxies = select_proxies(ranking, robustness, SelectionConfig(epsilon_c=0.0, epsilon_r=1.0))

    ck_abilities = np.column_stack([rng.uniform(-2.5, threshold - 1.5, n_checkpoints),
                                    rng.standard_normal((n_checkpoints, 2))])
    checkpoints, truth = population(n_checkpoints, ck_abilities, 4, "C")
    latent = {m.name: float(truth.latent[i, 0]) for i, m in enumerate(checkpoints.models)}
    predicted = {
        m.name: predict(proxies, dict(zip(names, checkpoints.scores[i])), m.name).predicted_score
        for i, m in enumerate(checkpoints.models)
    }
    observed = {m.name: float(checkpoints.scores[i, 0]) for i, m in enumerate(checkpoints.models)}
    truth_rank = ScoredRanking(latent, label="latent")
    return {
        "proxy_discordant": count_discordant_pairs(ScoredRanking(predicted), truth_rank).discordant_pairs,
        "target_discordant": count_discordant_pairs(ScoredRanking(observed), truth_rank).discordant_pairs,
        "n_proxies": len(proxies.entries),
    }
