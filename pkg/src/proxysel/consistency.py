"""Baseline / sampling consistency of correlation metrics under model resampling.

For each metric, the full-model relevance ranking is compared against the
rankings obtained from ``k_rounds`` random subsets of ``n_sample`` models:

* ``s`` (baseline consistency) is the mean top-t overlap of each sampled
  ranking with the full-model ranking;
* ``r`` (sampling consistency) is the mean top-t overlap over all unordered
  pairs of sampled rankings.

By default one sequence of model subsets is shared by every metric so the
comparison between metrics is paired. ``resample_per_metric=True`` gives every
metric its own subsets instead.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core_data import ScoreMatrix
from .correlation import CorrelationMetric, RelevanceRanking, relevance_ranking, top_t_overlap
from .errors import DegenerateStatisticError, ValidationError
from .normalize import NormalizedMatrix, normalize_pipeline
from .rng import generator, mix

_METRIC_ORDER = list(CorrelationMetric)


@dataclass(frozen=True)
class ConsistencyConfig:
    n_sample: int
    k_rounds: int
    t: int
    metrics: tuple[CorrelationMetric, ...] = tuple(CorrelationMetric)
    seed: int = 0
    max_retries: int = 10
    resample_per_metric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "metrics", tuple(CorrelationMetric(m) for m in self.metrics))
        if self.k_rounds < 2:
            raise ValidationError("k_rounds must be >= 2")
        if self.n_sample < 3:
            raise ValidationError("n_sample must be >= 3")
        if self.t < 1:
            raise ValidationError("t must be >= 1")
        if not self.metrics:
            raise ValidationError("at least one metric is required")
        if len(set(self.metrics)) != len(self.metrics):
            raise ValidationError("duplicate metric in config")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if self.max_retries < 0:
            raise ValidationError("max_retries must be >= 0")

    def check_against(self, n_models: int, n_tasks: int) -> None:
        if self.n_sample > n_models:
            raise ValidationError(f"n_sample={self.n_sample} exceeds the {n_models} available models")
        if self.t > n_tasks - 1:
            raise ValidationError(f"t={self.t} exceeds the {n_tasks - 1} candidate tasks")


@dataclass
class MetricConsistency:
    metric: CorrelationMetric
    s: float
    r: float
    overlaps: list[float]
    pairwise: list[float]
    subsets: list[list[str]]
    baseline_ranking: RelevanceRanking

    def to_json(self) -> dict:
        return {
            "metric": self.metric.value,
            "s": self.s,
            "r": self.r,
            "overlaps": self.overlaps,
            "pairwise": self.pairwise,
            "subsets": self.subsets,
            "baseline_top": self.baseline_ranking.top(len(self.baseline_ranking.entries)),
        }


@dataclass
class ConsistencyReport:
    baseline: str
    config: ConsistencyConfig
    results: dict[CorrelationMetric, MetricConsistency]
    selected: CorrelationMetric | None = None
    fallback_order: list[CorrelationMetric] = field(default_factory=list)

    @property
    def sampling_mode(self) -> str:
        return "per_metric" if self.config.resample_per_metric else "shared"

    def indices(self) -> dict[CorrelationMetric, tuple[float, float]]:
        return {m: (res.s, res.r) for m, res in self.results.items()}

    def to_json(self) -> dict:
        c = self.config
        return {
            "baseline": self.baseline,
            "config": {
                "n_sample": c.n_sample,
                "k_rounds": c.k_rounds,
                "t": c.t,
                "metrics": [m.value for m in c.metrics],
                "seed": c.seed,
                "max_retries": c.max_retries,
            },
            "sampling": self.sampling_mode,
            "note": (
                "model subsets shared across metrics (paired comparison)"
                if self.sampling_mode == "shared"
                else "model subsets drawn independently per metric"
            ),
            "metrics": [self.results[m].to_json() for m in c.metrics],
            "selected": None if self.selected is None else self.selected.value,
            "fallback_order": [m.value for m in self.fallback_order],
        }


def _draw_subset(matrix: NormalizedMatrix, baseline, metrics, n_sample, seed, attempt_budget, round_no):
    """Draw one valid model subset for a round; retry on degenerate statistics."""
    rng = generator(seed)
    m = len(matrix.models)
    last_error = None
    for _ in range(attempt_budget + 1):
        rows = np.sort(rng.choice(m, size=n_sample, replace=False))
        names = [matrix.models[i].name for i in rows]
        try:
            rankings = {mt: relevance_ranking(matrix, baseline, mt, names) for mt in metrics}
        except DegenerateStatisticError as exc:
            last_error = exc
            continue
        return names, rankings
    raise DegenerateStatisticError(
        f"round {round_no}: no non-degenerate model subset after "
        f"{attempt_budget} retries ({last_error})"
    )


def _as_normalized(matrix) -> NormalizedMatrix:
    if isinstance(matrix, NormalizedMatrix):
        return matrix
    if isinstance(matrix, ScoreMatrix):
        return normalize_pipeline(matrix)
    raise TypeError(f"expected ScoreMatrix or NormalizedMatrix, got {type(matrix).__name__}")


def sampling_consistency_eval(matrix, baseline: str, config: ConsistencyConfig, workers: int = 1) -> ConsistencyReport:
    """Run the resampling experiment and pick the dominant metric.

    A raw ScoreMatrix is normalized once over all models first; a
    NormalizedMatrix is used as given. Rounds draw from independent Philox
    streams keyed by ``mix(seed, round)``, so ``workers`` never changes the
    result.
    """
    P = _as_normalized(matrix)
    if baseline not in P.tasks:
        raise ValidationError(f"unknown task {baseline}")
    config.check_against(len(P.models), len(P.tasks))
    k = config.k_rounds

    def run_rounds(metrics, seed):
        def one(j):
            return _draw_subset(P, baseline, metrics, config.n_sample, mix(seed, j), config.max_retries, j + 1)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(one, range(k)))
        return [one(j) for j in range(k)]

    if config.resample_per_metric:
        rounds_by_metric = {
            mt: run_rounds((mt,), mix(config.seed, 1000 + _METRIC_ORDER.index(mt)))
            for mt in config.metrics
        }
    else:
        shared = run_rounds(config.metrics, config.seed)
        rounds_by_metric = {mt: shared for mt in config.metrics}

    results = {}
    for mt in config.metrics:
        full = relevance_ranking(P, baseline, mt)
        rounds = rounds_by_metric[mt]
        sampled = [rankings[mt] for _, rankings in rounds]
        overlaps = [top_t_overlap(full, p, config.t) for p in sampled]
        pairwise = [top_t_overlap(a, b, config.t) for a, b in itertools.combinations(sampled, 2)]
        results[mt] = MetricConsistency(
            metric=mt,
            s=math.fsum(overlaps) / k,
            r=2.0 * math.fsum(pairwise) / (k * (k - 1)),
            overlaps=overlaps,
            pairwise=pairwise,
            subsets=[names for names, _ in rounds],
            baseline_ranking=full,
        )
    report = ConsistencyReport(baseline, config, results)
    if len(results) >= 2:
        report.selected = select_metric(report)
        report.fallback_order = fallback_order(report.indices())
    return report


def _indices(report_or_indices) -> dict:
    if isinstance(report_or_indices, ConsistencyReport):
        return report_or_indices.indices()
    return {CorrelationMetric(m): tuple(v) for m, v in dict(report_or_indices).items()}


def select_metric(report_or_indices) -> CorrelationMetric | None:
    """Return the metric with s_i >= s_j and r_i > r_j against every other metric.

    Accepts a ConsistencyReport or a mapping ``metric -> (s, r)``. Returns
    None when no metric dominates.
    """
    idx = _indices(report_or_indices)
    if len(idx) < 2:
        raise ValidationError("metric selection needs at least 2 metrics")
    for mi, (si, ri) in idx.items():
        if all(si >= sj and ri > rj for mj, (sj, rj) in idx.items() if mj != mi):
            return mi
    return None


def fallback_order(report_or_indices) -> list[CorrelationMetric]:
    """Advisory ordering by s + r descending, ties by metric name."""
    idx = _indices(report_or_indices)
    return sorted(idx, key=lambda m: (-(idx[m][0] + idx[m][1]), m.value))
