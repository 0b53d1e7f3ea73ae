"""Proxy weighting, checkpoint prediction and ranking comparison."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .core_data import ScoreMatrix, Variant
from .correlation import CorrelationMetric, RelevanceRanking, relevance_ranking
from .errors import ValidationError
from .normalize import mean_std, normalize_pipeline
from .robustness import RobustnessReport


def sigmoid(x: float, k: float = 1.0) -> float:
    z = k * x
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@dataclass(frozen=True)
class SelectionConfig:
    epsilon_c: float = 0.0
    epsilon_r: float = 1.0
    sigmoid_k: float = 1.0
    log_robustness: bool = False

    def __post_init__(self):
        if not 0.0 <= self.epsilon_c <= 1.0:
            raise ValidationError("epsilon_c must lie in [0, 1]; negative-correlation tasks are never retained")
        if self.epsilon_r < 0:
            raise ValidationError("epsilon_r must be >= 0")
        if not self.sigmoid_k > 0:
            raise ValidationError("sigmoid_k must be > 0")


@dataclass(frozen=True)
class ProxyEntry:
    task: str
    relevance: float
    robustness: float
    score: float
    weight: float


@dataclass(frozen=True)
class ProxySet:
    entries: tuple[ProxyEntry, ...]
    config: SelectionConfig = SelectionConfig()
    dropped: tuple[str, ...] = ()
    unmatched: tuple[str, ...] = ()

    @property
    def weights(self) -> dict[str, float]:
        return {e.task: e.weight for e in self.entries}

    @property
    def tasks(self) -> list[str]:
        return [e.task for e in self.entries]

    def to_json(self) -> dict:
        return {
            "config": {
                "epsilon_c": self.config.epsilon_c,
                "epsilon_r": self.config.epsilon_r,
                "sigmoid_k": self.config.sigmoid_k,
                "log_robustness": self.config.log_robustness,
            },
            "entries": [
                {
                    "task": e.task,
                    "relevance": e.relevance,
                    "robustness": None if math.isinf(e.robustness) else e.robustness,
                    "score": e.score,
                    "weight": e.weight,
                }
                for e in self.entries
            ],
            "dropped": list(self.dropped),
            "unmatched": list(self.unmatched),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ProxySet":
        entries = tuple(
            ProxyEntry(
                e["task"], e["relevance"],
                math.inf if e["robustness"] is None else e["robustness"],
                e["score"], e["weight"],
            )
            for e in doc["entries"]
        )
        return cls(entries, SelectionConfig(**doc.get("config", {})),
                   tuple(doc.get("dropped", [])), tuple(doc.get("unmatched", [])))

    @classmethod
    def uniform(cls, tasks) -> "ProxySet":
        tasks = list(tasks)
        w = 1.0 / len(tasks)
        return cls(tuple(ProxyEntry(t, 1.0, math.inf, 1.0, w) for t in tasks))


def select_proxies(relevance, robustness, config: SelectionConfig = SelectionConfig()) -> ProxySet:
    """Filter candidates by both thresholds and weight them by C * f(R).

    ``relevance`` is a RelevanceRanking or ``{task: C}``; ``robustness`` a
    RobustnessReport or ``{task: R}``. Only tasks present in both are
    considered; the rest are listed in ``unmatched``. Weights are normalized
    over the retained tasks.
    """
    c_map = relevance.relevance() if isinstance(relevance, RelevanceRanking) else dict(relevance)
    r_map = robustness.ratios() if isinstance(robustness, RobustnessReport) else dict(robustness)
    common = [t for t in c_map if t in r_map]
    unmatched = tuple(sorted(c_map.keys() ^ r_map.keys()))

    kept, dropped = [], []
    for task in common:
        c, r = float(c_map[task]), float(r_map[task])
        if c > config.epsilon_c and r > config.epsilon_r:
            kept.append((task, c, r))
        else:
            dropped.append(task)
    if not kept:
        raise ValidationError(
            f"no candidate task passes epsilon_c={config.epsilon_c} and "
            f"epsilon_r={config.epsilon_r}; relax the thresholds"
        )

    scored = []
    for task, c, r in kept:
        x = math.log(r) if config.log_robustness else r
        scored.append((task, c, r, c * sigmoid(x, config.sigmoid_k)))
    total = math.fsum(s for *_, s in scored)
    entries = [ProxyEntry(t, c, r, s, s / total) for t, c, r, s in scored]
    entries.sort(key=lambda e: (-e.weight, e.task))
    return ProxySet(tuple(entries), config, tuple(dropped), unmatched)


@dataclass(frozen=True)
class Prediction:
    checkpoint: str
    predicted_score: float
    contributions: dict[str, float]

    def to_json(self) -> dict:
        return {
            "checkpoint": self.checkpoint,
            "predicted_score": self.predicted_score,
            "contributions": self.contributions,
        }


def predict(proxies: ProxySet, checkpoint_scores: Mapping[str, float], checkpoint: str = "checkpoint",
            aggregation: str = "raw", reference: Mapping[str, tuple[float, float]] | None = None) -> Prediction:
    """Weighted aggregate of a checkpoint's proxy-task scores.

    ``aggregation="raw"`` (default) is the weighted mean of raw scores.
    ``aggregation="zscore"`` first standardizes each task score with the
    ``(mean, std)`` pair given in ``reference``.
    """
    contributions = {}
    for e in proxies.entries:
        if e.task not in checkpoint_scores:
            raise ValidationError(f"checkpoint {checkpoint!r} has no score for proxy task {e.task!r}")
        v = float(checkpoint_scores[e.task])
        if aggregation == "zscore":
            if reference is None or e.task not in reference:
                raise ValidationError(f"zscore aggregation needs reference stats for task {e.task!r}")
            mu, sd = reference[e.task]
            v = (v - mu) / sd
        elif aggregation != "raw":
            raise ValidationError(f"unknown aggregation {aggregation!r}")
        contributions[e.task] = e.weight * v
    return Prediction(checkpoint, math.fsum(contributions.values()), contributions)


def reference_stats(matrix: ScoreMatrix, tasks=None) -> dict[str, tuple[float, float]]:
    """Per-task (mean, sample std) usable as ``predict(..., reference=...)``."""
    tasks = matrix.tasks if tasks is None else tasks
    return {t: mean_std(matrix.column(t)) for t in tasks}


class Orientation(str, Enum):
    higher = "higher"
    lower = "lower"


@dataclass(frozen=True)
class ScoredRanking:
    scores: dict[str, float]
    orientation: Orientation = Orientation.higher
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        object.__setattr__(self, "scores", {k: float(v) for k, v in dict(self.scores).items()})

    def oriented(self, model: str) -> float:
        v = self.scores[model]
        return v if self.orientation is Orientation.higher else -v

    def ranks(self) -> dict[str, int]:
        """1 = best; ties share the best position."""
        vals = {m: self.oriented(m) for m in self.scores}
        return {m: 1 + sum(1 for o in vals.values() if o > v) for m, v in vals.items()}


@dataclass(frozen=True)
class RankComparison:
    ranking_a: ScoredRanking
    ranking_b: ScoredRanking
    discordant_pairs: float
    total_pairs: int
    discordant: tuple[tuple[str, str], ...] = ()

    def to_json(self) -> dict:
        return {
            "a": {"label": self.ranking_a.label, "orientation": self.ranking_a.orientation.value,
                  "scores": self.ranking_a.scores},
            "b": {"label": self.ranking_b.label, "orientation": self.ranking_b.orientation.value,
                  "scores": self.ranking_b.scores},
            "discordant_pairs": self.discordant_pairs,
            "total_pairs": self.total_pairs,
            "discordant": [list(p) for p in self.discordant],
        }


def _as_ranking(x) -> ScoredRanking:
    return x if isinstance(x, ScoredRanking) else ScoredRanking(dict(x))


def count_discordant_pairs(a, b) -> RankComparison:
    """Count model pairs ordered oppositely by two scored rankings.

    A pair tied in either ranking counts as half a discordant pair.
    """
    a, b = _as_ranking(a), _as_ranking(b)
    if set(a.scores) != set(b.scores):
        raise ValidationError(
            f"model sets differ: {sorted(set(a.scores) ^ set(b.scores))}"
        )
    models = list(a.scores)
    if len(models) < 2:
        raise ValidationError("need at least 2 models to compare rankings")
    count = 0.0
    pairs = []
    for m1, m2 in itertools.combinations(models, 2):
        da = a.oriented(m1) - a.oriented(m2)
        db = b.oriented(m1) - b.oriented(m2)
        if da == 0 or db == 0:
            count += 0.5
        elif (da > 0) != (db > 0):
            count += 1.0
            pairs.append((m1, m2))
    total = len(models) * (len(models) - 1) // 2
    return RankComparison(a, b, count, total, tuple(pairs))


class Strategy(str, Enum):
    chat = "chat"
    base = "base"
    base_chat = "base_chat"


# which candidate rows feed relevance selection, and which checkpoint
# evaluation flavour feeds prediction
_ROUTES = {
    Strategy.chat: (Variant.chat, Variant.chat),
    Strategy.base: (Variant.base, Variant.base),
    Strategy.base_chat: (Variant.chat, Variant.base),
}


@dataclass
class StrategyResult:
    strategy: Strategy
    relevance: RelevanceRanking
    proxies: ProxySet
    predictions: list[Prediction]
    comparison: RankComparison | None = None

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "relevance": self.relevance.to_json(),
            "proxies": self.proxies.to_json(),
            "predictions": [p.to_json() for p in self.predictions],
            "comparison": None if self.comparison is None else self.comparison.to_json(),
        }


def _with_target(candidates: ScoreMatrix, target: ScoreMatrix, baseline: str,
                 expect: Variant, pairing: Mapping[str, str] | None) -> ScoreMatrix:
    """Append the target column to candidate rows.

    Rows are paired with target rows through ``pairing`` (candidate name ->
    target name) or, without it, by position.
    """
    for m in candidates.models:
        if m.variant not in (expect, Variant.unspecified):
            raise ValidationError(f"model {m.name!r} is labelled {m.variant.value}, expected {expect.value}")
    tcol = target.column(baseline)
    if pairing is None:
        if candidates.shape[0] != target.shape[0]:
            raise ValidationError(
                f"{candidates.shape[0]} {expect.value} rows cannot be paired by position "
                f"with {target.shape[0]} target rows"
            )
        tvals = np.asarray(tcol)
    else:
        tvals = np.array([tcol[target.model_index(pairing[m.name])] if m.name in pairing else np.nan
                          for m in candidates.models])
        missing = [m.name for m, v in zip(candidates.models, tvals) if np.isnan(v)]
        if missing:
            raise ValidationError(f"no target pairing for models {missing}")
    if baseline in candidates.tasks:
        raise ValidationError(f"target task {baseline!r} also appears among candidates")
    return ScoreMatrix(
        candidates.models,
        (*candidates.tasks, baseline),
        np.column_stack([candidates.scores, tvals]),
        np.column_stack([candidates.missing, np.isnan(tvals)]),
    )


def strategy_run(target: ScoreMatrix, candidates_chat: ScoreMatrix | None, candidates_base: ScoreMatrix | None,
                 strategy, *, baseline: str, robustness, checkpoints: Mapping[str, Mapping[str, Mapping[str, float]]],
                 config: SelectionConfig = SelectionConfig(), metric=CorrelationMetric.kendall,
                 ground_truth: ScoredRanking | Mapping[str, float] | None = None,
                 pairing: Mapping[str, str] | None = None) -> StrategyResult:
    """Select proxies from one model population and predict checkpoints.

    ``checkpoints`` maps an evaluation flavour (``"chat"`` / ``"base"``) to
    ``{checkpoint: {task: score}}``. The strategy decides which candidate
    matrix drives relevance and which flavour of checkpoint scores is
    aggregated.
    """
    strategy = Strategy(strategy)
    select_from, predict_with = _ROUTES[strategy]
    cands = candidates_chat if select_from is Variant.chat else candidates_base
    if cands is None:
        raise ValidationError(f"strategy {strategy.value} needs {select_from.value} candidate rows")
    joined = _with_target(cands, target, baseline, select_from, pairing)
    ranking = relevance_ranking(normalize_pipeline(joined), baseline, metric)
    proxies = select_proxies(ranking, robustness, config)

    flavour = checkpoints.get(predict_with.value)
    if flavour is None:
        flavour = {} if not any(checkpoints.values()) else None
    if flavour is None:
        raise ValidationError(f"strategy {strategy.value} needs {predict_with.value}-format checkpoint scores")
    predictions = [predict(proxies, scores, name) for name, scores in flavour.items()]

    comparison = None
    if ground_truth is not None and predictions:
        gt = _as_ranking(ground_truth)
        pred = ScoredRanking({p.checkpoint: p.predicted_score for p in predictions}, label=f"V_{strategy.value}")
        comparison = count_discordant_pairs(pred, gt)
    return StrategyResult(strategy, ranking, proxies, predictions, comparison)
