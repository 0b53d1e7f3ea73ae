"""Correlation kernels, relevance rankings against a baseline task, top-t overlap."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core_data import ScoreMatrix
from .errors import DegenerateStatisticError, ValidationError
from .normalize import NormalizedMatrix


class CorrelationMetric(str, Enum):
    pearson = "pearson"
    spearman = "spearman"
    kendall = "kendall"


def _pair(x, y, min_len=3):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValidationError(f"vectors must be 1-D and equal length, got {x.shape} and {y.shape}")
    if x.size < min_len:
        raise ValidationError(f"need at least {min_len} paired values, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("correlation inputs must be finite")
    return x, y


def pearson(x, y) -> float:
    x, y = _pair(x, y)
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateStatisticError("pearson undefined for a constant vector")
    n = x.size
    dx = x - math.fsum(x) / n
    dy = y - math.fsum(y) / n
    r = math.fsum(dx * dy) / math.sqrt(math.fsum(dx * dx) * math.fsum(dy * dy))
    return max(-1.0, min(1.0, r))


def average_ranks(x) -> np.ndarray:
    """1-based ranks with ties sharing the mean of their positions."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(x.size, dtype=float)
    sx = x[order]
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    x, y = _pair(x, y)
    return pearson(average_ranks(x), average_ranks(y))


def _tie_pairs(x: np.ndarray) -> int:
    _, counts = np.unique(x, return_counts=True)
    return int(np.sum(counts * (counts - 1) // 2))


def kendall(x, y) -> float:
    """Kendall tau-b with tie correction, by direct pair enumeration."""
    x, y = _pair(x, y)
    n = x.size
    n0 = n * (n - 1) // 2
    tx, ty = _tie_pairs(x), _tie_pairs(y)
    if tx == n0 or ty == n0:
        raise DegenerateStatisticError("kendall undefined when a vector is all ties")
    sx = np.sign(x[:, None] - x[None, :])
    sy = np.sign(y[:, None] - y[None, :])
    prod = np.triu(sx * sy, k=1)
    s = int(np.sum(prod > 0)) - int(np.sum(prod < 0))
    tau = s / math.sqrt((n0 - tx) * (n0 - ty))
    return max(-1.0, min(1.0, tau))


KERNELS = {
    CorrelationMetric.pearson: pearson,
    CorrelationMetric.spearman: spearman,
    CorrelationMetric.kendall: kendall,
}


def correlate(metric, x, y) -> float:
    return KERNELS[CorrelationMetric(metric)](x, y)


@dataclass(frozen=True)
class RelevanceRanking:
    baseline: str
    entries: tuple[tuple[str, float], ...]
    metric: CorrelationMetric
    model_subset: tuple[str, ...]

    @property
    def tasks(self) -> list[str]:
        return [t for t, _ in self.entries]

    def relevance(self) -> dict[str, float]:
        return dict(self.entries)

    def top(self, t: int) -> list[str]:
        return [task for task, _ in self.entries[:t]]

    def to_json(self) -> dict:
        return {
            "baseline": self.baseline,
            "metric": self.metric.value,
            "model_subset": list(self.model_subset),
            "entries": [{"task": t, "relevance": c} for t, c in self.entries],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RelevanceRanking":
        return cls(
            doc["baseline"],
            tuple((e["task"], float(e["relevance"])) for e in doc["entries"]),
            CorrelationMetric(doc["metric"]),
            tuple(doc.get("model_subset", [])),
        )


def _values_and_labels(P):
    if isinstance(P, NormalizedMatrix):
        return P.values, P.model_names, P.tasks
    if isinstance(P, ScoreMatrix):
        P.require_complete("relevance ranking")
        return P.scores, P.model_names, P.tasks
    raise TypeError(f"expected NormalizedMatrix or ScoreMatrix, got {type(P).__name__}")


def _row_indices(names, models):
    if models is None:
        return list(range(len(names)))
    index = {n: i for i, n in enumerate(names)}
    rows = []
    for m in models:
        m = getattr(m, "name", m)
        if m not in index:
            raise ValidationError(f"unknown model {m}")
        rows.append(index[m])
    if len(set(rows)) != len(rows):
        raise ValidationError("model subset contains duplicates")
    return sorted(rows)


def relevance_ranking(P, baseline: str, metric, models=None) -> RelevanceRanking:
    """Correlate every non-baseline task with the baseline over a model subset.

    Entries are sorted by relevance descending, ties by task name.
    """
    metric = CorrelationMetric(metric)
    values, names, tasks = _values_and_labels(P)
    if baseline not in tasks:
        raise ValidationError(f"unknown task {baseline}")
    rows = _row_indices(names, models)
    if len(rows) < 3:
        raise ValidationError(f"relevance needs at least 3 models, got {len(rows)}")
    kernel = KERNELS[metric]
    b = values[rows, tasks.index(baseline)]
    entries = []
    for j, task in enumerate(tasks):
        if task == baseline:
            continue
        try:
            c = kernel(b, values[rows, j])
        except DegenerateStatisticError as exc:
            raise DegenerateStatisticError(f"task {task!r} vs {baseline!r}: {exc}") from exc
        entries.append((task, c))
    entries.sort(key=lambda e: (-e[1], e[0]))
    return RelevanceRanking(baseline, tuple(entries), metric, tuple(names[i] for i in rows))


def top_t_overlap(a: RelevanceRanking, b: RelevanceRanking, t: int) -> float:
    if a.baseline != b.baseline:
        raise ValidationError(f"rankings have different baselines: {a.baseline!r} vs {b.baseline!r}")
    if t < 1:
        raise ValidationError("t must be >= 1")
    if len(a.entries) < t or len(b.entries) < t:
        raise ValidationError(f"rankings need at least t={t} entries")
    return len(set(a.top(t)) & set(b.top(t))) / t
