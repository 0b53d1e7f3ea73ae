"""Two-step standardization: per task (columns), then per model (rows)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core_data import ModelId, ScoreMatrix
from .errors import DegenerateStatisticError, ValidationError


class Stage(str, Enum):
    raw = "raw"
    feature_normalized = "feature_normalized"
    fully_normalized = "fully_normalized"


def mean_std(values) -> tuple[float, float]:
    """Two-pass mean and sample standard deviation (divisor ``len - 1``)."""
    x = np.asarray(values, dtype=float)
    n = x.size
    if n < 2:
        raise DegenerateStatisticError("standard deviation needs at least 2 values")
    mu = math.fsum(x) / n
    ss = math.fsum((x - mu) ** 2)
    return mu, math.sqrt(ss / (n - 1))


@dataclass(frozen=True, eq=False)
class NormalizedMatrix:
    models: tuple[ModelId, ...]
    tasks: tuple[str, ...]
    values: np.ndarray
    stage: Stage
    task_stats: tuple[tuple[float, float], ...] = ()
    model_stats: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "stage", Stage(self.stage))

    @property
    def shape(self):
        return self.values.shape

    @property
    def model_names(self) -> list[str]:
        return [m.name for m in self.models]

    def as_matrix(self) -> ScoreMatrix:
        """View the normalized values as a plain ScoreMatrix."""
        return ScoreMatrix(self.models, self.tasks, self.values)

    @classmethod
    def from_matrix(cls, matrix: ScoreMatrix) -> "NormalizedMatrix":
        matrix.require_complete("normalization")
        return cls(matrix.models, matrix.tasks, matrix.scores, Stage.raw)

    def to_json(self) -> dict:
        return {
            "stage": self.stage.value,
            "tasks": list(self.tasks),
            "models": [m.to_json() for m in self.models],
            "values": self.values.tolist(),
            "task_stats": [
                {"task": t, "mean": mu, "std": sd}
                for t, (mu, sd) in zip(self.tasks, self.task_stats)
            ],
            "model_stats": [
                {"model": m.name, "mean": mu, "std": sd}
                for m, (mu, sd) in zip(self.models, self.model_stats)
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "NormalizedMatrix":
        models = tuple(
            ModelId(m["name"], m.get("variant") or "unspecified", m.get("group"))
            for m in doc["models"]
        )
        return cls(
            models,
            tuple(doc["tasks"]),
            np.array(doc["values"], dtype=float),
            Stage(doc["stage"]),
            tuple((s["mean"], s["std"]) for s in doc.get("task_stats", [])),
            tuple((s["mean"], s["std"]) for s in doc.get("model_stats", [])),
        )


def feature_normalize(matrix) -> NormalizedMatrix:
    """Standardize each task column to mean 0 and sample std 1."""
    if isinstance(matrix, ScoreMatrix):
        matrix = NormalizedMatrix.from_matrix(matrix)
    if matrix.stage is not Stage.raw:
        raise ValidationError(f"feature_normalize expects raw input, got stage {matrix.stage.value}")
    out = np.empty_like(matrix.values)
    stats = []
    for j, task in enumerate(matrix.tasks):
        col = matrix.values[:, j]
        if np.all(col == col[0]):
            raise DegenerateStatisticError(f"task {task!r} has zero variance across models")
        mu, sd = mean_std(col)
        out[:, j] = (col - mu) / sd
        stats.append((mu, sd))
    return NormalizedMatrix(
        matrix.models, matrix.tasks, out, Stage.feature_normalized, tuple(stats), ()
    )


def sample_normalize(matrix: NormalizedMatrix) -> NormalizedMatrix:
    """Standardize each model row of a feature-normalized matrix."""
    if matrix.stage is not Stage.feature_normalized:
        raise ValidationError(
            f"sample_normalize expects feature_normalized input, got stage {matrix.stage.value}"
        )
    if matrix.shape[1] < 2:
        raise DegenerateStatisticError(
            "row statistics are undefined for a single-task matrix"
        )
    out = np.empty_like(matrix.values)
    stats = []
    for i, model in enumerate(matrix.models):
        row = matrix.values[i]
        if np.all(row == row[0]):
            raise DegenerateStatisticError(f"model {model.name!r} has zero variance across tasks")
        mu, sd = mean_std(row)
        out[i] = (row - mu) / sd
        stats.append((mu, sd))
    return NormalizedMatrix(
        matrix.models, matrix.tasks, out, Stage.fully_normalized, matrix.task_stats, tuple(stats)
    )


def normalize_pipeline(matrix: ScoreMatrix) -> NormalizedMatrix:
    return sample_normalize(feature_normalize(matrix))
