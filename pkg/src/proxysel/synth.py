"""Seeded latent-factor generator for score matrices with known task structure.

Each model gets an ability vector drawn i.i.d. N(0, 1) per factor; each task
has a loading vector. The cell score is ``link(<ability, loading>) + noise``,
clipped to [0, 100]. Links:

* ``linear``: ``50 + 10 * z``
* ``logistic_emergence``: ``100 / (1 + exp(-steepness * (z - threshold)))``,
  which stays near 0 until the latent sum passes ``threshold``.

Randomness comes from Philox streams (see :mod:`proxysel.rng`): stream 0 for
abilities, stream 1 for noise, stream 2 for random loadings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .core_data import ModelId, ScoreMatrix
from .errors import ValidationError
from .rng import generator

LINEAR_CENTER = 50.0
LINEAR_SCALE = 10.0

_ABILITY_STREAM = 0
_NOISE_STREAM = 1
_LOADING_STREAM = 2


class Link(str, Enum):
    linear = "linear"
    logistic_emergence = "logistic_emergence"


@dataclass(frozen=True)
class SynthConfig:
    n_models: int
    n_tasks: int
    n_factors: int = 1
    loadings: tuple | None = None  # n_tasks x n_factors; random unit vectors if None
    noise_sd: float = 0.0
    link: Link = Link.linear
    task_links: tuple | None = None  # per-task override of ``link``
    emergence_threshold: float = 1.5
    steepness: float = 4.0
    seed: int = 0
    task_names: tuple | None = None
    model_prefix: str = "M"

    def __post_init__(self):
        object.__setattr__(self, "link", Link(self.link))
        if self.n_models < 2 or self.n_tasks < 1 or self.n_factors < 1:
            raise ValidationError("need n_models >= 2, n_tasks >= 1, n_factors >= 1")
        if self.noise_sd < 0:
            raise ValidationError("noise_sd must be >= 0")
        if self.loadings is not None:
            L = np.asarray(self.loadings, dtype=float)
            if L.shape != (self.n_tasks, self.n_factors):
                raise ValidationError(
                    f"loadings shape {L.shape} != ({self.n_tasks}, {self.n_factors})"
                )
            object.__setattr__(self, "loadings", tuple(map(tuple, L.tolist())))
        if self.task_links is not None:
            if len(self.task_links) != self.n_tasks:
                raise ValidationError("task_links needs one entry per task")
            object.__setattr__(self, "task_links", tuple(Link(k) for k in self.task_links))
        if self.task_names is not None and len(self.task_names) != self.n_tasks:
            raise ValidationError("task_names needs one entry per task")

    @classmethod
    def from_json(cls, doc: dict) -> "SynthConfig":
        doc = dict(doc)
        for key in ("loadings", "task_links", "task_names"):
            if doc.get(key) is not None:
                doc[key] = tuple(tuple(v) if isinstance(v, list) else v for v in doc[key])
        return cls(**doc)

    def links(self) -> tuple[Link, ...]:
        return self.task_links or (self.link,) * self.n_tasks

    def names(self) -> tuple[str, ...]:
        return self.task_names or tuple(f"T{j + 1}" for j in range(self.n_tasks))


@dataclass
class SynthTruth:
    loadings: np.ndarray
    abilities: np.ndarray
    latent: np.ndarray
    clipped: int
    task_names: tuple[str, ...] = field(default=())

    def task_similarity(self) -> np.ndarray:
        """Cosine similarity between task loading vectors."""
        norms = np.linalg.norm(self.loadings, axis=1)
        norms[norms == 0] = 1.0
        U = self.loadings / norms[:, None]
        return U @ U.T

    def to_json(self) -> dict:
        return {
            "tasks": list(self.task_names),
            "loadings": self.loadings.tolist(),
            "abilities": self.abilities.tolist(),
            "task_similarity": self.task_similarity().tolist(),
            "clipped_cells": self.clipped,
        }


def apply_link(z: np.ndarray, link: Link, threshold: float, steepness: float) -> np.ndarray:
    if link is Link.linear:
        return LINEAR_CENTER + LINEAR_SCALE * z
    return 100.0 / (1.0 + np.exp(-steepness * (z - threshold)))


def random_loadings(n_tasks: int, n_factors: int, seed: int) -> np.ndarray:
    """Unit-norm random loading vectors."""
    L = generator(seed, _LOADING_STREAM).standard_normal((n_tasks, n_factors))
    return L / np.linalg.norm(L, axis=1, keepdims=True)


def generate(config: SynthConfig, abilities=None) -> tuple[ScoreMatrix, SynthTruth]:
    """Generate a score matrix and its ground truth.

    ``abilities`` (n_models x n_factors) overrides the random draw, which is
    how checkpoint populations with controlled ability are built.
    """
    if config.loadings is None:
        L = random_loadings(config.n_tasks, config.n_factors, config.seed)
    else:
        L = np.asarray(config.loadings, dtype=float)
    if abilities is None:
        A = generator(config.seed, _ABILITY_STREAM).standard_normal((config.n_models, config.n_factors))
    else:
        A = np.asarray(abilities, dtype=float).reshape(config.n_models, config.n_factors)
    Z = A @ L.T
    scores = np.empty_like(Z)
    for j, link in enumerate(config.links()):
        scores[:, j] = apply_link(Z[:, j], link, config.emergence_threshold, config.steepness)
    if config.noise_sd > 0:
        scores = scores + config.noise_sd * generator(config.seed, _NOISE_STREAM).standard_normal(Z.shape)
    clipped = int(np.sum((scores < 0) | (scores > 100)))
    scores = np.clip(scores, 0.0, 100.0)
    models = tuple(ModelId(f"{config.model_prefix}{i + 1}") for i in range(config.n_models))
    matrix = ScoreMatrix(models, config.names(), scores)
    return matrix, SynthTruth(L, A, Z, clipped, config.names())


def write_outputs(matrix: ScoreMatrix, truth: SynthTruth, out, truth_path=None) -> None:
    from .core_data import save_matrix

    save_matrix(matrix, out)
    if truth_path is not None:
        Path(truth_path).write_text(json.dumps(truth.to_json(), indent=2) + "\n", encoding="utf-8")
