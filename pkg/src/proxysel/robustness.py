"""Variance-ratio robustness of tasks across two small-model ensembles.

``R = var(data-variability group) / var(random-noise group)``; a task whose
scores move with the training data more than with the seed is more robust.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core_data import Group, ScoreMatrix
from .errors import DegenerateStatisticError, ValidationError

EPSILON_FLOOR = 1e-9


def sample_variance(scores) -> float:
    x = np.asarray(scores, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DegenerateStatisticError("sample variance needs at least 2 values")
    if not np.all(np.isfinite(x)):
        raise ValidationError("sample variance inputs must be finite")
    mu = math.fsum(x) / x.size
    return math.fsum((x - mu) ** 2) / (x.size - 1)


@dataclass(frozen=True)
class GroupScores:
    group: Group
    task: str
    scores: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "group", Group(self.group))
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        if len(self.scores) < 2:
            raise ValidationError(f"group {self.group.value} needs >= 2 scores for task {self.task!r}")
        if not all(math.isfinite(s) for s in self.scores):
            raise ValidationError(f"non-finite score in group {self.group.value}, task {self.task!r}")


@dataclass(frozen=True)
class RobustnessEntry:
    task: str
    var_data: float
    var_noise: float
    ratio: float  # math.inf when degenerate
    degenerate: bool
    n_data: int
    n_noise: int

    def to_json(self) -> dict:
        return {
            "task": self.task,
            "var_data": self.var_data,
            "var_noise": self.var_noise,
            "ratio": None if self.degenerate else self.ratio,
            "degenerate": self.degenerate,
            "n_data": self.n_data,
            "n_noise": self.n_noise,
        }


@dataclass(frozen=True)
class RobustnessReport:
    entries: tuple[RobustnessEntry, ...]
    epsilon_floor: float = EPSILON_FLOOR

    def ratios(self) -> dict[str, float]:
        return {e.task: e.ratio for e in self.entries}

    def __getitem__(self, task: str) -> RobustnessEntry:
        for e in self.entries:
            if e.task == task:
                return e
        raise KeyError(task)

    def __contains__(self, task) -> bool:
        return any(e.task == task for e in self.entries)

    def to_json(self) -> dict:
        return {
            "epsilon_floor": self.epsilon_floor,
            "entries": [e.to_json() for e in self.entries],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RobustnessReport":
        entries = []
        for e in doc["entries"]:
            entries.append(
                RobustnessEntry(
                    e["task"], e["var_data"], e["var_noise"],
                    math.inf if e["degenerate"] else e["ratio"],
                    e["degenerate"], e["n_data"], e["n_noise"],
                )
            )
        return cls(tuple(entries), doc.get("epsilon_floor", EPSILON_FLOOR))


def _by_task(groups, expected: Group) -> dict[str, GroupScores]:
    if isinstance(groups, dict):
        groups = [
            g if isinstance(g, GroupScores) else GroupScores(expected, task, g)
            for task, g in groups.items()
        ]
    out = {}
    for g in groups:
        if g.group is not expected:
            raise ValidationError(f"task {g.task!r}: expected {expected.value} scores, got {g.group.value}")
        if g.task in out:
            raise ValidationError(f"duplicate task {g.task!r} in {expected.value} group")
        out[g.task] = g
    return out


def robustness_scores(data, noise, epsilon_floor: float = EPSILON_FLOOR) -> RobustnessReport:
    """Per-task variance ratio, sorted by ratio descending (ties by task name).

    ``data`` and ``noise`` are GroupScores sequences or ``{task: scores}``
    mappings for the data-variability and random-noise groups. A noise
    variance below ``epsilon_floor`` gives an infinite, flagged ratio.
    """
    d = _by_task(data, Group.data_variability)
    r = _by_task(noise, Group.random_noise)
    for task in d.keys() ^ r.keys():
        side = "data_variability" if task in d else "random_noise"
        raise ValidationError(f"task {task!r} present only in the {side} group")
    entries = []
    for task in d:
        vd = sample_variance(d[task].scores)
        vr = sample_variance(r[task].scores)
        degenerate = vr < epsilon_floor
        if degenerate:
            warnings.warn(
                f"task {task!r}: random-noise variance {vr:.3g} below floor; ratio flagged infinite",
                RuntimeWarning,
                stacklevel=2,
            )
        ratio = math.inf if degenerate else vd / vr
        entries.append(
            RobustnessEntry(task, vd, vr, ratio, degenerate, len(d[task].scores), len(r[task].scores))
        )
    entries.sort(key=lambda e: (-e.ratio, e.task))
    return RobustnessReport(tuple(entries), epsilon_floor)


def robustness_from_matrix(matrix: ScoreMatrix, tasks=None, epsilon_floor: float = EPSILON_FLOOR) -> RobustnessReport:
    """Split matrix rows by model group metadata and score every task."""
    dv = [matrix.model_index(n) for n in matrix.models_where(group=Group.data_variability)]
    rn = [matrix.model_index(n) for n in matrix.models_where(group=Group.random_noise)]
    if len(dv) < 2 or len(rn) < 2:
        raise ValidationError(
            f"need >= 2 models per group, got {len(dv)} data_variability and {len(rn)} random_noise"
        )
    tasks = matrix.tasks if tasks is None else tasks
    data, noise = [], []
    for task in tasks:
        j = matrix.task_index(task)
        for rows, grp, out in ((dv, Group.data_variability, data), (rn, Group.random_noise, noise)):
            if matrix.missing[rows, j].any():
                raise ValidationError(f"missing score for task {task!r} in group {grp.value}")
            out.append(GroupScores(grp, task, matrix.scores[rows, j]))
    return robustness_scores(data, noise, epsilon_floor)
