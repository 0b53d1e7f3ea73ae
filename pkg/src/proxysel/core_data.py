"""Score matrix data model, file I/O and row/column selection."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError


class Variant(str, Enum):
    chat = "chat"
    base = "base"
    unspecified = "unspecified"


class Group(str, Enum):
    data_variability = "data_variability"
    random_noise = "random_noise"


@dataclass(frozen=True)
class ModelId:
    name: str
    variant: Variant = Variant.unspecified
    group: Group | None = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ValidationError("model name must be a nonempty string")
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.group is not None:
            object.__setattr__(self, "group", Group(self.group))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "variant": self.variant.value,
            "group": None if self.group is None else self.group.value,
        }


@dataclass(frozen=True)
class EvaluationRecord:
    model: ModelId
    task: str
    score: float
    source: str = ""

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValidationError(f"non-finite score for ({self.model.name}, {self.task})")


def _check_unique(labels: Sequence[str], kind: str) -> None:
    seen = set()
    for label in labels:
        if label in seen:
            raise ValidationError(f"duplicate {kind} label {label!r}")
        seen.add(label)


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """Models x tasks grid of benchmark scores.

    ``scores`` holds NaN in missing cells; ``missing`` is the authoritative mask.
    Arrays are made read-only on construction.
    """

    models: tuple[ModelId, ...]
    tasks: tuple[str, ...]
    scores: np.ndarray
    missing: np.ndarray = field(default=None)

    def __post_init__(self):
        models = tuple(m if isinstance(m, ModelId) else ModelId(m) for m in self.models)
        tasks = tuple(self.tasks)
        scores = np.array(self.scores, dtype=float, copy=True)
        if scores.ndim != 2 or scores.shape != (len(models), len(tasks)):
            raise ValidationError(
                f"score grid shape {scores.shape} does not match "
                f"{len(models)} models x {len(tasks)} tasks"
            )
        if len(models) < 2 or len(tasks) < 1:
            raise ValidationError("matrix needs at least 2 models and 1 task")
        for t in tasks:
            if not isinstance(t, str) or not t:
                raise ValidationError("task names must be nonempty strings")
        _check_unique([m.name for m in models], "model")
        _check_unique(tasks, "task")

        if self.missing is None:
            missing = np.isnan(scores)
        else:
            missing = np.array(self.missing, dtype=bool, copy=True)
            if missing.shape != scores.shape:
                raise ValidationError("missing mask shape does not match scores")
        present = scores[~missing]
        if not np.all(np.isfinite(present)):
            i, j = np.argwhere(~missing & ~np.isfinite(scores))[0]
            raise ValidationError(
                f"non-finite score at model {models[i].name!r}, task {tasks[j]!r}"
            )
        scores[missing] = np.nan
        scores.setflags(write=False)
        missing.setflags(write=False)
        object.__setattr__(self, "models", models)
        object.__setattr__(self, "tasks", tasks)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "missing", missing)

    @property
    def shape(self) -> tuple[int, int]:
        return self.scores.shape

    @property
    def model_names(self) -> list[str]:
        return [m.name for m in self.models]

    @property
    def has_missing(self) -> bool:
        return bool(self.missing.any())

    def model_index(self, name: str) -> int:
        for i, m in enumerate(self.models):
            if m.name == name:
                return i
        raise ValidationError(f"unknown model {name}")

    def task_index(self, task: str) -> int:
        try:
            return self.tasks.index(task)
        except ValueError:
            raise ValidationError(f"unknown task {task}") from None

    def column(self, task: str) -> np.ndarray:
        return self.scores[:, self.task_index(task)]

    def row(self, model: str) -> np.ndarray:
        return self.scores[self.model_index(model)]

    def require_complete(self, what: str = "this operation") -> None:
        if self.has_missing:
            i, j = np.argwhere(self.missing)[0]
            raise ValidationError(
                f"{what} requires a complete matrix; missing cell at "
                f"model {self.models[i].name!r}, task {self.tasks[j]!r}"
            )

    def models_where(self, *, variant=None, group=None) -> list[str]:
        out = []
        for m in self.models:
            if variant is not None and m.variant != Variant(variant):
                continue
            if group is not None and m.group != Group(group):
                continue
            out.append(m.name)
        return out

    def with_metadata(self, manifest: dict[str, dict]) -> "ScoreMatrix":
        """Return a copy whose models carry variant/group metadata from a manifest."""
        models = []
        for m in self.models:
            meta = manifest.get(m.name, {})
            models.append(
                ModelId(m.name, meta.get("variant", m.variant.value), meta.get("group", m.group))
            )
        return ScoreMatrix(tuple(models), self.tasks, self.scores, self.missing)

    def records(self, source: str = "") -> list[EvaluationRecord]:
        return [
            EvaluationRecord(m, t, float(self.scores[i, j]), source)
            for i, m in enumerate(self.models)
            for j, t in enumerate(self.tasks)
            if not self.missing[i, j]
        ]

    def equals(self, other: "ScoreMatrix") -> bool:
        return (
            self.models == other.models
            and self.tasks == other.tasks
            and np.array_equal(self.missing, other.missing)
            and np.array_equal(self.scores, other.scores, equal_nan=True)
        )

    def __eq__(self, other):
        if not isinstance(other, ScoreMatrix):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "tasks": list(self.tasks),
            "models": [m.to_json() for m in self.models],
            "scores": [
                [None if self.missing[i, j] else float(self.scores[i, j]) for j in range(self.shape[1])]
                for i in range(self.shape[0])
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ScoreMatrix":
        try:
            tasks = doc["tasks"]
            raw_models = doc["models"]
            rows = doc["scores"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"matrix JSON lacks required key: {exc}") from None
        models = []
        for m in raw_models:
            if isinstance(m, str):
                models.append(ModelId(m))
            else:
                models.append(
                    ModelId(m["name"], m.get("variant") or "unspecified", m.get("group"))
                )
        if len(rows) != len(models):
            raise ValidationError(f"{len(rows)} score rows for {len(models)} models")
        grid = np.full((len(models), len(tasks)), np.nan)
        missing = np.zeros(grid.shape, dtype=bool)
        for i, row in enumerate(rows):
            if len(row) != len(tasks):
                raise ValidationError(
                    f"row {models[i].name!r} has {len(row)} cells, expected {len(tasks)}"
                )
            for j, v in enumerate(row):
                if v is None:
                    missing[i, j] = True
                elif isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ValidationError(
                        f"non-numeric cell at row {models[i].name!r}, column {tasks[j]!r}: {v!r}"
                    )
                else:
                    grid[i, j] = v
        return cls(tuple(models), tuple(tasks), grid, missing)


def _parse_csv(text: str) -> ScoreMatrix:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise ValidationError("empty matrix file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[0] != "model":
        raise ValidationError("CSV header must be 'model,<task1>,<task2>,...'")
    tasks = header[1:]
    _check_unique(tasks, "task")
    if len(rows) == 1:
        raise ValidationError("empty matrix: no model rows")
    names, grid = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValidationError(
                f"row {lineno} ({row[0]!r}) has {len(row)} fields, expected {len(header)}"
            )
        names.append(row[0].strip())
        values = []
        for task, cell in zip(tasks, row[1:]):
            cell = cell.strip()
            if cell == "":
                values.append(np.nan)
                continue
            try:
                v = float(cell)
            except ValueError:
                raise ValidationError(
                    f"non-numeric cell at row {row[0]!r}, column {task!r}: {cell!r}"
                ) from None
            if not math.isfinite(v):
                raise ValidationError(f"non-finite cell at row {row[0]!r}, column {task!r}")
            values.append(v)
        grid.append(values)
    grid = np.array(grid, dtype=float)
    return ScoreMatrix(tuple(ModelId(n) for n in names), tuple(tasks), grid, np.isnan(grid))


def load_matrix(path, format: str | None = None, manifest=None) -> ScoreMatrix:
    """Load and validate a score matrix from CSV or JSON.

    ``format`` defaults to the file suffix. ``manifest`` optionally attaches
    model metadata (a mapping or a path to a manifest JSON file).
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    text = path.read_text(encoding="utf-8")
    if fmt == "csv":
        matrix = _parse_csv(text)
    elif fmt == "json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON: {exc}") from None
        if isinstance(doc, dict) and "stage" in doc and "values" in doc:
            # a NormalizedMatrix document; keep the values
            doc = {"tasks": doc["tasks"], "models": doc["models"], "scores": doc["values"]}
        matrix = ScoreMatrix.from_json(doc)
    else:
        raise ValidationError(f"unsupported matrix format {fmt!r}")
    if manifest is not None:
        if not isinstance(manifest, dict):
            manifest = load_manifest(manifest)
        matrix = matrix.with_metadata(manifest)
    return matrix


def save_matrix(matrix: ScoreMatrix, path, format: str | None = None) -> None:
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt == "json":
        path.write_text(json.dumps(matrix.to_json(), indent=2) + "\n", encoding="utf-8")
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", *matrix.tasks])
        for i, m in enumerate(matrix.models):
            w.writerow(
                [m.name]
                + ["" if matrix.missing[i, j] else repr(float(matrix.scores[i, j]))
                   for j in range(matrix.shape[1])]
            )
        path.write_text(buf.getvalue(), encoding="utf-8")
    else:
        raise ValidationError(f"unsupported matrix format {fmt!r}")


def load_manifest(path) -> dict[str, dict]:
    """Read a model manifest.

    Accepted layouts: ``{"models": [{"name", "variant", "group"}, ...]}`` or
    ``{"<name>": {"variant": ..., "group": ...}}``.
    """
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(doc, dict) and isinstance(doc.get("models"), list):
        out = {}
        for m in doc["models"]:
            if m["name"] in out:
                raise ValidationError(f"duplicate model label {m['name']!r} in manifest")
            out[m["name"]] = {k: m[k] for k in ("variant", "group") if m.get(k) is not None}
        return out
    if isinstance(doc, dict):
        return doc
    raise ValidationError("manifest must be a JSON object")


def _names(items: Iterable | None) -> list[str] | None:
    if items is None:
        return None
    return [i.name if isinstance(i, ModelId) else i for i in items]


def submatrix(matrix: ScoreMatrix, models=None, tasks=None) -> ScoreMatrix:
    """Restrict to a subset of models and tasks, keeping the original order.

    ``None`` means "all". Unknown labels raise.
    """
    model_names = _names(models)
    if model_names is None:
        rows = list(range(matrix.shape[0]))
    else:
        wanted = set(model_names)
        for name in model_names:
            matrix.model_index(name)
        rows = [i for i, m in enumerate(matrix.models) if m.name in wanted]
    if tasks is None:
        cols = list(range(matrix.shape[1]))
    else:
        wanted_t = set(tasks)
        for t in tasks:
            matrix.task_index(t)
        cols = [j for j, t in enumerate(matrix.tasks) if t in wanted_t]
    ix = np.ix_(rows, cols)
    return ScoreMatrix(
        tuple(matrix.models[i] for i in rows),
        tuple(matrix.tasks[j] for j in cols),
        matrix.scores[ix],
        matrix.missing[ix],
    )
