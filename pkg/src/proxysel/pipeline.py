"""End-to-end orchestration driven by one JSON config document."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .consistency import ConsistencyConfig, sampling_consistency_eval, select_metric
from .core_data import ScoreMatrix, load_matrix, submatrix
from .correlation import CorrelationMetric, relevance_ranking
from .errors import ProxySelError, ValidationError
from .normalize import normalize_pipeline
from .report import bar_chart_svg, summary_text, write_json
from .robustness import robustness_from_matrix
from .selection import (
    ScoredRanking,
    SelectionConfig,
    count_discordant_pairs,
    predict,
    select_proxies,
)


class StageError(ProxySelError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage} failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 4 if isinstance(cause, OSError) else 1)


@dataclass
class PipelineConfig:
    baseline: str
    leaderboard: Path
    small_models: Path
    small_models_manifest: Path
    checkpoints: Path
    output_dir: Path
    leaderboard_manifest: Path | None = None
    leaderboard_models: list[str] | None = None
    consistency: ConsistencyConfig | None = None
    relevance_metric: str = "auto"
    fallback_metric: CorrelationMetric = CorrelationMetric.kendall
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    ground_truth: Path | None = None
    ground_truth_column: str | None = None
    ground_truth_orientation: str = "higher"
    reference_rankings: list[dict] = field(default_factory=list)
    published_consistency: Path | None = None

    @classmethod
    def load(cls, path, seed: int | None = None, output_dir=None) -> "PipelineConfig":
        path = Path(path)
        doc = json.loads(path.read_text(encoding="utf-8"))
        root = path.parent

        def p(key, section=None):
            src = doc if section is None else doc.get(section, {})
            value = src.get(key)
            if value is None:
                return None
            f = (root / value).resolve()
            if not f.exists():
                raise FileNotFoundError(f"{key}: {f} does not exist")
            return f

        try:
            cons = doc.get("consistency")
            if cons is not None:
                cons = dict(cons)
                if seed is not None:
                    cons["seed"] = seed
                cons = ConsistencyConfig(**cons)
            gt = doc.get("ground_truth") or {}
            out = Path(output_dir) if output_dir is not None else root / doc.get("output_dir", "out")
            return cls(
                baseline=doc["baseline"],
                leaderboard=p("matrix", "leaderboard"),
                leaderboard_manifest=p("manifest", "leaderboard"),
                leaderboard_models=doc.get("leaderboard", {}).get("models"),
                small_models=p("matrix", "small_models"),
                small_models_manifest=p("manifest", "small_models"),
                checkpoints=p("checkpoints"),
                output_dir=out,
                consistency=cons,
                relevance_metric=doc.get("relevance_metric", "auto"),
                fallback_metric=CorrelationMetric(doc.get("fallback_metric", "kendall")),
                selection=SelectionConfig(**doc.get("selection", {})),
                ground_truth=p("path", "ground_truth"),
                ground_truth_column=gt.get("column"),
                ground_truth_orientation=gt.get("orientation", "higher"),
                reference_rankings=list(doc.get("reference_rankings", [])),
                published_consistency=p("published_consistency"),
            )
        except KeyError as exc:
            raise ValidationError(f"pipeline config lacks required key {exc}") from None
        except TypeError as exc:
            raise ValidationError(f"bad pipeline config: {exc}") from None


def column_ranking(matrix: ScoreMatrix, column: str, orientation="higher", label=None) -> ScoredRanking:
    j = matrix.task_index(column)
    if matrix.missing[:, j].any():
        raise ValidationError(f"column {column!r} has missing cells")
    return ScoredRanking(
        {m.name: float(matrix.scores[i, j]) for i, m in enumerate(matrix.models)},
        orientation, label or column,
    )


class _Stages:
    def __init__(self):
        self.done = []

    def run(self, name, fn, *args, **kwargs):
        try:
            result = fn(*args, **kwargs)
        except (ProxySelError, OSError, ValueError, ArithmeticError) as exc:
            raise StageError(name, exc) from exc
        self.done.append(name)
        return result


def run_all(config: PipelineConfig) -> dict:
    """normalize -> consistency -> relevance -> robustness -> select -> predict -> rank-compare.

    Writes JSON artifacts, ``summary.txt`` and SVG charts into
    ``config.output_dir`` and returns the summary document. Any failure is
    raised as StageError carrying the stage name.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    st = _Stages()
    summary: dict = {"baseline": config.baseline}

    board = st.run("load", load_matrix, config.leaderboard, manifest=config.leaderboard_manifest)
    if config.leaderboard_models:
        board = st.run("load", submatrix, board, config.leaderboard_models)
    P = st.run("normalize", normalize_pipeline, board)
    write_json(P.to_json(), out / "normalized.json", "normalized")

    metric = config.fallback_metric
    if config.consistency is not None:
        report = st.run("consistency", sampling_consistency_eval, P, config.baseline, config.consistency)
        write_json(report.to_json(), out / "consistency.json", "consistency")
        summary["selected_metric"] = None if report.selected is None else report.selected.value
        summary["consistency"] = {m.value: {"s": r.s, "r": r.r} for m, r in report.results.items()}
        if config.relevance_metric == "auto" and report.selected is not None:
            metric = report.selected
    if config.relevance_metric != "auto":
        metric = CorrelationMetric(config.relevance_metric)
    summary["relevance_metric"] = metric.value

    if config.published_consistency is not None:
        pub = json.loads(config.published_consistency.read_text(encoding="utf-8"))["results"]
        summary["published_metric_selection"] = {
            cfg: (lambda m: None if m is None else m.value)(select_metric(row)) for cfg, row in pub.items()
        }

    ranking = st.run("relevance", relevance_ranking, P, config.baseline, metric)
    write_json(ranking.to_json(), out / "relevance.json", "ranking")

    small = st.run("robustness", load_matrix, config.small_models, manifest=config.small_models_manifest)
    robustness = st.run("robustness", robustness_from_matrix, small)
    write_json(robustness.to_json(), out / "robustness.json", "robustness")
    summary["variances"] = {
        e.task: {"var_noise": e.var_noise, "var_data": e.var_data,
                 "ratio": None if math.isinf(e.ratio) else e.ratio}
        for e in robustness.entries
    }

    proxies = st.run("select", select_proxies, ranking, robustness, config.selection)
    write_json(proxies.to_json(), out / "proxyset.json", "proxyset")
    summary["proxies"] = proxies.weights

    ckpts = st.run("predict", load_matrix, config.checkpoints)

    def _predict_all():
        return [
            predict(proxies, {t: float(ckpts.scores[i, j]) for j, t in enumerate(ckpts.tasks)
                              if not ckpts.missing[i, j]}, m.name)
            for i, m in enumerate(ckpts.models)
        ]

    predictions = st.run("predict", _predict_all)
    write_json({"aggregation": "raw", "predictions": [p.to_json() for p in predictions]},
               out / "predictions.json", "predictions")
    summary["predictions"] = {p.checkpoint: p.predicted_score for p in predictions}

    comparisons = []
    if config.ground_truth is not None:
        def _compare():
            table = load_matrix(config.ground_truth)
            gt = column_ranking(table, config.ground_truth_column or config.baseline,
                                config.ground_truth_orientation)
            found = []
            for ref in config.reference_rankings:
                a = column_ranking(table, ref["column"], ref.get("orientation", "higher"), ref.get("label"))
                found.append(count_discordant_pairs(a, gt))
            pred = ScoredRanking({p.checkpoint: p.predicted_score for p in predictions}, label="pipeline")
            found.append(count_discordant_pairs(pred, gt))
            return found

        comparisons = st.run("rank-compare", _compare)
    write_json({"comparisons": [c.to_json() for c in comparisons]}, out / "comparisons.json")
    summary["rank_comparisons"] = [
        {"label": c.ranking_a.label, "orientation": c.ranking_a.orientation.value,
         "discordant_pairs": c.discordant_pairs, "total_pairs": c.total_pairs}
        for c in comparisons
    ]
    summary["stages"] = list(dict.fromkeys(st.done))
    write_json(summary, out / "summary.json", "summary")
    render_bundle(summary, ranking.entries, proxies.weights.items(), out)
    return summary


def render_bundle(summary: dict, relevance_items, weight_items, out) -> None:
    out = Path(out)
    (out / "summary.txt").write_text(summary_text(summary), encoding="utf-8")
    (out / "relevance.svg").write_text(
        bar_chart_svg(relevance_items, f"Relevance to {summary['baseline']}"), encoding="utf-8")
    (out / "weights.svg").write_text(bar_chart_svg(weight_items, "Proxy weights"), encoding="utf-8")
