"""Proxy-task selection for predicting emergent abilities from benchmark score matrices."""

from .core_data import EvaluationRecord, Group, ModelId, ScoreMatrix, Variant, load_matrix, save_matrix, submatrix
from .consistency import ConsistencyConfig, ConsistencyReport, sampling_consistency_eval, select_metric
from .correlation import CorrelationMetric, RelevanceRanking, kendall, pearson, relevance_ranking, spearman, top_t_overlap
from .errors import DegenerateStatisticError, ProxySelError, ValidationError
from .normalize import NormalizedMatrix, feature_normalize, normalize_pipeline, sample_normalize
from .robustness import GroupScores, RobustnessReport, robustness_from_matrix, robustness_scores, sample_variance
from .selection import (
    Prediction,
    ProxySet,
    RankComparison,
    ScoredRanking,
    SelectionConfig,
    count_discordant_pairs,
    predict,
    select_proxies,
    strategy_run,
)
from .synth import SynthConfig, generate

__version__ = "0.1.0"

__all__ = [
    "ConsistencyConfig",
    "ConsistencyReport",
    "CorrelationMetric",
    "DegenerateStatisticError",
    "EvaluationRecord",
    "Group",
    "GroupScores",
    "ModelId",
    "NormalizedMatrix",
    "Prediction",
    "ProxySelError",
    "ProxySet",
    "RankComparison",
    "RelevanceRanking",
    "RobustnessReport",
    "ScoreMatrix",
    "ScoredRanking",
    "SelectionConfig",
    "SynthConfig",
    "ValidationError",
    "Variant",
    "count_discordant_pairs",
    "feature_normalize",
    "generate",
    "kendall",
    "load_matrix",
    "normalize_pipeline",
    "pearson",
    "predict",
    "relevance_ranking",
    "robustness_from_matrix",
    "robustness_scores",
    "sample_normalize",
    "sample_variance",
    "sampling_consistency_eval",
    "save_matrix",
    "select_metric",
    "select_proxies",
    "spearman",
    "strategy_run",
    "submatrix",
    "top_t_overlap",
]
