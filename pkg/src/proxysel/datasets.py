"""Published tables shipped as fixtures, plus the synthetic stand-in leaderboard.

Fixture files live in ``proxysel/data``; every file has a provenance entry in
``data/PROVENANCE.md``. The leaderboard used by the end-to-end bundle is
synthetic (the per-model leaderboard rows behind the published relevance
study are not available) and is rebuilt bit-identically by
:func:`build_synthetic_leaderboard`.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .core_data import ModelId, ScoreMatrix, Variant, load_matrix, save_matrix
from .rng import generator
from .synth import SynthConfig, generate

DATA_DIR = Path(str(resources.files("proxysel") / "data"))

# (chat model, base model, institution) as printed; the second Baichuan base
# entry is printed as "Baichuan2-7B-Base" and renamed here to keep labels unique.
MODEL_PAIRS = [
    ("Vicuna-7B-v1.5-16k", "LLama-7B", "LMSYS & Meta"),
    ("Vicuna-13B-v1.5-16k", "LLama-13B", "LMSYS & Meta"),
    ("Qwen-7B-Chat", "Qwen-7B", "Alibaba"),
    ("Qwen-72B-Chat", "Qwen-72B", "Alibaba"),
    ("Qwen-14B-Chat", "Qwen-14B", "Alibaba"),
    ("OrionStar-Yi-34B-Chat", "Yi-34B", "OrionStarAI & 01.AI"),
    ("Mixtral-8x7B-Instruct-v0.1", "Mixtral-8x7B-v0.1", "Mistral AI"),
    ("Mistral-7B-Instruct-v0.2", "Mixtral-7B-v0.1", "Mistral AI"),
    ("LLAMA-2-7B-Chat", "LLama-2-7B", "Meta"),
    ("LLAMA-2-13B-Chat", "LLama-2-13B", "Meta"),
    ("LLAMA-2-70B-Chat", "LLama-2-70B", "Meta"),
    ("InternLM2-Chat-7B", "InternLM2-7B", "Shanghai AI Lab"),
    ("InternLM2-Chat-20B", "InternLM2-20B", "Shanghai AI Lab"),
    ("DeepSeek-7B-Chat", "DeepSeek-7B-Base", "DeepSeek"),
    ("DeepSeek-67B-Chat", "DeepSeek-67B-Base", "DeepSeek"),
    ("Baichuan2-7B-Chat", "Baichuan2-7B-Base", "Baichuan"),
    ("Baichuan2-13B-Chat", "Baichuan2-13B-Base", "Baichuan"),
]

# candidate pool by capability; "QCNLI" in the printed list is OCNLI
TASK_CATEGORIES = {
    "problem_solving": ["C-Eval", "AGIEval", "MMLU", "CMMLU", "GAOKAO-Bench", "ARC-c", "ARC-e"],
    "language": ["WiC", "CHID", "AFQMC", "WSC", "TyDiQA", "Flores"],
    "knowledge": ["BoolQ", "CommonSenseQA", "TriviaQA", "NaturalQuestions"],
    "comprehension": ["C3", "RACE(Middle)", "RACE(High)", "OpenbookQA", "CSL", "LCSTS", "XSum",
                      "EPRSTMT", "LAMBADA"],
    "reasoning": ["CMNLI", "OCNLI", "AX-b", "AX-g", "RTE", "COPA", "ReCoRD", "HellaSwag", "PIQA",
                  "SIQA", "MATH", "GSM8K", "DROP", "HumanEval", "MBPP", "BBH"],
}

TARGET_TASK = "T-eval"

SMALL_MODEL_TASKS = ["C3", "CMNLI", "OCNLI", "CHID", "RTE", "CMMLU"]
RANDOM_NOISE_MODELS = ["A", "B", "C"]
DATA_VARIABILITY_MODELS = ["D", "E", "F", "G", "H"]

# published (s, r) per configuration and metric, t = 10
PUBLISHED_CONSISTENCY = {
    "n=6,k=25": {"pearson": (0.444, 0.359), "spearman": (0.444, 0.325), "kendall": (0.492, 0.372)},
    "n=8,k=25": {"pearson": (0.544, 0.418), "spearman": (0.516, 0.392), "kendall": (0.548, 0.431)},
    "n=10,k=25": {"pearson": (0.500, 0.476), "spearman": (0.568, 0.472), "kendall": (0.580, 0.475)},
    "n=10,k=15": {"pearson": (0.560, 0.467), "spearman": (0.613, 0.491), "kendall": (0.640, 0.522)},
    "n=10,k=35": {"pearson": (0.551, 0.435), "spearman": (0.574, 0.434), "kendall": (0.574, 0.457)},
}


def path(name: str) -> Path:
    p = DATA_DIR / name
    if not p.exists():
        raise FileNotFoundError(f"no fixture named {name!r} in {DATA_DIR}")
    return p


def small_models() -> ScoreMatrix:
    """Small-model scores (8 models x 6 tasks) with group metadata attached."""
    return load_matrix(path("small_models.csv"), manifest=path("small_models_groups.json"))


def published_robustness() -> dict:
    return json.loads(path("robustness_published.json").read_text())


def rankings_table() -> ScoreMatrix:
    """Five pretrained models x (T-eval, PPL, V_chat, V_base, V_bc)."""
    return load_matrix(path("rankings.csv"))


def ranking_orientations() -> dict[str, str]:
    return json.loads(path("rankings_orientation.json").read_text())


def published_consistency() -> dict:
    doc = json.loads(path("consistency_published.json").read_text())
    return {cfg: {m: tuple(v) for m, v in row.items()} for cfg, row in doc["results"].items()}


def checkpoints() -> ScoreMatrix:
    return load_matrix(path("checkpoints.csv"))


def annealing_scores() -> ScoreMatrix:
    """Annealing checkpoints: six proxy-task scores plus the published aggregate column ``Proxy``."""
    return load_matrix(path("annealing_proxy_scores.csv"))


def mixture_scores() -> ScoreMatrix:
    """Data-mixture checkpoints, same layout as :func:`annealing_scores`."""
    return load_matrix(path("mixture_proxy_scores.csv"))


def leaderboard() -> ScoreMatrix:
    return load_matrix(path("synthetic_leaderboard.csv"), manifest=path("models_manifest.json"))


def task_category(task: str) -> str | None:
    for cat, tasks in TASK_CATEGORIES.items():
        if task in tasks:
            return cat
    return None


def models_manifest() -> dict:
    models = []
    for chat, base, inst in MODEL_PAIRS:
        models.append({"name": chat, "variant": "chat", "institution": inst, "pair": base})
        models.append({"name": base, "variant": "base", "institution": inst, "pair": chat})
    return {"models": models}


_FACTOR_OF = {"reasoning": 0, "problem_solving": 1, "knowledge": 1, "comprehension": 2, "language": 2}


def build_synthetic_leaderboard(seed: int = 20240917) -> ScoreMatrix:
    """34 models (17 chat/base pairs) x 42 candidate tasks + T-eval, synthetic.

    Three latent factors (reasoning, problem-solving/knowledge, language/
    comprehension). Each task loads mostly on its category's factor; T-eval
    loads on reasoning and problem solving. A base model shares its chat
    partner's ability up to a small perturbation, and base rows carry the
    partner's T-eval score because the target is only evaluated on chat models.
    """
    rng = generator(seed, 10)
    tasks = [t for cat in TASK_CATEGORIES.values() for t in cat]
    loadings = []
    for t in tasks:
        v = 0.35 * np.abs(rng.standard_normal(3))
        v[_FACTOR_OF[task_category(t)]] += 1.0
        loadings.append(v / np.linalg.norm(v))
    loadings.append(np.array([0.8, 0.5, 0.2]) / np.linalg.norm([0.8, 0.5, 0.2]))
    L = np.array(loadings)
    names = (*tasks, TARGET_TASK)

    n_pairs = len(MODEL_PAIRS)
    chat_ability = rng.standard_normal((n_pairs, 3))
    base_ability = chat_ability + 0.3 * rng.standard_normal((n_pairs, 3))
    abilities = np.vstack([np.column_stack([c, b]).T for c, b in zip(chat_ability, base_ability)])
    cfg = SynthConfig(n_models=2 * n_pairs, n_tasks=len(names), n_factors=3, loadings=L,
                      noise_sd=2.5, seed=seed, task_names=names)
    matrix, _ = generate(cfg, abilities)
    scores = np.round(np.array(matrix.scores), 2)
    scores[1::2, -1] = scores[0::2, -1]
    models = []
    for chat, base, _ in MODEL_PAIRS:
        models += [ModelId(chat, Variant.chat), ModelId(base, Variant.base)]
    return ScoreMatrix(tuple(models), names, scores)


def write_synthetic_leaderboard(target_dir=None) -> Path:
    target = Path(target_dir or DATA_DIR) / "synthetic_leaderboard.csv"
    save_matrix(build_synthetic_leaderboard(), target)
    return target
