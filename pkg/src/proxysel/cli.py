"""``proxysel`` command line. Each subcommand wraps one library call.

Exit codes: 0 success, 2 validation error, 3 degenerate statistic, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import jsonschema

from . import report
from .consistency import ConsistencyConfig, sampling_consistency_eval
from .core_data import load_matrix, save_matrix, submatrix
from .correlation import CorrelationMetric, RelevanceRanking, relevance_ranking
from .errors import DegenerateStatisticError, ValidationError
from .normalize import NormalizedMatrix, normalize_pipeline
from .pipeline import PipelineConfig, StageError, column_ranking, run_all
from .robustness import RobustnessReport, robustness_from_matrix
from .selection import ProxySet, ScoredRanking, SelectionConfig, count_discordant_pairs, predict, select_proxies
from .synth import SynthConfig, generate

EXIT_OK, EXIT_VALIDATION, EXIT_COMPUTATION, EXIT_IO = 0, 2, 3, 4


def _out(args, name: str) -> Path:
    if args.out:
        p = Path(args.out)
    else:
        p = Path(args.out_dir or ".") / name
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _load_P(path) -> NormalizedMatrix:
    """Accept a NormalizedMatrix JSON, or any raw matrix (normalized here)."""
    path = Path(path)
    if path.suffix == ".json":
        doc = _read_json(path)
        if "stage" in doc:
            return NormalizedMatrix.from_json(doc)
    return normalize_pipeline(load_matrix(path))


def _model_list(path) -> list[str] | None:
    if path is None:
        return None
    return [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]


def cmd_normalize(args):
    P = normalize_pipeline(load_matrix(args.input))
    out = _out(args, "normalized.json")
    if args.format == "csv" or out.suffix == ".csv":
        save_matrix(P.as_matrix(), out, "csv")
    else:
        report.write_json(P.to_json(), out, "normalized")


def cmd_relevance(args):
    P = _load_P(args.matrix)
    ranking = relevance_ranking(P, args.baseline, args.metric, _model_list(args.models))
    report.write_json(ranking.to_json(), _out(args, "ranking.json"), "ranking")


def cmd_consistency(args):
    cfg = ConsistencyConfig(
        n_sample=args.n, k_rounds=args.k, t=args.t,
        metrics=tuple(m.strip() for m in args.metrics.split(",")),
        seed=args.seed if args.seed is not None else 0,
        max_retries=args.max_retries, resample_per_metric=args.resample_per_metric,
    )
    models = _model_list(args.models)
    if models is None:
        P = _load_P(args.matrix)
    else:
        P = normalize_pipeline(submatrix(load_matrix(args.matrix), models))
    rep = sampling_consistency_eval(P, args.baseline, cfg, workers=args.workers)
    report.write_json(rep.to_json(), _out(args, "consistency.json"), "consistency")


def cmd_robustness(args):
    matrix = load_matrix(args.matrix, manifest=args.manifest)
    rep = robustness_from_matrix(matrix)
    report.write_json(rep.to_json(), _out(args, "robustness.json"), "robustness")


def cmd_select(args):
    ranking = RelevanceRanking.from_json(_read_json(args.relevance))
    rob = RobustnessReport.from_json(_read_json(args.robustness))
    cfg = SelectionConfig(args.eps_c, args.eps_r, args.sigmoid_k, args.log_robustness)
    proxies = select_proxies(ranking, rob, cfg)
    report.write_json(proxies.to_json(), _out(args, "proxyset.json"), "proxyset")


def cmd_predict(args):
    proxies = ProxySet.from_json(_read_json(args.proxyset))
    scores = load_matrix(args.scores)
    reference = None
    if args.aggregation == "zscore":
        if not args.reference:
            raise ValidationError("--aggregation zscore needs --reference")
        from .selection import reference_stats

        reference = reference_stats(load_matrix(args.reference), proxies.tasks)
    preds = []
    for i, m in enumerate(scores.models):
        row = {t: float(scores.scores[i, j]) for j, t in enumerate(scores.tasks) if not scores.missing[i, j]}
        preds.append(predict(proxies, row, m.name, args.aggregation, reference))
    doc = {"aggregation": args.aggregation, "predictions": [p.to_json() for p in preds]}
    report.write_json(doc, _out(args, "prediction.json"), "predictions")


def _read_ranking(path, column, orientation, label) -> ScoredRanking:
    path = Path(path)
    if path.suffix == ".json":
        doc = _read_json(path)
        if "predictions" in doc:
            return ScoredRanking({p["checkpoint"]: p["predicted_score"] for p in doc["predictions"]},
                                 orientation, label)
        raise ValidationError(f"{path}: expected a predictions JSON document")
    with path.open(encoding="utf-8", newline="") as fh:
        header = next(csv.reader(fh))
    if column is None:
        if len(header) != 2:
            raise ValidationError(f"{path}: several score columns, pick one with --a-column/--b-column")
        column = header[1]
    return column_ranking(load_matrix(path, "csv"), column, orientation, label or column)


def cmd_rank_compare(args):
    a = _read_ranking(args.a, args.a_column, args.a_orientation, args.a_column or "a")
    b = _read_ranking(args.b, args.b_column, args.b_orientation, args.b_column or "b")
    comp = count_discordant_pairs(a, b)
    report.write_json(comp.to_json(), _out(args, "comparison.json"), "comparison")
    print(f"reverse-order pairs: {report._num(comp.discordant_pairs)}/{comp.total_pairs}")


def cmd_synth(args):
    doc = _read_json(args.config)
    if args.seed is not None:
        doc["seed"] = args.seed
    matrix, truth = generate(SynthConfig.from_json(doc))
    out = _out(args, "matrix." + (args.format or "csv"))
    save_matrix(matrix, out, args.format if args.format else None)
    if args.truth:
        Path(args.truth).write_text(report.dumps(truth.to_json()), encoding="utf-8")


def cmd_run_all(args):
    cfg = PipelineConfig.load(args.config, seed=args.seed, output_dir=args.out_dir)
    summary = run_all(cfg)
    sys.stdout.write(report.summary_text(summary))


def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser, default):
        parser.add_argument("--seed", type=int, default=default, help="master seed (unsigned 64-bit)")
        parser.add_argument("--out-dir", default=default, help="directory for outputs without an explicit --out")
        parser.add_argument("--format", choices=["json", "csv"], default=default, help="matrix output format")

    # flags accepted before or after the subcommand; the subcommand copy must
    # not overwrite a value given before it
    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, argparse.SUPPRESS)
    parser = argparse.ArgumentParser(prog="proxysel", description=__doc__.splitlines()[0])
    global_flags(parser, None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", parents=[common], help="two-step normalization of a score matrix")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("relevance", parents=[common], help="rank tasks by correlation with a baseline task")
    p.add_argument("--matrix", required=True)
    p.add_argument("--baseline", required=True)
    p.add_argument("--metric", choices=[m.value for m in CorrelationMetric], default="kendall")
    p.add_argument("--models", help="text file with one model name per line")
    p.add_argument("--out")
    p.set_defaults(func=cmd_relevance)

    p = sub.add_parser("consistency", parents=[common], help="baseline/sampling consistency of metrics")
    p.add_argument("--matrix", required=True)
    p.add_argument("--baseline", required=True)
    p.add_argument("--n", type=int, required=True, help="models per sample")
    p.add_argument("--k", type=int, required=True, help="sampling rounds")
    p.add_argument("--t", type=int, required=True, help="top tasks compared")
    p.add_argument("--metrics", default="pearson,spearman,kendall")
    p.add_argument("--models", help="normalize and sample only the models listed in this file")
    p.add_argument("--max-retries", type=int, default=10)
    p.add_argument("--resample-per-metric", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("robustness", parents=[common], help="variance-ratio robustness per task")
    p.add_argument("--matrix", required=True)
    p.add_argument("--manifest", required=True, help="JSON assigning each model to a group")
    p.add_argument("--out")
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("select", parents=[common], help="threshold and weight proxy tasks")
    p.add_argument("--relevance", required=True)
    p.add_argument("--robustness", required=True)
    p.add_argument("--eps-c", type=float, default=0.0)
    p.add_argument("--eps-r", type=float, default=1.0)
    p.add_argument("--sigmoid-k", type=float, default=1.0)
    p.add_argument("--log-robustness", action="store_true", help="apply the sigmoid to log(R)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("predict", parents=[common], help="weighted proxy aggregate per checkpoint")
    p.add_argument("--proxyset", required=True)
    p.add_argument("--scores", required=True, help="checkpoint x task score matrix")
    p.add_argument("--aggregation", choices=["raw", "zscore"], default="raw")
    p.add_argument("--reference", help="matrix supplying per-task mean/std for zscore aggregation")
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("rank-compare", parents=[common], help="count reverse-order pairs between two rankings")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--a-column")
    p.add_argument("--b-column")
    p.add_argument("--a-orientation", choices=["higher", "lower"], default="higher")
    p.add_argument("--b-orientation", choices=["higher", "lower"], default="higher")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rank_compare)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic score matrix")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--truth")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run-all", parents=[common], help="full pipeline from a config document")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run_all)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except StageError as exc:
        print(f"proxysel: error in stage {exc.stage}: {exc.cause}", file=sys.stderr)
        return exc.exit_code if exc.exit_code in (2, 3, 4) else EXIT_VALIDATION
    except DegenerateStatisticError as exc:
        print(f"proxysel: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    except (ValidationError, jsonschema.ValidationError, KeyError) as exc:
        print(f"proxysel: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"proxysel: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
