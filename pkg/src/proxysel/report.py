"""JSON schema validation, deterministic JSON writing, SVG bar charts, text summary."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from xml.sax.saxutils import escape

import jsonschema


@lru_cache(maxsize=None)
def schema(kind: str) -> dict:
    text = (resources.files("proxysel") / "schemas" / f"{kind}.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate(doc: dict, kind: str) -> None:
    """Raise jsonschema.ValidationError if ``doc`` does not match schema ``kind``."""
    jsonschema.validate(doc, schema(kind))


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(doc, path, kind: str | None = None) -> Path:
    if kind is not None:
        validate(doc, kind)
    path = Path(path)
    path.write_text(dumps(doc), encoding="utf-8")
    return path


BAR_HEIGHT = 18
GAP = 6
LABEL_WIDTH = 150
PLOT_WIDTH = 360
PAD = 20


def bar_chart_svg(items, title: str, empty_label: str = "no tasks retained", value_format="{:.3f}") -> str:
    """Horizontal bar chart, one bar per (label, value), drawn in the given order.

    Values may be negative; bars extend left or right of a shared zero line.
    """
    items = list(items)
    width = LABEL_WIDTH + PLOT_WIDTH + 2 * PAD + 60
    head = [f'<text x="{PAD}" y="{PAD}" font-size="14" font-weight="bold">{escape(title)}</text>']
    if not items:
        height = 3 * PAD + BAR_HEIGHT
        body = [f'<text class="empty" x="{PAD}" y="{2 * PAD + 12}" font-size="12">{escape(empty_label)}</text>']
    else:
        lo = min(0.0, min(v for _, v in items))
        hi = max(0.0, max(v for _, v in items))
        span = (hi - lo) or 1.0
        x0 = PAD + LABEL_WIDTH + PLOT_WIDTH * (-lo / span)
        height = 2 * PAD + 10 + len(items) * (BAR_HEIGHT + GAP)
        body = []
        for i, (label, value) in enumerate(items):
            y = 2 * PAD + i * (BAR_HEIGHT + GAP)
            w = PLOT_WIDTH * abs(value) / span
            x = x0 if value >= 0 else x0 - w
            body.append(
                f'<text x="{PAD + LABEL_WIDTH - 6}" y="{y + 13}" font-size="11" text-anchor="end">{escape(str(label))}</text>'
            )
            body.append(
                f'<rect class="bar" x="{x:.2f}" y="{y}" width="{w:.2f}" height="{BAR_HEIGHT}" '
                f'fill="{"#4c78a8" if value >= 0 else "#e45756"}"><title>{escape(str(label))}</title></rect>'
            )
            body.append(
                f'<text x="{PAD + LABEL_WIDTH + PLOT_WIDTH + 4}" y="{y + 13}" font-size="11">{value_format.format(value)}</text>'
            )
        body.append(
            f'<line x1="{x0:.2f}" y1="{2 * PAD - 4}" x2="{x0:.2f}" y2="{height - PAD}" stroke="#333" stroke-width="1"/>'
        )
    return "\n".join(
        [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
         '<rect width="100%" height="100%" fill="white"/>', *head, *body, "</svg>", ""]
    )


def _num(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return repr(v) if isinstance(v, float) else str(v)


def summary_text(summary: dict) -> str:
    """Plain-text rendering of a run summary; numbers are printed unrounded."""
    lines = [f"proxysel run summary (target task: {summary['baseline']})", ""]
    lines.append("stages: " + " -> ".join(summary["stages"]))
    if "selected_metric" in summary:
        lines.append(f"consistency-selected metric: {summary['selected_metric'] or 'none dominates'}")
    if "relevance_metric" in summary:
        lines.append(f"relevance metric used: {summary['relevance_metric']}")
    pub = summary.get("published_metric_selection")
    if pub:
        lines += ["", "metric selection on published consistency indices:"]
        for cfg, metric in pub.items():
            lines.append(f"  {cfg}: {metric or 'none'}")
    var = summary.get("variances")
    if var:
        lines += ["", "robustness (task: var_noise var_data ratio):"]
        for task, v in var.items():
            ratio = "inf" if v["ratio"] is None else _num(v["ratio"])
            lines.append(f"  {task}: {_num(v['var_noise'])} {_num(v['var_data'])} {ratio}")
    proxies = summary.get("proxies")
    if proxies:
        lines += ["", "proxy weights:"]
        for task, w in proxies.items():
            lines.append(f"  {task}: {_num(w)}")
    preds = summary.get("predictions")
    if preds:
        lines += ["", "predicted target scores:"]
        for ck, v in preds.items():
            lines.append(f"  {ck}: {_num(v)}")
    lines += ["", "reverse-order pairs against ground truth:"]
    for c in summary["rank_comparisons"]:
        lines.append(f"  {c['label']}: {_num(c['discordant_pairs'])}/{c['total_pairs']}")
    return "\n".join(lines) + "\n"
