"""
The whole pipeline from one config file
=======================================

Equivalent to ``proxysel run-all --config <data>/pipeline.json --out-dir <dir>``.
"""

import tempfile
from pathlib import Path

from proxysel import datasets
from proxysel.pipeline import PipelineConfig, run_all
from proxysel.report import summary_text

out = Path(tempfile.mkdtemp(prefix="proxysel-"))
summary = run_all(PipelineConfig.load(datasets.path("pipeline.json"), output_dir=out))
print(summary_text(summary))
print(sorted(p.name for p in out.iterdir()))
