"""
Which correlation metric ranks tasks most stably?
=================================================

Draw random model subsets, rank tasks on each subset and compare the top-t
lists with the full-population ranking (s) and with each other (r).
"""

from proxysel import ConsistencyConfig, datasets, normalize_pipeline, sampling_consistency_eval, select_metric

P = normalize_pipeline(datasets.leaderboard())
cfg = ConsistencyConfig(n_sample=10, k_rounds=25, t=10, seed=42)
rep = sampling_consistency_eval(P, "T-eval", cfg, workers=4)

for metric, res in rep.results.items():
    print(f"{metric.value:9s} s={res.s:.3f} r={res.r:.3f}")
print("selected:", rep.selected)

# %%
# The same rule applied to published indices. At n=10, k=25 no metric wins
# on both indices, so the rule abstains.
for name, row in datasets.published_consistency().items():
    print(name, select_metric(row))
