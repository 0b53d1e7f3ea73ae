"""
Weighting proxies and predicting checkpoints
============================================

Proxy weight is relevance times a sigmoid of robustness, normalized over the
tasks that clear both thresholds. A checkpoint's prediction is the weighted
mean of its proxy scores.
"""

from proxysel import (ScoredRanking, SelectionConfig, count_discordant_pairs, datasets, normalize_pipeline,
                      predict, relevance_ranking, robustness_from_matrix, select_proxies)

ranking = relevance_ranking(normalize_pipeline(datasets.leaderboard()), "T-eval", "kendall")
robust = robustness_from_matrix(datasets.small_models())
proxies = select_proxies(ranking, robust, SelectionConfig(epsilon_c=0.0, epsilon_r=1.0, sigmoid_k=1.0))
print(proxies.weights)

# %%
# Five pretrained checkpoints; ground truth is their later tool-use score.
ck = datasets.checkpoints()
preds = {m: predict(proxies, dict(zip(ck.tasks, ck.row(m))), m).predicted_score for m in ck.model_names}
print(preds)

table = datasets.rankings_table()
truth = ScoredRanking(dict(zip(table.model_names, table.column("T-eval"))))
print("pipeline:", count_discordant_pairs(ScoredRanking(preds), truth).discordant_pairs, "of 10")

# %%
# The published aggregates of the three strategies, and perplexity
# (lower is better), against the same ground truth.
for col, orient in datasets.ranking_orientations().items():
    if col != "T-eval":
        r = ScoredRanking(dict(zip(table.model_names, table.column(col))), orient, col)
        print(f"{col:7s} {count_discordant_pairs(r, truth).discordant_pairs:g}/10")
