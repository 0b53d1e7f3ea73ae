"""
Normalizing a leaderboard and ranking tasks by relevance
========================================================

Each task column is standardized first, then each model row. The relevance
of a candidate task is its correlation with the target task across models.
"""

# %%
# The bundled leaderboard is synthetic: 17 chat/base pairs, 42 candidate
# tasks and the tool-use target ``T-eval``.
from proxysel import datasets, normalize_pipeline, relevance_ranking

board = datasets.leaderboard()
print(board.shape)

P = normalize_pipeline(board)
print(P.values.mean(axis=1)[:3])  # each row is now centered

# %%
# Kendall tau-b relevance, top ten candidates.
ranking = relevance_ranking(P, "T-eval", "kendall")
for task, c in ranking.entries[:10]:
    print(f"{task:12s} {c:+.3f}  ({datasets.task_category(task)})")
