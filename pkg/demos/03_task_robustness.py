"""
Robustness: data sensitivity over seed noise
============================================

Three small models differ only by seed, five by training data. A task whose
scores spread more across data than across seeds is robust.
"""

from proxysel import datasets, robustness_from_matrix

small = datasets.small_models()
print(small.models_where(group="random_noise"), small.models_where(group="data_variability"))

rep = robustness_from_matrix(small)
print(f"{'task':7s} {'var_noise':>9s} {'var_data':>9s} {'ratio':>7s}")
for e in rep.entries:
    print(f"{e.task:7s} {e.var_noise:9.4f} {e.var_data:9.4f} {e.ratio:7.2f}")

# %%
# Some published variances differ from what the score table gives; the
# fixture keeps both next to each other.
print(datasets.published_robustness()["note"])
