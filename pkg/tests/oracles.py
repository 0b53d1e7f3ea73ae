"""Brute-force reference implementations used only by the tests.

Deliberately naive: plain Python loops, no shared code with the library.
"""

import math
from fractions import Fraction


def pearson(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def average_ranks(x):
    out = []
    for v in x:
        below = sum(1 for w in x if w < v)
        equal = sum(1 for w in x if w == v)
        out.append(below + (equal + 1) / 2)
    return out


def kendall_tau_b(x, y):
    n = len(x)
    concordant = discordant = tx = ty = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0:
                tx += 1
            if dy == 0:
                ty += 1
            if dx * dy > 0:
                concordant += 1
            elif dx * dy < 0:
                discordant += 1
    n0 = n * (n - 1) // 2
    return (concordant - discordant) / math.sqrt((n0 - tx) * (n0 - ty))


def sample_variance(x):
    """Exact rational sum-of-squares formula, converted at the end."""
    q = [Fraction(v) for v in x]
    n = len(q)
    return float((sum(v * v for v in q) - sum(q) ** 2 / n) / (n - 1))


def discordant_pairs(a, b, a_lower_better=False, b_lower_better=False):
    names = list(a)
    count = 0.0
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            da = a[names[i]] - a[names[j]]
            db = b[names[i]] - b[names[j]]
            if a_lower_better:
                da = -da
            if b_lower_better:
                db = -db
            if da == 0 or db == 0:
                count += 0.5
            elif da * db < 0:
                count += 1
    return count


def standardize(values):
    n = len(values)
    mu = sum(values) / n
    sd = math.sqrt(sum((v - mu) ** 2 for v in values) / (n - 1))
    return [(v - mu) / sd for v in values]
