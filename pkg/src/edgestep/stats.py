from __future__ import annotations

import numpy as np
from scipy.special import ndtr


def ks_statistic(samples, cdf=ndtr) -> float:
    """sup_x |F_n(x) - F(x)| for a continuous reference cdf (standard normal by default)."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    if n == 0:
        raise ValueError("empty sample")
    F = cdf(x)
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(float(p.get(k, 0)) - float(q.get(k, 0))) for k in keys)


def empirical_law(outcomes) -> dict:
    keys, counts = np.unique(np.asarray(outcomes), axis=0, return_counts=True)
    n = counts.sum()
    if keys.ndim == 1:
        return {k.item(): c / n for k, c in zip(keys, counts)}
    return {tuple(k.tolist()): c / n for k, c in zip(keys, counts)}


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
