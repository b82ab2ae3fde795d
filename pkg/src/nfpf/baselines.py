"""Label-blind selection baselines: random, k-means distance, and leverage-score DCS."""

import numpy as np

from .errors import BudgetTooLarge, RankTooLarge
from .rd import _sq_dists, kmeans

BASELINES = ("random", "kmeans_distance", "dcs")


def _check_budget(m, total):
    if m < 0 or m > total:
        raise BudgetTooLarge(f"cannot select {m} of {total} samples")


def random_select(n_total, m, seed=0):
    _check_budget(m, n_total)
    return np.random.default_rng(seed).permutation(n_total)[:m]


def kmeans_distance_select(x, m, seed=0, max_iter=100):
    """Cluster into ``m`` centers and take the nearest not-yet-picked sample to each."""
    x = np.asarray(x, dtype=float)
    _check_budget(m, x.shape[0])
    if m == 0:
        return np.zeros(0, dtype=int)
    centers, _ = kmeans(x, m, seed=seed, max_iter=max_iter)
    d2 = _sq_dists(x, centers)
    picked = []
    free = np.ones(x.shape[0], dtype=bool)
    for c in range(m):
        col = np.where(free, d2[:, c], np.inf)
        i = int(col.argmin())
        picked.append(i)
        free[i] = False
    return np.array(picked)


def leverage_scores(x, rank):
    """Squared row norms of the top-``rank`` left singular vectors (one score per sample)."""
    x = np.asarray(x, dtype=float)
    if rank < 1 or rank > min(x.shape):
        raise RankTooLarge(f"rank {rank} outside [1, {min(x.shape)}]")
    u, _, _ = np.linalg.svd(x, full_matrices=False)
    return (u[:, :rank] ** 2).sum(axis=1)


def dcs_select(x, m, rank, decimals=10):
    """Deterministic leverage-score sampling over samples.

    Scores are rounded to ``decimals`` places before ranking so exact ties in
    theory stay ties in floating point; ties go to the lower index.
    """
    x = np.asarray(x, dtype=float)
    _check_budget(m, x.shape[0])
    lev = np.round(leverage_scores(x, rank), decimals)
    return np.lexsort((np.arange(lev.shape[0]), -lev))[:m]
