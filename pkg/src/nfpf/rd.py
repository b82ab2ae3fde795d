"""Initial subset by Reconstruction Difference (RD).

One SFLM is trained per k-means cluster. Every sample is scored by every
cluster model; the distance of that score from the model's own training score
says how "foreign" the sample looks to the cluster. Samples whose two smallest
distances are nearly equal sit close to a boundary between cores and are
chosen first.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import BudgetTooLarge, DimensionMismatch, NeedTwoClusters, TooManyClusters
from .sflm import SflmModel, score_phi, train_sflm


def _sq_dists(x, centers):
    d2 = (x * x).sum(axis=1)[:, None] - 2.0 * x @ centers.T + (centers * centers).sum(axis=1)[None, :]
    return np.maximum(d2, 0.0)


def _kmeanspp(x, k, rng):
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    closest = _sq_dists(x, x[chosen])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=closest / total))
        else:
            # every point coincides with a chosen center: take an unused index
            unused = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(unused))
        chosen.append(nxt)
        closest = np.minimum(closest, _sq_dists(x, x[[nxt]])[:, 0])
    return np.array(chosen)


def kmeans(x, num_clusters, seed=0, max_iter=100):
    """Lloyd's algorithm with k-means++ seeding.

    Returns ``(centers, assignments)``. Clusters that empty out are re-seeded
    with the point farthest from its current center, so every cluster ends up
    nonempty.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DimensionMismatch(f"x must be 2-D, got shape {x.shape}")
    n = x.shape[0]
    if num_clusters < 1:
        raise TooManyClusters("num_clusters must be at least 1")
    if num_clusters > n:
        raise TooManyClusters(f"{num_clusters} clusters requested for {n} samples")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")

    rng = np.random.default_rng(seed)
    seeds = _kmeanspp(x, num_clusters, rng)
    centers = x[seeds].copy()
    assign = None
    for _ in range(max_iter):
        d2 = _sq_dists(x, centers)
        new_assign = d2.argmin(axis=1)
        counts = np.bincount(new_assign, minlength=num_clusters)
        taken = set()
        for empty in np.flatnonzero(counts == 0):
            own = d2[np.arange(n), new_assign]
            own[list(taken)] = -1.0
            # only steal from clusters that keep at least one member
            own[counts[new_assign] <= 1] = -1.0
            far = int(own.argmax())
            counts[new_assign[far]] -= 1
            new_assign[far] = empty
            counts[empty] = 1
            taken.add(far)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(num_clusters):
            centers[c] = x[assign == c].mean(axis=0)
    return centers, assign


@dataclass(frozen=True, eq=False)
class ClusterModel:
    cluster_id: int
    model: SflmModel
    alpha: float
    member_indices: np.ndarray


def train_core_models(x, assignments, hidden_size, activation="sigmoid", c=2.0 ** 10, seed=0):
    """Train one SFLM per cluster on its member rows; alpha is the mean training correlation."""
    x = np.asarray(x, dtype=float)
    assignments = np.asarray(assignments)
    if assignments.shape != (x.shape[0],):
        raise DimensionMismatch("assignments must cover every row of x")
    out = []
    for cid in range(int(assignments.max()) + 1):
        members = np.flatnonzero(assignments == cid)
        if members.size == 0:
            raise ValueError(f"cluster {cid} has no members")
        model = train_sflm(x[members], hidden_size, activation, c, seed + cid)
        alpha = float(score_phi(model, x[members]).mean())
        out.append(ClusterModel(cid, model, alpha, members))
    return out


@dataclass(frozen=True, eq=False)
class RdResult:
    phi: np.ndarray  # u x C
    dist: np.ndarray  # u x C
    rd: np.ndarray
    nearest: np.ndarray
    second: np.ndarray

    def write_audit_csv(self, path):
        rows = np.arange(self.rd.shape[0])
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sample_index", "c1", "c2", "d_c1", "d_c2", "rd"])
            for i in rows:
                c1, c2 = int(self.nearest[i]), int(self.second[i])
                w.writerow([i, c1, c2, repr(float(self.dist[i, c1])),
                            repr(float(self.dist[i, c2])), repr(float(self.rd[i]))])


def rd_scores(models, x_all):
    if len(models) < 2:
        raise NeedTwoClusters(f"RD needs at least two cluster models, got {len(models)}")
    x_all = np.asarray(x_all, dtype=float)
    phi = np.column_stack([score_phi(cm.model, x_all) for cm in models])
    alpha = np.array([cm.alpha for cm in models])
    dist = np.abs(phi - alpha[None, :])
    # stable sort: equal distances resolve to the lower cluster index
    order = np.argsort(dist, axis=1, kind="stable")
    nearest, second = order[:, 0], order[:, 1]
    rows = np.arange(dist.shape[0])
    rd = np.abs(dist[rows, nearest] - dist[rows, second])
    return RdResult(phi, dist, rd, nearest, second)


def init_subset(rd, k):
    """Indices of the ``k`` smallest-RD samples, ascending RD, ties by index."""
    values = rd.rd if isinstance(rd, RdResult) else np.asarray(rd, dtype=float)
    if k < 0 or k > values.shape[0]:
        raise BudgetTooLarge(f"cannot pick {k} of {values.shape[0]} samples")
    return np.argsort(values, kind="stable")[:k]


def rd_initialize(x, k, num_clusters, hidden_size, activation="sigmoid", c=2.0 ** 10, seed=0,
                  max_iter=100):
    """Cluster, train core models, score everything, and take the ``k`` lowest-RD samples."""
    _, assign = kmeans(x, num_clusters, seed=seed, max_iter=max_iter)
    models = train_core_models(x, assign, hidden_size, activation, c, seed)
    result = rd_scores(models, x)
    return init_subset(result, k), result
