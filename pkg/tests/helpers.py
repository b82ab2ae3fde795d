import numpy as np

from nfpf.rd import ClusterModel
from nfpf.sflm import SflmModel, score_phi, train_sflm


def subspace_data(n, dim=10, rank=3, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, rank)) @ rng.standard_normal((rank, dim))


def two_subspaces(n_each, dim=10, rank=3, seed=0):
    """Two blocks of rows on mutually orthogonal rank-``rank`` subspaces."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, 2 * rank)))
    a = rng.standard_normal((n_each, rank)) @ q[:, :rank].T
    b = rng.standard_normal((n_each, rank)) @ q[:, rank:].T
    return a, b


def svd_shrinkage_pinv(h, lam):
    """Independent oracle: V diag(s / (s^2 + lam)) U^T."""
    u, s, vt = np.linalg.svd(h, full_matrices=False)
    return vt.T @ np.diag(s / (s * s + lam)) @ u.T


def mirrored_clusters(n_each=60, half=5, seed=0, hidden=20):
    """Two clusters that are exact feature-swap mirrors plus one sample fixed by the swap.

    Returns (x_all, cluster_models, midpoint_index). Cluster 2's model is built
    from cluster 1's by permuting weights, so the setup is symmetric exactly,
    not just statistically.
    """
    rng = np.random.default_rng(seed)
    d = 2 * half
    perm = np.r_[np.arange(half, d), np.arange(half)]
    centre = np.r_[np.full(half, 3.0), np.zeros(half)]
    c1 = centre + rng.standard_normal((n_each, d)) * np.linspace(0.5, 1.5, d)
    c2 = c1[:, perm]
    v = rng.standard_normal(half) + 1.5
    mid = np.r_[v, v][None, :]
    x_all = np.vstack([c1, c2, mid])

    m1 = train_sflm(c1, hidden, "sigmoid", 2.0 ** 10, seed)
    m2 = SflmModel(m1.input_weights[perm], m1.bias, m1.output_weights[:, perm],
                   m1.activation, m1.c, m1.seed, m1.refined)
    a1 = float(score_phi(m1, c1).mean())
    a2 = float(score_phi(m2, c2).mean())
    models = [ClusterModel(0, m1, a1, np.arange(n_each)),
              ClusterModel(1, m2, a2, np.arange(n_each, 2 * n_each))]
    return x_all, models, 2 * n_each
