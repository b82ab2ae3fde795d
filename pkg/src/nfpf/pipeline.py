"""Experiment glue: method dispatch, per-seed split/select/evaluate, learning curves."""

import warnings
from dataclasses import dataclass

import numpy as np

from .baselines import dcs_select, kmeans_distance_select, random_select
from .data import normalize_features, split_dataset
from .errors import ConfigInvalid, MissingClassWarning
from .evaluation import (evaluate_accuracy, select_classifier_c, subset_stats,
                         train_linear_classifier)
from .loop import NfpfConfig, run_nfpf
from .rd import rd_initialize

METHODS = ("nfpf", "random", "kmeans", "dcs")


def percent_count(percent, m):
    """``percent`` of ``m`` rounded half-up to a whole count, at least 1."""
    return max(1, int(np.floor(percent * m / 100.0 + 0.5)))


@dataclass(frozen=True)
class SelectionParams:
    k_percent: float = 30.0
    n_percent: float = 16.0
    h_current: int = 100
    h_reference: int | None = None
    c: float = 2.0 ** 10
    activation: str = "sigmoid"
    num_clusters: int | None = None  # defaults to the class count
    dcs_rank: int | None = None  # defaults to the class count
    kmeans_iter: int = 100

    def counts(self, m):
        k = min(m, percent_count(self.k_percent, m)) if m else 0
        return k, percent_count(self.n_percent, m)


@dataclass
class Selection:
    method: str
    seed: int
    m: int
    k: int
    n: int
    indices: list
    initial: list
    cycles: list


def select_subset(method, x, m, seed, params, class_count):
    """Run one selector on candidate features ``x``. Labels are never passed in."""
    x = np.asarray(x, dtype=float)
    k, n = params.counts(m)
    if m > x.shape[0]:
        raise ConfigInvalid(f"budget m={m} exceeds the {x.shape[0]} candidate samples", "m")
    if method == "nfpf":
        clusters = params.num_clusters or class_count
        if clusters < 2:
            raise ConfigInvalid("nfpf needs at least two clusters", "class_count")
        initial, _ = rd_initialize(x, k, clusters, params.h_current, params.activation,
                                   params.c, seed, params.kmeans_iter)
        cfg = NfpfConfig(m, k, n, params.h_current, params.h_reference, params.c,
                         params.activation, seed)
        state = run_nfpf(x, initial, cfg)
        return Selection(method, seed, m, k, n, list(state.selected),
                         [int(i) for i in initial], state.history_dicts())
    if method == "random":
        idx = random_select(x.shape[0], m, seed)
    elif method == "kmeans":
        idx = kmeans_distance_select(x, m, seed, params.kmeans_iter)
    elif method == "dcs":
        rank = params.dcs_rank or class_count
        idx = dcs_select(x, m, min(rank, *x.shape))
    else:
        raise ConfigInvalid(f"unknown method {method!r}; expected one of {METHODS}", "method")
    return Selection(method, seed, m, k, n, [int(i) for i in idx], [], [])


def prepare_split(dataset, seed, test_fraction=0.5, normalization="zscore"):
    """Split, then normalize both sides with statistics of the candidate side only."""
    cand, test = split_dataset(dataset, test_fraction, seed)
    xc, params = normalize_features(cand.features, normalization)
    return cand.with_features(xc), test.with_features(params.apply(test.features)), params


def evaluate_selection(cand, test, indices, classifier_c=1.0, train_labels=None):
    """Train on the labeled subset, report test accuracy plus subset class balance.

    ``classifier_c`` may be a list, in which case the constant is chosen by
    cross-validation on the labeled subset alone.
    """
    labels = cand.labels if train_labels is None else np.asarray(train_labels)
    idx = np.asarray(indices, dtype=int)
    xs, ys = cand.features[idx], labels[idx]
    if np.ndim(classifier_c):
        classifier_c = select_classifier_c(xs, ys, cand.class_count, classifier_c)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MissingClassWarning)
        clf = train_linear_classifier(xs, ys, cand.class_count, classifier_c)
    report = evaluate_accuracy(clf, test.features, test.labels)
    report["classifier_c"] = float(classifier_c)
    hist, entropy = subset_stats(idx, cand.labels, cand.class_count)
    report["subset_class_histogram"] = [int(h) for h in hist]
    report["subset_class_entropy"] = entropy
    return report


def run_cell(dataset, method, m, seed, params, test_fraction=0.5, normalization="zscore",
             classifier_c=1.0):
    cand, test, _ = prepare_split(dataset, seed, test_fraction, normalization)
    sel = select_subset(method, cand.features, m, seed, params, dataset.class_count)
    return sel, evaluate_selection(cand, test, sel.indices, classifier_c)


@dataclass
class CurvePoint:
    m: int
    mean: float
    std: float
    accuracies: list


def learning_curve(dataset, method, m_list, seeds, params, test_fraction=0.5,
                   normalization="zscore", classifier_c=1.0):
    """Mean and std of test accuracy for each budget in ``m_list`` over ``seeds``."""
    m_list = list(m_list)
    if m_list != sorted(m_list):
        raise ValueError("m_list must be ascending")
    out = []
    for m in m_list:
        accs = [run_cell(dataset, method, m, s, params, test_fraction, normalization,
                         classifier_c)[1]["accuracy"] for s in seeds]
        out.append(CurvePoint(m, float(np.mean(accs)), float(np.std(accs)), accs))
    return out
