"""Downstream harness: ridge classifier, accuracy, label noise and subset statistics."""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BadRatio, DimensionMismatch, EmptyTestSet, MissingClassWarning
from .linalg import ridge_lambda


@dataclass(frozen=True, eq=False)
class LinearClassifier:
    weights: np.ndarray  # (d + 1) x class_count, last row is the bias
    present: np.ndarray  # bool per class
    class_count: int

    @property
    def missing_classes(self):
        return [int(c) for c in np.flatnonzero(~self.present)]

    def decision(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.weights.shape[0] - 1:
            raise DimensionMismatch(
                f"expected (n, {self.weights.shape[0] - 1}) features, got {x.shape}")
        scores = x @ self.weights[:-1] + self.weights[-1]
        scores[:, ~self.present] = -np.inf
        return scores

    def predict(self, x):
        # argmax returns the first maximum, i.e. the lower class id on ties
        return self.decision(x).argmax(axis=1)


def train_linear_classifier(x, y, class_count, c=1.0):
    """One-vs-rest ridge regression onto +/-1 targets with an unpenalized bias."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=int)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise DimensionMismatch("x and y disagree on row count")
    if x.shape[0] == 0:
        raise ValueError("cannot train on an empty subset")
    counts = np.bincount(y, minlength=class_count)
    present = counts > 0
    if not present.all():
        missing = [int(c) for c in np.flatnonzero(~present)]
        warnings.warn(f"classes {missing} absent from training subset", MissingClassWarning,
                      stacklevel=2)

    n, d = x.shape
    targets = -np.ones((n, class_count))
    targets[np.arange(n), y] = 1.0
    xa = np.hstack([x, np.ones((n, 1))])
    gram = xa.T @ xa
    reg = np.full(d + 1, ridge_lambda(c))
    reg[-1] = 0.0
    gram[np.diag_indices_from(gram)] += reg
    w = np.linalg.solve(gram, xa.T @ targets)
    return LinearClassifier(w, present, class_count)


def evaluate_accuracy(clf, x_test, y_test):
    """Overall and per-class accuracy. Classes absent from the test set get NaN."""
    y_test = np.asarray(y_test, dtype=int)
    if y_test.size == 0:
        raise EmptyTestSet("test set is empty")
    x_test = np.asarray(x_test, dtype=float)
    if x_test.shape[0] != y_test.shape[0]:
        raise DimensionMismatch("x_test and y_test disagree on row count")
    pred = clf.predict(x_test)
    hit = pred == y_test
    per_class = []
    for c in range(clf.class_count):
        mask = y_test == c
        per_class.append(float(hit[mask].mean()) if mask.any() else float("nan"))
    return {
        "accuracy": float(hit.mean()),
        "per_class_accuracy": per_class,
        "missing_classes": clf.missing_classes,
    }


def inject_label_noise(y, ratio, class_count, seed=0):
    """Reassign exactly ``floor(ratio * n)`` random labels to a different, uniformly drawn class."""
    if not 0.0 <= ratio <= 1.0:
        raise BadRatio(f"noise ratio must lie in [0, 1], got {ratio}")
    y = np.array(y, dtype=int)
    count = int(np.floor(ratio * y.size + 1e-9))
    if count == 0:
        return y
    if class_count < 2:
        raise BadRatio("label noise needs at least two classes")
    rng = np.random.default_rng(seed)
    rows = rng.choice(y.size, size=count, replace=False)
    y[rows] = (y[rows] + rng.integers(1, class_count, size=count)) % class_count
    return y


def subset_stats(indices, y, class_count):
    """Class histogram of the subset and its entropy normalized by log(class_count)."""
    labels = np.asarray(y, dtype=int)[np.asarray(indices, dtype=int)]
    hist = np.bincount(labels, minlength=class_count)
    total = hist.sum()
    if total == 0 or class_count < 2:
        return hist, 0.0
    p = hist[hist > 0] / total
    return hist, float(-(p * np.log(p)).sum() / np.log(class_count))


def select_classifier_c(x, y, class_count, grid, folds=5, seed=0):
    """Pick the ridge constant from ``grid`` by k-fold accuracy on the labeled subset.

    Ties keep the earliest grid entry. With fewer rows than folds the first
    entry is returned unchanged.
    """
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("empty classifier_c grid")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=int)
    n = y.size
    if len(grid) == 1 or n < folds:
        return grid[0]
    fold_of = np.empty(n, dtype=int)
    fold_of[np.random.default_rng(seed).permutation(n)] = np.arange(n) % folds
    best, best_acc = grid[0], -1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MissingClassWarning)
        for c in grid:
            hits = 0
            for f in range(folds):
                tr, va = fold_of != f, fold_of == f
                clf = train_linear_classifier(x[tr], y[tr], class_count, c)
                hits += int((clf.predict(x[va]) == y[va]).sum())
            if hits / n > best_acc:
                best, best_acc = c, hits / n
    return best
