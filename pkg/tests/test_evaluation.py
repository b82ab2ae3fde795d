import warnings

import numpy as np
import pytest

from nfpf.data import synth_gaussian_mixture
from nfpf.errors import BadRatio, EmptyTestSet, MissingClassWarning
from nfpf.evaluation import (evaluate_accuracy, inject_label_noise, select_classifier_c,
                             subset_stats, train_linear_classifier)


def test_separable_blobs_train_perfectly():
    rng = np.random.default_rng(0)
    x = np.vstack([rng.normal(-3, 0.5, (40, 2)), rng.normal(3, 0.5, (40, 2))])
    y = np.repeat([0, 1], 40)
    clf = train_linear_classifier(x, y, 2, c=1.0)
    assert evaluate_accuracy(clf, x, y)["accuracy"] == 1.0


def test_single_class_predicts_it_everywhere():
    x = np.random.default_rng(1).standard_normal((10, 3))
    with pytest.warns(MissingClassWarning):
        clf = train_linear_classifier(x, np.full(10, 2), 4)
    assert clf.missing_classes == [0, 1, 3]
    assert np.all(clf.predict(np.random.default_rng(2).standard_normal((50, 3)) * 10) == 2)


def test_matches_least_squares_oracle():
    ds = synth_gaussian_mixture(3, 5, 200, 2.0, seed=4)
    test = synth_gaussian_mixture(3, 5, 200, 2.0, seed=5)
    clf = train_linear_classifier(ds.features, ds.labels, 3, c=1.0)
    ours = evaluate_accuracy(clf, test.features, test.labels)["accuracy"]
    # oracle: unregularized normal equations on the augmented design
    a = np.hstack([ds.features, np.ones((len(ds), 1))])
    t = -np.ones((len(ds), 3))
    t[np.arange(len(ds)), ds.labels] = 1
    w = np.linalg.solve(a.T @ a, a.T @ t)
    pred = (np.hstack([test.features, np.ones((len(test), 1))]) @ w).argmax(axis=1)
    assert abs(ours - (pred == test.labels).mean()) <= 0.01


def test_deterministic():
    ds = synth_gaussian_mixture(3, 5, 30, 2.0, seed=0)
    w1 = train_linear_classifier(ds.features, ds.labels, 3).weights
    w2 = train_linear_classifier(ds.features, ds.labels, 3).weights
    assert np.array_equal(w1, w2)


def test_accuracy_extremes():
    x = np.array([[-1.0, 0.0], [1.0, 0.0]] * 5)
    y = np.array([0, 1] * 5)
    clf = train_linear_classifier(x, y, 2, c=100.0)
    rep = evaluate_accuracy(clf, x, y)
    assert rep["accuracy"] == 1.0 and rep["per_class_accuracy"] == [1.0, 1.0]
    assert evaluate_accuracy(clf, x, 1 - y)["accuracy"] == 0.0
    with pytest.raises(EmptyTestSet):
        evaluate_accuracy(clf, np.zeros((0, 2)), np.zeros(0, dtype=int))


def test_noise_counts():
    y = np.random.default_rng(0).integers(0, 3, 1000)
    assert np.array_equal(inject_label_noise(y, 0.0, 3, seed=1), y)
    noisy = inject_label_noise(y, 0.4, 3, seed=1)
    assert (noisy != y).sum() == 400
    assert noisy.min() >= 0 and noisy.max() <= 2
    b = np.array([0, 1, 1, 0, 1])
    assert np.array_equal(inject_label_noise(b, 1.0, 2, seed=3), 1 - b)
    with pytest.raises(BadRatio):
        inject_label_noise(y, 1.5, 3)


def test_noise_is_uniform_over_other_classes():
    y = np.zeros(30000, dtype=int)
    noisy = inject_label_noise(y, 1.0, 4, seed=0)
    counts = np.bincount(noisy, minlength=4)
    assert counts[0] == 0
    assert np.all(np.abs(counts[1:] / 10000 - 1) < 0.05)


def test_subset_stats():
    y = np.array([0, 0, 1, 2, 1, 2])
    hist, ent = subset_stats([0, 2, 3], y, 3)
    assert hist.tolist() == [1, 1, 1] and ent == pytest.approx(1.0)
    hist, ent = subset_stats([0, 1], y, 3)
    assert hist.sum() == 2 and ent == 0.0
    hist, ent = subset_stats([0, 1, 2, 3], y, 3)
    assert hist.tolist() == [2, 1, 1]
    assert ent == pytest.approx(1.5 / np.log2(3), abs=1e-12)
    assert ent == pytest.approx(0.946, abs=1e-3)


def test_cv_picks_from_grid():
    ds = synth_gaussian_mixture(3, 8, 40, 2.0, seed=1)
    grid = [2.0 ** -8, 1.0, 2.0 ** 8]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        c = select_classifier_c(ds.features, ds.labels, 3, grid)
    assert c in grid
    assert c == select_classifier_c(ds.features, ds.labels, 3, grid)
    assert select_classifier_c(ds.features[:3], ds.labels[:3], 3, grid) == grid[0]
