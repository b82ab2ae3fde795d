import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nfpf.data import (DatasetSpec, LabeledDataset, load_csv_dataset, normalize_features,
                       split_dataset, synth_gaussian_mixture, synth_waveform, write_csv_dataset)
from nfpf.errors import EmptyFile, ParseError, RaggedRows, TooSmall


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_load_integer_labels(tmp_path):
    path = write(tmp_path, "a,b,y\n1.5,2,1\n3,4,0\n5,6e-1,1\n")
    ds = load_csv_dataset(DatasetSpec(path, label_column="y"))
    assert ds.features.shape == (3, 2)
    assert ds.labels.tolist() == [1, 0, 1]
    assert ds.class_names == ["0", "1"]
    np.testing.assert_array_equal(ds.features[2], [5.0, 0.6])


def test_numeric_labels_sort_numerically(tmp_path):
    path = write(tmp_path, "2,0,10\n1,1,9\n0,1,2\n")
    ds = load_csv_dataset(DatasetSpec(path, has_header=False))
    assert ds.class_names == ["2", "9", "10"]
    assert ds.labels.tolist() == [2, 1, 0]


def test_string_labels_and_first_column(tmp_path):
    path = write(tmp_path, "label;x;y\ncat;1;2\ndog;3;4\ncat;5;6\n")
    ds = load_csv_dataset(DatasetSpec(path, label_column=0, delimiter=";"))
    assert ds.labels.tolist() == [0, 1, 0]
    assert ds.class_names == ["cat", "dog"]


def test_parse_error_names_cell(tmp_path):
    path = write(tmp_path, "a,b,y\n1,2,0\n3,oops,1\n")
    with pytest.raises(ParseError) as err:
        load_csv_dataset(DatasetSpec(path, label_column="y"))
    assert (err.value.row, err.value.col, err.value.value) == (3, 2, "oops")
    assert "oops" in str(err.value)


def test_ragged_and_empty(tmp_path):
    with pytest.raises(RaggedRows):
        load_csv_dataset(DatasetSpec(write(tmp_path, "a,b,y\n1,2,0\n3,1\n")))
    with pytest.raises(EmptyFile):
        load_csv_dataset(DatasetSpec(write(tmp_path, "a,b,y\n", "e.csv")))


def test_write_load_roundtrip(tmp_path):
    ds = synth_gaussian_mixture(3, 5, 7, 2.5, seed=3)
    path = str(tmp_path / "g.csv")
    write_csv_dataset(ds, path)
    back = load_csv_dataset(DatasetSpec(path, label_column="label"))
    assert np.array_equal(back.features, ds.features)
    assert np.array_equal(back.labels, ds.labels)


def test_split_half():
    ds = synth_gaussian_mixture(2, 4, 50, 1.0, seed=0)
    cand, test = split_dataset(ds, 0.5, seed=1)
    assert (len(cand), len(test)) == (50, 50)
    assert set(cand.row_ids.tolist()).isdisjoint(test.row_ids.tolist())
    assert sorted(cand.row_ids.tolist() + test.row_ids.tolist()) == list(range(100))


def test_split_deterministic():
    ds = synth_gaussian_mixture(2, 3, 20, 1.0, seed=0)
    a = split_dataset(ds, 0.5, 4)[1].row_ids
    b = split_dataset(ds, 0.5, 4)[1].row_ids
    assert np.array_equal(a, b)
    assert not np.array_equal(a, split_dataset(ds, 0.5, 5)[1].row_ids)


@settings(max_examples=40, deadline=None)
@given(counts=st.lists(st.integers(1, 30), min_size=2, max_size=5),
       frac=st.floats(0.1, 0.9), seed=st.integers(0, 1000))
def test_split_stratified(counts, frac, seed):
    labels = np.repeat(np.arange(len(counts)), counts)
    ds = LabeledDataset(np.zeros((labels.size, 2)), labels, len(counts))
    try:
        cand, test = split_dataset(ds, frac, seed)
    except TooSmall:
        return
    assert len(test) == round(frac * labels.size)
    for c, n_c in enumerate(counts):
        assert abs((test.labels == c).sum() - frac * n_c) <= 1.0 + 1e-9


def test_split_too_small():
    ds = LabeledDataset(np.zeros((1, 2)), np.zeros(1, dtype=int), 1)
    with pytest.raises(TooSmall):
        split_dataset(ds, 0.5)


def test_zscore_and_reapply():
    rng = np.random.default_rng(0)
    x = rng.normal(5, 3, (50, 4))
    x[:, 2] = 7.0
    z, params = normalize_features(x, "zscore")
    assert np.all(np.abs(z.mean(axis=0)) <= 1e-9)
    np.testing.assert_allclose(z[:, [0, 1, 3]].std(axis=0), 1.0, atol=1e-9)
    assert np.all(z[:, 2] == 0.0)
    held = rng.normal(5, 3, (10, 4))
    np.testing.assert_allclose(params.apply(held), (held - x.mean(0)) / np.where(x.std(0) > 0, x.std(0), 1))


def test_minmax_and_none():
    x = np.random.default_rng(1).standard_normal((20, 3))
    mm, _ = normalize_features(x, "minmax")
    assert mm.min() >= 0.0 and mm.max() <= 1.0
    same, _ = normalize_features(x, "none")
    assert np.array_equal(same, x)
    with pytest.raises(ValueError):
        normalize_features(x, "robust")


def test_mixture_shape_and_means():
    ds = synth_gaussian_mixture(4, 6, 500, 10.0, seed=0)
    assert ds.features.shape == (2000, 6)
    for c in range(4):
        mean = ds.features[ds.labels == c].mean(axis=0)
        np.testing.assert_allclose(mean, 10.0 * np.eye(4, 6)[c], atol=0.2)


def test_mixture_separation_extremes():
    from nfpf.evaluation import evaluate_accuracy, train_linear_classifier
    far_tr = synth_gaussian_mixture(3, 5, 200, 10.0, seed=0)
    far_te = synth_gaussian_mixture(3, 5, 200, 10.0, seed=1)
    clf = train_linear_classifier(far_tr.features, far_tr.labels, 3)
    assert evaluate_accuracy(clf, far_te.features, far_te.labels)["accuracy"] >= 0.99
    flat_tr = synth_gaussian_mixture(4, 5, 300, 0.0, seed=0)
    flat_te = synth_gaussian_mixture(4, 5, 300, 0.0, seed=1)
    clf = train_linear_classifier(flat_tr.features, flat_tr.labels, 4)
    assert abs(evaluate_accuracy(clf, flat_te.features, flat_te.labels)["accuracy"] - 0.25) < 0.06


def test_waveform_generator():
    ds = synth_waveform(300, seed=0)
    assert ds.features.shape == (300, 40) and ds.class_count == 3
    assert synth_waveform(10, seed=0, noise_features=0).features.shape == (10, 21)
