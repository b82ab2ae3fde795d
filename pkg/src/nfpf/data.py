"""Dataset ingestion, stratified splitting, normalization and synthetic mixtures."""

import csv
import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyFile, ParseError, RaggedRows, TooSmall

NORMALIZATIONS = ("zscore", "minmax", "none")


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    class_count: int
    class_names: list = field(default_factory=list)
    row_ids: np.ndarray | None = None  # positions in the source file

    def __post_init__(self):
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features and labels disagree on row count")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.class_count):
            raise ValueError("labels must lie in [0, class_count)")
        if self.row_ids is None:
            object.__setattr__(self, "row_ids", np.arange(self.features.shape[0]))

    def __len__(self):
        return self.features.shape[0]

    def subset(self, idx):
        idx = np.asarray(idx, dtype=int)
        return LabeledDataset(self.features[idx], self.labels[idx], self.class_count,
                              list(self.class_names), self.row_ids[idx])

    def with_labels(self, labels):
        return LabeledDataset(self.features, np.asarray(labels, dtype=int), self.class_count,
                              list(self.class_names), self.row_ids)

    def with_features(self, features):
        return LabeledDataset(np.asarray(features, dtype=float), self.labels, self.class_count,
                              list(self.class_names), self.row_ids)


@dataclass
class DatasetSpec:
    path: str
    label_column: int | str = -1
    delimiter: str = ","
    has_header: bool = True
    normalization: str = "zscore"

    @classmethod
    def from_dict(cls, doc):
        known = {k: doc[k] for k in ("path", "label_column", "delimiter", "has_header",
                                     "normalization") if k in doc}
        return cls(**known)


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _label_key(name):
    try:
        return (0, float(name), name)
    except ValueError:
        return (1, 0.0, name)


def load_csv_dataset(spec):
    """Read a delimited text file into a LabeledDataset.

    Labels are mapped to dense ids in sorted order (numerically when every
    label parses as a number); ``class_names[i]`` holds the original label of
    id ``i``.
    """
    with open(spec.path, newline="") as fh:
        rows = [r for r in csv.reader(fh, delimiter=spec.delimiter) if r and any(c.strip() for c in r)]
    header = None
    if spec.has_header and rows:
        header, rows = rows[0], rows[1:]
    if not rows:
        raise EmptyFile(f"{spec.path} has no data rows")

    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise RaggedRows(f"row {i + 1} has {len(r)} fields, expected {width}")

    lab = spec.label_column
    if isinstance(lab, str):
        if header is None or lab not in header:
            raise ValueError(f"label column {lab!r} not found in header")
        lab = header.index(lab)
    if not -width <= lab < width:
        raise ValueError(f"label column {lab} out of range for {width} columns")
    lab %= width
    if width - 1 < 2:
        raise ValueError("need at least two feature columns")

    feat_cols = [j for j in range(width) if j != lab]
    feats = np.empty((len(rows), len(feat_cols)))
    offset = 2 if header is not None else 1
    for i, r in enumerate(rows):
        for jj, j in enumerate(feat_cols):
            cell = r[j].strip()
            try:
                feats[i, jj] = float(cell)
            except ValueError:
                raise ParseError(i + offset, j + 1, cell) from None
            if not np.isfinite(feats[i, jj]):
                raise ParseError(i + offset, j + 1, cell)

    raw = [r[lab].strip() for r in rows]
    names = sorted(set(raw), key=_label_key)
    ids = {name: i for i, name in enumerate(names)}
    labels = np.array([ids[v] for v in raw], dtype=int)
    return LabeledDataset(feats, labels, len(names), names)


def write_csv_dataset(ds, path, delimiter=","):
    """Write features then label; floats are written with repr so they reload exactly."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter)
        w.writerow([f"f{j}" for j in range(ds.features.shape[1])] + ["label"])
        names = ds.class_names or [str(i) for i in range(ds.class_count)]
        for row, y in zip(ds.features, ds.labels):
            w.writerow([repr(float(v)) for v in row] + [names[y]])


def split_dataset(ds, test_fraction=0.5, seed=0):
    """Stratified seeded split into ``(candidate, test)``.

    The overall test size is ``round(test_fraction * n)``; it is shared out
    among classes by largest remainder so every class is within one sample of
    its exact share.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = len(ds)
    n_test = int(round(test_fraction * n))
    if n < 2 or n_test == 0 or n_test == n:
        raise TooSmall(f"{n} rows cannot be split with test fraction {test_fraction}")

    rng = np.random.default_rng(seed)
    by_class = [np.flatnonzero(ds.labels == c) for c in range(ds.class_count)]
    exact = np.array([test_fraction * len(ix) for ix in by_class])
    quota = np.floor(exact).astype(int)
    short = n_test - quota.sum()
    if short > 0:
        rem = exact - quota
        order = np.lexsort((np.arange(len(rem)), -rem))
        quota[order[:short]] += 1
    elif short < 0:
        rem = exact - quota
        order = np.lexsort((np.arange(len(rem)), rem))
        for c in order:
            if short == 0:
                break
            if quota[c] > 0:
                quota[c] -= 1
                short += 1

    test_idx, cand_idx = [], []
    for ix, q in zip(by_class, quota):
        perm = rng.permutation(ix)
        test_idx.append(perm[:q])
        cand_idx.append(perm[q:])
    test_idx = np.sort(np.concatenate(test_idx))
    cand_idx = np.sort(np.concatenate(cand_idx))
    return ds.subset(cand_idx), ds.subset(test_idx)


@dataclass(frozen=True, eq=False)
class NormParams:
    method: str
    shift: np.ndarray
    scale: np.ndarray

    def apply(self, x):
        return (np.asarray(x, dtype=float) - self.shift) / self.scale

    def to_dict(self):
        return {"method": self.method, "shift": self.shift.tolist(), "scale": self.scale.tolist()}


def normalize_features(x, method="zscore"):
    """Fit a per-column normalization on ``x`` and apply it.

    Returns ``(x_normalized, params)``; call ``params.apply`` on held-out data.
    Constant columns map to 0.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[1]
    if method == "none":
        params = NormParams(method, np.zeros(d), np.ones(d))
    elif method == "zscore":
        mu = x.mean(axis=0)
        sd = x.std(axis=0)
        params = NormParams(method, mu, np.where(sd > 0, sd, 1.0))
    elif method == "minmax":
        lo = x.min(axis=0)
        span = x.max(axis=0) - lo
        params = NormParams(method, lo, np.where(span > 0, span, 1.0))
    else:
        raise ValueError(f"unknown normalization {method!r}; expected one of {NORMALIZATIONS}")
    return params.apply(x), params


def synth_gaussian_mixture(class_count, dim, per_class, separation, seed=0):
    """Isotropic unit-variance Gaussians centered at ``separation * e_c``, rows shuffled."""
    if class_count < 1 or dim < 1 or per_class < 1:
        raise ValueError("class_count, dim and per_class must all be >= 1")
    if dim < class_count:
        raise ValueError("dim must be at least class_count to place centers on distinct axes")
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(class_count), per_class)
    means = separation * np.eye(class_count, dim)
    feats = means[labels] + rng.standard_normal((labels.size, dim))
    perm = rng.permutation(labels.size)
    return LabeledDataset(feats[perm], labels[perm], class_count,
                          [str(c) for c in range(class_count)])


def synth_waveform(n, seed=0, noise_features=19):
    """Breiman's three-class waveform generator, optionally padded with pure-noise columns.

    Each class is a random convex mix of two of three shifted triangular waves
    sampled at 21 points, plus unit Gaussian noise. With the default 19 extra
    noise columns rows have 40 features.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(1, 22)
    base = [np.maximum(6 - np.abs(t - centre), 0) for centre in (11, 15, 7)]
    pairs = np.array([[0, 1], [0, 2], [1, 2]])
    labels = rng.integers(0, 3, n)
    mix = rng.uniform(size=(n, 1))
    waves = np.stack(base)
    x = mix * waves[pairs[labels, 0]] + (1 - mix) * waves[pairs[labels, 1]]
    x = x + rng.standard_normal((n, 21))
    if noise_features:
        x = np.hstack([x, rng.standard_normal((n, noise_features))])
    return LabeledDataset(x, labels, 3, ["0", "1", "2"])
