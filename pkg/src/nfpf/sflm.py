"""Closed-form shallow autoencoder (SFLM).

A single hidden layer with random input weights, output weights from a ridge
pseudoinverse solve, and one guarded refinement of the input weights computed
by inverting the activation on a rescaled hidden-layer target.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

from .errors import ActivationRangeError, DimensionMismatch, InvalidHiddenSize, NonFinite
from .linalg import pearson_rowwise, ridge_pseudoinverse, solve_output_weights

ACTIVATIONS = ("sigmoid", "sine")

# open sub-intervals of each activation's range used by the affine rescale
_TARGET_RANGE = {
    "sigmoid": (0.1, 0.9),
    "sine": (-0.9, 0.9),
}


def activate(z, kind):
    if kind == "sigmoid":
        return expit(z)
    if kind == "sine":
        return np.sin(z)
    raise ValueError(f"unknown activation {kind!r}; expected one of {ACTIVATIONS}")


def activate_inverse(y, kind):
    """Inverse activation: logit on (0, 1) for sigmoid, arcsin on [-1, 1] for sine."""
    y = np.asarray(y, dtype=float)
    if kind == "sigmoid":
        if np.any((y <= 0.0) | (y >= 1.0)):
            raise ActivationRangeError("sigmoid inverse needs values in the open interval (0, 1)")
        return logit(y)
    if kind == "sine":
        if np.any(np.abs(y) > 1.0):
            raise ActivationRangeError("arcsin needs values in [-1, 1]")
        return np.arcsin(y)
    raise ValueError(f"unknown activation {kind!r}; expected one of {ACTIVATIONS}")


def rescale_columns(e, kind):
    """Affinely map every column of ``e`` onto the activation's safe target range.

    Constant columns go to the middle of the range. Raises ActivationRangeError
    if the result is not strictly inside the invertible domain.
    """
    lo, hi = _TARGET_RANGE[kind]
    e = np.asarray(e, dtype=float)
    if not np.all(np.isfinite(e)):
        raise ActivationRangeError("reconstruction target is not finite")
    cmin = e.min(axis=0)
    span = e.max(axis=0) - cmin
    flat = span <= 1e-12 * np.maximum(np.abs(cmin), 1.0)
    safe_span = np.where(flat, 1.0, span)
    u = lo + (hi - lo) * (e - cmin) / safe_span
    u[:, flat] = 0.5 * (lo + hi)
    inside = (u > 0.0) & (u < 1.0) if kind == "sigmoid" else np.abs(u) < 1.0
    if not np.all(inside):
        raise ActivationRangeError(f"rescaled target left the invertible range of {kind}")
    return u, flat


@dataclass(frozen=True, eq=False)
class SflmModel:
    input_weights: np.ndarray  # d x H
    bias: np.ndarray  # H
    output_weights: np.ndarray  # H x d
    activation: str
    c: float
    seed: int
    refined: bool = False

    @property
    def hidden_size(self):
        return self.input_weights.shape[1]

    @property
    def dims(self):
        return self.input_weights.shape[0]

    def hidden(self, x):
        return activate(x @ self.input_weights + self.bias, self.activation)

    def to_dict(self):
        return {
            "dims": self.dims,
            "hidden_size": self.hidden_size,
            "activation": self.activation,
            "c": self.c,
            "seed": self.seed,
            "refined": self.refined,
            "a": self.input_weights.tolist(),
            "b": self.bias.tolist(),
            "beta": self.output_weights.tolist(),
        }

    @classmethod
    def from_dict(cls, doc):
        d, h = int(doc["dims"]), int(doc["hidden_size"])
        a = np.array(doc["a"], dtype=float).reshape(d, h)
        b = np.array(doc["b"], dtype=float).reshape(h)
        beta = np.array(doc["beta"], dtype=float).reshape(h, d)
        for name, arr in (("a", a), ("b", b), ("beta", beta)):
            if not np.all(np.isfinite(arr)):
                raise NonFinite(f"model field {name} is not finite")
        return cls(a, b, beta, doc["activation"], float(doc["c"]), int(doc["seed"]),
                   bool(doc.get("refined", False)))

    def to_json(self):
        # json writes floats with repr(), which round-trips exactly
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _fit_output(x, a, b, activation, c):
    hid = activate(x @ a + b, activation)
    return solve_output_weights(hid, x, c), hid


def train_sflm(x, hidden_size, activation="sigmoid", c=2.0 ** 10, seed=0, refine=True):
    """Train an SFLM autoencoder on the rows of ``x``.

    Input weights and biases start uniform in [-1, 1]. After the first output
    solve, the current reconstruction is pulled back through the decoder into
    hidden space, rescaled into the activation's range, inverted, and regressed
    on the inputs to give new input weights and biases. The refined model is kept
    only if its mean training correlation does not drop.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DimensionMismatch(f"x must be 2-D, got shape {x.shape}")
    n, d = x.shape
    if n < 1:
        raise DimensionMismatch("need at least one training row")
    if d < 2:
        raise DimensionMismatch("need at least two features")
    if int(hidden_size) != hidden_size or hidden_size < 1:
        raise InvalidHiddenSize(f"hidden_size must be a positive integer, got {hidden_size}")
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}; expected one of {ACTIVATIONS}")
    if not np.all(np.isfinite(x)):
        raise NonFinite("x contains NaN or Inf")
    hidden_size = int(hidden_size)

    rng = np.random.default_rng(seed)
    a = rng.uniform(-1.0, 1.0, size=(d, hidden_size))
    b = rng.uniform(-1.0, 1.0, size=hidden_size)
    beta, hid = _fit_output(x, a, b, activation, c)
    base = SflmModel(a, b, beta, activation, float(c), int(seed))
    if not refine:
        return base

    # reconstruction e = H beta, mapped back to one hidden column per node
    target = (hid @ beta) @ ridge_pseudoinverse(beta, c)
    u, flat = rescale_columns(target, activation)
    if np.all(flat):
        return base
    z = activate_inverse(u, activation)
    xa = np.hstack([x, np.ones((n, 1))])
    ab = solve_output_weights(xa, z, c)
    a_new, b_new = ab[:-1], ab[-1]
    beta_new, _ = _fit_output(x, a_new, b_new, activation, c)
    refined = SflmModel(a_new, b_new, beta_new, activation, float(c), int(seed), refined=True)

    if score_phi(refined, x).mean() >= score_phi(base, x).mean():
        return refined
    return base


def reconstruct(model, x):
    """Autoencoder output ``f(x a + b) @ beta``; shape-preserving."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.dims:
        raise DimensionMismatch(f"expected (n, {model.dims}) input, got {x.shape}")
    return model.hidden(x) @ model.output_weights


def score_phi(model, x, return_mask=False):
    """Per-row correlation between samples and their reconstructions."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 2 and x.shape[0] == 0:
        empty = np.zeros(0)
        return (empty, np.zeros(0, dtype=bool)) if return_mask else empty
    return pearson_rowwise(x, reconstruct(model, x), return_mask=return_mask)
