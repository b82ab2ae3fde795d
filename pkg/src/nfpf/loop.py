"""Progressive subset selection driven by learnability scores."""

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import BudgetExceeded, ConfigInvalid, DimensionMismatch
from .sflm import ACTIVATIONS, score_phi, train_sflm


@dataclass(frozen=True)
class NfpfConfig:
    m: int
    k: int
    n: int
    h_current: int = 100
    h_reference: int | None = None  # defaults to 10 * h_current
    c: float = 2.0 ** 10
    activation: str = "sigmoid"
    seed: int = 0

    def validate(self):
        if self.m < 0:
            raise ConfigInvalid("m must be non-negative", "m")
        if not 0 <= self.k <= self.m:
            raise ConfigInvalid(f"k={self.k} must lie in [0, m={self.m}]", "k")
        if self.k == 0 and self.m > 0:
            raise ConfigInvalid("k must be at least 1 to train the first subset model", "k")
        if self.n < 1:
            raise ConfigInvalid("n must be at least 1", "n")
        if self.h_current < 1:
            raise ConfigInvalid("h_current must be at least 1", "h_current")
        if self.h_reference is not None and self.h_reference < self.h_current:
            raise ConfigInvalid("h_reference must be >= h_current", "h_reference")
        if not self.c > 0:
            raise ConfigInvalid("c must be positive", "c")
        if self.activation not in ACTIVATIONS:
            raise ConfigInvalid(f"activation must be one of {ACTIVATIONS}", "activation")

    @property
    def cycles(self):
        return math.ceil((self.m - self.k) / self.n)

    def reference_size(self, n_samples):
        h = self.h_reference if self.h_reference is not None else 10 * self.h_current
        return max(1, min(h, n_samples))


@dataclass
class CycleRecord:
    cycle: int
    added: list
    g_min: float
    g_median: float
    g_max: float


@dataclass
class SelectionState:
    selected: list
    remaining: np.ndarray  # sorted ascending
    cycle: int = 0
    history: list = field(default_factory=list)

    @classmethod
    def start(cls, n_total, initial):
        initial = [int(i) for i in initial]
        if len(set(initial)) != len(initial):
            raise ConfigInvalid("initial indices contain duplicates", "initial")
        if any(i < 0 or i >= n_total for i in initial):
            raise ConfigInvalid("initial index out of range", "initial")
        mask = np.ones(n_total, dtype=bool)
        mask[initial] = False
        return cls(initial, np.flatnonzero(mask))

    def history_dicts(self):
        return [asdict(r) for r in self.history]


def cycle_seed(seed, cycle):
    return int(np.random.SeedSequence([seed, cycle]).generate_state(1)[0])


def learnability_scores(current, reference, x_u):
    """G = phi under the subset model minus phi under the full-data model."""
    x_u = np.asarray(x_u, dtype=float)
    if current.dims != reference.dims:
        raise DimensionMismatch("current and reference models disagree on input dimension")
    return score_phi(current, x_u) - score_phi(reference, x_u)


def select_cycle(state, scores, n):
    """Move the ``n`` remaining samples with the smallest score into the subset."""
    scores = np.asarray(scores, dtype=float)
    if scores.shape != state.remaining.shape:
        raise DimensionMismatch(
            f"{scores.shape[0]} scores for {state.remaining.shape[0]} remaining samples")
    if n > state.remaining.shape[0]:
        raise BudgetExceeded(f"cannot take {n} of {state.remaining.shape[0]} remaining samples")
    # remaining is sorted, so a stable sort breaks ties toward the lower sample index
    order = np.argsort(scores, kind="stable")
    take = order[:n]
    added = [int(i) for i in state.remaining[take]]
    keep = np.ones(state.remaining.shape[0], dtype=bool)
    keep[take] = False
    if scores.size:
        stats = (float(scores.min()), float(np.median(scores)), float(scores.max()))
    else:
        stats = (math.nan, math.nan, math.nan)
    record = CycleRecord(state.cycle + 1, added, *stats)
    return SelectionState(state.selected + added, state.remaining[keep], state.cycle + 1,
                          state.history + [record])


def run_nfpf(x, initial, config):
    """Grow ``initial`` to ``config.m`` samples; never touches labels."""
    config.validate()
    x = np.asarray(x, dtype=float)
    n_total = x.shape[0]
    if len(initial) != config.k:
        raise ConfigInvalid(f"initial subset has {len(initial)} indices, expected k={config.k}",
                            "initial")
    if config.m > n_total:
        raise ConfigInvalid(f"budget m={config.m} exceeds {n_total} samples", "m")
    state = SelectionState.start(n_total, initial)
    if config.cycles == 0:
        return state

    reference = train_sflm(x, config.reference_size(n_total), config.activation, config.c,
                           config.seed)
    ref_phi = score_phi(reference, x)
    for t in range(config.cycles):
        current = train_sflm(x[state.selected], config.h_current, config.activation, config.c,
                             cycle_seed(config.seed, t))
        pool = state.remaining
        g = score_phi(current, x[pool]) - ref_phi[pool]
        take = min(config.n, config.m - len(state.selected))
        state = select_cycle(state, g, take)
    return state
