"""Unsupervised subset selection with closed-form autoencoders.

The main entry points are :func:`rd_initialize` (boundary-seeking initial
subset) and :func:`run_nfpf` (progressive growth of that subset), plus the
baselines and evaluation harness used to compare them.
"""

from .baselines import dcs_select, kmeans_distance_select, random_select
from .data import (DatasetSpec, LabeledDataset, load_csv_dataset, normalize_features,
                   split_dataset, synth_gaussian_mixture, synth_waveform)
from .evaluation import (evaluate_accuracy, inject_label_noise, subset_stats,
                         train_linear_classifier)
from .linalg import pearson_rowwise, ridge_pseudoinverse, solve_output_weights
from .loop import NfpfConfig, SelectionState, learnability_scores, run_nfpf, select_cycle
from .pipeline import (SelectionParams, evaluate_selection, learning_curve, prepare_split,
                       select_subset)
from .rd import ClusterModel, RdResult, init_subset, kmeans, rd_initialize, rd_scores, train_core_models
from .sflm import SflmModel, reconstruct, score_phi, train_sflm

__version__ = "0.1.0"
