"""Command-line front end: ``nfpf {select,eval,sweep,noise} --config cfg.json``.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

import argparse
import csv
import io
import itertools
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .data import DatasetSpec, NORMALIZATIONS, file_sha256, load_csv_dataset
from .errors import ConfigInvalid, DataError, HashMismatch
from .evaluation import inject_label_noise
from .pipeline import METHODS, SelectionParams, evaluate_selection, prepare_split, select_subset
from .sflm import ACTIVATIONS

log = logging.getLogger("nfpf")

SERIES_HEADER = ["method", "m", "k", "n", "seed", "noise", "accuracy"]
REPORT_FORMAT = "nfpf-selection/1"


@dataclass
class ExperimentConfig:
    dataset: dict
    method: str = "nfpf"
    m: int = 100
    k_percent: float = 30.0
    n_percent: float = 16.0
    h_current: int = 100
    h_reference: int | None = None
    c: float = 2.0 ** 10
    activation: str = "sigmoid"
    class_count: int | None = None
    num_clusters: int | None = None
    dcs_rank: int | None = None
    classifier_c: float | list = 1.0
    test_fraction: float = 0.5
    seeds: list = field(default_factory=lambda: list(range(10)))
    noise_ratios: list = field(default_factory=lambda: [0.0, 0.1, 0.2, 0.3, 0.4])
    sweep: dict = field(default_factory=dict)
    output_dir: str = "nfpf_out"
    workers: int = 1

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigInvalid("config must be a JSON object")
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - names)
        if unknown:
            raise ConfigInvalid(f"unknown config field {unknown[0]!r}", unknown[0])
        if "dataset" not in doc:
            raise ConfigInvalid("missing required field 'dataset'", "dataset")
        cfg = cls(**doc)
        cfg.validate()
        return cfg

    def validate(self):
        def bad(name, msg):
            raise ConfigInvalid(f"{name}: {msg}", name)

        if not isinstance(self.dataset, dict) or "path" not in self.dataset:
            bad("dataset", "must be an object with a 'path'")
        if self.dataset.get("normalization", "zscore") not in NORMALIZATIONS:
            bad("dataset.normalization", f"must be one of {NORMALIZATIONS}")
        if self.method not in METHODS:
            bad("method", f"must be one of {METHODS}")
        if not isinstance(self.m, int) or self.m < 1:
            bad("m", "must be a positive integer")
        if not 0 < self.k_percent <= 100:
            bad("k_percent", "must lie in (0, 100]")
        if not 0 < self.n_percent <= 100:
            bad("n_percent", "must lie in (0, 100]")
        if not isinstance(self.h_current, int) or self.h_current < 1:
            bad("h_current", "must be a positive integer")
        if self.h_reference is not None and self.h_reference < self.h_current:
            bad("h_reference", "must be >= h_current")
        if not (isinstance(self.c, (int, float)) and self.c > 0):
            bad("c", "must be a positive number")
        if self.activation not in ACTIVATIONS:
            bad("activation", f"must be one of {ACTIVATIONS}")
        if self.class_count is not None and self.class_count < 1:
            bad("class_count", "must be positive")
        cc = self.classifier_c if isinstance(self.classifier_c, list) else [self.classifier_c]
        if not cc or not all(isinstance(v, (int, float)) and v > 0 for v in cc):
            bad("classifier_c", "must be a positive number or a nonempty list of them")
        if not 0 < self.test_fraction < 1:
            bad("test_fraction", "must lie in (0, 1)")
        if not self.seeds or not all(isinstance(s, int) for s in self.seeds):
            bad("seeds", "must be a nonempty list of integers")
        if not all(isinstance(r, (int, float)) and 0 <= r <= 1 for r in self.noise_ratios):
            bad("noise_ratios", "entries must lie in [0, 1]")
        for key, values in self.sweep.items():
            if key not in ("k_percent", "n_percent", "m"):
                bad(f"sweep.{key}", "only k_percent, n_percent and m can be swept")
            if not isinstance(values, list) or not values:
                bad(f"sweep.{key}", "must be a nonempty list")
        if not isinstance(self.workers, int) or self.workers < 1:
            bad("workers", "must be a positive integer")

    def params(self, k_percent=None, n_percent=None):
        return SelectionParams(
            k_percent=self.k_percent if k_percent is None else k_percent,
            n_percent=self.n_percent if n_percent is None else n_percent,
            h_current=self.h_current, h_reference=self.h_reference, c=self.c,
            activation=self.activation, num_clusters=self.num_clusters, dcs_rank=self.dcs_rank)

    def echo(self):
        doc = {f.name: getattr(self, f.name) for f in fields(self)}
        doc.pop("output_dir")
        doc.pop("workers")
        return doc


def _clean(obj):
    """Make report payloads strict JSON (NaN becomes null)."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return _clean(float(obj))
    return obj


def _write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(_clean(doc), fh, indent=2)
        fh.write("\n")


def _write_series(path, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SERIES_HEADER)
    for r in rows:
        w.writerow([r["method"], r["m"], r["k"], r["n"], r["seed"], repr(float(r["noise"])),
                    repr(float(r["accuracy"]))])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


class _Context:
    """Dataset loaded once per command, shared with worker processes by pickling."""

    def __init__(self, cfg):
        self.cfg = cfg
        spec = DatasetSpec.from_dict(cfg.dataset)
        self.spec = spec
        try:
            self.sha256 = file_sha256(spec.path)
            self.dataset = load_csv_dataset(spec)
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot load dataset {spec.path}: {exc}") from exc
        self.class_count = cfg.class_count or self.dataset.class_count

    def dataset_doc(self):
        return {
            "path": self.spec.path,
            "sha256": self.sha256,
            "rows": len(self.dataset),
            "cols": int(self.dataset.features.shape[1]),
            "class_count": self.dataset.class_count,
            "class_names": list(self.dataset.class_names),
            "normalization": self.spec.normalization,
        }

    def split(self, seed):
        return prepare_split(self.dataset, seed, self.cfg.test_fraction, self.spec.normalization)


def _select_run(ctx, seed, m, k_percent=None, n_percent=None):
    cand, _, _ = ctx.split(seed)
    sel = select_subset(ctx.cfg.method, cand.features, m, seed,
                        ctx.cfg.params(k_percent, n_percent), ctx.class_count)
    rows = cand.row_ids
    return {
        "seed": seed,
        "method": sel.method,
        "m": sel.m,
        "k": sel.k,
        "n": sel.n,
        "initial_indices": [int(rows[i]) for i in sel.initial],
        "cycles": [dict(c, added=[int(rows[i]) for i in c["added"]]) for c in sel.cycles],
        "final_indices": [int(rows[i]) for i in sel.indices],
    }


def _eval_run(ctx, run):
    cand, test, _ = ctx.split(run["seed"])
    local = np.searchsorted(cand.row_ids, run["final_indices"])
    if np.any(local >= len(cand)) or np.any(cand.row_ids[np.minimum(local, len(cand) - 1)]
                                            != run["final_indices"]):
        raise DataError(f"seed {run['seed']}: selected rows are not in the candidate split")
    rep = evaluate_selection(cand, test, local, ctx.cfg.classifier_c)
    return dict(seed=run["seed"], **rep)


def _sweep_cell(ctx, k_percent, n_percent, m, seed):
    run = _select_run(ctx, seed, m, k_percent, n_percent)
    rep = _eval_run(ctx, run)
    return {"method": ctx.cfg.method, "m": m, "k": run["k"], "n": run["n"], "seed": seed,
            "noise": 0.0, "accuracy": rep["accuracy"], "k_percent": k_percent,
            "n_percent": n_percent}


def _noise_cells(ctx, seed):
    cfg = ctx.cfg
    cand, test, _ = ctx.split(seed)
    params = cfg.params()
    out, reference = [], None
    for j, ratio in enumerate(cfg.noise_ratios):
        noisy = inject_label_noise(cand.labels, ratio, cand.class_count, seed=(seed, j))
        # selection sees features only; noisy labels enter at classifier training
        sel = select_subset(cfg.method, cand.with_labels(noisy).features, cfg.m, seed, params,
                            ctx.class_count)
        if reference is None:
            reference = sel.indices
        rep = evaluate_selection(cand, test, sel.indices, cfg.classifier_c, train_labels=noisy)
        out.append({"method": cfg.method, "m": cfg.m, "k": sel.k, "n": sel.n, "seed": seed,
                    "noise": float(ratio), "accuracy": rep["accuracy"],
                    "selection_equal": sel.indices == reference})
    return out


def _pmap(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *job) for job in jobs]
        return [f.result() for f in futures]


def cmd_select(ctx, out_dir, workers):
    cfg = ctx.cfg
    runs = _pmap(_select_run, [(ctx, s, cfg.m) for s in cfg.seeds], workers)
    path = os.path.join(out_dir, "selection_report.json")
    _write_json(path, {"format": REPORT_FORMAT, "dataset": ctx.dataset_doc(),
                       "config": cfg.echo(), "runs": runs})
    meta = ctx.dataset_doc()
    meta["splits"] = [{"seed": s, "normalization": ctx.split(s)[2].to_dict()} for s in cfg.seeds]
    _write_json(os.path.join(out_dir, "dataset_meta.json"), meta)
    log.info("wrote %s", path)
    return path


def cmd_eval(ctx, out_dir, workers, report_path=None):
    report_path = report_path or os.path.join(out_dir, "selection_report.json")
    try:
        with open(report_path) as fh:
            report = json.load(fh)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read selection report {report_path}: {exc}") from exc
    if report.get("dataset", {}).get("sha256") != ctx.sha256:
        raise HashMismatch("selection report was produced from a different dataset file")
    runs = report["runs"]
    evals = _pmap(_eval_run, [(ctx, r) for r in runs], workers)
    accs = [e["accuracy"] for e in evals]
    doc = {
        "dataset": ctx.dataset_doc(),
        "config": ctx.cfg.echo(),
        "method": report["config"]["method"],
        "runs": evals,
        "mean_accuracy": float(np.mean(accs)),
        "std_accuracy": float(np.std(accs)),
    }
    missing = sorted({c for e in evals for c in e["missing_classes"]})
    if missing:
        log.warning("classes %s missing from at least one selected subset", missing)
    _write_json(os.path.join(out_dir, "eval_report.json"), doc)
    rows = [{"method": r["method"], "m": r["m"], "k": r["k"], "n": r["n"], "seed": r["seed"],
             "noise": 0.0, "accuracy": e["accuracy"]} for r, e in zip(runs, evals)]
    _write_series(os.path.join(out_dir, "series.csv"), rows)
    return doc


def cmd_sweep(ctx, out_dir, workers):
    cfg = ctx.cfg
    grid = cfg.sweep
    ks = grid.get("k_percent", [cfg.k_percent])
    ns = grid.get("n_percent", [cfg.n_percent])
    ms = grid.get("m", [cfg.m])
    jobs = [(ctx, k, n, m, s) for k, n, m, s in itertools.product(ks, ns, ms, cfg.seeds)]
    rows = _pmap(_sweep_cell, jobs, workers)
    rows.sort(key=lambda r: (r["k"], r["n"], r["m"], r["seed"], r["k_percent"], r["n_percent"]))
    _write_series(os.path.join(out_dir, "sweep.csv"), rows)
    return rows


def cmd_noise(ctx, out_dir, workers):
    if not ctx.cfg.noise_ratios:
        raise ConfigInvalid("noise_ratios must be nonempty", "noise_ratios")
    rows = [r for chunk in _pmap(_noise_cells, [(ctx, s) for s in ctx.cfg.seeds], workers)
            for r in chunk]
    _write_series(os.path.join(out_dir, "noise.csv"), rows)
    flags = [{"seed": r["seed"], "noise": r["noise"], "selection_equal": r["selection_equal"]}
             for r in rows]
    _write_json(os.path.join(out_dir, "noise_summary.json"),
                {"selection_identical": all(f["selection_equal"] for f in flags), "rows": flags})
    return rows


def _setup_logging(out_dir=None):
    level = os.environ.get("NFPF_LOG_LEVEL", "info").upper()
    if level not in ("ERROR", "INFO", "DEBUG"):
        level = "INFO"
    log.setLevel(level)
    log.handlers.clear()
    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.addHandler(console)
    if out_dir:
        # timestamps live only in this sidecar file
        fh = logging.FileHandler(os.path.join(out_dir, "nfpf.log"))
        fh.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
        log.addHandler(fh)


def build_parser():
    parser = argparse.ArgumentParser(prog="nfpf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("select", "select a subset and write a selection report"),
                            ("eval", "evaluate a selection report with a linear classifier"),
                            ("sweep", "grid over k_percent / n_percent / m"),
                            ("noise", "label-noise ablation")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--workers", type=int, help="parallel worker processes")
        p.add_argument("--seed", type=int, help="run this single seed instead of config seeds")
        if name == "eval":
            p.add_argument("--report", help="selection report (default: <out>/selection_report.json)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    _setup_logging()
    try:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigInvalid(f"cannot read config: {exc}", "config") from exc
        except ValueError as exc:
            raise ConfigInvalid(f"config is not valid JSON: {exc}", "config") from exc
        if args.seed is not None and isinstance(doc, dict):
            doc["seeds"] = [args.seed]
        cfg = ExperimentConfig.from_dict(doc)
        out_dir = args.out or cfg.output_dir
        workers = args.workers or cfg.workers
        if workers < 1:
            raise ConfigInvalid("workers must be positive", "workers")

        ctx = _Context(cfg)
        os.makedirs(out_dir, exist_ok=True)
        _setup_logging(out_dir)
        log.info("%s: method=%s m=%d seeds=%s", args.command, cfg.method, cfg.m, cfg.seeds)
        if args.command == "select":
            cmd_select(ctx, out_dir, workers)
        elif args.command == "eval":
            cmd_eval(ctx, out_dir, workers, args.report)
        elif args.command == "sweep":
            cmd_sweep(ctx, out_dir, workers)
        else:
            cmd_noise(ctx, out_dir, workers)
    except ConfigInvalid as exc:
        log.error("config error [%s]: %s", exc.field or "config", exc)
        return 2
    except DataError as exc:
        log.error("data error: %s", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
