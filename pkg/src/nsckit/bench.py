"""Seeded benchmark harness and synthetic data generation.

Reproduces the evaluation protocol: for each of ``runs`` seeded repetitions
the threshold is re-tuned on the training set (fold assignment is the only
re-randomized ingredient), a final model is fitted on the full training set,
and the percent test error plus the survivor count are recorded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, fold_count
from .errors import ValidationError
from .model import fit_statistics, predict, shrink
from .thresholds import ThresholdRule, threshold_grid
from .tuning import cross_validate, deep_search, select_smallest

METHODS = {
    "sth": ("soft", False),
    "hth": ("hard", False),
    "oth": ("order", False),
    "sth2": ("soft", True),
    "hth2": ("hard", True),
    "oth2": ("order", True),
}


@dataclass(frozen=True)
class RunRecord:
    method: str
    seed: int
    chosen_rule: ThresholdRule
    test_error_pct: float
    survivor_count: int


@dataclass(frozen=True)
class SynthSpec:
    """Mean-shift Gaussian generator for sparse-signal classification.

    The first ``informative`` features of class k (1-based) have mean
    k * shift; all other entries have mean 0.  Every entry gets
    ``noise_sd`` Gaussian noise.
    """

    p: int
    n_classes: int
    informative: int
    shift: float
    n_per_class: tuple[int, ...]
    noise_sd: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "n_per_class", tuple(int(v) for v in self.n_per_class))
        if self.informative > self.p or self.informative < 0:
            raise ValidationError("informative feature count must be in [0, p]")
        if len(self.n_per_class) != self.n_classes:
            raise ValidationError("need one class size per class")
        if any(v < 2 for v in self.n_per_class):
            raise ValidationError("need at least 2 samples per class")
        if self.noise_sd <= 0:
            raise ValidationError("noise_sd must be positive")
        if not np.isfinite(self.shift):
            raise ValidationError("shift must be finite")


def _draw(spec: SynthSpec, rng: np.random.Generator) -> Dataset:
    n = sum(spec.n_per_class)
    means = np.zeros((spec.p, n))
    labels = []
    col = 0
    for k, nk in enumerate(spec.n_per_class):
        means[: spec.informative, col : col + nk] = (k + 1) * spec.shift
        labels.extend([f"c{k + 1}"] * nk)
        col += nk
    values = means + rng.normal(0.0, spec.noise_sd, size=(spec.p, n))
    names = tuple(f"f{i + 1}" for i in range(spec.p))
    return Dataset.from_arrays(values, labels, names)


def generate_synthetic(spec: SynthSpec) -> tuple[Dataset, Dataset]:
    """Independent seeded train/test draws from the same class means."""
    rng = np.random.default_rng(spec.seed)
    return _draw(spec, rng), _draw(spec, rng)


def run_experiment(
    train: Dataset,
    test: Dataset,
    method: str,
    runs: int = 100,
    base_seed: int = 0,
    *,
    m: int = 30,
    folds: int = 10,
    big_gap: int = 2000,
    prior_mode: str = "empirical",
    s0: str | float = "median",
    mk_mode: str = "paper",
) -> list[RunRecord]:
    """Tune, fit, and score ``runs`` times with seeds base_seed + run index."""
    method = method.lower()
    if method not in METHODS:
        raise ValidationError(
            f"unknown method {method!r}, expected one of {sorted(METHODS)}"
        )
    if train.p != test.p:
        raise ValidationError("train and test feature counts differ")
    if set(test.classes) - set(train.classes):
        raise ValidationError("test set contains classes absent from training")
    kind, deep = METHODS[method]
    fit_kw = dict(prior_mode=prior_mode, s0=s0, mk_mode=mk_mode)
    F = fold_count(train, folds)
    full_stats = fit_statistics(train, **fit_kw)
    # test labels mapped through the training class order
    train_index = {cls: k for k, cls in enumerate(train.classes)}
    y_test = np.array([train_index[lab] for lab in test.labels])
    X_test = test.values.T
    records = []
    for r in range(runs):
        seed = base_seed + r
        if deep:
            rule = deep_search(
                train, kind, m=m, F=F, seed=seed, big_gap=big_gap, **fit_kw
            ).final_rule
        else:
            grid = threshold_grid(full_stats, kind, m)
            curve = cross_validate(train, grid, F, seed, **fit_kw)
            rule = curve.points[select_smallest(curve)].rule
        model = shrink(full_stats, rule)
        pred = predict(model, X_test)
        err_pct = 100.0 * float((pred != y_test).sum()) / test.n
        records.append(
            RunRecord(method, seed, rule, err_pct, int(model.survivors.size))
        )
    return records


@dataclass(frozen=True)
class Aggregate:
    mean_error: float
    median_error: float
    se_error: float
    mean_survivors: float
    se_survivors: float


def aggregate(records) -> Aggregate:
    """Mean, median (midpoint for even counts), and standard errors."""
    records = list(records)
    if len(records) < 2:
        raise ValidationError("need at least 2 records to aggregate")
    errors = np.array([rec.test_error_pct for rec in records], dtype=float)
    survivors = np.array([rec.survivor_count for rec in records], dtype=float)
    n = len(records)
    return Aggregate(
        float(errors.mean()),
        float(np.median(errors)),
        float(errors.std(ddof=1) / np.sqrt(n)),
        float(survivors.mean()),
        float(survivors.std(ddof=1) / np.sqrt(n)),
    )
