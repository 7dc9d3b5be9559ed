"""Cross-validation over threshold grids and deep-search refinement.

``cross_validate`` scores every rule of a grid by misclassification counts
over stratified folds.  ``select_smallest`` picks the smallest-error point,
preferring smaller models on ties.  ``deep_search`` repeatedly narrows the
threshold interval around the selected point, optionally jumping to the
runner-up when it buys a drastically smaller model at the cost of at most
one extra misclassified sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, fold_count, stratified_folds
from .errors import DeepSearchError, DegenerateFoldError, ValidationError
from .model import fit_statistics, predict, shrink
from .thresholds import ThresholdRule, apply_rule, threshold_grid


@dataclass(frozen=True)
class CvPoint:
    """One grid point: rule, total CV misclassification count, survivors."""

    rule: ThresholdRule
    cv_error_count: int
    survivor_count: int


@dataclass(frozen=True)
class CvCurve:
    """CV results along a grid, in increasing-shrinkage order."""

    points: tuple[CvPoint, ...]
    fold_plan_seed: int

    def __post_init__(self):
        kinds = {pt.rule.kind for pt in self.points}
        if len(kinds) != 1:
            raise ValidationError("a CV curve must hold rules of a single kind")


@dataclass(frozen=True)
class DeepSearchIteration:
    """Record of one deep-search pass over a grid."""

    curve: CvCurve
    chosen: int
    runner_up: int | None
    switched: bool
    interval: tuple[int, int] | None
    next_grid_size: int


@dataclass(frozen=True)
class DeepSearchTrace:
    iterations: tuple[DeepSearchIteration, ...]
    final_rule: ThresholdRule
    stop_reason: str


def _survivor_count(t_stats: np.ndarray, rule: ThresholdRule) -> int:
    return int(np.any(apply_rule(t_stats, rule) != 0.0, axis=1).sum())


def cross_validate(
    ds: Dataset,
    grid,
    F: int,
    seed: int,
    *,
    prior_mode: str = "empirical",
    s0: str | float = "median",
    mk_mode: str = "paper",
) -> CvCurve:
    """Accumulate per-rule misclassification counts over F stratified folds.

    Survivor counts are taken from a fit on the full training set.
    Deterministic given (ds, grid, F, seed).
    """
    grid = list(grid)
    if not grid:
        raise ValidationError("grid must be nonempty")
    if F < 2:
        raise ValidationError(f"need at least 2 folds, got {F}")
    plan = stratified_folds(ds, F, seed)
    full_stats = fit_statistics(ds, prior_mode=prior_mode, s0=s0, mk_mode=mk_mode)
    survivors = [_survivor_count(full_stats.t_stats, rule) for rule in grid]
    errors = np.zeros(len(grid), dtype=int)
    all_idx = np.arange(ds.n)
    for f, test_idx in enumerate(plan.folds):
        train_idx = np.setdiff1d(all_idx, test_idx, assume_unique=True)
        held_in_counts = np.bincount(ds.y[train_idx], minlength=ds.n_classes)
        if np.any(held_in_counts == 0):
            missing = ds.classes[int(np.flatnonzero(held_in_counts == 0)[0])]
            raise DegenerateFoldError(
                f"fold {f} leaves class {missing!r} with no training samples"
            )
        sub = ds.subset(train_idx)
        stats = fit_statistics(sub, prior_mode=prior_mode, s0=s0, mk_mode=mk_mode)
        X_test = ds.values[:, test_idx].T
        y_test = ds.y[test_idx]
        for g, rule in enumerate(grid):
            pred = predict(shrink(stats, rule), X_test)
            errors[g] += int((pred != y_test).sum())
    points = tuple(
        CvPoint(rule, int(errors[g]), survivors[g]) for g, rule in enumerate(grid)
    )
    return CvCurve(points, seed)


def select_smallest(curve: CvCurve) -> int:
    """Index of the smallest-CV-error point (0-based).

    Ties are broken by smaller survivor count, then by larger shrinkage
    (later grid position).
    """
    pts = curve.points
    return min(
        range(len(pts)),
        key=lambda i: (pts[i].cv_error_count, pts[i].survivor_count, -i),
    )


def _runner_up(curve: CvCurve, tau: int) -> int | None:
    """Second-smallest-error index: best point excluding tau, same tie rules."""
    pts = curve.points
    rest = [i for i in range(len(pts)) if i != tau]
    if not rest:
        return None
    return min(
        rest, key=lambda i: (pts[i].cv_error_count, pts[i].survivor_count, -i)
    )


def _switch_to_runner_up(
    tau_point: CvPoint,
    nu_point: CvPoint,
    big_gap: int,
    anchor_error: int,
    error_gap: int = 1,
) -> bool:
    """Whether the runner-up replaces the smallest-error point.

    Requires the runner-up's error within ``error_gap`` of the anchor (the
    smallest error seen so far) and a drastic survivor reduction: either
    less than half the survivors, or a reduction above ``big_gap``.
    """
    if nu_point.cv_error_count - anchor_error > error_gap:
        return False
    return (
        2 * nu_point.survivor_count < tau_point.survivor_count
        or tau_point.survivor_count - nu_point.survivor_count > big_gap
    )


def _candidate_interval(
    survivors, ell: int, m: int
) -> tuple[int, int] | None:
    """Grid-index interval around ell to refine, or None if nothing qualifies.

    The right interval needs a survivor drop of more than one; the left
    interval needs a survivor drop below m (as specified, in spite of the
    unit mismatch with the right guard).  Boundary positions only consider
    their single inward side.
    """
    last = len(survivors) - 1
    right_ok = ell < last and survivors[ell] - survivors[ell + 1] > 1
    left_ok = ell > 0 and survivors[ell - 1] - survivors[ell] < m
    if right_ok and left_ok:
        return (ell - 1, ell + 1)
    if right_ok:
        return (ell, ell + 1)
    if left_ok:
        return (ell - 1, ell)
    return None


def _refine_grid(
    lo_rule: ThresholdRule, hi_rule: ThresholdRule, k: int
) -> list[ThresholdRule]:
    """k rules evenly spaced strictly inside (lo_rule, hi_rule).

    The bounds are in increasing-shrinkage order.  For order rules the
    interior values are rounded to distinct integers, which may yield fewer
    than k points (or none when the bounds are adjacent integers).
    """
    a, b = lo_rule.param, hi_rule.param
    inner = np.linspace(a, b, k + 2)[1:-1]
    if lo_rule.kind == "order":
        ints = np.rint(inner).astype(int)
        ints = ints[(ints < max(a, b)) & (ints > min(a, b))]
        vals = np.unique(ints)[::-1]  # descending count = increasing shrinkage
        return [ThresholdRule("order", int(v)) for v in vals]
    return [ThresholdRule(lo_rule.kind, float(v)) for v in inner]


def deep_search(
    ds: Dataset,
    kind: str,
    m: int = 30,
    F: int | None = None,
    seed: int = 0,
    big_gap: int = 2000,
    max_iterations: int = 50,
    *,
    prior_mode: str = "empirical",
    s0: str | float = "median",
    mk_mode: str = "paper",
) -> DeepSearchTrace:
    """Iterative grid-refinement search for the thresholding parameter.

    Starts from the standard m-point grid, picks the smallest-error point
    (possibly jumping to a drastically smaller runner-up model), then
    repeatedly re-splits the qualifying neighboring interval and re-runs
    cross-validation with the same fold plan seed.  Stops when no interval
    qualifies, the refined grid is empty or cannot improve, or the survivor
    span is exhausted.  Raises ``DeepSearchError`` past ``max_iterations``.
    """
    if F is None:
        F = fold_count(ds)
    fit_kw = dict(prior_mode=prior_mode, s0=s0, mk_mode=mk_mode)
    full_stats = fit_statistics(ds, **fit_kw)
    grid = threshold_grid(full_stats, kind, m)
    iterations: list[DeepSearchIteration] = []
    current: CvPoint | None = None
    anchor_error: int | None = None
    stop_reason = ""
    for _ in range(max_iterations):
        curve = cross_validate(ds, grid, F, seed, **fit_kw)
        tau = select_smallest(curve)
        if current is not None and curve.points[tau].cv_error_count > current.cv_error_count:
            # refined grid is strictly worse than the incumbent; keep it
            stop_reason = "no-improvement"
            break
        best_here = curve.points[tau].cv_error_count
        anchor_error = best_here if anchor_error is None else min(anchor_error, best_here)
        nu = _runner_up(curve, tau)
        switched = False
        ell = tau
        if nu is not None and _switch_to_runner_up(
            curve.points[tau], curve.points[nu], big_gap, anchor_error
        ):
            ell = nu
            switched = True
        current = curve.points[ell]
        survivors = [pt.survivor_count for pt in curve.points]
        interval = _candidate_interval(survivors, ell, m)
        if interval is None:
            iterations.append(
                DeepSearchIteration(curve, tau, nu, switched, None, 0)
            )
            stop_reason = "no-qualifying-interval"
            break
        lo, hi = interval
        k = min(m, survivors[lo] - survivors[hi])
        iterations.append(DeepSearchIteration(curve, tau, nu, switched, interval, k))
        if k <= 0:
            stop_reason = "survivors-unchanged"
            break
        next_grid = _refine_grid(curve.points[lo].rule, curve.points[hi].rule, k)
        if not next_grid:
            stop_reason = "empty-refinement"
            break
        grid = next_grid
    else:
        raise DeepSearchError(
            f"deep search exceeded the iteration cap of {max_iterations}"
        )
    assert current is not None
    return DeepSearchTrace(tuple(iterations), current.rule, stop_reason)
