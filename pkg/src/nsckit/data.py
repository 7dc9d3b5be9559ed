"""Labeled sample-by-feature datasets and stratified cross-validation folds.

Datasets are stored feature-major (p x n). Class identifiers are mapped to
contiguous indices in first-appearance order so labels never need to be
sortable. Datasets and fold plans are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class Dataset:
    """A validated p x n expression matrix with class structure.

    ``values[i, j]`` is the value of feature i on sample j.  ``y[j]`` is the
    0-based class index of sample j; ``classes`` lists the class identifiers
    in first-appearance order.
    """

    values: np.ndarray
    labels: tuple[str, ...]
    classes: tuple[str, ...]
    y: np.ndarray
    feature_names: tuple[str, ...] | None = None

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)

    def class_members(self, k: int) -> np.ndarray:
        """Sample indices belonging to class ``k`` (0-based)."""
        return np.flatnonzero(self.y == k)

    @classmethod
    def from_arrays(
        cls,
        values: np.ndarray,
        labels,
        feature_names=None,
    ) -> "Dataset":
        """Build a Dataset from a p x n array and per-sample labels."""
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise ValidationError("values must be a 2-d matrix (features x samples)")
        p, n = values.shape
        labels = tuple(str(v) for v in labels)
        if len(labels) != n:
            raise ValidationError(
                f"got {len(labels)} labels for {n} samples"
            )
        if p < 1:
            raise ValidationError("need at least one feature")
        if not np.all(np.isfinite(values)):
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise ValidationError(
                f"non-finite value at feature {i}, sample {j}"
            )
        classes: list[str] = []
        index = {}
        for lab in labels:
            if lab not in index:
                index[lab] = len(classes)
                classes.append(lab)
        y = np.array([index[lab] for lab in labels], dtype=int)
        if len(classes) < 2:
            raise ValidationError("need at least two classes")
        if n < len(classes):
            raise ValidationError("need at least one sample per class")
        if feature_names is not None:
            feature_names = tuple(str(f) for f in feature_names)
            if len(feature_names) != p:
                raise ValidationError(
                    f"got {len(feature_names)} feature names for {p} features"
                )
            if len(set(feature_names)) != p:
                dup = next(f for f in feature_names if feature_names.count(f) > 1)
                raise ValidationError(f"duplicate feature name {dup!r}")
        return cls(values, labels, tuple(classes), y, feature_names)

    def subset(self, sample_indices) -> "Dataset":
        """Restrict to the given samples, keeping the parent class mapping.

        Raises if any class of the parent would become empty.
        """
        idx = np.asarray(sample_indices, dtype=int)
        y = self.y[idx]
        counts = np.bincount(y, minlength=self.n_classes)
        if np.any(counts == 0):
            missing = self.classes[int(np.flatnonzero(counts == 0)[0])]
            raise ValidationError(f"class {missing!r} has no samples in subset")
        return Dataset(
            self.values[:, idx],
            tuple(self.labels[i] for i in idx),
            self.classes,
            y,
            self.feature_names,
        )


@dataclass(frozen=True)
class FoldPlan:
    """Partition of sample indices {0..n-1} into F disjoint nonempty blocks."""

    folds: tuple[np.ndarray, ...]
    F: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "F", len(self.folds))


def _detect_delimiter(header: str) -> str:
    return "\t" if "\t" in header else ","


def _parse_cell(text: str, row: int, col: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(
            f"malformed numeric cell {text!r} at row {row}, column {col}"
        ) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {text!r} at row {row}, column {col}")
    return v


def load_matrix(
    path,
    orientation: str = "rows",
    label_col: str | None = None,
    labels_path=None,
) -> Dataset:
    """Load a delimited (comma or TAB) text matrix into a Dataset.

    ``orientation="rows"`` means rows are samples and the header holds
    feature names; ``orientation="cols"`` means rows are features, the header
    holds sample identifiers and the first column holds feature names.
    Labels come either from a designated column (``label_col``, rows
    orientation only) or from a sidecar file with one label per line.
    """
    if orientation not in ("rows", "cols"):
        raise ValidationError(f"unknown orientation {orientation!r}")
    if (label_col is None) == (labels_path is None):
        raise ValidationError("exactly one of label_col and labels_path is required")
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip() != ""]
    if not lines:
        raise ParseError(f"{path}: empty file")
    delim = _detect_delimiter(lines[0])
    header = lines[0].split(delim)
    rows = [ln.split(delim) for ln in lines[1:]]
    width = len(header)
    for r, cells in enumerate(rows, start=1):
        if len(cells) != width:
            raise ParseError(
                f"{path}: row {r} has {len(cells)} cells, expected {width}"
            )

    if orientation == "rows":
        if label_col is not None:
            if label_col not in header:
                raise ValidationError(f"label column {label_col!r} not in header")
            lc = header.index(label_col)
            feature_names = [h for i, h in enumerate(header) if i != lc]
            labels = [cells[lc] for cells in rows]
            data = [
                [
                    _parse_cell(c, r, i)
                    for i, c in enumerate(cells)
                    if i != lc
                ]
                for r, cells in enumerate(rows, start=1)
            ]
        else:
            feature_names = list(header)
            labels = _read_label_file(labels_path, len(rows))
            data = [
                [_parse_cell(c, r, i) for i, c in enumerate(cells)]
                for r, cells in enumerate(rows, start=1)
            ]
        values = np.array(data, dtype=float).T
    else:
        if label_col is not None:
            raise ValidationError(
                "label_col is not meaningful with rows-are-features input; "
                "use a sidecar labels file"
            )
        feature_names = [cells[0] for cells in rows]
        labels = _read_label_file(labels_path, width - 1)
        data = [
            [_parse_cell(c, r, i) for i, c in enumerate(cells) if i > 0]
            for r, cells in enumerate(rows, start=1)
        ]
        values = np.array(data, dtype=float)
    return Dataset.from_arrays(values, labels, feature_names)


def _read_label_file(labels_path, n: int) -> list[str]:
    lines = [ln.strip() for ln in Path(labels_path).read_text().splitlines()]
    labels = [ln for ln in lines if ln != ""]
    if len(labels) != n:
        raise ValidationError(
            f"labels file has {len(labels)} labels for {n} samples"
        )
    return labels


def save_matrix(ds: Dataset, path, label_col: str = "label", delimiter: str = ",") -> None:
    """Write a Dataset as rows-are-samples delimited text with a label column.

    Values are written in shortest round-trip decimal form, so a subsequent
    ``load_matrix`` recovers them bit-exactly.
    """
    names = ds.feature_names or tuple(f"f{i}" for i in range(ds.p))
    if label_col in names:
        raise ValidationError(f"label column name {label_col!r} collides with a feature")
    out = [delimiter.join((label_col, *names))]
    for j in range(ds.n):
        out.append(
            delimiter.join(
                (ds.labels[j], *(repr(float(v)) for v in ds.values[:, j]))
            )
        )
    Path(path).write_text("\n".join(out) + "\n")


def fold_count(ds: Dataset, requested: int = 10) -> int:
    """Requested fold count, capped at the smallest class size."""
    if requested < 1:
        raise ValidationError("requested fold count must be positive")
    return min(requested, int(ds.class_sizes.min()))


def stratified_folds(ds: Dataset, F: int, seed: int) -> FoldPlan:
    """Seeded per-class shuffle followed by round-robin fold assignment.

    Per-fold counts of every class differ by at most one, and the result is
    a deterministic function of (ds, F, seed).
    """
    if not 2 <= F <= int(ds.class_sizes.min()):
        raise ValidationError(
            f"fold count {F} must be in [2, min class size {int(ds.class_sizes.min())}]"
        )
    rng = np.random.default_rng(seed)
    assign = np.empty(ds.n, dtype=int)
    for k in range(ds.n_classes):
        idx = ds.class_members(k)
        rng.shuffle(idx)
        assign[idx] = np.arange(idx.size) % F
    return FoldPlan(tuple(np.flatnonzero(assign == f) for f in range(F)))
