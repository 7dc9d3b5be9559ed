"""Thresholding rules applied to class-vs-overall centroid statistics.

Three rules are supported: soft (continuous shrinkage toward zero), hard
(keep-or-kill with a strict cutoff), and order (retain a fixed number of
largest-magnitude statistics, pooled over the whole p x K matrix).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

KINDS = ("soft", "hard", "order")


@dataclass(frozen=True)
class ThresholdRule:
    """A thresholding rule tag with its parameter.

    ``param`` is a nonnegative real threshold for soft/hard and a
    nonnegative integer count of retained statistics for order.
    """

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown thresholding kind {self.kind!r}")
        if self.kind == "order":
            if self.param != int(self.param) or self.param < 0:
                raise ValidationError(
                    f"order threshold must be a nonnegative integer, got {self.param}"
                )
            object.__setattr__(self, "param", int(self.param))
        else:
            if not math.isfinite(self.param) or self.param < 0:
                raise ValidationError(
                    f"{self.kind} threshold must be finite and >= 0, got {self.param}"
                )
            object.__setattr__(self, "param", float(self.param))

    def __str__(self) -> str:
        return f"{self.kind}:{self.param!r}" if self.kind != "order" else f"order:{self.param}"


def parse_rule(text: str) -> ThresholdRule:
    """Parse CLI rule syntax ``soft:D``, ``hard:D``, or ``order:N``."""
    kind, sep, value = text.partition(":")
    if not sep or kind not in KINDS:
        raise ValidationError(f"bad rule syntax {text!r}, expected soft:D, hard:D, or order:N")
    try:
        param = int(value) if kind == "order" else float(value)
    except ValueError:
        raise ValidationError(f"bad rule parameter in {text!r}") from None
    return ThresholdRule(kind, param)


def soft(d, delta: float):
    """Soft thresholding: sgn(d) * (|d| - delta)+."""
    if delta < 0:
        raise ValidationError(f"threshold must be >= 0, got {delta}")
    d = np.asarray(d, dtype=float)
    out = np.sign(d) * np.maximum(np.abs(d) - delta, 0.0)
    return out if out.ndim else float(out)


def hard(d, delta: float):
    """Hard thresholding: keep d where |d| > delta (strict), else zero."""
    if delta < 0:
        raise ValidationError(f"threshold must be >= 0, got {delta}")
    d = np.asarray(d, dtype=float)
    out = np.where(np.abs(d) > delta, d, 0.0)
    return out if out.ndim else float(out)


def order(D, keep: int) -> np.ndarray:
    """Keep the ``keep`` largest-|d| entries of the whole matrix, zero the rest.

    Ranks are pooled over all p*K statistics.  Ties in magnitude are broken
    deterministically: the entry with smaller row index (then smaller column
    index) wins retention.  Zero entries are never counted as retained, so
    the output has exactly min(keep, #nonzero) nonzero entries.
    """
    D = np.asarray(D, dtype=float)
    if keep != int(keep) or keep < 0:
        raise ValidationError(f"retained count must be a nonnegative integer, got {keep}")
    keep = int(keep)
    if keep > D.size:
        raise ValidationError(f"retained count {keep} exceeds statistic count {D.size}")
    flat = np.abs(D).ravel()
    # stable argsort of descending magnitude: ties fall in row-major order
    ranked = np.argsort(-flat, kind="stable")
    mask = np.zeros(flat.size, dtype=bool)
    mask[ranked[:keep]] = True
    out = np.where(mask.reshape(D.shape), D, 0.0)
    return out


def apply_rule(D: np.ndarray, rule: ThresholdRule) -> np.ndarray:
    """Apply a thresholding rule to a p x K statistic matrix."""
    if rule.kind == "soft":
        return np.asarray(soft(D, rule.param))
    if rule.kind == "hard":
        return np.asarray(hard(D, rule.param))
    return order(D, rule.param)


def threshold_grid(stats, kind: str, m: int = 30) -> list[ThresholdRule]:
    """Build the initial tuning grid, in increasing-shrinkage order.

    Soft/hard: m values evenly spaced on [0, max|d|].  Order: m distinct
    integers evenly spaced (rounded) on [0, p*K], descending, so that
    survivor counts are non-increasing along every grid.
    """
    if kind not in KINDS:
        raise ValidationError(f"unknown thresholding kind {kind!r}")
    if m < 2:
        raise ValidationError(f"grid size must be >= 2, got {m}")
    if kind == "order":
        total = stats.t_stats.size
        vals = np.unique(np.rint(np.linspace(0, total, m)).astype(int))
        return [ThresholdRule("order", int(v)) for v in vals[::-1]]
    top = float(np.abs(stats.t_stats).max())
    return [ThresholdRule(kind, float(v)) for v in np.linspace(0.0, top, m)]


def reference_thresholds(n: int, c: float, d_exp: float) -> dict[str, float]:
    """Literature reference thresholding parameters for sample size n.

    Returns the universal threshold sqrt(2 log n), the Fan-style threshold
    sqrt(2 log(n * a_n)) with a_n = c * (log n)^(-d_exp), and the
    (log n)^(3/2) order-thresholding recommendation.  Natural logarithms.
    """
    if n < 2:
        raise ValidationError(f"need n >= 2, got {n}")
    if c <= 0 or d_exp <= 0:
        raise ValidationError("c and d_exp must be positive")
    a_n = c * math.log(n) ** (-d_exp)
    if n * a_n <= 1:
        raise ValidationError(
            f"n * a_n = {n * a_n!r} must exceed 1 for a positive log"
        )
    return {
        "universal": math.sqrt(2 * math.log(n)),
        "fan": math.sqrt(2 * math.log(n * a_n)),
        "kim_akritas": math.log(n) ** 1.5,
    }
