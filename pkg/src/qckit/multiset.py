"""Locally finite real multisets with integer multiplicities.

A :class:`PointMultiset` stores distinct sorted points with multiplicities and
a *completeness window*: the range over which the stored data is the whole set.
The expanded view ``a_n`` repeats each point by its multiplicity and is indexed
so that ``a_0`` is the smallest element that is ``>= 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import IncompleteDataError, ValidationError

__all__ = [
    "Window",
    "PointMultiset",
    "DiscrepancyStats",
    "build_multiset",
    "count_in_window",
    "count_many",
    "discrepancy_stats",
]


@dataclass(frozen=True)
class Window:
    lo: float
    hi: float
    closed_left: bool = True
    closed_right: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValidationError(f"window bounds must be finite, got [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValidationError(f"window lo > hi: [{self.lo}, {self.hi}]")

    @classmethod
    def closed(cls, lo: float, hi: float) -> "Window":
        return cls(float(lo), float(hi), True, True)

    @classmethod
    def half_open(cls, x: float, h: float) -> "Window":
        """The half-interval ``[x, x+h)``."""
        return cls(float(x), float(x) + float(h), True, False)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        left = x >= self.lo if self.closed_left else x > self.lo
        right = x <= self.hi if self.closed_right else x < self.hi
        return left & right

    def within(self, other: "Window") -> bool:
        """True when this window is a subset of ``other``."""
        if self.lo < other.lo or self.hi > other.hi:
            return False
        if self.lo == other.lo and self.closed_left and not other.closed_left:
            return False
        if self.hi == other.hi and self.closed_right and not other.closed_right:
            return False
        return True

    def to_json(self) -> list:
        return [self.lo, self.hi]


@dataclass(frozen=True, eq=False)
class PointMultiset:
    """Sorted distinct points with positive multiplicities.

    Use :func:`build_multiset` rather than the constructor; it sorts, merges and
    validates.
    """

    points: np.ndarray
    multiplicities: np.ndarray
    window: Window
    nonzero: bool = False
    values: np.ndarray = field(init=False, repr=False)
    origin_index: int = field(init=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        mult = np.asarray(self.multiplicities, dtype=np.int64)
        if pts.ndim != 1 or pts.shape != mult.shape:
            raise ValidationError("points and multiplicities must be 1-d of equal length")
        if pts.size and np.any(np.diff(pts) <= 0):
            raise ValidationError("points must be strictly increasing")
        if np.any(mult < 1):
            raise ValidationError("multiplicities must be positive integers")
        if pts.size and not np.all(self.window.contains(pts)):
            raise ValidationError("all points must lie in the completeness window")
        if self.nonzero and np.any(pts == 0.0):
            raise ValidationError("0 is a point but the multiset is required to avoid 0")
        values = np.repeat(pts, mult)
        for arr in (pts, mult, values):
            arr.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "origin_index", int(np.searchsorted(values, 0.0, side="left")))

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def n_min(self) -> int:
        return -self.origin_index

    @property
    def n_max(self) -> int:
        return len(self) - 1 - self.origin_index

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def a(self, n):
        """The expanded sequence ``a_n`` (scalar or array of indices)."""
        n_arr = np.asarray(n)
        if np.any(n_arr < self.n_min) or np.any(n_arr > self.n_max):
            raise IncompleteDataError(
                f"index outside materialized range [{self.n_min}, {self.n_max}]"
            )
        out = self.values[n_arr + self.origin_index]
        return float(out) if np.ndim(out) == 0 else out

    def contains_point(self, x: float) -> bool:
        i = np.searchsorted(self.points, x)
        return bool(i < self.points.size and self.points[i] == x)

    def density_estimate(self) -> float:
        """Total count over completeness-window length; a crude global density."""
        if self.window.length <= 0:
            raise ValidationError("degenerate completeness window")
        return len(self) / self.window.length

    def to_json(self) -> dict:
        return {
            "points": [[float(p), int(m)] for p, m in zip(self.points, self.multiplicities)],
            "window": self.window.to_json(),
            "nonzero": bool(self.nonzero),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PointMultiset":
        try:
            pairs = [(float(p), int(m)) for p, m in doc["points"]]
            lo, hi = doc["window"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed multiset document: {exc}") from exc
        return build_multiset(pairs, Window.closed(lo, hi), bool(doc.get("nonzero", False)))


def build_multiset(
    points_with_multiplicities: Iterable[tuple[float, int]],
    window: Window,
    nonzero_required: bool = False,
    merge_tol: float = 0.0,
) -> PointMultiset:
    """Sort, merge coincident coordinates and validate.

    Coordinates closer than ``merge_tol`` to the previous kept point are merged
    into it (multiplicities add). With the default ``merge_tol=0`` only exactly
    equal floats merge.
    """
    pairs = list(points_with_multiplicities)
    if pairs:
        pts, mult = map(np.asarray, zip(*pairs))
    else:
        pts, mult = np.empty(0), np.empty(0, dtype=np.int64)
    pts = pts.astype(float)
    if not np.all(np.isfinite(pts)):
        raise ValidationError("points must be finite")
    if np.any(mult != np.round(mult)) or np.any(mult < 1):
        raise ValidationError("multiplicities must be positive integers")
    mult = mult.astype(np.int64)
    if pts.size and not np.all(window.contains(pts)):
        bad = pts[~window.contains(pts)][0]
        raise ValidationError(f"point {bad!r} lies outside the window [{window.lo}, {window.hi}]")
    if nonzero_required and np.any(pts == 0.0):
        raise ValidationError("0 is not allowed as a point (nonzero_required)")

    order = np.argsort(pts, kind="stable")
    pts, mult = pts[order], mult[order]
    if pts.size:
        # a new group starts wherever the gap to the previous point exceeds the tolerance
        starts = np.concatenate(([True], np.diff(pts) > merge_tol))
        group = np.cumsum(starts) - 1
        merged_mult = np.bincount(group, weights=mult).astype(np.int64)
        pts = pts[starts]
        mult = merged_mult
    return PointMultiset(pts, mult, window, nonzero_required)


def _require_inside(A: PointMultiset, w: Window) -> None:
    if not w.within(A.window):
        raise IncompleteDataError(
            f"window [{w.lo}, {w.hi}] exceeds completeness window [{A.window.lo}, {A.window.hi}]"
        )


def count_many(A: PointMultiset, lo, hi, closed_left=True, closed_right=False) -> np.ndarray:
    """Vectorized ``#A ∩ <lo, hi>``; no completeness check."""
    a = A.values
    left = np.searchsorted(a, lo, side="left" if closed_left else "right")
    right = np.searchsorted(a, hi, side="right" if closed_right else "left")
    return np.maximum(right - left, 0)


def count_in_window(A: PointMultiset, w: Window) -> int:
    """Number of points of ``A`` in ``w`` counted with multiplicity."""
    _require_inside(A, w)
    return int(count_many(A, w.lo, w.hi, w.closed_left, w.closed_right))


@dataclass(frozen=True)
class DiscrepancyStats:
    # max_x |#A∩[x,x+h) - (1/M) #A∩[x,x+Mh)|
    mean_defect: float
    # max_{x1,x2} |#A∩[x1,x1+h) - #A∩[x2,x2+h)|
    spread: int


def discrepancy_stats(A: PointMultiset, h: float, M: int, x_samples: Sequence[float]) -> DiscrepancyStats:
    """Empirical candidates for the discrepancy constant of an almost periodic set."""
    xs = np.asarray(x_samples, dtype=float)
    if xs.size == 0:
        raise ValidationError("x_samples is empty")
    if h <= 0 or int(M) != M or M < 1:
        raise ValidationError("need h > 0 and integer M >= 1")
    _require_inside(A, Window(float(xs.min()), float(xs.max() + M * h), True, False))
    short = count_many(A, xs, xs + h)
    long = count_many(A, xs, xs + M * h)
    mean_defect = float(np.max(np.abs(short - long / M)))
    return DiscrepancyStats(mean_defect, int(short.max() - short.min()))
