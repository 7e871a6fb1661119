"""Almost periods, density, the decomposition a_n = n/d + phi(n), and the
symmetric reciprocal sums of an almost periodic multiset."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._numerics import golden_min
from .errors import IncompleteDataError, ValidationError
from .multiset import PointMultiset, Window, count_many

__all__ = [
    "AlmostPeriodReport",
    "DensityEstimate",
    "Decomposition",
    "Alpha0Result",
    "monotone_matching_mismatch",
    "is_almost_period",
    "find_almost_periods",
    "max_gap",
    "estimate_density",
    "decompose",
    "phi_almost_periods",
    "krein_levin_sum",
    "alpha0",
]


@dataclass(frozen=True)
class AlmostPeriodReport:
    tau: float
    epsilon: float
    matched: bool
    index_shift: int
    max_mismatch: float


def monotone_matching_mismatch(x, y, tau: float = 0.0) -> float:
    """Sup mismatch ``max_i |x_(i) + tau - y_(i)|`` of the order-preserving matching.

    For equally long finite sequences this is the smallest sup mismatch over
    all bijections.
    """
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValidationError("sequences must have equal length")
    if x.size == 0:
        return 0.0
    return float(np.max(np.abs(x + tau - y)))


def _interior(A: PointMultiset, margin: float) -> tuple[int, int]:
    """Expanded positions ``[i0, i1)`` of points at distance >= margin from the window edges."""
    lo, hi = A.window.lo + margin, A.window.hi - margin
    if lo > hi:
        raise IncompleteDataError(
            f"completeness window too small for boundary margin {margin}"
        )
    a = A.values
    i0 = int(np.searchsorted(a, lo, side="left"))
    i1 = int(np.searchsorted(a, hi, side="right"))
    if i1 <= i0:
        raise IncompleteDataError("no interior points left after excluding the boundary band")
    return i0, i1


def _shift_extremes(a: np.ndarray, i0: int, i1: int, hs) -> dict[int, tuple[float, float]]:
    """min and max of ``a[i+h] - a[i]`` over interior positions, per admissible h."""
    out = {}
    for h in hs:
        if i0 + h < 0 or i1 - 1 + h >= a.size:
            continue
        diff = a[i0 + h : i1 + h] - a[i0:i1]
        out[int(h)] = (float(diff.min()), float(diff.max()))
    return out


def _mismatch(tau: float, extremes: dict[int, tuple[float, float]]) -> tuple[int, float]:
    best_h, best = 0, math.inf
    for h, (dmin, dmax) in extremes.items():
        m = max(tau - dmin, dmax - tau)
        if m < best:
            best_h, best = h, m
    return best_h, best


def _shift_band(A: PointMultiset, i0: int, i1: int, taus: np.ndarray, eps: float, d: float) -> range:
    a = A.values
    # empirical discrepancy of window counts at the relevant lengths
    spread = 0
    for t in (float(np.min(taus)), float(np.max(taus))):
        lo = a[i0:i1] + min(t, 0.0)
        c = count_many(A, lo, lo + abs(t))
        spread = max(spread, int(c.max() - c.min()))
    band = math.ceil(d * eps) + spread + 1
    return range(math.floor(d * float(np.min(taus))) - band, math.ceil(d * float(np.max(taus))) + band + 1)


def is_almost_period(
    A: PointMultiset, tau: float, epsilon: float, density: float | None = None
) -> AlmostPeriodReport:
    """Decide whether ``tau`` is an ``epsilon``-almost period of ``A``.

    Only index shifts ``sigma(n) = n + h`` are searched: between sorted
    sequences the order-preserving matching is optimal, so the best bijection
    is a shift. Points within ``|tau| + epsilon`` of the completeness window
    edges are excluded from the supremum.
    """
    if epsilon <= 0:
        raise ValidationError("epsilon must be positive")
    d = density if density is not None else A.density_estimate()
    i0, i1 = _interior(A, abs(tau) + epsilon)
    hs = _shift_band(A, i0, i1, np.array([tau]), epsilon, d)
    extremes = _shift_extremes(A.values, i0, i1, hs)
    if not extremes:
        raise IncompleteDataError("no admissible index shift inside the materialized range")
    h, m = _mismatch(tau, extremes)
    return AlmostPeriodReport(float(tau), float(epsilon), m < epsilon, h, m)


def find_almost_periods(
    A: PointMultiset,
    epsilon: float,
    tau_range: Window,
    tau_step: float,
    density: float | None = None,
    xtol: float = 1e-12,
) -> np.ndarray:
    """All ``epsilon``-almost periods found on a grid over ``tau_range``.

    Each run of consecutive grid hits is refined by golden-section
    minimization of the sup mismatch; the refined minimizers are returned
    sorted. A grid step below ``epsilon`` is needed to see shallow dips.
    """
    if tau_step <= 0 or epsilon <= 0:
        raise ValidationError("epsilon and tau_step must be positive")
    if tau_range.length <= 0:
        raise ValidationError("empty tau range")
    d = density if density is not None else A.density_estimate()
    taus = np.arange(tau_range.lo, tau_range.hi + 0.5 * tau_step, tau_step)
    taus = taus[tau_range.contains(taus) | np.isclose(taus, tau_range.lo)]
    margin = max(abs(tau_range.lo), abs(tau_range.hi)) + epsilon
    i0, i1 = _interior(A, margin)
    extremes = _shift_extremes(A.values, i0, i1, _shift_band(A, i0, i1, taus, epsilon, d))

    def mismatch(t):
        return _mismatch(t, extremes)[1]

    hit = np.array([mismatch(t) < epsilon for t in taus])
    found = []
    k = 0
    while k < taus.size:
        if not hit[k]:
            k += 1
            continue
        j = k
        while j + 1 < taus.size and hit[j + 1]:
            j += 1
        lo = max(taus[k] - tau_step, tau_range.lo)
        hi = min(taus[j] + tau_step, tau_range.hi)
        t = golden_min(mismatch, lo, hi, xtol)
        candidates = [t] + list(taus[k : j + 1])
        t = min(candidates, key=mismatch)
        if mismatch(t) < epsilon:
            found.append(float(t))
        k = j + 1
    return np.unique(np.array(found))


def max_gap(values: Sequence[float], span: Window) -> float:
    """Largest gap between consecutive values, counting the span's ends.

    Every subinterval of ``span`` of this length contains a value; ``inf`` if
    there are none.
    """
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        return math.inf
    pts = np.concatenate(([span.lo], v, [span.hi]))
    return float(np.max(np.diff(pts)))


@dataclass(frozen=True)
class DensityEstimate:
    d: float
    lengths: np.ndarray
    counts: np.ndarray
    eta: np.ndarray  # |count/length - d| per length


def estimate_density(A: PointMultiset, window_lengths: Sequence[float], center: float | None = None) -> DensityEstimate:
    """Counts per unit length on nested half-open windows about ``center``.

    The estimate is the ratio on the longest window; ``eta`` records how far
    shorter windows are from it.
    """
    lengths = np.asarray(window_lengths, dtype=float)
    if lengths.size == 0 or np.any(lengths <= 0):
        raise ValidationError("window lengths must be positive")
    if np.any(np.diff(lengths) <= 0):
        raise ValidationError("window lengths must be increasing")
    c = 0.5 * (A.window.lo + A.window.hi) if center is None else float(center)
    lo, hi = c - lengths / 2, c + lengths / 2
    if not Window(float(lo[-1]), float(hi[-1])).within(A.window):
        raise IncompleteDataError("longest window exceeds the completeness window")
    counts = count_many(A, lo, hi)
    ratios = counts / lengths
    d = float(ratios[-1])
    if d <= 0:
        raise ValidationError("no points in the longest window")
    return DensityEstimate(d, lengths, counts, np.abs(ratios - d))


@dataclass(frozen=True)
class Decomposition:
    """``a_n = n/d + phi(n)`` on the materialized index range."""

    density: float
    indices: np.ndarray
    phi: np.ndarray

    @property
    def n_min(self) -> int:
        return int(self.indices[0])

    @property
    def n_max(self) -> int:
        return int(self.indices[-1])

    @property
    def sup_phi(self) -> float:
        return float(np.max(np.abs(self.phi)))

    def phi_at(self, n):
        n = np.asarray(n)
        if np.any(n < self.n_min) or np.any(n > self.n_max):
            raise IncompleteDataError(f"index outside [{self.n_min}, {self.n_max}]")
        out = self.phi[n - self.n_min]
        return float(out) if np.ndim(out) == 0 else out

    def sup_over(self, radius: int) -> float:
        """max |phi(n)| over |n| <= radius."""
        if radius > min(self.n_max, -self.n_min):
            raise IncompleteDataError(f"radius {radius} exceeds the index range")
        return float(np.max(np.abs(self.phi_at(np.arange(-radius, radius + 1)))))

    def restrict(self, radius: int) -> "Decomposition":
        n = np.arange(-radius, radius + 1)
        return Decomposition(self.density, n, self.phi_at(n))


def decompose(A: PointMultiset, d: float) -> Decomposition:
    if not d > 0:
        raise ValidationError("density must be positive")
    n = A.indices
    return Decomposition(float(d), n, A.values - n / d)


def phi_almost_periods(D: Decomposition, epsilon: float, h_range: tuple[int, int]) -> np.ndarray:
    """Integers h in ``h_range`` (inclusive) with ``sup_n |phi(n+h) - phi(n)| < epsilon``."""
    h_lo, h_hi = int(h_range[0]), int(h_range[1])
    if h_hi < h_lo:
        raise ValidationError("empty h range")
    if max(abs(h_lo), abs(h_hi)) >= D.phi.size:
        raise IncompleteDataError("h range exceeds the index range")
    phi = D.phi
    out = []
    for h in range(h_lo, h_hi + 1):
        k = abs(h)
        diff = phi[k:] - phi[: phi.size - k] if k else np.zeros(1)
        if np.max(np.abs(diff)) < epsilon:
            out.append(h)
    return np.array(out, dtype=np.int64)


def krein_levin_sum(D: Decomposition, tau: int, N: int) -> float:
    """``sum_{0<|n|<=N} (phi(n+tau) - phi(n)) / n`` (diagnostic)."""
    n = np.concatenate((np.arange(-N, 0), np.arange(1, N + 1)))
    if N < 1:
        raise ValidationError("N must be positive")
    terms = (D.phi_at(n + int(tau)) - D.phi_at(n)) / n
    return math.fsum(terms)


@dataclass(frozen=True)
class Alpha0Result:
    value: float
    cutoffs: np.ndarray
    partial_sums: np.ndarray
    defects: np.ndarray  # |S_{N_i} - S_{N_{i-1}}|, i >= 1
    cauchy_defect: float  # max |S_{N_i} - S_{N_j}| over i, j >= 1


def alpha0(A: PointMultiset, N_schedule: Sequence[float]) -> Alpha0Result:
    """Symmetric partial sums ``S_N = sum_{|a_n| < N} 1/a_n`` along a schedule."""
    cut = np.asarray(N_schedule, dtype=float)
    if cut.size == 0 or np.any(cut <= 0):
        raise ValidationError("cutoffs must be positive")
    if A.contains_point(0.0):
        raise ValidationError("0 is a point of the multiset; 1/a_n undefined")
    if not Window(-float(cut.max()), float(cut.max()), False, False).within(A.window):
        raise IncompleteDataError("cutoff exceeds the completeness window")
    a = A.values
    sums = []
    for N in cut:
        sel = a[(a > -N) & (a < N)]
        sums.append(math.fsum(1.0 / sel))
    sums = np.array(sums)
    defects = np.abs(np.diff(sums))
    tail = sums[1:] if sums.size > 1 else sums
    cauchy = float(tail.max() - tail.min())
    return Alpha0Result(float(sums[-1]), cut, sums, defects, cauchy)
