"""Two-sided check of the Poisson formula ``sum c_l h^(l) = sum b_g h(g)`` on
Gaussian test functions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numerics import csum
from .errors import IncompleteDataError, IncompleteSpectrumError, NumericalError, ValidationError
from .multiset import PointMultiset, Window
from .spectrum import Spectrum

__all__ = ["GaussianTest", "PoissonReport", "poisson_residual"]


@dataclass(frozen=True)
class GaussianTest:
    """``h(x) = exp(-pi ((x - center)/scale)^2)``;
    ``h^(g) = scale * exp(-2 pi i center g) * exp(-pi (scale g)^2)``."""

    scale: float = 1.0
    center: float = 0.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValidationError("Gaussian scale must be positive")

    def __call__(self, x):
        return np.exp(-np.pi * ((np.asarray(x, dtype=float) - self.center) / self.scale) ** 2)

    def transform(self, g):
        g = np.asarray(g, dtype=float)
        return self.scale * np.exp(-2j * np.pi * self.center * g) * np.exp(-np.pi * (self.scale * g) ** 2)

    def tail_sum(self, start: float, per_unit: float, width: float) -> float:
        """Bound on ``sum`` of ``exp(-pi (u/width)^2)`` over ``|u| >= start`` when at
        most ``per_unit`` nodes fall in any unit interval."""
        if start <= 0:
            return math.inf
        # nodes in [start+m, start+m+1) contribute at most per_unit * exp(-pi ((start+m)/width)^2)
        m = np.arange(0, 200)
        return float(2 * per_unit * np.sum(np.exp(-np.pi * ((start + m) / width) ** 2)))


@dataclass(frozen=True)
class PoissonReport:
    lhs: complex
    rhs: complex
    residual: float
    tail_bound_lhs: float
    tail_bound_rhs: float


def _max_unit_count(values: np.ndarray, lo: float, hi: float) -> int:
    if values.size == 0:
        return 0
    starts = values[(values >= lo) & (values <= hi)]
    if starts.size == 0:
        return 0
    return int(np.max(np.searchsorted(values, starts + 1.0, side="left") - np.searchsorted(values, starts, side="left")))


def poisson_residual(
    A: PointMultiset,
    S: Spectrum,
    h: GaussianTest,
    lambda_cutoff: float,
    gamma_cutoff: float,
    tail_tol: float = 1e-13,
) -> PoissonReport:
    """Both sides of the Poisson formula truncated at the cutoffs.

    The neglected tails are bounded from the Gaussian decay and the largest
    number of points (atoms) per unit length seen inside the data; a bound above
    ``tail_tol`` raises :class:`NumericalError` asking for larger cutoffs.
    """
    if not Window.closed(-lambda_cutoff, lambda_cutoff).within(A.window):
        raise IncompleteDataError("lambda cutoff exceeds the completeness window")
    if not S.covers(-gamma_cutoff, gamma_cutoff):
        raise IncompleteSpectrumError("gamma cutoff exceeds the spectrum band")
    a = A.values
    lam = a[np.abs(a) <= lambda_cutoff]
    g, b = S.select(-gamma_cutoff, gamma_cutoff, True, True)

    # point tail: |h^| = scale * exp(-pi (scale l)^2), i.e. width 1/scale, centered at 0
    k1 = max(_max_unit_count(a, -lambda_cutoff, lambda_cutoff - 1), 1)
    tail_lhs = h.scale * h.tail_sum(lambda_cutoff, k1, 1.0 / h.scale)
    # atom tail: |b| h(g) with h centered at `center`
    kb = max(_max_unit_count(S.gammas, -gamma_cutoff, gamma_cutoff - 1), 1)
    bmax = float(np.max(np.abs(b))) if b.size else 0.0
    tail_rhs = bmax * h.tail_sum(gamma_cutoff - abs(h.center), kb, h.scale)
    if tail_lhs > tail_tol or tail_rhs > tail_tol:
        raise NumericalError(
            f"truncation tails {tail_lhs:.3g} / {tail_rhs:.3g} exceed {tail_tol}; increase the cutoffs"
        )
    lhs = csum(h.transform(lam))
    rhs = csum(b * h(g))
    return PoissonReport(lhs, rhs, abs(lhs - rhs), tail_lhs, tail_rhs)
