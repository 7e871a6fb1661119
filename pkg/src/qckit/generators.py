"""Fixture families: shifted lattices, finite unions, zero sets of real
exponential polynomials."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._numerics import golden_min
from .errors import MissedRootError, ValidationError
from .multiset import PointMultiset, Window, build_multiset

__all__ = [
    "LatticeSpec",
    "TrigPolySpec",
    "RootReport",
    "gen_lattice",
    "gen_union",
    "gen_trig_poly_zeros",
    "find_trig_poly_roots",
]


@dataclass(frozen=True)
class LatticeSpec:
    """The set ``alpha * Z + shift`` restricted to ``window``."""

    alpha: float
    shift: float
    window: Window

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValidationError(f"lattice spacing must be positive, got {self.alpha}")


@dataclass(frozen=True)
class TrigPolySpec:
    """``p(x) = sum_j c_j exp(2 pi i w_j x)`` with frequencies in cycles."""

    terms: tuple[tuple[complex, float], ...]
    window: Window
    real: bool = True

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((complex(c), float(w)) for c, w in self.terms))
        if not self.terms:
            raise ValidationError("trigonometric polynomial has no terms")
        if self.real and not _conjugate_symmetric(self.terms):
            raise ValidationError("realness flag set but terms are not conjugate-symmetric")

    @property
    def coefficient_norm(self) -> float:
        return sum(abs(c) for c, _ in self.terms)

    @classmethod
    def from_sines(cls, amplitudes_freqs: Sequence[tuple[float, float]], window: Window) -> "TrigPolySpec":
        """Build ``sum a_k sin(2 pi w_k x)`` in exponential form."""
        terms = []
        for a, w in amplitudes_freqs:
            terms += [(a / 2j, w), (-a / 2j, -w)]
        return cls(tuple(terms), window)

    @classmethod
    def from_cosines(cls, amplitudes_freqs: Sequence[tuple[float, float]], window: Window) -> "TrigPolySpec":
        terms = []
        for a, w in amplitudes_freqs:
            terms += [(a / 2, w), (a / 2, -w)] if w != 0 else [(complex(a), 0.0)]
        return cls(tuple(terms), window)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for c, w in self.terms:
            out += c * np.exp(2j * np.pi * w * x)
        return out.real if self.real else out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for c, w in self.terms:
            out += 2j * np.pi * w * c * np.exp(2j * np.pi * w * x)
        return out.real if self.real else out


def _conjugate_symmetric(terms, tol=1e-12) -> bool:
    remaining = list(terms)
    scale = max(abs(c) for c, _ in terms) or 1.0
    while remaining:
        c, w = remaining.pop()
        if w == 0.0:
            if abs(c.imag) > tol * scale:
                return False
            continue
        for i, (c2, w2) in enumerate(remaining):
            if w2 == -w and abs(c2 - c.conjugate()) <= tol * scale:
                del remaining[i]
                break
        else:
            return False
    return True


def gen_lattice(spec: LatticeSpec) -> PointMultiset:
    w, a, s = spec.window, spec.alpha, spec.shift
    k_lo = math.ceil((w.lo - s) / a) - 1
    k_hi = math.floor((w.hi - s) / a) + 1
    pts = a * np.arange(k_lo, k_hi + 1) + s
    pts = pts[w.contains(pts)]
    return build_multiset(((p, 1) for p in pts), w)


def gen_union(specs: Sequence[LatticeSpec | PointMultiset]) -> PointMultiset:
    """Multiset union; coinciding coordinates add multiplicities."""
    if not specs:
        raise ValidationError("empty union")
    parts = [gen_lattice(s) if isinstance(s, LatticeSpec) else s for s in specs]
    window = parts[0].window
    if any(p.window != window for p in parts[1:]):
        raise ValidationError("union components must share one window")
    pairs = [(p, m) for part in parts for p, m in zip(part.points, part.multiplicities)]
    return build_multiset(pairs, window, nonzero_required=any(p.nonzero for p in parts))


@dataclass(frozen=True)
class RootReport:
    multiset: PointMultiset
    # roots whose multiplicity was decided from a small derivative, not a sign change
    flagged: tuple[float, ...]


def _bisect(p, lo: float, hi: float, plo: float, xtol: float) -> float:
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        pm = float(p(mid))
        if pm == 0.0:
            return mid
        if (pm > 0) == (plo > 0):
            lo, plo = mid, pm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_trig_poly_roots(
    spec: TrigPolySpec,
    scan_step: float,
    mult_threshold: float,
    rtol: float = 1e-10,
    xtol: float = 1e-13,
    pair_tol: float = 1e-6,
) -> RootReport:
    """Real zeros of a real exponential polynomial by uniform scan and bisection.

    Sign changes between grid nodes are bisected. A local extremum of ``p``
    between nodes that touches zero (``|p| <= rtol * sum|c_j|``) is a tangential
    zero, and so is any root with ``|p'| < mult_threshold``; tangential zeros
    get multiplicity 2 and are flagged. If an extremum crosses zero instead,
    two roots fell inside one scan cell and :class:`MissedRootError` is raised.
    """
    if not spec.real:
        raise ValidationError("only real exponential polynomials are supported")
    if scan_step <= 0 or mult_threshold <= 0:
        raise ValidationError("scan_step and mult_threshold must be positive")
    w = spec.window
    n_cells = max(1, math.ceil(w.length / scan_step))
    xs = np.linspace(w.lo, w.hi, n_cells + 1)
    vs = spec(xs)
    zero_tol = rtol * spec.coefficient_norm
    roots: list[tuple[float, int]] = []
    flagged: list[float] = []

    def p(x):
        return float(spec(x))

    # exact zeros on nodes
    on_node = vs == 0.0
    for x in xs[on_node]:
        roots.append((float(x), 1))
    # sign changes strictly between nodes
    sgn = np.sign(vs)
    cross = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    for i in cross:
        r = _bisect(p, xs[i], xs[i + 1], vs[i], xtol)
        roots.append((r, 1))
    # tangential candidates: interior local minima of |p| with no sign change around them
    mag = np.abs(vs)
    cand = np.nonzero((mag[1:-1] <= mag[:-2]) & (mag[1:-1] <= mag[2:]) & ~on_node[1:-1])[0] + 1
    for i in cand:
        if sgn[i - 1] != sgn[i] or sgn[i] != sgn[i + 1]:
            continue
        s = sgn[i]
        x_ext = golden_min(lambda x: s * p(x), xs[i - 1], xs[i + 1], xtol)
        v_ext = p(x_ext)
        if abs(v_ext) <= zero_tol:
            roots.append((x_ext, 2))
        elif s * v_ext < 0:
            raise MissedRootError(
                f"two sign changes inside [{xs[i - 1]}, {xs[i + 1]}]; decrease scan_step"
            )
    # roundoff can split a tangential zero into two crossings a hair apart
    roots.sort()
    merged: list[tuple[float, int]] = []
    for x, m in roots:
        if merged and x - merged[-1][0] < pair_tol:
            x0, m0 = merged.pop()
            merged.append((0.5 * (x0 + x), max(2, m0 + m)))
        else:
            merged.append((x, m))
    # small slope at the root: treat as a double zero (heuristic, flagged)
    out = []
    for x, m in merged:
        if m == 1 and abs(float(spec.derivative(x))) < mult_threshold:
            m = 2
        if m > 1:
            flagged.append(x)
        if w.contains(x):
            out.append((x, m))
    ms = build_multiset(out, w)
    return RootReport(ms, tuple(sorted(set(flagged))))


def gen_trig_poly_zeros(spec: TrigPolySpec, scan_step: float, mult_threshold: float) -> PointMultiset:
    return find_trig_poly_roots(spec, scan_step, mult_threshold).multiset
