"""Pure point Fourier transforms ``sum_gamma b_gamma delta_gamma`` of point
multisets: exact for lattices, empirical via Bohr means."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .errors import IncompleteDataError, IncompleteSpectrumError, ValidationError
from .generators import LatticeSpec
from .multiset import PointMultiset, Window

__all__ = [
    "Spectrum",
    "BohrEstimate",
    "MassGrowth",
    "lattice_spectrum",
    "union_spectrum",
    "bohr_coefficient",
    "bohr_means",
    "empirical_spectrum",
    "combination_frequencies",
    "mass_growth",
    "spectral_tail_bound",
]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Atoms ``(gamma, b_gamma)`` sorted by frequency (cycles).

    ``band`` is the frequency range over which the atom list is known to be
    complete; ``None`` means completeness is not asserted anywhere.
    """

    gammas: np.ndarray
    masses: np.ndarray
    band: Window | None
    provenance: str = "analytic"

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        b = np.asarray(self.masses, dtype=complex)
        if g.shape != b.shape or g.ndim != 1:
            raise ValidationError("gammas and masses must be 1-d of equal length")
        order = np.argsort(g, kind="stable")
        g, b = g[order], b[order]
        if g.size > 1 and np.any(np.diff(g) == 0):
            raise ValidationError("duplicate frequencies; merge them with union_spectrum")
        g.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "masses", b)

    def __len__(self) -> int:
        return int(self.gammas.size)

    def mass_at(self, gamma: float, tol: float = 1e-9) -> complex:
        """Mass of the atom at ``gamma`` (0 if none within ``tol``)."""
        if not self.gammas.size:
            return 0j
        i = int(np.argmin(np.abs(self.gammas - gamma)))
        return complex(self.masses[i]) if abs(self.gammas[i] - gamma) <= tol else 0j

    @property
    def b0(self) -> float:
        return self.mass_at(0.0).real

    def select(self, lo: float, hi: float, closed_left: bool = False, closed_right: bool = False):
        """Atoms with frequency in the given interval."""
        sel = Window(lo, hi, closed_left, closed_right).contains(self.gammas)
        return self.gammas[sel], self.masses[sel]

    def covers(self, lo: float, hi: float) -> bool:
        return self.band is not None and self.band.lo <= lo and hi <= self.band.hi

    def mass_function(self, t, side: int = 1):
        """``M(t) = sum_{0 < gamma <= t} |b_gamma|`` (``side=-1``: mirrored on ``gamma < 0``)."""
        g = side * self.gammas
        keep = g > 0
        gs, ws = g[keep], np.abs(self.masses[keep])
        order = np.argsort(gs)
        gs, cum = gs[order], np.concatenate(([0.0], np.cumsum(ws[order])))
        return cum[np.searchsorted(gs, t, side="right")]

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        """Atom at ``-gamma`` carries ``conj(b_gamma)`` (real measures)."""
        for g, b in zip(self.gammas, self.masses):
            if self.band is not None and not self.band.contains(-g):
                continue
            if abs(self.mass_at(-g, tol=max(tol, 1e-12 * abs(g))) - np.conj(b)) > tol * max(1.0, abs(b)):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "atoms": [[float(g), float(b.real), float(b.imag)] for g, b in zip(self.gammas, self.masses)],
            "band": None if self.band is None else self.band.to_json(),
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Spectrum":
        try:
            atoms = doc["atoms"]
            g = [float(a[0]) for a in atoms]
            b = [complex(float(a[1]), float(a[2])) for a in atoms]
            band = doc.get("band")
            band = None if band is None else Window.closed(*band)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ValidationError(f"malformed spectrum document: {exc}") from exc
        return cls(np.array(g), np.array(b, dtype=complex), band, doc.get("provenance", "analytic"))


def lattice_spectrum(spec: LatticeSpec, band: Window) -> Spectrum:
    """Poisson summation for ``alpha Z + shift``: atoms ``k/alpha`` with mass
    ``exp(-2 pi i k shift / alpha) / alpha``."""
    a = spec.alpha
    k = np.arange(math.floor(band.lo * a) - 1, math.ceil(band.hi * a) + 2)
    g = k / a
    k, g = k[band.contains(g)], g[band.contains(g)]
    # reduce the phase mod 1 before exponentiating
    phase = np.mod(k * (spec.shift / a), 1.0)
    b = np.exp(-2j * np.pi * phase) / a
    b[k == 0] = 1.0 / a
    return Spectrum(g, b, band, "analytic")


def union_spectrum(spectra: Sequence[Spectrum], gamma_tol: float = 1e-12, drop_tol: float = 1e-12) -> Spectrum:
    """Sum of spectra: coinciding frequencies add, cancelled atoms are dropped."""
    if not spectra:
        raise ValidationError("nothing to merge")
    band = spectra[0].band
    if any(s.band != band for s in spectra[1:]):
        raise ValidationError("spectra must share one band")
    g = np.concatenate([s.gammas for s in spectra])
    b = np.concatenate([s.masses for s in spectra])
    order = np.argsort(g, kind="stable")
    g, b = g[order], b[order]
    if g.size:
        new = np.concatenate(([True], np.diff(g) > gamma_tol * np.maximum(1.0, np.abs(g[1:]))))
        grp = np.cumsum(new) - 1
        b = np.bincount(grp, weights=b.real) + 1j * np.bincount(grp, weights=b.imag)
        g = g[new]
        keep = np.abs(b) > drop_tol
        g, b = g[keep], b[keep]
    prov = "analytic" if all(s.provenance == "analytic" for s in spectra) else "empirical"
    return Spectrum(g, b, band, prov)


@dataclass(frozen=True)
class BohrEstimate:
    value: complex
    defect: float  # max successive difference along the T schedule
    values: np.ndarray


def bohr_means(A: PointMultiset, gammas, T: float) -> np.ndarray:
    """``(1/2T) sum_{|a_n| <= T} exp(-2 pi i gamma a_n)`` for many ``gamma``."""
    if not Window.closed(-T, T).within(A.window):
        raise IncompleteDataError(f"[-{T}, {T}] exceeds the completeness window")
    a = A.values
    a = a[(a >= -T) & (a <= T)]
    gammas = np.atleast_1d(np.asarray(gammas, dtype=float))
    out = np.empty(gammas.size, dtype=complex)
    for i, g in enumerate(gammas):
        # phase reduced mod 1 keeps exp() accurate for large |gamma a|
        out[i] = np.exp(-2j * np.pi * np.mod(g * a, 1.0)).sum() / (2 * T)
    return out


def bohr_coefficient(A: PointMultiset, gamma: float, T_schedule: Sequence[float]) -> BohrEstimate:
    Ts = np.asarray(T_schedule, dtype=float)
    if Ts.size == 0 or np.any(Ts <= 0):
        raise ValidationError("T schedule must be non-empty and positive")
    vals = np.array([bohr_means(A, [gamma], T)[0] for T in Ts])
    defect = float(np.max(np.abs(np.diff(vals)))) if vals.size > 1 else math.inf
    return BohrEstimate(complex(vals[-1]), defect, vals)


def combination_frequencies(freqs: Iterable[float], max_order: int, band: Window) -> np.ndarray:
    """Integer combinations ``sum k_j w_j`` with ``sum |k_j| <= max_order`` inside ``band``."""
    freqs = [float(f) for f in freqs]
    out = set()
    for ks in itertools.product(range(-max_order, max_order + 1), repeat=len(freqs)):
        if sum(abs(k) for k in ks) <= max_order:
            g = sum(k * f for k, f in zip(ks, freqs))
            if band.contains(g):
                out.add(round(g, 12))
    return np.array(sorted(out))


def empirical_spectrum(
    A: PointMultiset,
    candidates: Sequence[float],
    T: float,
    probes: Sequence[float] | None = None,
    band: Window | None = None,
    factor: float = 3.0,
) -> Spectrum:
    """Atoms among ``candidates`` whose Bohr mean stands out from the noise floor.

    The floor is ``factor`` times the median Bohr-mean magnitude over
    ``probes`` (default: midpoints between consecutive candidates). Pass
    ``band`` only if the candidate list is known to be exhaustive there.
    """
    cand = np.unique(np.asarray(candidates, dtype=float))
    if cand.size == 0:
        raise ValidationError("no candidate frequencies")
    if probes is None:
        if cand.size < 2:
            raise ValidationError("need probes or at least two candidates")
        probes = 0.5 * (cand[1:] + cand[:-1])
    floor = factor * float(np.median(np.abs(bohr_means(A, probes, T))))
    vals = bohr_means(A, cand, T)
    keep = np.abs(vals) > floor
    return Spectrum(cand[keep], vals[keep], band, "empirical")


@dataclass(frozen=True)
class MassGrowth:
    r: np.ndarray
    mass: np.ndarray  # sum_{|gamma| <= r} |b_gamma|
    kappa: float  # log-log slope; diagnostic only


def mass_growth(S: Spectrum, r_values: Sequence[float]) -> MassGrowth:
    if len(S) == 0:
        raise ValidationError("empty spectrum")
    r = np.asarray(r_values, dtype=float)
    if S.band is None or np.any(-r < S.band.lo) or np.any(r > S.band.hi):
        raise IncompleteSpectrumError("radius outside the spectrum band")
    absb = np.abs(S.masses)
    mass = np.array([absb[np.abs(S.gammas) <= x].sum() for x in r])
    ok = (r > 0) & (mass > 0)
    kappa = float(np.polyfit(np.log(r[ok]), np.log(mass[ok]), 1)[0]) if ok.sum() >= 2 else math.nan
    return MassGrowth(r, mass, kappa)


def _power_envelope(S: Spectrum, side: int) -> tuple[float, float]:
    """``(C, kappa)`` with ``M(t) <= C t^kappa`` on the band for ``t >= 1``."""
    hi = S.band.hi if side > 0 else -S.band.lo
    if hi <= 1:
        raise IncompleteSpectrumError("band too narrow to model the mass growth")
    t = np.geomspace(1.0, hi, 32)
    M = S.mass_function(t, side)
    ok = M > 0
    if ok.sum() < 2:
        return (float(M.max()) if M.size else 0.0), 0.0
    kappa = max(0.0, float(np.polyfit(np.log(t[ok]), np.log(M[ok]), 1)[0]))
    C = float(np.max(M / t**kappa))
    return C, kappa


def spectral_tail_bound(S: Spectrum, T: float, y: float) -> float:
    """Bound on ``sum_{|gamma| >= T, same side as y} |b_gamma| exp(-2 pi |gamma y|)``.

    Uses ``M(T) e^{-aT} + a int_T^inf e^{-at} M(t) dt`` with ``a = 2 pi |y|`` and
    ``M`` extended beyond the band by a fitted power-law envelope.
    """
    side = 1 if y > 0 else -1
    a = 2 * math.pi * abs(y)
    C, kappa = _power_envelope(S, side)
    T = max(T, 1.0)
    integral = C * a ** (-kappa) * special.gamma(kappa + 1) * special.gammaincc(kappa + 1, a * T)
    return float(C * T**kappa * math.exp(-a * T) + integral)
