"""Small numerical helpers shared across modules."""
from __future__ import annotations

import math
import os

import numpy as np


def golden_min(f, lo: float, hi: float, xtol: float) -> float:
    """Golden-section search for a minimizer of a unimodal ``f`` on ``[lo, hi]``."""
    invphi = (math.sqrt(5) - 1) / 2
    c, d = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > xtol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def csum(values) -> complex:
    """Correctly rounded sum of complex values (``math.fsum`` per component)."""
    v = np.asarray(values)
    return complex(math.fsum(v.real.ravel()), math.fsum(v.imag.ravel()))


def clog1p(w):
    """``log(1 + w)`` for complex ``w``, accurate when ``|w|`` is tiny.

    Uses ``log(u) * w / (u - 1)`` with ``u = 1 + w``, which cancels the rounding
    error committed in forming ``u``.
    """
    w = np.asarray(w, dtype=complex)
    u = 1.0 + w
    denom = u - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom == 0, w, np.log(u) * (w / np.where(denom == 0, 1.0, denom)))
    return out


def max_workers() -> int:
    """Thread cap from ``QCKIT_THREADS`` (default: CPU count)."""
    raw = os.environ.get("QCKIT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1
