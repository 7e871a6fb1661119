"""JSON documents for measures, spectra and reports."""
from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Any

import numpy as np

from .errors import ValidationError
from .generators import LatticeSpec, TrigPolySpec, gen_lattice, gen_trig_poly_zeros, gen_union
from .multiset import PointMultiset, Window
from .spectrum import Spectrum, lattice_spectrum, union_spectrum

__all__ = ["dumps", "write_atomic", "parse_measure", "lattice_components", "spectrum_for"]


def _plain(obj: Any):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [_plain(obj.real), _plain(obj.imag)]
    return obj


def dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats, non-finite as null."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qckit-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _window(doc) -> Window:
    try:
        lo, hi = doc
        return Window.closed(float(lo), float(hi))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"window must be [lo, hi], got {doc!r}") from exc


def lattice_components(doc: dict) -> list[LatticeSpec] | None:
    """Lattice pieces of a lattice/union generator document, or ``None``."""
    kind = doc.get("kind")
    if kind == "lattice":
        return [LatticeSpec(float(doc["alpha"]), float(doc.get("shift", 0.0)), _window(doc["window"]))]
    if kind == "union":
        w = _window(doc["window"])
        out = []
        for comp in doc["components"]:
            if comp.get("kind", "lattice") != "lattice":
                return None
            out.append(LatticeSpec(float(comp["alpha"]), float(comp.get("shift", 0.0)), w))
        return out
    return None


def parse_measure(doc: dict) -> PointMultiset:
    """A multiset document (``points``) or a generator document (``kind``)."""
    if not isinstance(doc, dict):
        raise ValidationError("measure must be a JSON object")
    if "points" in doc:
        return PointMultiset.from_json(doc)
    kind = doc.get("kind")
    try:
        if kind == "lattice":
            return gen_lattice(lattice_components(doc)[0])
        if kind == "union":
            parts = []
            for comp in doc["components"]:
                comp = {"kind": "lattice", **comp, "window": doc["window"]}
                parts.append(parse_measure(comp))
            return gen_union(parts)
        if kind == "trigpoly":
            terms = tuple((complex(re, im), float(f)) for re, im, f in doc["terms"])
            spec = TrigPolySpec(terms, _window(doc["window"]), real=True)
            return gen_trig_poly_zeros(spec, float(doc.get("scan_step", 0.01)), float(doc.get("mult_threshold", 1e-3)))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed generator document: missing or bad field {exc}") from exc
    raise ValidationError(f"unknown measure kind {kind!r}")


def spectrum_for(doc: dict, measure_doc: dict | None) -> Spectrum:
    """The document's explicit spectrum, or the analytic one of a lattice/union measure."""
    if "spectrum" in doc:
        return Spectrum.from_json(doc["spectrum"])
    comps = lattice_components(measure_doc) if isinstance(measure_doc, dict) else None
    if not comps:
        raise ValidationError("no spectrum given and the measure is not a lattice union")
    band = _window(doc.get("band", [-64.0, 64.0]))
    return union_spectrum([lattice_spectrum(LatticeSpec(c.alpha, c.shift, band), band) for c in comps])
