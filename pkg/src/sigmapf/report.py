"""Deterministic CSV/JSON artifacts."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exact import Angle, format_angle
from .pf import PFSpectrum, enumerate_family

SPECTRUM_HEADER = ["kind", "numer", "offset", "index", "value", "multiplicity", "provenance"]


def num_str(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Angle):
        return format_angle(x)
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Angle):
        return format_angle(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            return repr(v)
        return v
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    return obj


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path: Path, obj) -> None:
    Path(path).write_text(dumps_json(obj))


def write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    Path(path).write_text(buf.getvalue())


def spectrum_rows(spectrum: PFSpectrum, m_max: int) -> list[list[str]]:
    """Enumerated family members, sorted by (|numer|, offset, m)."""
    keyed = []
    for fam in spectrum.hyperbolic:
        o = fam.offset.radians
        for m in range(-m_max, m_max + 1):
            val = float(fam.numer) / (o + 2 * m * math.pi)
            keyed.append(((abs(float(fam.numer)), fam.offset.sort_key(), m, float(fam.numer)),
                          ["hyperbolic", num_str(fam.numer), format_angle(fam.offset), str(m),
                           num_str(val), str(fam.mult), fam.provenance]))
    for fam in spectrum.lattice:
        for n in range(-m_max, m_max + 1):
            if n == 0:
                continue
            val = float(fam.numer) / (2 * n * math.pi)
            keyed.append(((abs(float(fam.numer)), 0.0, n, float(fam.numer)),
                          ["lattice", num_str(fam.numer), "0", str(n), num_str(val), str(fam.mult), fam.provenance]))
    keyed.sort(key=lambda kv: (kv[0], kv[1]))
    return [row for _k, row in keyed]


def emit_spectrum_table(spectrum: PFSpectrum | None, m_max: int, path: Path | None = None) -> str:
    """CSV of enumerated spectrum members; header only for an empty spectrum."""
    rows = [] if spectrum is None else spectrum_rows(spectrum, m_max)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SPECTRUM_HEADER)
    w.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def pf_spectrum_record(spectrum: PFSpectrum, m_max: int = 0) -> dict:
    rec = {
        "zero": {"value": "0", "multiplicity": spectrum.zero_mult},
        "hyperbolic": [
            {"numer": num_str(f.numer), "offset": format_angle(f.offset), "mult": f.mult, "provenance": f.provenance}
            for f in spectrum.hyperbolic
        ],
        "lattice": [{"numer": num_str(f.numer), "mult": f.mult, "provenance": f.provenance} for f in spectrum.lattice],
        "flat": [{"value": num_str(e.value), "mult": e.mult} for e in spectrum.flat],
        "xi": [num_str(x) for x in spectrum.xi],
    }
    if m_max:
        rec["enumerated"] = [
            {"family": i, "values": [num_str(v) for v in enumerate_family(f, m_max)]}
            for i, f in enumerate(tuple(spectrum.hyperbolic) + tuple(spectrum.lattice))
        ]
    return rec


__all__ = [
    "dumps_json",
    "emit_spectrum_table",
    "pf_spectrum_record",
    "spectrum_rows",
    "write_csv",
    "write_json",
]
