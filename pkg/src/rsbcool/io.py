"""Self-describing CSV and deterministic JSON output.

CSV files start with a block of ``# key = value`` lines followed by one
column-name row. Floats are written as the shortest decimal that round-trips.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import InvalidParameterError


def fmt(value) -> str:
    """Shortest round-trip text for numbers, ``str`` otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _plain(value):
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    if value is None or isinstance(value, str):
        return value
    return str(value)


def dumps_json(payload: Mapping) -> str:
    return json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n"


def csv_text(columns: Mapping[str, np.ndarray], header: Mapping | None = None) -> str:
    names = list(columns)
    arrays = [np.asarray(columns[n]).ravel() for n in names]
    if len({a.size for a in arrays}) > 1:
        raise InvalidParameterError("CSV columns must have equal length")
    lines = [f"# {k} = {fmt(v)}" for k, v in (header or {}).items()]
    lines.append(",".join(names))
    for row in zip(*arrays):
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_text(path, text: str) -> None:
    if path is None or str(path) == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_csv(path):
    """Return (header dict of strings, dict of float columns)."""
    header = {}
    names = None
    rows = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                header[key.strip()] = value.strip()
            continue
        if names is None:
            names = [n.strip() for n in line.split(",")]
            continue
        rows.append([float(v) for v in line.split(",")])
    if names is None:
        raise InvalidParameterError(f"{path}: no column header row")
    data = np.array(rows, dtype=float).reshape(-1, len(names))
    return header, {n: data[:, i] for i, n in enumerate(names)}


SPECTRUM_CONVENTION = "one-sided; integral of density over frequency (Hz) equals the variance"


def spectrum_csv(spectrum, header: Mapping | None = None) -> str:
    """Spectrum as CSV with frequency in Hz and density per Hz."""
    head = {"units": spectrum.units, "sidedness": spectrum.sidedness, "convention": SPECTRUM_CONVENTION}
    head.update(header or {})
    return csv_text({"frequency_hz": spectrum.omega / (2.0 * math.pi), "density": spectrum.density}, head)


def read_spectrum(path):
    from .spectra import Spectrum

    header, cols = read_csv(path)
    if "frequency_hz" not in cols or "density" not in cols:
        raise InvalidParameterError(f"{path}: expected frequency_hz and density columns")
    return Spectrum(
        2.0 * math.pi * cols["frequency_hz"],
        cols["density"],
        units=header.get("units", "m^2/Hz"),
        sidedness=header.get("sidedness", "one-sided"),
    )
