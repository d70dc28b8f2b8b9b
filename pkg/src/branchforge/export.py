"""CSV and JSON writers shared by the scenarios and the command line.

Floats are written with ``repr`` (shortest round-trip decimal), so files are
byte-stable across runs and lossless on re-reading.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .modes import ModeIndex


class MalformedCSVError(ValueError):
    pass


def mode_column(mode: ModeIndex) -> str:
    return f"a_{mode.m}_{mode.n}"


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.write_text(csv_text(header, rows))
    return path


def read_csv(path: Path | str) -> tuple[list[str], np.ndarray]:
    """Header and a float matrix; any non-numeric or ragged row is an error."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0]:
        raise MalformedCSVError(f"{path}: empty file or missing header")
    header = [h.strip() for h in rows[0]]
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedCSVError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(x) for x in row]
        except ValueError as exc:
            raise MalformedCSVError(f"{path}:{lineno}: {exc}") from None
        if not all(math.isfinite(v) for v in vals):
            raise MalformedCSVError(f"{path}:{lineno}: non-finite value")
        data.append(vals)
    return header, np.array(data, dtype=float).reshape(len(data), len(header))


def json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_json(path: Path | str, obj) -> Path:
    path = Path(path)
    path.write_text(json_text(obj))
    return path


def curve_table(curve) -> tuple[list[str], list[list]]:
    """Columns s, omega, energy, residual_norm, then one amplitude per mode."""
    system = curve.system
    header = ["s", "omega", "energy", "residual_norm"] + [mode_column(x) for x in system.span]
    rows = []
    for s, p in zip(curve.arclength, curve.points):
        rows.append([s, p.omega, system.energy(p.omega, p.amplitudes), p.residual_norm] + list(p.amplitudes))
    return header, rows


def element_table(element, count: int = 200, omega_max: float = 6.0) -> tuple[list[str], list[list]]:
    """Columns omega, energy, then one amplitude per mode of the element."""
    om, en, amps = element.sample(count, omega_max)
    header = ["omega", "energy"] + [mode_column(x) for x in element.type_tag]
    rows = [[w, e] + list(a) for w, e, a in zip(om, en, amps)]
    return header, rows
