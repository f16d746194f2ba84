"""Artifact formats: window and table CSV, 16-bit PGM heatmaps, JSON reports.

CSV files use LF line endings, a header row, and 17 significant digits so
that doubles survive a round trip.  PGM grids are binary P5 with maxval
65535 (big-endian samples); the clip value that maps to 65535 is stored in a
JSON sidecar next to the image.
"""

from __future__ import annotations

import io
import json
import re
from pathlib import Path

import numpy as np

from .correlations import CorrelationQuery, CorrelationTable
from .diffraction import PeriodogramGrid
from .lattice import Alphabet, LatticeVector, WeightWindow, as_vector

PGM_MAX = 65535


class ArtifactIOError(OSError):
    pass


def _num(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def _write_bytes(path, payload: bytes) -> Path:
    path = Path(path)
    try:
        path.write_bytes(payload)
    except OSError as exc:
        raise ArtifactIOError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _read_bytes(path) -> bytes:
    path = Path(path)
    try:
        return path.read_bytes()
    except OSError as exc:
        raise ArtifactIOError(f"cannot read {path}: {exc.strerror or exc}") from exc


# -- windows --------------------------------------------------------------------


def format_window_csv(window) -> str:
    buf = io.StringIO(newline="")
    buf.write("a,b,re,im\n")
    oa, ob = window.origin.a, window.origin.b
    for b in range(window.height):
        row = window.data[b]
        for a in range(window.width):
            v = row[a]
            buf.write(f"{oa + a},{ob + b},{_num(v.real)},{_num(v.imag)}\n")
    return buf.getvalue()


def write_window_csv(window, path) -> Path:
    return _write_bytes(path, format_window_csv(window).encode("utf-8"))


def parse_window_csv(text: str) -> WeightWindow:
    lines = text.split("\n")
    if not lines or lines[0].strip() != "a,b,re,im":
        raise ValueError("window CSV must start with the header 'a,b,re,im'")
    records = [ln.split(",") for ln in lines[1:] if ln.strip()]
    if not records:
        raise ValueError("window CSV has no sites")
    pos = np.array([(int(r[0]), int(r[1])) for r in records])
    vals = np.array([complex(float(r[2]), float(r[3])) for r in records])
    amin, bmin = pos.min(axis=0)
    amax, bmax = pos.max(axis=0)
    width, height = amax - amin + 1, bmax - bmin + 1
    if len(records) != width * height:
        raise ValueError("window CSV does not cover a full rectangle")
    data = np.empty((height, width), dtype=np.complex128)
    data[pos[:, 1] - bmin, pos[:, 0] - amin] = vals
    signs = bool(np.all(data.imag == 0) and np.all(np.abs(data.real) == 1))
    return WeightWindow(origin=LatticeVector(int(amin), int(bmin)), data=data,
                        alphabet=Alphabet.PLUS_MINUS_ONE if signs else Alphabet.CIRCLE)


def read_window_csv(path) -> WeightWindow:
    return parse_window_csv(_read_bytes(path).decode("utf-8"))


# -- correlation tables ---------------------------------------------------------


def format_table_csv(table: CorrelationTable | None) -> str:
    buf = io.StringIO(newline="")
    buf.write("za,zb,re,im,pairs\n")
    if table is not None:
        for z in table.lags():
            v = table[z]
            buf.write(f"{z.a},{z.b},{_num(v.real)},{_num(v.imag)},{table.count(z)}\n")
    return buf.getvalue()


def write_table_csv(table: CorrelationTable | None, path) -> Path:
    return _write_bytes(path, format_table_csv(table).encode("utf-8"))


# -- PGM --------------------------------------------------------------------------


def format_grid_pgm(grid: PeriodogramGrid, clip: float | None = None) -> tuple[bytes, dict]:
    """Encode a grid as P5/16-bit; returns the image bytes and the sidecar record."""
    values = np.asarray(grid.values, dtype=np.float64)
    if clip is None:
        clip = float(values.max())
    if not clip > 0:
        clip = 1.0
    scaled = np.rint(np.clip(values / clip, 0.0, 1.0) * PGM_MAX).astype(">u2")
    header = f"P5\n{grid.width} {grid.height}\n{PGM_MAX}\n".encode("ascii")
    sidecar = {"width": grid.width, "height": grid.height, "clip": clip, "maxval": PGM_MAX,
               "layout": "row k holds frequencies (j/width, k/height), k = 0 first"}
    return header + scaled.tobytes(), sidecar


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_grid_pgm(grid: PeriodogramGrid, path, clip: float | None = None) -> Path:
    payload, sidecar = format_grid_pgm(grid, clip)
    _write_bytes(path, payload)
    _write_bytes(sidecar_path(path), format_json(sidecar).encode("utf-8"))
    return Path(path)


def read_grid_pgm(path) -> PeriodogramGrid:
    raw = _read_bytes(path)
    meta = json.loads(_read_bytes(sidecar_path(path)).decode("utf-8"))
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", raw)
    if not m:
        raise ValueError(f"{path} is not a binary PGM")
    width, height, maxval = (int(g) for g in m.groups())
    pixels = np.frombuffer(raw[m.end():], dtype=">u2", count=width * height).reshape(height, width)
    return PeriodogramGrid(pixels.astype(np.float64) / maxval * float(meta["clip"]))


# -- JSON ---------------------------------------------------------------------------


def format_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_report_json(report, path) -> Path:
    if hasattr(report, "as_dict"):
        report = report.as_dict()
    return _write_bytes(path, format_json(report).encode("utf-8"))


# -- query grammar --------------------------------------------------------------------

_TERM = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*(\*|:\s*(-?\d+))?")


def parse_query(text: str) -> CorrelationQuery:
    """Parse ``"(0,1):-2,(1,1):1"``; a missing ``:m`` means 1 and a ``*`` suffix means -1."""
    terms = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse query term at {text[pos:]!r}")
        z = as_vector((int(m.group(1)), int(m.group(2))))
        if m.group(3) == "*":
            power = -1
        elif m.group(4) is not None:
            power = int(m.group(4))
        else:
            power = 1
        terms.append((z, power))
        pos = m.end()
        rest = text[pos:].lstrip()
        if rest.startswith(","):
            rest = rest[1:].lstrip()
            if not rest:
                raise ValueError("query ends with a dangling ','")
        elif rest:
            raise ValueError(f"expected ',' before {rest!r}")
        pos = len(text) - len(rest)
    if not terms:
        raise ValueError("empty query")
    return CorrelationQuery(tuple(terms))
