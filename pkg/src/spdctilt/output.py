"""Deterministic text serialization of grids, scans and summary records.

Every number is written with Python's shortest round-trip repr, fields in a
fixed order, '\\n' line endings, so identical inputs give byte-identical
files.  Grid CSVs carry '#'-prefixed metadata (artifact version, config
echo, normalization) and then 'Λs_nm,Λi_nm,Re,Im,S' rows in row-major Λs
order; detunings are in nm, amplitudes in 1/nm, densities in 1/nm^2.
"""

import json

import numpy as np

from . import __version__
from .biphoton import JointSpectrumGrid
from .errors import ConfigError

GRID_COLUMNS = "Λs_nm,Λi_nm,Re,Im,S"


def fmt(value: float) -> str:
    """Shortest decimal representation that round-trips the float."""
    return repr(float(value))


def _meta_lines(kind: str, echo_lines: list[str], extra: list[str]) -> list[str]:
    lines = [f"# spdctilt {__version__}", f"# kind = {kind}"]
    lines += [f"# {line}" for line in echo_lines]
    lines += [f"# {line}" for line in extra]
    return lines


def grid_csv(jsgrid: JointSpectrumGrid, kind: str, echo_lines: list[str]) -> str:
    """Serialize one grid; units are nm, 1/nm and 1/nm^2 per column."""
    grid = jsgrid.grid
    extra = [
        "units: detunings nm, amplitude 1/nm, S 1/nm^2",
        f"n_signal = {grid.n_signal}",
        f"n_idler = {grid.n_idler}",
        f"norm = {fmt(jsgrid.norm)}",
    ]
    lines = _meta_lines(kind, echo_lines, extra)
    lines.append(GRID_COLUMNS)
    ls = grid.signal_detunings() * 1e9
    li = grid.idler_detunings() * 1e9
    re = jsgrid.amplitude.real * 1e-9
    im = jsgrid.amplitude.imag * 1e-9
    s = jsgrid.intensity * 1e-18
    for j, lam_s in enumerate(ls):
        s_txt = fmt(lam_s)
        row_re, row_im, row_s = re[j], im[j], s[j]
        for k, lam_i in enumerate(li):
            lines.append(
                f"{s_txt},{fmt(lam_i)},{fmt(row_re[k])},{fmt(row_im[k])},{fmt(row_s[k])}"
            )
    return "\n".join(lines) + "\n"


def read_grid_csv(text: str):
    """Parse a grid CSV back into (meta dict, 5 column arrays)."""
    meta: dict[str, str] = {}
    rows = []
    seen_header = False
    for line in text.splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        if not line:
            continue
        if not seen_header:
            if line != GRID_COLUMNS:
                raise ConfigError(f"unexpected grid CSV header {line!r}")
            seen_header = True
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ConfigError(f"malformed grid CSV row {line!r}")
        rows.append([float(p) for p in parts])
    if not rows:
        raise ConfigError("grid CSV has no data rows")
    data = np.asarray(rows)
    return meta, data[:, 0], data[:, 1], data[:, 2], data[:, 3], data[:, 4]


def table_csv(columns: list[str], rows: list[tuple], echo_lines: list[str],
              kind: str) -> str:
    """Serialize a scan table; cells are formatted by type (str kept as is)."""
    lines = _meta_lines(kind, echo_lines, [])
    lines.append(",".join(columns))
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, (bool, np.bool_)):
                cells.append("1" if cell else "0")
            elif isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            elif isinstance(cell, str):
                cells.append(cell)
            else:
                cells.append(fmt(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def record_json(record: dict) -> str:
    """Deterministic JSON: sorted keys, indent 2, trailing newline."""
    return json.dumps(record, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
