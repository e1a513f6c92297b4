"""Canonical JSON, field file formats and atomic writes."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import struct
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InvalidParams
from .spectral import GridSpec, SampledField

__all__ = [
    "dumps_canonical",
    "atomic_write",
    "MAGIC",
    "write_field_binary",
    "read_field_binary",
    "field_to_csv",
    "field_from_csv",
    "read_field",
]

MAGIC = b"LPBK"
_HEADER = struct.Struct("<4sIII")  # magic, dim, N axis 1, N axis 2 (0 in 1D)


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, ".17g")
    # keep a float marker so that integral floats read back as floats
    return text if any(c in text for c in ".en") else text + ".0"


def _encode(obj: Any, out: list, indent: int, level: int):
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        _encode([obj.real, obj.imag], out, indent, level)
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, key in enumerate(sorted(obj, key=str)):
            out.append(("," if i else "") + pad)
            _encode(str(key), out, indent, level + 1)
            out.append(": ")
            _encode(obj[key], out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            out.append("[]")
            return
        out.append("[")
        for i, item in enumerate(obj):
            out.append(("," if i else "") + pad)
            _encode(item, out, indent, level + 1)
        out.append(end + "]")
    elif hasattr(obj, "to_dict"):
        _encode(obj.to_dict(), out, indent, level)
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps_canonical(obj: Any, indent: int = 2) -> str:
    """JSON with sorted keys and every float at 17 significant digits.

    Infinities and NaN become the strings ``"inf"``, ``"-inf"``, ``"nan"``,
    so identical inputs always give byte-identical output.
    """
    out: list = []
    _encode(obj, out, indent, 0)
    return "".join(out)


def atomic_write(path, data) -> Path:
    """Write to a sibling temp file and rename, so no partial file survives an error."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_field_binary(f: SampledField) -> bytes:
    """16-byte header then row-major little-endian (re, im) float64 pairs."""
    n2 = f.grid.n if f.grid.dim == 2 else 0
    header = _HEADER.pack(MAGIC, f.grid.dim, f.grid.n, n2)
    return header + np.ascontiguousarray(f.values, dtype="<c16").tobytes()


def read_field_binary(data: bytes, period: float = 2 * math.pi) -> SampledField:
    if len(data) < _HEADER.size:
        raise InvalidParams("field file shorter than its header")
    magic, dim, n1, n2 = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise InvalidParams(f"bad magic {magic!r}; expected {MAGIC!r}")
    if dim == 2 and n2 != n1:
        raise InvalidParams("only square 2D grids are supported")
    grid = GridSpec(dim, n1, period)
    body = np.frombuffer(data, dtype="<c16", offset=_HEADER.size)
    if body.size != n1**dim:
        raise InvalidParams(f"expected {n1 ** dim} samples, found {body.size}")
    return SampledField(grid, body.reshape(grid.shape))


def field_to_csv(f: SampledField) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*(f"i{a + 1}" for a in range(f.grid.dim)), "re", "im"])
    for idx in np.ndindex(*f.grid.shape):
        v = f.values[idx]
        w.writerow([*idx, format(float(v.real), ".17g"), format(float(v.imag), ".17g")])
    return buf.getvalue()


def field_from_csv(text: str, grid: GridSpec) -> SampledField:
    rows = list(csv.reader(io.StringIO(text)))
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    values = np.zeros(grid.shape, dtype=complex)
    seen = np.zeros(grid.shape, dtype=bool)
    for row in rows:
        if not row:
            continue
        if len(row) != grid.dim + 2:
            raise InvalidParams(f"CSV row {row} needs {grid.dim} indices plus re, im")
        idx = tuple(int(c) for c in row[: grid.dim])
        values[idx] = complex(float(row[-2]), float(row[-1]))
        seen[idx] = True
    if not seen.all():
        raise InvalidParams("CSV does not cover every grid point")
    return SampledField(grid, values)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_field(path, grid: GridSpec) -> SampledField:
    """Load a field from ``.csv`` or the binary format (detected by magic)."""
    path = Path(path)
    data = path.read_bytes()
    if data[:4] == MAGIC:
        f = read_field_binary(data, grid.period)
        if f.grid.dim != grid.dim or f.grid.n != grid.n:
            raise InvalidParams(f"file grid {f.grid} disagrees with configured grid {grid}")
        return f
    return field_from_csv(data.decode("utf-8"), grid)
