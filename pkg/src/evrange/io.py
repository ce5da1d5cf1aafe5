"""Event file I/O.

Two formats:

* csv: header line ``x,y,t_us,p``, one integer record per line, p in {0,1}
  with 1 = positive polarity. Carries no geometry; the caller declares it.
* bin: little-endian container. 24-byte header (magic ``EVR1``, width u16,
  height u16, 8 reserved zero bytes, record count u64) followed by 16-byte
  records (x u16, y u16, p u8, 3 zero pad bytes, t u64).
"""

from __future__ import annotations

import logging
import os
from pathlib import Path

import numpy as np

from .errors import FormatError, GeometryError, OrderingError
from .events import EventStream, SensorGeometry

log = logging.getLogger(__name__)

CSV_HEADER = "x,y,t_us,p"
BIN_MAGIC = b"EVR1"

_HEADER_DTYPE = np.dtype(
    [("magic", "S4"), ("width", "<u2"), ("height", "<u2"), ("reserved", "V8"), ("count", "<u8")]
)
_RECORD_DTYPE = np.dtype([("x", "<u2"), ("y", "<u2"), ("p", "u1"), ("pad", "V3"), ("t", "<u8")])

assert _HEADER_DTYPE.itemsize == 24
assert _RECORD_DTYPE.itemsize == 16


def _infer_format(path: Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("csv", "bin"):
            raise ValueError(f"unknown event format {fmt!r}, expected 'csv' or 'bin'")
        return fmt
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix == ".bin":
        return "bin"
    raise ValueError(f"cannot infer event format from {path.name!r}; pass fmt='csv' or 'bin'")


def read_events(
    path,
    *,
    geometry: SensorGeometry | None = None,
    fmt: str | None = None,
    strict: bool = True,
) -> EventStream:
    """Load an event stream, validating bounds and time order.

    In strict mode out-of-bounds events are an error; in lenient mode they
    are dropped and the count is logged. Timestamp regressions are always an
    error.
    """
    path = Path(path)
    fmt = _infer_format(path, fmt)
    if fmt == "csv":
        return _read_csv(path, geometry or SensorGeometry(), strict)
    return _read_bin(path, geometry, strict)


def write_events(stream: EventStream, path, *, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = _infer_format(path, fmt)
    if fmt == "csv":
        _write_csv(stream, path)
    else:
        _write_bin(stream, path)


# ---------------------------------------------------------------- csv


def _read_csv(path: Path, geometry: SensorGeometry, strict: bool) -> EventStream:
    with open(path, "rb") as f:
        first = f.readline().decode("ascii", errors="replace").strip()
        has_records = bool(f.readline().strip())
    if first != CSV_HEADER:
        raise FormatError(f"expected csv header {CSV_HEADER!r}, got {first!r}", line=1)
    if not has_records:
        return EventStream.empty(geometry)
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.int64, ndmin=2)
    except ValueError as exc:
        _rescan_csv(path)
        raise FormatError(f"malformed csv record: {exc}") from exc
    if data.size == 0:
        return EventStream.empty(geometry)
    if data.shape[1] != 4:
        _rescan_csv(path)
        raise FormatError(f"expected 4 columns, got {data.shape[1]}")
    x, y, t, p = data.T
    neg = (data < 0).any(axis=1)
    if neg.any():
        raise FormatError("negative field value", line=int(np.argmax(neg)) + 2)
    badp = p > 1
    if badp.any():
        raise FormatError(
            f"polarity must be 0 or 1, got {int(p[np.argmax(badp)])}",
            line=int(np.argmax(badp)) + 2,
        )
    reg = t[1:] < t[:-1]
    if reg.any():
        raise OrderingError("timestamp regression", line=int(np.argmax(reg)) + 3)
    oob = (x >= geometry.width) | (y >= geometry.height)
    if oob.any():
        if strict:
            i = int(np.argmax(oob))
            raise GeometryError(
                f"event at ({int(x[i])}, {int(y[i])}) outside "
                f"{geometry.width}x{geometry.height} sensor (line {i + 2})"
            )
        n_dropped = int(oob.sum())
        log.warning("dropped %d out-of-bounds events from %s", n_dropped, path)
        keep = ~oob
        x, y, t, p = x[keep], y[keep], t[keep], p[keep]
    return EventStream(geometry, x, y, t, p, validate=False)


def _rescan_csv(path: Path) -> None:
    """Slow pass after a failed bulk parse; pins the error to a line."""
    with open(path, "r", encoding="ascii", errors="replace") as f:
        f.readline()
        for lineno, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                raise FormatError("blank record line", line=lineno)
            fields = line.split(",")
            if len(fields) != 4:
                raise FormatError(f"expected 4 fields, got {len(fields)}", line=lineno)
            for fv in fields:
                try:
                    int(fv)
                except ValueError:
                    raise FormatError(f"non-integer field {fv!r}", line=lineno) from None


def _write_csv(stream: EventStream, path: Path) -> None:
    cols = np.column_stack(
        [
            stream.x.astype(np.int64),
            stream.y.astype(np.int64),
            stream.t.astype(np.int64),
            stream.p.astype(np.int64),
        ]
    )
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(CSV_HEADER + "\n")
        np.savetxt(f, cols, fmt="%d", delimiter=",")


# ---------------------------------------------------------------- bin


def _read_bin(path: Path, geometry: SensorGeometry | None, strict: bool) -> EventStream:
    size = os.path.getsize(path)
    if size < _HEADER_DTYPE.itemsize:
        raise FormatError(f"file too short for header ({size} bytes)", byte=size)
    with open(path, "rb") as f:
        header = np.fromfile(f, dtype=_HEADER_DTYPE, count=1)[0]
        if bytes(header["magic"]) != BIN_MAGIC:
            raise FormatError(f"bad magic {bytes(header['magic'])!r}, expected {BIN_MAGIC!r}", byte=0)
        file_geometry = SensorGeometry(int(header["width"]), int(header["height"]))
        if geometry is not None and geometry != file_geometry:
            raise GeometryError(
                f"declared geometry {geometry.width}x{geometry.height} does not match "
                f"file header {file_geometry.width}x{file_geometry.height}"
            )
        count = int(header["count"])
        payload = size - _HEADER_DTYPE.itemsize
        if payload != count * _RECORD_DTYPE.itemsize:
            raise FormatError(
                f"header promises {count} records ({count * _RECORD_DTYPE.itemsize} bytes), "
                f"payload has {payload} bytes",
                byte=size,
            )
        rec = np.fromfile(f, dtype=_RECORD_DTYPE, count=count)
    x, y, t, p = rec["x"], rec["y"], rec["t"], rec["p"]
    badp = p > 1
    if badp.any():
        i = int(np.argmax(badp))
        raise FormatError(
            f"polarity must be 0 or 1, got {int(p[i])}",
            byte=_HEADER_DTYPE.itemsize + i * _RECORD_DTYPE.itemsize,
        )
    reg = t[1:] < t[:-1]
    if reg.any():
        i = int(np.argmax(reg)) + 1
        raise OrderingError(
            "timestamp regression", byte=_HEADER_DTYPE.itemsize + i * _RECORD_DTYPE.itemsize
        )
    oob = (x >= file_geometry.width) | (y >= file_geometry.height)
    if oob.any():
        if strict:
            i = int(np.argmax(oob))
            raise GeometryError(
                f"event at ({int(x[i])}, {int(y[i])}) outside "
                f"{file_geometry.width}x{file_geometry.height} sensor "
                f"(byte offset {_HEADER_DTYPE.itemsize + i * _RECORD_DTYPE.itemsize})"
            )
        n_dropped = int(oob.sum())
        log.warning("dropped %d out-of-bounds events from %s", n_dropped, path)
        keep = ~oob
        x, y, t, p = x[keep], y[keep], t[keep], p[keep]
    return EventStream(file_geometry, x, y, t, p, validate=False)


def _write_bin(stream: EventStream, path: Path) -> None:
    header = np.zeros(1, dtype=_HEADER_DTYPE)
    header["magic"] = BIN_MAGIC
    header["width"] = stream.geometry.width
    header["height"] = stream.geometry.height
    header["count"] = len(stream)
    rec = np.zeros(len(stream), dtype=_RECORD_DTYPE)
    rec["x"] = stream.x
    rec["y"] = stream.y
    rec["p"] = stream.p
    rec["t"] = stream.t
    with open(path, "wb") as f:
        header.tofile(f)
        rec.tofile(f)
