"""Point cloud container, CSV / IMDM binary I/O, and seeded subsampling.

The IMDM binary layout: magic ``IMDM`` (4 bytes), little-endian u32
version = 1, u64 n, u64 d, then n*d little-endian float64 values in
row-major order. CSV is comma-separated with a decimal point, optionally
one header line. Both formats round-trip doubles bit-exactly.
"""
from __future__ import annotations

import struct
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyInput, NonFiniteValue, ParseError, SampleTooLarge
from .rng import sample_without_replacement

IMDM_MAGIC = b"IMDM"
IMDM_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


@dataclass(frozen=True)
class PointCloud:
    """n x d matrix of samples, one row per point, float64, C-order."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ParseError(f"point matrix must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise EmptyInput(f"point matrix must be at least 1x1, got {arr.shape}")
        bad = np.argwhere(~np.isfinite(arr))
        if bad.size:
            r, c = (int(v) for v in bad[0])
            raise NonFiniteValue(r, c, float(arr[r, c]))
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


def _read_bytes(path) -> bytes:
    if str(path) == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _parse_csv(raw: bytes, header: bool) -> PointCloud:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"input is not UTF-8 text: {e}") from None
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if header:
        lines = lines[1:]
    if not lines:
        raise EmptyInput("no data rows")
    rows = []
    width = None
    for r, line in enumerate(lines):
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise ParseError(f"ragged row {r}: expected {width} fields, got {len(fields)}")
        vals = []
        for c, tok in enumerate(fields):
            try:
                vals.append(float(tok))
            except ValueError:
                raise ParseError(f"unreadable number {tok.strip()!r} at row {r}, column {c}") from None
        rows.append(vals)
    return PointCloud(np.array(rows, dtype=np.float64))


def _parse_imdm(raw: bytes) -> PointCloud:
    if len(raw) < _HEADER.size:
        raise ParseError("file too short for an IMDM header")
    magic, version, n, d = _HEADER.unpack_from(raw)
    if magic != IMDM_MAGIC:
        raise ParseError(f"bad magic {magic!r}, expected {IMDM_MAGIC!r}")
    if version != IMDM_VERSION:
        raise ParseError(f"unsupported IMDM version {version}")
    if n == 0 or d == 0:
        raise EmptyInput(f"IMDM header declares n={n}, d={d}")
    expected = _HEADER.size + 8 * n * d
    if len(raw) != expected:
        raise ParseError(f"payload size mismatch: file has {len(raw)} bytes, header implies {expected}")
    data = np.frombuffer(raw, dtype="<f8", count=n * d, offset=_HEADER.size)
    return PointCloud(data.reshape(n, d).copy())


def load_pointcloud(path, format: str = "auto", header: bool = False) -> PointCloud:
    """Load a point cloud from CSV or IMDM binary; ``-`` reads stdin.

    ``auto`` sniffs the IMDM magic bytes first, then falls back to the
    ``.imdm`` extension, else parses CSV.
    """
    raw = _read_bytes(path)
    fmt = format
    if fmt == "auto":
        if raw[:4] == IMDM_MAGIC or str(path).endswith(".imdm"):
            fmt = "imdm-binary"
        else:
            fmt = "csv"
    if fmt in ("imdm-binary", "imdm"):
        return _parse_imdm(raw)
    if fmt == "csv":
        return _parse_csv(raw, header)
    raise ValueError(f"unknown format {format!r}")


def save_pointcloud(pc: PointCloud, path, format: str = "auto") -> None:
    """Write CSV (17 significant digits) or IMDM binary, chosen by extension
    when ``format`` is ``auto``."""
    fmt = format
    if fmt == "auto":
        fmt = "imdm-binary" if str(path).endswith(".imdm") else "csv"
    if fmt in ("imdm-binary", "imdm"):
        payload = _HEADER.pack(IMDM_MAGIC, IMDM_VERSION, pc.n, pc.d)
        buf = payload + pc.data.astype("<f8", copy=False).tobytes(order="C")
        Path(path).write_bytes(buf)
    elif fmt == "csv":
        lines = [",".join(format_float(v) for v in row) for row in pc.data]
        Path(path).write_text("\n".join(lines) + "\n")
    else:
        raise ValueError(f"unknown format {format!r}")


def format_float(x: float) -> str:
    """17 significant digits: enough to reproduce any double bit-exactly."""
    return format(float(x), ".17g")


def subsample(pc: PointCloud, m: int, seed: int) -> PointCloud:
    """Draw m rows uniformly without replacement (Fisher-Yates on a
    SplitMix64 stream); deterministic for a fixed seed."""
    if m > pc.n:
        raise SampleTooLarge(f"requested {m} of {pc.n} points")
    if m < 1:
        raise ValueError(f"subsample size must be >= 1, got {m}")
    idx = sample_without_replacement(pc.n, m, seed)
    return PointCloud(pc.data[idx])
