"""Heat-trace descriptors and their JSON serialization.

Schema (version 1): {"version", "n", "k", "knn_mode", "m", "nv", "probe",
"vr", "seed", "grid", "hkt", "exact", "normalized"}. Floats are written
with 17 significant digits, so save -> load reproduces every double
bit-exactly. Unknown extra keys are ignored on load.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import KNN_MODES, PROBE_DISTS, VR_MODES, SlqParams, TemperatureGrid
from .errors import SchemaError, VersionMismatch
from .pointcloud import format_float

SCHEMA_VERSION = 1

# SLQ noise allowance for the monotonicity / upper-bound invariants.
NOISE_TOL = 1e-6


@dataclass(frozen=True)
class HeatTraceDescriptor:
    """Sampled heat-kernel trace hkt(t) over a temperature grid.

    This is the cacheable manifold signature: strictly positive, bounded by
    n, and non-increasing in t (up to estimator noise for SLQ-built
    descriptors, exactly for oracle ones). `exact` marks oracle
    (dense-eigendecomposition) descriptors.
    """

    grid: TemperatureGrid
    hkt: np.ndarray
    n: int
    slq: SlqParams
    k: int | None = None
    knn_mode: str | None = None
    exact: bool = False
    normalized: bool = False
    created_with: str = __version__

    def __post_init__(self):
        arr = np.ascontiguousarray(self.hkt, dtype=np.float64)
        if arr.shape != (len(self.grid),):
            raise SchemaError(
                f"hkt length {arr.size} does not match grid length {len(self.grid)}"
            )
        object.__setattr__(self, "hkt", arr)

    def validate(self) -> None:
        """Check the spectral-signature invariants; raises on violation.

        Skipped for normalized descriptors, whose values are ratios against
        a null model and need not be monotone or bounded by n.
        """
        if not np.all(self.hkt > 0):
            raise ValueError("hkt values must be strictly positive")
        if self.normalized:
            return
        tol = 0.0 if self.exact else NOISE_TOL * self.n
        if np.any(np.diff(self.hkt) > tol):
            raise ValueError("hkt must be non-increasing in t")
        if np.any(self.hkt > self.n + tol):
            raise ValueError("hkt must not exceed the sample count")


def save_descriptor(desc: HeatTraceDescriptor, path, extra: dict | None = None) -> None:
    """Write schema-v1 JSON. `extra` adds top-level string fields (used by
    the CLI cache); the loader ignores them."""
    Path(path).write_text(descriptor_to_json(desc, extra))


def descriptor_to_json(desc: HeatTraceDescriptor, extra: dict | None = None) -> str:
    if desc.k is None or desc.knn_mode is None:
        raise SchemaError("descriptor lacks graph parameters (k, knn_mode); cannot serialize")
    fields = [
        f'"version": {SCHEMA_VERSION}',
        f'"n": {desc.n}',
        f'"k": {desc.k}',
        f'"knn_mode": "{desc.knn_mode}"',
        f'"m": {desc.slq.m}',
        f'"nv": {desc.slq.n_v}',
        f'"probe": "{desc.slq.probe_dist}"',
        f'"vr": "{desc.slq.variance_reduction}"',
        f'"seed": {desc.slq.seed}',
        '"grid": [' + ", ".join(format_float(v) for v in desc.grid.values) + "]",
        '"hkt": [' + ", ".join(format_float(v) for v in desc.hkt) + "]",
        f'"exact": {"true" if desc.exact else "false"}',
        f'"normalized": {"true" if desc.normalized else "false"}',
        f'"created_with": {json.dumps(desc.created_with)}',
    ]
    for key, val in (extra or {}).items():
        fields.append(f"{json.dumps(key)}: {json.dumps(val)}")
    return "{" + ", ".join(fields) + "}\n"


def load_descriptor(path) -> HeatTraceDescriptor:
    return descriptor_from_json(Path(path).read_text())


def _require(obj: dict, key: str, kind) -> object:
    if key not in obj:
        raise SchemaError(f"missing required key {key!r}")
    val = obj[key]
    if kind is float:
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise SchemaError(f"key {key!r} must be a number")
        return float(val)
    if not isinstance(val, kind) or (kind is int and isinstance(val, bool)):
        raise SchemaError(f"key {key!r} has wrong type {type(val).__name__}")
    return val


def descriptor_from_json(text: str) -> HeatTraceDescriptor:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"not valid JSON: {e}") from None
    if not isinstance(obj, dict):
        raise SchemaError("descriptor JSON must be an object")
    version = _require(obj, "version", int)
    if version != SCHEMA_VERSION:
        raise VersionMismatch(f"unsupported descriptor version {version}")
    n = _require(obj, "n", int)
    k = _require(obj, "k", int)
    knn_mode = _require(obj, "knn_mode", str)
    if knn_mode not in KNN_MODES:
        raise SchemaError(f"knn_mode must be one of {KNN_MODES}")
    probe = _require(obj, "probe", str)
    if probe not in PROBE_DISTS:
        raise SchemaError(f"probe must be one of {PROBE_DISTS}")
    vr = _require(obj, "vr", str)
    if vr not in VR_MODES:
        raise SchemaError(f"vr must be one of {VR_MODES}")
    grid_raw = _require(obj, "grid", list)
    hkt_raw = _require(obj, "hkt", list)
    if len(grid_raw) != len(hkt_raw):
        raise SchemaError("grid and hkt must have equal length")
    for name, seq in (("grid", grid_raw), ("hkt", hkt_raw)):
        for v in seq:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise SchemaError(f"{name} entries must be numbers")
    if n < 1:
        raise SchemaError("n must be >= 1")
    try:
        grid = TemperatureGrid(np.array(grid_raw, dtype=np.float64))
        params = SlqParams(
            m=_require(obj, "m", int),
            n_v=_require(obj, "nv", int),
            probe_dist=probe,
            seed=_require(obj, "seed", int),
            variance_reduction=vr,
        )
    except ValueError as e:
        raise SchemaError(str(e)) from None
    return HeatTraceDescriptor(
        grid=grid,
        hkt=np.array(hkt_raw, dtype=np.float64),
        n=n,
        slq=params,
        k=k,
        knn_mode=knn_mode,
        exact=bool(_require(obj, "exact", bool)),
        normalized=bool(_require(obj, "normalized", bool)),
        created_with=str(obj.get("created_with", "unknown")),
    )


def with_graph_params(
    desc: HeatTraceDescriptor, k: int, knn_mode: str
) -> HeatTraceDescriptor:
    return replace(desc, k=k, knn_mode=knn_mode)
