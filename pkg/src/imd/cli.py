"""Command-line surface: descriptor construction, distances, baselines,
and synthetic datasets.

Results go to stdout, diagnostics to stderr. Exit codes: 0 success,
1 I/O failure, 2 validation failure, 3 grid mismatch.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    DEFAULT_T_MAX,
    DEFAULT_T_MIN,
    DEFAULT_T_STEPS,
    DescriptorConfig,
    SlqParams,
    TemperatureGrid,
)
from .descriptor import (
    SCHEMA_VERSION,
    HeatTraceDescriptor,
    descriptor_to_json,
    descriptor_from_json,
    load_descriptor,
    save_descriptor,
)
from .errors import GridMismatch, ImdError
from .metric import describe_pipeline, er_normalize, imdist
from .pointcloud import IMDM_VERSION, format_float, load_pointcloud, save_pointcloud, subsample
from .rng import REPEAT_STREAM, SUBSAMPLE_STREAM, substream_seed
from .slq import DEFAULT_ORACLE_CAP
from . import synth


def _err(msg: str) -> None:
    print(f"imd: {msg}", file=sys.stderr)


def _set_threads(threads: int | None) -> None:
    if threads is None:
        env = os.environ.get("IMD_THREADS")
        threads = int(env) if env else None
    if threads is not None:
        if threads < 1:
            raise ValueError("--threads must be >= 1")
        import numba

        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=5, help="kNN neighbor count")
    p.add_argument("--knn", choices=["exact", "approx"], default="exact")
    p.add_argument("--m", type=int, default=10, help="Lanczos steps")
    p.add_argument("--nv", type=int, default=100, help="probe vectors")
    p.add_argument("--probe", choices=["rademacher", "gaussian"], default="rademacher")
    p.add_argument("--vr", choices=["linear_cv", "off", "taylor2"], default="linear_cv")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--t-min", type=float, default=DEFAULT_T_MIN)
    p.add_argument("--t-max", type=float, default=DEFAULT_T_MAX)
    p.add_argument("--t-steps", type=int, default=DEFAULT_T_STEPS)
    p.add_argument("--subsample", type=int, default=None, metavar="M",
                   help="subsample M points before describing")
    p.add_argument("--exact-trace", action="store_true",
                   help="dense-eigendecomposition oracle instead of SLQ")
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP)
    p.add_argument("--normalize", choices=["er"], default=None,
                   help="divide hkt by the random-graph null model")
    p.add_argument("--format", choices=["auto", "csv", "imdm"], default="auto")
    p.add_argument("--header", action="store_true", help="skip one CSV header line")
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap (falls back to IMD_THREADS)")


def _validate_pipeline_flags(args) -> None:
    for name, value, low in (
        ("--k", args.k, 1),
        ("--m", args.m, 1),
        ("--nv", args.nv, 1),
        ("--t-steps", args.t_steps, 2),
    ):
        if value < low:
            raise ValueError(f"{name} must be >= {low}, got {value}")
    if not 0 < args.t_min < args.t_max:
        raise ValueError("--t-min and --t-max must satisfy 0 < t-min < t-max")
    if args.subsample is not None and args.subsample < 1:
        raise ValueError("--subsample must be >= 1")
    if not 0 <= args.seed < 2**64:
        raise ValueError("--seed must fit in 64 bits")


def _config_from_args(args, seed: int | None = None) -> DescriptorConfig:
    return DescriptorConfig(
        k=args.k,
        knn_mode=args.knn,
        slq=SlqParams(
            m=args.m,
            n_v=args.nv,
            probe_dist=args.probe,
            seed=args.seed if seed is None else seed,
            variance_reduction=args.vr,
        ),
        grid=TemperatureGrid.log_spaced(args.t_min, args.t_max, args.t_steps),
    )


def _flag_fingerprint(args, seed: int | None = None) -> str:
    cfg = (
        args.k, args.knn, args.m, args.nv, args.probe, args.vr,
        args.seed if seed is None else seed,
        args.t_min, args.t_max, args.t_steps, args.subsample,
        args.exact_trace, bool(args.header),
    )
    return repr(cfg)


def _load_points(args, path: str):
    pc = load_pointcloud(path, format=args.format, header=args.header)
    if args.subsample is not None:
        pc = subsample(pc, args.subsample, substream_seed(args.seed, SUBSAMPLE_STREAM))
    return pc


def cmd_desc(args) -> int:
    _validate_pipeline_flags(args)
    _set_threads(args.threads)
    start = time.perf_counter()
    pc = _load_points(args, args.input)
    cfg = _config_from_args(args)
    result = describe_pipeline(pc, cfg, exact_trace=args.exact_trace,
                               oracle_cap=args.oracle_cap)
    desc = result.descriptor
    if args.normalize == "er":
        desc = er_normalize(desc)
    out = args.output or (str(args.input) + ".imd.json")
    save_descriptor(desc, out)
    wall = time.perf_counter() - start
    _err(
        f"n={pc.n} d={pc.d} k={cfg.k} components={result.lap.component_count} "
        f"wall={wall:.2f}s -> {out}"
    )
    return 0


def _is_descriptor_file(path: str) -> bool:
    if path == "-":
        return False
    try:
        with open(path, "rb") as fh:
            head = fh.read(64).lstrip()
        return head.startswith(b"{")
    except OSError:
        raise


def _describe_cached(args, path: str, seed: int | None = None) -> HeatTraceDescriptor:
    use_cache = not args.no_cache and path != "-" and seed is None
    key = ""
    cache_path = Path(str(path) + ".imd.json")
    if use_cache:
        digest = hashlib.sha256()
        digest.update(Path(path).read_bytes())
        digest.update(_flag_fingerprint(args).encode())
        key = digest.hexdigest()
        if cache_path.exists():
            try:
                obj = json.loads(cache_path.read_text())
                if isinstance(obj, dict) and obj.get("cache_key") == key:
                    return descriptor_from_json(cache_path.read_text())
            except (ValueError, ImdError):
                pass  # stale or foreign file: recompute and overwrite
    pc = _load_points(args, path)
    if seed is not None and args.subsample is not None:
        pc = load_pointcloud(path, format=args.format, header=args.header)
        pc = subsample(pc, args.subsample, substream_seed(seed, SUBSAMPLE_STREAM))
    cfg = _config_from_args(args, seed=seed)
    desc = describe_pipeline(pc, cfg, exact_trace=args.exact_trace,
                             oracle_cap=args.oracle_cap).descriptor
    if use_cache:
        save_descriptor(desc, cache_path, extra={"cache_key": key})
    return desc


def _resolve_descriptor(args, path: str, seed: int | None = None) -> HeatTraceDescriptor:
    if _is_descriptor_file(path):
        if seed is not None:
            raise ValueError("--repeat needs point-file inputs, not descriptor files")
        return load_descriptor(path)
    return _describe_cached(args, path, seed=seed)


def _normal_quantile(p: float) -> float:
    from scipy.stats import norm

    return float(norm.ppf(p))


def cmd_dist(args) -> int:
    _validate_pipeline_flags(args)
    _set_threads(args.threads)
    if args.repeat is not None and args.repeat < 2:
        raise ValueError("--repeat must be >= 2")
    if not 0 < args.ci < 1:
        raise ValueError("--ci must be in (0, 1)")

    def one(desc_a, desc_b):
        if args.normalize == "er":
            if not desc_a.normalized:
                desc_a = er_normalize(desc_a)
            if not desc_b.normalized:
                desc_b = er_normalize(desc_b)
        return imdist(desc_a, desc_b)

    if args.repeat is None:
        report = one(_resolve_descriptor(args, args.a), _resolve_descriptor(args, args.b))
        if args.curve:
            grid = TemperatureGrid.log_spaced(args.t_min, args.t_max, args.t_steps)
            _write_curve(args.curve, grid.values, report.curve)
        if args.json:
            print(_report_json(report))
        else:
            print(format_float(report.distance))
        return 0

    values = []
    for r in range(args.repeat):
        seed_r = substream_seed(args.seed, REPEAT_STREAM + r)
        rep = one(
            _resolve_descriptor(args, args.a, seed=seed_r),
            _resolve_descriptor(args, args.b, seed=substream_seed(seed_r, 1)),
        )
        values.append(rep.distance)
    arr = np.array(values)
    mean = float(arr.mean())
    half = float(
        _normal_quantile(0.5 + args.ci / 2) * arr.std(ddof=1) / np.sqrt(len(arr))
    )
    if args.json:
        print(json.dumps({
            "mean": mean, "ci_half_width": half, "level": args.ci,
            "repeats": args.repeat, "values": values,
        }))
    else:
        print(f"{format_float(mean)} ± {format_float(half)}")
    return 0


def _report_json(report) -> str:
    return json.dumps({
        "distance": report.distance,
        "argmax_t": report.argmax_t,
        "normalized": report.normalized,
        "curve": [float(format_float(v)) for v in report.curve],
    })


def _write_curve(path, ts, curve) -> None:
    with open(path, "w") as fh:
        fh.write("t,weighted_difference\n")
        for t, v in zip(ts, curve):
            fh.write(f"{format_float(t)},{format_float(v)}\n")


def cmd_synth(args) -> int:
    if args.n < 10:
        raise ValueError("--n must be >= 10")
    if args.dim < 1:
        raise ValueError("--dim must be >= 1")
    out = Path(args.output or f"{args.kind}.csv")
    if args.kind == "moments_matched_pair":
        a, b = synth.moments_matched_pair(args.n, args.seed)
        path_a = out.with_name(out.stem + "_a" + (out.suffix or ".csv"))
        path_b = out.with_name(out.stem + "_b" + (out.suffix or ".csv"))
        save_pointcloud(a, path_a, format=args.format)
        save_pointcloud(b, path_b, format=args.format)
        _err(f"wrote {path_a} and {path_b}")
        return 0
    if args.kind == "blob":
        pc = synth.blob(args.n, d=args.dim, seed=args.seed)
    elif args.kind == "clusters":
        pc = synth.clusters(args.n, d=args.dim, n_clusters=args.clusters, seed=args.seed)
    elif args.kind == "torus":
        pc = synth.torus(args.n, seed=args.seed)
    else:
        pc = synth.torus_holefill(args.n, seed=args.seed)
    save_pointcloud(pc, out, format=args.format)
    _err(f"wrote {out}")
    return 0


def cmd_baseline(args) -> int:
    from .baselines import fid, kid

    x = load_pointcloud(args.a, format=args.format, header=args.header)
    y = load_pointcloud(args.b, format=args.format, header=args.header)
    value = fid(x, y) if args.metric == "fid" else kid(x, y)
    print(format_float(value))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imd",
        description="Intrinsic multi-scale distance between point clouds",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"imd {__version__} (imdm format {IMDM_VERSION}, "
        f"descriptor schema {SCHEMA_VERSION})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_desc = sub.add_parser("desc", help="compute a heat-trace descriptor")
    p_desc.add_argument("input", help="point file (csv or imdm), or - for stdin")
    p_desc.add_argument("-o", "--output", default=None, help="descriptor path")
    _add_pipeline_flags(p_desc)
    p_desc.set_defaults(func=cmd_desc)

    p_dist = sub.add_parser("dist", help="distance between two inputs")
    p_dist.add_argument("a", help="descriptor json or point file")
    p_dist.add_argument("b", help="descriptor json or point file")
    p_dist.add_argument("--json", action="store_true", help="emit a full report")
    p_dist.add_argument("--curve", default=None, metavar="CSV",
                        help="dump the per-t weighted difference curve")
    p_dist.add_argument("--repeat", type=int, default=None, metavar="R",
                        help="rerun R times with derived seeds; print mean ± CI")
    p_dist.add_argument("--ci", type=float, default=0.99, help="confidence level")
    p_dist.add_argument("--no-cache", action="store_true",
                        help="do not read/write <input>.imd.json sidecars")
    _add_pipeline_flags(p_dist)
    p_dist.set_defaults(func=cmd_dist)

    p_synth = sub.add_parser("synth", help="generate synthetic datasets")
    p_synth.add_argument("kind", choices=sorted(synth.GENERATORS))
    p_synth.add_argument("-n", type=int, required=True, help="number of points")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("-o", "--output", default=None)
    p_synth.add_argument("--dim", type=int, default=2, help="dimension (blob/clusters)")
    p_synth.add_argument("--clusters", type=int, default=10)
    p_synth.add_argument("--format", choices=["auto", "csv", "imdm"], default="auto")
    p_synth.set_defaults(func=cmd_synth)

    p_base = sub.add_parser("baseline", help="FID / KID between two point files")
    p_base.add_argument("metric", choices=["fid", "kid"])
    p_base.add_argument("a")
    p_base.add_argument("b")
    p_base.add_argument("--format", choices=["auto", "csv", "imdm"], default="auto")
    p_base.add_argument("--header", action="store_true")
    p_base.set_defaults(func=cmd_baseline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GridMismatch as e:
        _err(str(e))
        return 3
    except (ImdError, ValueError) as e:
        _err(str(e))
        return 2
    except OSError as e:
        _err(str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
