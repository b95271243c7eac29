"""Intrinsic multi-scale distance between point clouds.

Pipeline: kNN graph (OR-construction) -> symmetric normalized Laplacian ->
heat-kernel trace via stochastic Lanczos quadrature -> scale-weighted
sup-gap between trace signatures. FID and KID ship as extrinsic baselines,
and a dense spectral oracle backs every estimate for verification.
"""

__version__ = "0.1.0"

from .baselines import GaussianSummary, fid, gaussian_summary, kid
from .config import (
    DescriptorConfig,
    SlqParams,
    TemperatureGrid,
    default_grid,
)
from .descriptor import (
    HeatTraceDescriptor,
    descriptor_from_json,
    descriptor_to_json,
    load_descriptor,
    save_descriptor,
)
from .errors import (
    DegenerateNullModel,
    DimensionMismatch,
    EmptyInput,
    GridMismatch,
    ImdError,
    InvalidK,
    NonFiniteValue,
    NonUnitStartVector,
    ParseError,
    SampleSizeMismatchWarning,
    SampleTooLarge,
    SchemaError,
    TooLargeForOracle,
    VersionMismatch,
)
from .knn import KnnGraph, knn_approx, knn_exact
from .laplacian import SparseLaplacian, laplacian
from .metric import (
    ImdReport,
    describe_pipeline,
    er_normalize,
    imdesc,
    imdist,
    null_model_spectrum,
    scaling_weights,
)
from .pointcloud import PointCloud, load_pointcloud, save_pointcloud, subsample
from .slq import (
    QuadratureSet,
    evaluate_heat_trace,
    exact_spectrum,
    heat_trace,
    heat_trace_exact,
    lanczos,
    lanczos_error_bound,
    quadrature_from_tridiagonal,
    quadrature_sets,
)

__all__ = [
    "__version__",
    "DegenerateNullModel", "DimensionMismatch", "EmptyInput", "GridMismatch",
    "ImdError", "InvalidK", "NonFiniteValue", "NonUnitStartVector",
    "ParseError", "SampleSizeMismatchWarning", "SampleTooLarge", "SchemaError",
    "TooLargeForOracle", "VersionMismatch",
    "PointCloud", "load_pointcloud", "save_pointcloud", "subsample",
    "KnnGraph", "knn_exact", "knn_approx",
    "SparseLaplacian", "laplacian",
    "SlqParams", "TemperatureGrid", "DescriptorConfig", "default_grid",
    "QuadratureSet", "lanczos", "quadrature_from_tridiagonal",
    "quadrature_sets", "evaluate_heat_trace", "heat_trace",
    "heat_trace_exact", "exact_spectrum", "lanczos_error_bound",
    "HeatTraceDescriptor", "save_descriptor", "load_descriptor",
    "descriptor_to_json", "descriptor_from_json",
    "ImdReport", "imdesc", "imdist", "describe_pipeline", "er_normalize",
    "null_model_spectrum", "scaling_weights",
    "GaussianSummary", "gaussian_summary", "fid", "kid",
]
