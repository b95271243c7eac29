"""FID and KID reference implementations on raw feature matrices.

Both are extrinsic: FID sees only means and covariances, KID the first
three moments through a cubic polynomial kernel. They serve as the
side-by-side baselines for the intrinsic distance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .pointcloud import PointCloud


@dataclass(frozen=True)
class GaussianSummary:
    """Sample mean and covariance (1/(n-1) normalization)."""

    mean: np.ndarray
    cov: np.ndarray


def _as_matrix(x) -> np.ndarray:
    data = x.data if isinstance(x, PointCloud) else np.asarray(x, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError(f"expected an n x d matrix, got shape {data.shape}")
    return data


def _check_pair(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[1] != y.shape[1]:
        raise DimensionMismatch(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    if x.shape[0] < 2 or y.shape[0] < 2:
        raise ValueError("need at least 2 samples per side")


def gaussian_summary(x) -> GaussianSummary:
    data = _as_matrix(x)
    if data.shape[0] < 2:
        raise ValueError("need at least 2 samples to estimate a covariance")
    mean = data.mean(axis=0)
    centered = data - mean
    cov = centered.T @ centered / (data.shape[0] - 1)
    cov = 0.5 * (cov + cov.T)
    return GaussianSummary(mean=mean, cov=cov)


def _sqrt_psd(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    root = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * root) @ vecs.T


def fid(x, y) -> float:
    """Frechet (Wasserstein-2) distance between Gaussian fits:

        ||mu_x - mu_y||^2 + tr(S_x + S_y - 2 (S_x S_y)^{1/2}).

    The cross term is evaluated through the eigenvalues of the symmetrized
    product S_x^{1/2} S_y S_x^{1/2}, with negative eigenvalues clamped to
    zero, so the result is real and PSD-safe.
    """
    xm, ym = _as_matrix(x), _as_matrix(y)
    _check_pair(xm, ym)
    gx, gy = gaussian_summary(xm), gaussian_summary(ym)
    root_x = _sqrt_psd(gx.cov)
    inner = root_x @ gy.cov @ root_x
    inner = 0.5 * (inner + inner.T)
    cross = np.sqrt(np.clip(np.linalg.eigvalsh(inner), 0.0, None)).sum()
    delta = gx.mean - gy.mean
    return float(delta @ delta + np.trace(gx.cov) + np.trace(gy.cov) - 2.0 * cross)


def _poly_kernel(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (x @ y.T / x.shape[1] + 1.0) ** 3


def kid(x, y) -> float:
    """Unbiased kernel MMD^2 with the cubic kernel (x.y / d + 1)^3:
    off-diagonal means of the within blocks minus twice the cross mean."""
    xm, ym = _as_matrix(x), _as_matrix(y)
    _check_pair(xm, ym)
    n, m = xm.shape[0], ym.shape[0]
    kxx = _poly_kernel(xm, xm)
    kyy = _poly_kernel(ym, ym)
    kxy = _poly_kernel(xm, ym)
    term_x = (kxx.sum() - np.trace(kxx)) / (n * (n - 1))
    term_y = (kyy.sum() - np.trace(kyy)) / (m * (m - 1))
    return float(term_x + term_y - 2.0 * kxy.mean())
