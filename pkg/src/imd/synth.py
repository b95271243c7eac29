"""Synthetic datasets for the acceptance experiments.

All generators draw from SplitMix64 streams, so a (kind, n, seed) triple
produces identical files on every platform.
"""
from __future__ import annotations

import numpy as np

from .pointcloud import PointCloud
from .rng import gaussian, substream_seed, uniform01

TORUS_MAJOR = 2.0
TORUS_MINOR = 0.5


def blob(n: int, d: int = 2, seed: int = 0) -> PointCloud:
    """Standard normal cloud."""
    return PointCloud(gaussian(seed, n * d).reshape(n, d))


def clusters(
    n: int, d: int = 2, n_clusters: int = 10, seed: int = 0, separation: float = 6.0
) -> PointCloud:
    """Mixture of unit-variance Gaussian clusters with round-robin
    assignment; centers are a scaled normal draw."""
    centers = gaussian(substream_seed(seed, 0), n_clusters * d).reshape(n_clusters, d)
    centers *= separation
    pts = gaussian(substream_seed(seed, 1), n * d).reshape(n, d)
    pts += centers[np.arange(n) % n_clusters]
    return PointCloud(pts)


def torus(
    n: int,
    seed: int = 0,
    major_radius: float = TORUS_MAJOR,
    minor_radius: float = TORUS_MINOR,
) -> PointCloud:
    """Points on the torus surface (sqrt(x^2+y^2) - R)^2 + z^2 = r^2,
    uniform in the two angles."""
    u = 2.0 * np.pi * uniform01(substream_seed(seed, 0), n)
    v = 2.0 * np.pi * uniform01(substream_seed(seed, 1), n)
    ring = major_radius + minor_radius * np.cos(v)
    pts = np.stack(
        [ring * np.cos(u), ring * np.sin(u), minor_radius * np.sin(v)], axis=1
    )
    return PointCloud(pts)


def torus_holefill(
    n: int,
    seed: int = 0,
    fill_fraction: float = 0.05,
    major_radius: float = TORUS_MAJOR,
    minor_radius: float = TORUS_MINOR,
) -> PointCloud:
    """Torus with a fraction of the points relocated into the central hole
    (a flat disk at z = 0), mimicking a generator that puts mass where the
    data manifold has none."""
    n_fill = int(round(fill_fraction * n))
    surface = torus(n - n_fill, seed, major_radius, minor_radius)
    if n_fill == 0:
        return surface
    radius = 0.8 * (major_radius - minor_radius)
    rho = radius * np.sqrt(uniform01(substream_seed(seed, 2), n_fill))
    phi = 2.0 * np.pi * uniform01(substream_seed(seed, 3), n_fill)
    fill = np.stack([rho * np.cos(phi), rho * np.sin(phi), np.zeros(n_fill)], axis=1)
    return PointCloud(np.vstack([surface.data, fill]))


def _mirrored_ring(half: int, seed: int, radial_sigma: float) -> np.ndarray:
    phi = 2.0 * np.pi * uniform01(substream_seed(seed, 0), half)
    rho = 1.0 + radial_sigma * gaussian(substream_seed(seed, 1), half)
    pts = np.stack([rho * np.cos(phi), rho * np.sin(phi)], axis=1)
    return np.vstack([pts, -pts])


def _mirrored_blob(half: int, seed: int) -> np.ndarray:
    pts = gaussian(substream_seed(seed, 2), half * 2).reshape(half, 2)
    return np.vstack([pts, -pts])


def moments_matched_pair(
    n: int, seed: int = 0, radial_sigma: float = 0.1
) -> tuple[PointCloud, PointCloud]:
    """A ring and a Gaussian blob sharing mean, covariance, and third
    central moments.

    Both clouds are antipodally symmetric (each point paired with its
    mirror image), which zeroes every odd sample moment; the blob is then
    recolored so its sample covariance equals the ring's exactly. The two
    clouds agree in every moment FID and KID can see, yet one is a loop and
    the other a disk. n is rounded down to an even count.
    """
    half = n // 2
    ring = _mirrored_ring(half, seed, radial_sigma)
    raw = _mirrored_blob(half, seed)
    cov_ring = ring.T @ ring / (ring.shape[0] - 1)
    cov_raw = raw.T @ raw / (raw.shape[0] - 1)
    vals, vecs = np.linalg.eigh(cov_raw)
    whiten = (vecs / np.sqrt(vals)) @ vecs.T
    vals_r, vecs_r = np.linalg.eigh(cov_ring)
    color = (vecs_r * np.sqrt(vals_r)) @ vecs_r.T
    matched = raw @ whiten @ color
    return PointCloud(ring), PointCloud(matched)


GENERATORS = {
    "blob": blob,
    "clusters": clusters,
    "torus": torus,
    "torus_holefill": torus_holefill,
    "moments_matched_pair": moments_matched_pair,
}
