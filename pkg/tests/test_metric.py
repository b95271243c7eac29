import math
import warnings

import numpy as np
import pytest

from imd.config import DescriptorConfig, SlqParams, TemperatureGrid
from imd.descriptor import HeatTraceDescriptor, descriptor_to_json
from imd.errors import (
    DegenerateNullModel,
    GridMismatch,
    SampleSizeMismatchWarning,
)
from imd.knn import knn_exact
from imd.laplacian import laplacian
from imd.metric import (
    er_normalize,
    imdesc,
    imdist,
    null_model_spectrum,
    scaling_weights,
)
from imd.pointcloud import PointCloud
from imd.rng import gaussian
from imd.slq import heat_trace_exact
from imd.synth import blob, clusters


def small_cfg(seed=5, k=4, steps=16, knn_mode="exact"):
    return DescriptorConfig(
        k=k,
        knn_mode=knn_mode,
        slq=SlqParams(n_v=20, seed=seed),
        grid=TemperatureGrid.log_spaced(0.1, 10.0, steps),
    )


def random_desc(n, seed, grid):
    """Descriptor from a random spectrum in [0, 2]; fast and exact."""
    vals = np.sort(
        np.concatenate([[0.0], 2.0 * gaussian(seed, n - 1) ** 2 / 4.0])
    )
    vals = np.clip(vals, 0.0, 2.0)
    hkt = np.exp(-np.outer(grid.values, vals)).sum(axis=1)
    return HeatTraceDescriptor(
        grid=grid, hkt=hkt, n=n, slq=SlqParams(), k=5, knn_mode="exact", exact=True
    )


class TestImdesc:
    def test_deterministic_bytes(self):
        pc = blob(120, d=2, seed=3)
        cfg = small_cfg()
        a = descriptor_to_json(imdesc(pc, cfg))
        b = descriptor_to_json(imdesc(pc, cfg))
        assert a == b

    def test_isometry_gives_identical_hkt(self):
        pc = blob(150, d=3, seed=11)
        cfg = small_cfg()
        rng = np.random.default_rng(0)
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        moved = PointCloud(pc.data @ q.T + rng.normal(size=3))
        a, b = imdesc(pc, cfg), imdesc(moved, cfg)
        assert np.array_equal(a.hkt, b.hkt)
        assert imdist(a, b).distance == 0.0

    def test_spectral_bounds_on_blob(self):
        pc = blob(400, d=2, seed=7)
        desc = imdesc(pc, small_cfg(steps=32))
        lap = laplacian(knn_exact(pc, 4))
        c = lap.component_count
        assert c < desc.hkt[0] < desc.n
        assert np.all(np.diff(desc.hkt) <= 1e-6 * desc.n)

    def test_approx_mode_runs(self):
        pc = blob(300, d=4, seed=9)
        desc = imdesc(pc, small_cfg(knn_mode="approx"))
        assert desc.knn_mode == "approx"
        assert desc.hkt.shape == (16,)


class TestImdist:
    def test_self_distance_zero(self):
        grid = TemperatureGrid.log_spaced(steps=64)
        d = random_desc(50, 3, grid)
        assert imdist(d, d).distance == 0.0

    def test_constant_offset_peaks_at_t_one(self):
        grid = TemperatureGrid(np.array([0.5, 1.0, 2.0]))
        a = random_desc(50, 1, grid)
        b = HeatTraceDescriptor(
            grid=grid, hkt=a.hkt + 1.0, n=50, slq=SlqParams(), k=5,
            knn_mode="exact", exact=True,
        )
        rep = imdist(a, b)
        assert rep.argmax_t == 1.0
        assert math.isclose(rep.distance, math.exp(-4.0), rel_tol=1e-12)

    def test_constant_offset_on_default_grid(self):
        grid = TemperatureGrid.log_spaced()
        a = random_desc(50, 2, grid)
        b = HeatTraceDescriptor(
            grid=grid, hkt=a.hkt + 1.0, n=50, slq=SlqParams(), k=5,
            knn_mode="exact", exact=True,
        )
        rep = imdist(a, b)
        # grid has no exact t=1 point; nearest neighbors bracket it
        assert math.isclose(rep.distance, math.exp(-4.0), rel_tol=5e-4)
        assert 0.98 < rep.argmax_t < 1.02

    def test_grid_mismatch(self):
        a = random_desc(20, 1, TemperatureGrid.log_spaced(steps=16))
        b = random_desc(20, 1, TemperatureGrid.log_spaced(steps=17))
        with pytest.raises(GridMismatch):
            imdist(a, b)

    def test_sample_size_warning(self):
        grid = TemperatureGrid.log_spaced(steps=16)
        a, b = random_desc(20, 1, grid), random_desc(30, 2, grid)
        with pytest.warns(SampleSizeMismatchWarning):
            imdist(a, b)

    def test_symmetry_exact_and_triangle(self):
        grid = TemperatureGrid.log_spaced(steps=64)
        for trial in range(300):
            n = 10 + (trial % 40)
            a = random_desc(n, 3 * trial + 1, grid)
            b = random_desc(n, 3 * trial + 2, grid)
            c = random_desc(n, 3 * trial + 3, grid)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                dab = imdist(a, b).distance
                dba = imdist(b, a).distance
                dac = imdist(a, c).distance
                dbc = imdist(b, c).distance
            assert dab == dba
            assert dac <= dab + dbc

    def test_curve_matches_definition(self):
        grid = TemperatureGrid.log_spaced(steps=32)
        a, b = random_desc(25, 5, grid), random_desc(25, 6, grid)
        rep = imdist(a, b)
        w = scaling_weights(grid.values)
        assert np.allclose(rep.curve, w * np.abs(a.hkt - b.hkt), rtol=1e-12)
        assert rep.distance == rep.curve.max()


class TestErNormalize:
    def test_null_spectrum_span(self):
        lam = null_model_spectrum(1000, 5)
        assert math.isclose(lam[0], 1.0 - 2.0 / math.sqrt(5.0), rel_tol=1e-12)
        assert math.isclose(lam[-1], 1.0 + 2.0 / math.sqrt(5.0), rel_tol=1e-12)
        assert 0.1055 < lam[0] < 0.1056
        assert 1.8944 < lam[-1] < 1.8945
        assert np.allclose(np.diff(lam), np.diff(lam)[0])

    def test_degenerate_degree(self):
        with pytest.raises(DegenerateNullModel):
            null_model_spectrum(10, 4)

    def test_descriptor_equal_to_null_gives_ones(self):
        grid = TemperatureGrid.log_spaced(steps=32)
        n, k = 200, 6
        lam = null_model_spectrum(n, k)
        hkt = np.exp(-np.outer(grid.values, lam)).sum(axis=1)
        desc = HeatTraceDescriptor(
            grid=grid, hkt=hkt, n=n, slq=SlqParams(), k=k, knn_mode="exact", exact=True
        )
        normed = er_normalize(desc)
        assert normed.normalized
        assert np.allclose(normed.hkt, 1.0, rtol=1e-12)

    def test_double_normalization_rejected(self):
        grid = TemperatureGrid.log_spaced(steps=8)
        desc = er_normalize(random_desc(40, 2, grid))
        with pytest.raises(ValueError):
            er_normalize(desc)

    def test_clustered_data_shows_more_structure_than_blob(self):
        # 10-cluster data keeps ~cluster-count heat mass at large t; a single
        # blob decays toward 1. Normalized curves order accordingly.
        grid = TemperatureGrid(np.array([100.0]))
        n = 2000
        clustered = clusters(n, d=2, n_clusters=10, seed=3, separation=40.0)
        single = blob(n, d=2, seed=4)
        desc_c = heat_trace_exact(laplacian(knn_exact(clustered, 5)), grid, k=5, knn_mode="exact")
        desc_b = heat_trace_exact(laplacian(knn_exact(single, 5)), grid, k=5, knn_mode="exact")
        norm_c = er_normalize(desc_c).hkt[0]
        norm_b = er_normalize(desc_b).hkt[0]
        assert norm_c > norm_b
        lam = null_model_spectrum(n, 5)
        null_val = np.exp(-100.0 * lam).sum()
        comp_c = laplacian(knn_exact(clustered, 5)).component_count
        assert norm_c == pytest.approx(desc_c.hkt[0] / null_val, rel=1e-12)
        assert desc_c.hkt[0] >= comp_c  # at least one unit of mass per component
