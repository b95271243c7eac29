import numpy as np
import scipy.linalg

from imd.knn import KnnGraph, knn_exact
from imd.laplacian import laplacian
from imd.pointcloud import PointCloud
from imd.rng import gaussian


def graph_from_edges(n, pairs, k=1):
    return KnnGraph(n=n, k=k, edges=np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2))


def test_single_edge_analytic():
    lap = laplacian(graph_from_edges(2, [(0, 1)]))
    assert np.array_equal(lap.dense(), [[1.0, -1.0], [-1.0, 1.0]])
    vals = np.linalg.eigvalsh(lap.dense())
    assert np.allclose(vals, [0.0, 2.0], atol=1e-12)


def test_triangle_spectrum():
    lap = laplacian(graph_from_edges(3, [(0, 1), (0, 2), (1, 2)], k=2))
    vals = scipy.linalg.eigvalsh(lap.dense())
    assert np.allclose(vals, [0.0, 1.5, 1.5], atol=1e-12)
    assert lap.component_count == 1


def test_two_disjoint_edges():
    lap = laplacian(graph_from_edges(4, [(0, 1), (2, 3)]))
    assert lap.component_count == 2
    vals = np.linalg.eigvalsh(lap.dense())
    assert (np.abs(vals) < 1e-12).sum() == 2


def test_isolated_vertex_zero_diagonal():
    lap = laplacian(graph_from_edges(3, [(0, 1)]))
    dense = lap.dense()
    assert dense[2, 2] == 0.0
    assert lap.isolated_count == 1
    assert lap.component_count == 2
    assert lap.trace() == 2.0


def random_lap(n, d, k, seed):
    pc = PointCloud(gaussian(seed, n * d).reshape(n, d))
    return laplacian(knn_exact(pc, k))


def test_symmetry_exact_and_psd():
    lap = random_lap(120, 3, 5, seed=31)
    mat = lap.matrix
    assert (mat != mat.T).nnz == 0
    vals = scipy.linalg.eigvalsh(lap.dense())
    assert vals.min() >= -1e-10
    assert vals.max() <= 2.0 + 1e-10


def test_trace_equals_nonisolated_count():
    lap = random_lap(200, 2, 4, seed=8)
    assert np.isclose(np.trace(lap.dense()), lap.trace())
    assert lap.trace() == 200.0


def test_eigenvalue_zero_multiplicity_matches_components():
    pts = np.vstack(
        [
            gaussian(1, 60).reshape(30, 2),
            gaussian(2, 60).reshape(30, 2) + 100.0,
            gaussian(3, 60).reshape(30, 2) - 100.0,
        ]
    )
    lap = laplacian(knn_exact(PointCloud(pts), 4))
    assert lap.component_count == 3
    vals = scipy.linalg.eigvalsh(lap.dense())
    assert (vals < 1e-10).sum() == 3


def test_frobenius_matches_dense():
    lap = random_lap(80, 2, 3, seed=10)
    assert np.isclose(lap.frobenius_sq(), (lap.dense() ** 2).sum(), rtol=1e-12)


def test_nnz_accounting():
    lap = laplacian(graph_from_edges(3, [(0, 1)]))
    # one edge stored twice plus two diagonal ones
    assert lap.nnz == 4
