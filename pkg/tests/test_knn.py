import numpy as np
import pytest

from imd.errors import InvalidK
from imd.knn import knn_approx, knn_exact
from imd.pointcloud import PointCloud
from imd.rng import gaussian


def brute_force_edges(data: np.ndarray, k: int) -> set:
    """Independent reference: full distance matrix, lexicographic
    (distance, index) ordering, OR-union of directed relations."""
    n = data.shape[0]
    edges = set()
    for i in range(n):
        d2 = ((data - data[i]) ** 2).sum(axis=1)
        order = sorted((d2[j], j) for j in range(n) if j != i)
        for _, j in order[:k]:
            edges.add((min(i, j), max(i, j)))
    return edges


def cloud(n, d, seed):
    return PointCloud(gaussian(seed, n * d).reshape(n, d))


def test_collinear_hand_case():
    pc = PointCloud(np.array([[0.0], [1.0], [10.0]]))
    g = knn_exact(pc, 1)
    assert set(map(tuple, g.edges)) == {(0, 1), (1, 2)}


def test_full_k_gives_complete_graph():
    pc = cloud(7, 3, seed=1)
    g = knn_exact(pc, 6)
    assert g.edges.shape[0] == 21


def test_exact_matches_brute_force_oracle():
    pc = PointCloud(np.random.default_rng(42).uniform(size=(100, 2)))
    g = knn_exact(pc, 5)
    assert set(map(tuple, g.edges)) == brute_force_edges(pc.data, 5)


def test_tie_break_by_index():
    # three duplicate points: each picks the duplicate with smallest index
    pc = PointCloud(np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [5.0, 5.0]]))
    g = knn_exact(pc, 1)
    assert set(map(tuple, g.edges)) == {(0, 1), (0, 2), (0, 3)}


def test_invalid_k():
    pc = cloud(5, 2, seed=3)
    with pytest.raises(InvalidK):
        knn_exact(pc, 5)
    with pytest.raises(InvalidK):
        knn_exact(pc, 0)
    with pytest.raises(InvalidK):
        knn_approx(pc, 7, seed=0)


def test_isometry_invariance():
    pc = cloud(150, 3, seed=9)
    rng = np.random.default_rng(5)
    base = set(map(tuple, knn_exact(pc, 5).edges))
    for _ in range(3):
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        moved = PointCloud(pc.data @ q.T + rng.normal(size=3))
        assert set(map(tuple, knn_exact(moved, 5).edges)) == base


def test_permutation_equivariance():
    pc = cloud(80, 2, seed=13)
    perm = np.random.default_rng(3).permutation(80)
    base = set(map(tuple, knn_exact(pc, 4).edges))
    permuted = knn_exact(PointCloud(pc.data[perm]), 4)
    inverse = np.argsort(perm)
    mapped = {
        (min(perm[i], perm[j]), max(perm[i], perm[j]))
        for i, j in permuted.edges
    }
    del inverse
    assert mapped == base


def test_degrees_at_least_k():
    pc = cloud(300, 2, seed=21)
    g = knn_exact(pc, 5)
    assert g.degrees().min() >= 5


def test_approx_recall_against_exact():
    pc = cloud(200, 8, seed=5)
    approx = knn_approx(pc, 5, seed=11)
    exact = set(map(tuple, knn_exact(pc, 5).edges))
    hit = len(set(map(tuple, approx.edges)) & exact)
    assert hit / len(exact) >= 0.90


def test_approx_deterministic():
    pc = cloud(400, 4, seed=17)
    a = knn_approx(pc, 5, seed=23)
    b = knn_approx(pc, 5, seed=23)
    assert np.array_equal(a.edges, b.edges)


def test_approx_tiny_n_falls_back_to_complete():
    pc = cloud(6, 2, seed=2)
    g = knn_approx(pc, 5, seed=1)
    assert g.edges.shape[0] == 15


def test_edge_dump(tmp_path):
    pc = cloud(10, 2, seed=4)
    g = knn_exact(pc, 2)
    out = tmp_path / "edges.txt"
    g.dump_edges(out)
    lines = out.read_text().splitlines()
    assert len(lines) == g.edges.shape[0]
    assert lines[0].split() == [str(g.edges[0, 0]), str(g.edges[0, 1])]
