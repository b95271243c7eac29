"""Symmetric normalized graph Laplacian in sparse form."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numba import njit

from .knn import KnnGraph


@dataclass(frozen=True)
class SparseLaplacian:
    """L = I - D^{-1/2} A D^{-1/2} with explicit symmetric storage.

    Isolated vertices get a zero diagonal (their row is empty), which keeps
    the multiplicity of eigenvalue 0 equal to the number of connected
    components.
    """

    matrix: sp.csr_matrix
    component_count: int
    isolated_count: int

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def trace(self) -> float:
        return float(self.n - self.isolated_count)

    def frobenius_sq(self) -> float:
        """||L||_F^2 from the stored entries."""
        return float(np.einsum("i,i->", self.matrix.data, self.matrix.data))

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


@njit(cache=True)
def _count_components(n, edges):  # pragma: no cover - exercised via laplacian
    parent = np.arange(n, dtype=np.int64)
    for e in range(edges.shape[0]):
        a, b = edges[e, 0], edges[e, 1]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
    count = 0
    for v in range(n):
        if parent[v] == v:
            count += 1
    return count


def laplacian(g: KnnGraph) -> SparseLaplacian:
    """Assemble the normalized Laplacian; symmetry is exact because each
    off-diagonal value is computed once and stored in both triangles."""
    n = g.n
    deg = g.degrees()
    inv_sqrt = np.zeros(n)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    i, j = g.edges[:, 0], g.edges[:, 1]
    off = -inv_sqrt[i] * inv_sqrt[j]
    diag_idx = np.flatnonzero(nz).astype(np.int64)
    rows = np.concatenate([i, j, diag_idx])
    cols = np.concatenate([j, i, diag_idx])
    vals = np.concatenate([off, off, np.ones(diag_idx.size)])
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    comp = _count_components(n, g.edges) if g.edges.size else n
    return SparseLaplacian(
        matrix=mat,
        component_count=int(comp),
        isolated_count=int(n - nz.sum()),
    )
