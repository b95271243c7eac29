"""kNN graph construction: exact brute force and NN-descent approximation.

Both paths emit the same OR-graph: an undirected edge whenever i is among
the k nearest neighbors of j or vice versa. Squared Euclidean distances
are accumulated coordinate-by-coordinate in float64 (no gram-matrix
expansion), and distance ties break toward the smaller point index, so the
edge set is a pure function of the input coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .errors import InvalidK
from .pointcloud import PointCloud
from .rng import GOLDEN, _MASK, _MIX1, _MIX2

_U = np.uint64


@dataclass(frozen=True)
class KnnGraph:
    """Undirected OR-graph: unique edges (i, j) with i < j, sorted."""

    n: int
    k: int
    edges: np.ndarray  # (E, 2) int64

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def dump_edges(self, path) -> None:
        """Debug dump, one sorted "i j" pair per line."""
        with open(path, "w") as fh:
            for i, j in self.edges:
                fh.write(f"{i} {j}\n")


@njit(cache=True, parallel=True)
def _brute_neighbors(x, k):  # pragma: no cover - exercised via knn_exact
    n, d = x.shape
    out = np.empty((n, k), dtype=np.int64)
    for i in prange(n):
        best_d = np.full(k, np.inf)
        best_j = np.full(k, n, dtype=np.int64)
        for j in range(n):
            if j == i:
                continue
            dist = 0.0
            for c in range(d):
                t = x[i, c] - x[j, c]
                dist += t * t
            if dist < best_d[k - 1] or (dist == best_d[k - 1] and j < best_j[k - 1]):
                p = k - 1
                while p > 0 and (
                    best_d[p - 1] > dist or (best_d[p - 1] == dist and best_j[p - 1] > j)
                ):
                    best_d[p] = best_d[p - 1]
                    best_j[p] = best_j[p - 1]
                    p -= 1
                best_d[p] = dist
                best_j[p] = j
        out[i] = best_j
    return out


@njit(cache=True, inline="always")
def _sm_next(state):
    state = state + _U(GOLDEN)
    z = state
    z = (z ^ (z >> _U(30))) * _U(_MIX1)
    z = (z ^ (z >> _U(27))) * _U(_MIX2)
    return state, z ^ (z >> _U(31))


@njit(cache=True, inline="always")
def _sqdist(x, a, b):
    acc = 0.0
    for c in range(x.shape[1]):
        t = x[a, c] - x[b, c]
        acc += t * t
    return acc


@njit(cache=True)
def _heap_push(ids, dists, flags, v, u, d):
    """Replace the worst entry of v's list with (u, d) if it improves it.

    Lists are unsorted; "worst" is lexicographic (distance, id). Returns 1
    if the list changed.
    """
    k = ids.shape[1]
    worst = 0
    for s in range(k):
        if ids[v, s] == u:
            return 0
        if dists[v, s] > dists[v, worst] or (
            dists[v, s] == dists[v, worst] and ids[v, s] > ids[v, worst]
        ):
            worst = s
    if d < dists[v, worst] or (d == dists[v, worst] and u < ids[v, worst]):
        ids[v, worst] = u
        dists[v, worst] = d
        flags[v, worst] = True
        return 1
    return 0


@njit(cache=True)
def _nn_descent(x, k, seed, rho, iters, delta):  # pragma: no cover
    n = x.shape[0]
    state = _U(seed)

    ids = np.empty((n, k), dtype=np.int64)
    dists = np.empty((n, k), dtype=np.float64)
    flags = np.ones((n, k), dtype=np.bool_)

    # Random distinct initial candidates per vertex.
    for v in range(n):
        filled = 0
        while filled < k:
            state, r = _sm_next(state)
            u = np.int64(r % _U(n))
            if u == v:
                continue
            dup = False
            for s in range(filled):
                if ids[v, s] == u:
                    dup = True
                    break
            if dup:
                continue
            ids[v, filled] = u
            dists[v, filled] = _sqdist(x, v, u)
            filled += 1

    cap = max(1, int(np.ceil(rho * k)))
    fwd_new = np.empty((n, cap), dtype=np.int64)
    fwd_new_len = np.zeros(n, dtype=np.int64)
    fwd_old = np.empty((n, k), dtype=np.int64)
    fwd_old_len = np.zeros(n, dtype=np.int64)
    pos = np.empty(k, dtype=np.int64)

    for _ in range(iters):
        # Partition each list into sampled-new / old; sampled entries lose
        # their flag (they will have participated in a join).
        for v in range(n):
            nn = 0
            for s in range(k):
                if flags[v, s]:
                    pos[nn] = s
                    nn += 1
            take = nn if nn <= cap else cap
            if nn > cap:
                for t in range(take):  # partial Fisher-Yates over flag positions
                    state, r = _sm_next(state)
                    j = t + np.int64(r % _U(nn - t))
                    tmp = pos[t]
                    pos[t] = pos[j]
                    pos[j] = tmp
            for t in range(take):
                fwd_new[v, t] = ids[v, pos[t]]
                flags[v, pos[t]] = False
            fwd_new_len[v] = take
            no = 0
            for s in range(k):
                if not flags[v, s]:
                    dup = False
                    for t in range(take):
                        if fwd_new[v, t] == ids[v, s]:
                            dup = True
                            break
                    if not dup:
                        fwd_old[v, no] = ids[v, s]
                        no += 1
            fwd_old_len[v] = no

        # Reverse adjacency of both partitions, then sample rho*k of each.
        rev_new_cnt = np.zeros(n, dtype=np.int64)
        rev_old_cnt = np.zeros(n, dtype=np.int64)
        for v in range(n):
            for t in range(fwd_new_len[v]):
                rev_new_cnt[fwd_new[v, t]] += 1
            for t in range(fwd_old_len[v]):
                rev_old_cnt[fwd_old[v, t]] += 1
        rev_new_off = np.zeros(n + 1, dtype=np.int64)
        rev_old_off = np.zeros(n + 1, dtype=np.int64)
        for v in range(n):
            rev_new_off[v + 1] = rev_new_off[v] + rev_new_cnt[v]
            rev_old_off[v + 1] = rev_old_off[v] + rev_old_cnt[v]
        rev_new = np.empty(rev_new_off[n], dtype=np.int64)
        rev_old = np.empty(rev_old_off[n], dtype=np.int64)
        fill_new = rev_new_off.copy()
        fill_old = rev_old_off.copy()
        for v in range(n):
            for t in range(fwd_new_len[v]):
                u = fwd_new[v, t]
                rev_new[fill_new[u]] = v
                fill_new[u] += 1
            for t in range(fwd_old_len[v]):
                u = fwd_old[v, t]
                rev_old[fill_old[u]] = v
                fill_old[u] += 1

        updates = 0
        new_buf = np.empty(cap + cap, dtype=np.int64)
        old_buf = np.empty(k + cap, dtype=np.int64)
        for v in range(n):
            nnew = 0
            for t in range(fwd_new_len[v]):
                new_buf[nnew] = fwd_new[v, t]
                nnew += 1
            lo = rev_new_off[v]
            cnt = rev_new_off[v + 1] - lo
            take = cnt if cnt <= cap else cap
            for t in range(take):
                if cnt > cap:
                    state, r = _sm_next(state)
                    j = t + np.int64(r % _U(cnt - t))
                    tmp = rev_new[lo + t]
                    rev_new[lo + t] = rev_new[lo + j]
                    rev_new[lo + j] = tmp
                cand = rev_new[lo + t]
                dup = False
                for s in range(nnew):
                    if new_buf[s] == cand:
                        dup = True
                        break
                if not dup and cand != v:
                    new_buf[nnew] = cand
                    nnew += 1

            nold = 0
            for t in range(fwd_old_len[v]):
                old_buf[nold] = fwd_old[v, t]
                nold += 1
            lo = rev_old_off[v]
            cnt = rev_old_off[v + 1] - lo
            take = cnt if cnt <= cap else cap
            for t in range(take):
                if cnt > cap:
                    state, r = _sm_next(state)
                    j = t + np.int64(r % _U(cnt - t))
                    tmp = rev_old[lo + t]
                    rev_old[lo + t] = rev_old[lo + j]
                    rev_old[lo + j] = tmp
                cand = rev_old[lo + t]
                dup = False
                for s in range(nold):
                    if old_buf[s] == cand:
                        dup = True
                        break
                if not dup and cand != v:
                    old_buf[nold] = cand
                    nold += 1

            for a in range(nnew):
                p = new_buf[a]
                for b in range(a + 1, nnew):
                    q = new_buf[b]
                    if p == q:
                        continue
                    d = _sqdist(x, p, q)
                    updates += _heap_push(ids, dists, flags, p, q, d)
                    updates += _heap_push(ids, dists, flags, q, p, d)
                for b in range(nold):
                    q = old_buf[b]
                    if p == q:
                        continue
                    d = _sqdist(x, p, q)
                    updates += _heap_push(ids, dists, flags, p, q, d)
                    updates += _heap_push(ids, dists, flags, q, p, d)

        if updates < delta * n * k:
            break
    return ids


def _or_edges(n: int, nbrs: np.ndarray) -> np.ndarray:
    src = np.repeat(np.arange(n, dtype=np.int64), nbrs.shape[1])
    dst = nbrs.reshape(-1)
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    code = np.unique(lo * np.int64(n) + hi)
    return np.stack([code // n, code % n], axis=1)


def _check_k(n: int, k: int) -> None:
    if k < 1 or k >= n:
        raise InvalidK(f"k must satisfy 1 <= k < n, got k={k}, n={n}")


def knn_exact(pc: PointCloud, k: int) -> KnnGraph:
    """Exact OR-graph from all-pairs distances, O(d n^2)."""
    _check_k(pc.n, k)
    nbrs = _brute_neighbors(pc.data, k)
    return KnnGraph(n=pc.n, k=k, edges=_or_edges(pc.n, nbrs))


def knn_approx(
    pc: PointCloud,
    k: int,
    seed: int,
    rho: float = 1.0,
    iters: int = 10,
    delta: float = 0.001,
) -> KnnGraph:
    """NN-descent OR-graph, near-linear in n.

    Candidate lists start random and are refined by comparing neighbors of
    neighbors (forward and reverse, sampled at rate ``rho``) until fewer
    than delta*n*k updates occur in a round or ``iters`` rounds elapse.
    Runs sequentially over a single SplitMix64 stream, so the result is a
    pure function of (data, k, seed, rho, iters).
    """
    _check_k(pc.n, k)
    if pc.n <= k + 1:
        return knn_exact(pc, k)
    nbrs = _nn_descent(pc.data, k, seed & _MASK, rho, iters, delta)
    return KnnGraph(n=pc.n, k=k, edges=_or_edges(pc.n, nbrs))
