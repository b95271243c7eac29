"""Deterministic randomness: SplitMix64 streams, sub-stream derivation,
Fisher-Yates subsampling, and probe vectors.

Everything here is pinned at the bit level so results reproduce across
platforms, thread counts, and language bindings. No numpy Generator state
is involved anywhere in the pipeline.
"""
from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Reserved sub-stream indices (probe i uses index i, so keep these high).
KNN_STREAM = 0x6B6E6E0000000000  # NN-descent candidate sampling
REPEAT_STREAM = 0x5250540000000000  # CLI --repeat run r uses REPEAT_STREAM + r
SUBSAMPLE_STREAM = 0x5342530000000000  # CLI --subsample row selection


def splitmix64(x: int) -> int:
    """One SplitMix64 step seeded at ``x``: advance by the golden-ratio
    increment, then mix. Pure function of a 64-bit input."""
    x = (x + GOLDEN) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def substream_seed(master: int, index: int) -> int:
    """Seed of sub-stream ``index``: splitmix64(master XOR (index+1)*GOLDEN)."""
    return splitmix64((master ^ ((index + 1) * GOLDEN)) & _MASK)


class SplitMix64:
    """Sequential SplitMix64 generator over 64-bit state."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by modular reduction."""
        return self.next_u64() % bound


def stream_u64(seed: int, count: int) -> np.ndarray:
    """First ``count`` outputs of SplitMix64(seed), vectorized.

    Output j comes from state seed + (j+1)*GOLDEN mod 2^64, identical to
    ``count`` calls of :meth:`SplitMix64.next_u64`.
    """
    states = np.uint64(seed & _MASK) + np.uint64(GOLDEN) * np.arange(
        1, count + 1, dtype=np.uint64
    )
    z = states
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniform01(seed: int, count: int) -> np.ndarray:
    """Uniforms in [0, 1) from the top 53 bits of each stream output."""
    return (stream_u64(seed, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def rademacher(seed: int, n: int) -> np.ndarray:
    """±1 entries from bit 63 of each output (+1 when the bit is clear)."""
    bits = stream_u64(seed, n) >> np.uint64(63)
    return 1.0 - 2.0 * bits.astype(np.float64)


def gaussian(seed: int, n: int) -> np.ndarray:
    """Standard normals via Box-Muller, one normal per two stream outputs.

    u1 is mapped into (0, 1] so the logarithm is always finite.
    """
    out = stream_u64(seed, 2 * n)
    u1 = 1.0 - (out[0::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    u2 = (out[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def unit_probe(seed: int, n: int, dist: str) -> np.ndarray:
    """Unit-norm probe vector for trace estimation.

    The norm is taken as sqrt(dot(v, v)) rather than a scaled BLAS norm so
    that Rademacher probes come out with every component of magnitude
    exactly 1/sqrt(n).
    """
    if dist == "rademacher":
        raw = rademacher(seed, n)
    elif dist == "gaussian":
        raw = gaussian(seed, n)
    else:
        raise ValueError(f"unknown probe distribution {dist!r}")
    return raw / np.sqrt(np.einsum("i,i->", raw, raw))


def sample_without_replacement(n: int, m: int, seed: int) -> np.ndarray:
    """First ``m`` entries of a Fisher-Yates shuffle of range(n)."""
    if m > n:
        raise ValueError(f"cannot draw {m} from {n} without replacement")
    idx = np.arange(n, dtype=np.int64)
    g = SplitMix64(seed)
    for i in range(m):
        j = i + g.below(n - i)
        idx[i], idx[j] = idx[j], idx[i]
    return idx[:m]
