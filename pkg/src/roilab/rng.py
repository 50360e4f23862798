"""Deterministic counter-based random streams for shot-noise simulation.

Output i of a stream is a 64-bit mix of (key + i * GOLDEN): there is no
sequential state, so substreams derived from labels can be evaluated in
any order or in parallel and still reproduce bit-identically. Substream
keys are derived by folding label strings into the seed with the same
mixer, via a stable FNV-1a hash (never Python's salted ``hash``).
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64
_MASK = 0xFFFFFFFFFFFFFFFF


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


def _mix_int(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _fnv1a(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return h


def stream_key(seed: int, *labels: str) -> int:
    """Derive a substream key from a seed and a label path."""
    key = _mix_int(seed & _MASK)
    for label in labels:
        key = _mix_int(key ^ _fnv1a(label))
    return key


def uniforms(key: int, n: int, start: int = 0) -> np.ndarray:
    """n doubles in [0, 1) from counter positions start .. start + n - 1."""
    counters = np.arange(start, start + n, dtype=np.uint64)
    with np.errstate(over="ignore"):
        words = _mix(_U64(key) + counters * _GOLDEN)
    return (words >> _U64(11)).astype(np.float64) * (1.0 / (1 << 53))


def binomial(key: int, n: int, p: float) -> int:
    """Count of n Bernoulli(p) draws from the stream."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    return int(np.count_nonzero(uniforms(key, n) < p))
