"""Seeded randomness and Laplace sampling shared by all mechanisms and experiments.

All randomness flows through :class:`RandomSource`, a thin wrapper over numpy's
counter-based Philox generator keyed by ``(seed, stream_id)``. Equal keys give
bit-identical sample sequences on every platform; distinct stream ids give
statistically independent streams, so parallel trials and embedded mechanisms
each derive their own substream instead of sharing state.

The Laplace sampler uses the inverse CDF (deterministic and portable, unlike
rejection sampling). It is simulation-grade: floating-point side channels of
Laplace sampling, a known attack surface for deployed DP systems, are not
mitigated here.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    """One SplitMix64 round; used to derive substream ids deterministically."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class RandomSource:
    """Deterministic random stream identified by (seed, stream_id).

    Single-owner: each mechanism or trial holds its own source and never
    shares it. ``zero_noise=True`` forces every Laplace draw to exactly 0 so
    mechanism bookkeeping can be tested against exact arithmetic.
    """

    def __init__(self, seed: int, stream_id: int = 0, zero_noise: bool = False):
        if not 0 <= int(seed) <= _MASK64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if not 0 <= int(stream_id) <= _MASK64:
            raise ParameterError(f"stream_id must be a 64-bit unsigned integer, got {stream_id}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.zero_noise = bool(zero_noise)
        self._gen = np.random.Generator(np.random.Philox(key=[self.seed, self.stream_id]))

    def substream(self, k: int) -> "RandomSource":
        """Derive an independent child stream (same seed, mixed stream id)."""
        child = _splitmix64((self.stream_id ^ _splitmix64(k & _MASK64)) & _MASK64)
        return RandomSource(self.seed, child, self.zero_noise)

    def uniform(self, size=None):
        """Uniform samples on [0, 1)."""
        return self._gen.random(size)

    def integers(self, low: int, high: int, size=None):
        return self._gen.integers(low, high, size=size)

    @property
    def generator(self) -> np.random.Generator:
        """Underlying numpy generator, for bulk draws in experiments."""
        return self._gen

    def __repr__(self) -> str:
        flag = ", zero_noise=True" if self.zero_noise else ""
        return f"RandomSource(seed={self.seed}, stream_id={self.stream_id}{flag})"


def laplace_from_uniform(scale: float, u):
    """Inverse-CDF Laplace sample(s) from u in (-1/2, 1/2): -scale*sign(u)*ln(1-2|u|)."""
    u = np.asarray(u, dtype=float)
    out = -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))
    return float(out) if out.ndim == 0 else out


def laplace(scale: float, rng: RandomSource, size=None):
    """Sample from the Laplace distribution with mean 0 and the given scale.

    Returns exactly 0 when ``scale == 0`` or when the source is in zero-noise
    mode. ``size=None`` returns a float, otherwise an ndarray.
    """
    if scale < 0:
        raise ParameterError(f"laplace scale must be nonnegative, got {scale}")
    if scale == 0 or rng.zero_noise:
        return 0.0 if size is None else np.zeros(size)
    r = rng.uniform(size=size)
    # r == 0.0 would map to u = -1/2 and log(0); remap that measure-zero draw
    # to the median.
    if size is None:
        if r == 0.0:
            r = 0.5
        return laplace_from_uniform(scale, r - 0.5)
    r = np.where(r == 0.0, 0.5, r)
    return laplace_from_uniform(scale, r - 0.5)


def zero_noise_source(seed: int = 0, stream_id: int = 0) -> RandomSource:
    """Convenience constructor for the exact-arithmetic test mode."""
    return RandomSource(seed, stream_id, zero_noise=True)


__all__ = [
    "RandomSource",
    "laplace",
    "laplace_from_uniform",
    "zero_noise_source",
]
