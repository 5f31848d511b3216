"""Seeded, worker-independent random streams.

Every stochastic routine in the package draws from an :class:`RngStream`, a
thin stateful wrapper around a counter-based bit generator.  The derivation
is fixed:

* bit generator: Philox4x64-10 (``numpy.random.Philox``);
* substream key: the first 128 bits of
  ``SHA-256(master_seed as 8 LE bytes || stream_index as 8 LE bytes)``.

Because the key is a pure function of ``(master_seed, stream_index)``, a
stream's output never depends on which worker produced it or on how many
other streams exist, and identical inputs reproduce bit-identical sequences
on any platform with IEEE-754 doubles and the same numpy version.

Monte Carlo drivers assign ``stream_index = draw index`` so that results are
invariant under any partitioning of draws across workers.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import DimensionError

_U64 = 1 << 64


def substream_key(master_seed: int, stream_index: int) -> int:
    """128-bit Philox key for a (master_seed, stream_index) pair.

    The hash is SHA-256 over the two values packed as unsigned little-endian
    64-bit words; the first 16 digest bytes, read little-endian, form the key.
    """
    if not 0 <= master_seed < _U64:
        raise DimensionError(f"master_seed must be an unsigned 64-bit integer, got {master_seed}")
    if not 0 <= stream_index < _U64:
        raise DimensionError(f"stream_index must be a non-negative 64-bit integer, got {stream_index}")
    digest = hashlib.sha256(
        master_seed.to_bytes(8, "little") + stream_index.to_bytes(8, "little")
    ).digest()
    return int.from_bytes(digest[:16], "little")


class RngStream:
    """One reproducible substream of randomness.

    Successive calls consume the stream; the full call sequence is part of
    the reproducibility contract.  Streams with distinct ``stream_index``
    are statistically independent (distinct Philox keys).
    """

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.master_seed = master_seed
        self.stream_index = stream_index
        self._generator = np.random.Generator(
            np.random.Philox(key=substream_key(master_seed, stream_index))
        )

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"

    def uniforms(self, shape) -> np.ndarray:
        """IID uniforms on [0, 1), one 64-bit word each."""
        return self._generator.random(shape)

    def standard_gamma(self, alpha: float, shape) -> np.ndarray:
        """IID Gamma(alpha, 1) variates (numpy's rejection sampler)."""
        return self._generator.standard_gamma(alpha, shape)
