"""Pure numpy implementation of the tournament kernel.

Consumes the bit generator in exactly the same order as ``_kernel.pyx``
so both backends produce identical score vectors for a given stream.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"


class IndexDecoder:
    """Turns a bit generator into a stream of support indices.

    With ``bits > 0`` every probability is a multiple of ``2**-bits``;
    each 64-bit word is sliced into ``64 // bits`` cells, lowest bits
    first, and ``table`` maps a cell to a support index. This samples
    exactly. Otherwise one double per draw inverts ``cdf``.
    """

    def __init__(self, bit_generator, cdf: np.ndarray, table: np.ndarray, bits: int):
        self.bit_generator = bit_generator
        self.cdf = cdf
        self.table = table
        self.bits = bits
        self._buffer = np.zeros(0, dtype=np.int64)
        if bits:
            self._per = 64 // bits
            self._shifts = (np.arange(self._per, dtype=np.uint64) * np.uint64(bits))[None, :]
            self._mask = np.uint64((1 << bits) - 1)
        else:
            self._gen = np.random.Generator(bit_generator)

    def take(self, count: int) -> np.ndarray:
        if not self.bits:
            return np.searchsorted(self.cdf, self._gen.random(count), side="right")
        need = count - self._buffer.size
        if need > 0:
            words = self.bit_generator.random_raw(-(-need // self._per))
            cells = ((words[:, None] >> self._shifts) & self._mask).ravel()
            self._buffer = np.concatenate([self._buffer, self.table[cells.astype(np.intp)]])
        out, self._buffer = self._buffer[:count], self._buffer[count:]
        return out


def tournament_scores(bit_generator, scores, q, values, cdf, table, bits):
    """Add one tournament's match scores into ``scores`` (int64, length n).

    Pairs are visited row-major: (0,1), (0,2), ..., (0,n-1), (1,2), ...
    """
    n = scores.shape[0]
    decoder = IndexDecoder(bit_generator, cdf, table, bits)
    for i in range(n - 1):
        a = values[decoder.take(n - 1 - i)]
        scores[i] += a.sum()
        scores[i + 1:] += q - a
