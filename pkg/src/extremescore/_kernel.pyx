# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled tournament kernel.

Draws straight from a numpy BitGenerator through its C interface, in the
same order as ``_fallback.tournament_scores``.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.stdint cimport int64_t, uint64_t
from numpy.random cimport bitgen_t

import numpy as np

BACKEND = "cython"


def tournament_scores(object bit_generator, int64_t[::1] scores, int64_t q,
                      const int64_t[::1] values, const double[::1] cdf,
                      const int64_t[::1] table, int bits):
    cdef:
        bitgen_t *rng
        Py_ssize_t n = scores.shape[0]
        Py_ssize_t r = values.shape[0]
        Py_ssize_t i, j, idx, stop
        int64_t[::1] cell_values
        int64_t a, acc
        uint64_t word = 0
        uint64_t mask
        int per, remaining = 0
        double u

    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid bit generator")
    rng = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
    if bits > 0:
        if table.shape[0] != (1 << bits):
            raise ValueError("lookup table size does not match bits")
        per = 64 // bits
        cell_values = np.asarray(values)[np.asarray(table)]
        mask = (<uint64_t> 1 << bits) - 1

    with bit_generator.lock, nogil:
        if bits > 0:
            for i in range(n - 1):
                acc = 0
                j = i + 1
                while j < n:
                    if remaining == 0:
                        word = rng.next_uint64(rng.state)
                        remaining = per
                    # consume as many cells of the current word as the row allows
                    stop = j + remaining
                    if stop > n:
                        stop = n
                    remaining -= stop - j
                    while j < stop:
                        a = cell_values[word & mask]
                        word >>= bits
                        acc += a
                        scores[j] += q - a
                        j += 1
                scores[i] += acc
        else:
            for i in range(n - 1):
                acc = 0
                for j in range(i + 1, n):
                    u = rng.next_double(rng.state)
                    idx = 0
                    while idx < r - 1 and u >= cdf[idx]:
                        idx += 1
                    a = values[idx]
                    acc += a
                    scores[j] += q - a
                scores[i] += acc
