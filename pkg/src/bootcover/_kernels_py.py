"""Pure-numpy replicate-mean kernels (fallback for the compiled ``_kernels``).

Consumes the bit generator's raw words in exactly the order the compiled
kernels do and accumulates column by column, so both backends produce
bit-identical replicate means.
"""
import numpy as np

from ._rng import raw_to_open_uniform

BACKEND = "python"

# rows per chunk are chosen so a chunk holds at most this many variates
_CHUNK_ELEMENTS = 1 << 18


def _chunks(B, width):
    rows = max(1, _CHUNK_ELEMENTS // max(width, 1))
    start = 0
    while start < B:
        stop = min(B, start + rows)
        yield start, stop
        start = stop


def standard_means(values, B, bit_generator):
    """Means of ``B`` with-replacement resamples of ``values``."""
    x = np.ascontiguousarray(values, dtype=np.float64)
    n = x.shape[0]
    out = np.empty(B, dtype=np.float64)
    dn = float(n)
    for start, stop in _chunks(B, n):
        u = raw_to_open_uniform(bit_generator.random_raw((stop - start, n)))
        idx = np.minimum((u * dn).astype(np.int64), n - 1)
        acc = np.zeros(stop - start)
        for j in range(n):
            acc += x[idx[:, j]]
        out[start:stop] = acc / dn
    return out


def bayesian_means(values, B, bit_generator, with_loglik=False):
    """Flat-Dirichlet weighted means of ``values`` via sorted-uniform gaps.

    Returns ``(means, loglik)``; ``loglik`` is ``None`` unless requested.
    """
    x = np.ascontiguousarray(values, dtype=np.float64)
    n = x.shape[0]
    m = n - 1
    out = np.empty(B, dtype=np.float64)
    ll = np.empty(B, dtype=np.float64) if with_loglik else None
    for start, stop in _chunks(B, m):
        rows = stop - start
        u = raw_to_open_uniform(bit_generator.random_raw((rows, m)))
        u.sort(axis=1)
        acc = np.zeros(rows)
        lacc = np.zeros(rows)
        prev = np.zeros(rows)
        for j in range(m):
            gap = u[:, j] - prev
            prev = u[:, j]
            acc += gap * x[j]
            if with_loglik:
                lacc += np.log(gap)
        gap = 1.0 - prev
        acc += gap * x[m]
        out[start:stop] = acc
        if with_loglik:
            ll[start:stop] = lacc + np.log(gap)
    return out, ll
