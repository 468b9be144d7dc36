# distutils: language = c++
"""Compiled replicate-mean kernels.

Both kernels draw raw 64-bit words straight from a numpy bit generator and
perform the same floating-point operations, in the same order, as the numpy
fallback in ``_kernels_py``; the two backends are bit-identical for a given
stream state.
"""
import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport log
from libc.stdint cimport uint64_t
from numpy.random cimport bitgen_t

cdef extern from *:
    """
    #if defined(__SSE2__)
    #include <emmintrin.h>
    static inline double bc_min(double x, double y) { return _mm_cvtsd_f64(_mm_min_sd(_mm_set_sd(x), _mm_set_sd(y))); }
    static inline double bc_max(double x, double y) { return _mm_cvtsd_f64(_mm_max_sd(_mm_set_sd(y), _mm_set_sd(x))); }
    #else
    static inline double bc_min(double x, double y) { return x < y ? x : y; }
    static inline double bc_max(double x, double y) { return x < y ? y : x; }
    #endif
    """
    double bc_min(double x, double y) noexcept nogil
    double bc_max(double x, double y) noexcept nogil

cnp.import_array()

BACKEND = "cython"

cdef const char *CAPSULE_NAME = "BitGenerator"
cdef double TWO_M52 = 2.220446049250313e-16  # 2**-52
cdef Py_ssize_t NETWORK_MAX = 128


cdef inline double open_uniform(bitgen_t *bg) noexcept nogil:
    # 52 random bits -> (k + 0.5) / 2**52, strictly inside (0, 1), exact
    return (<double>(bg.next_uint64(bg.state) >> 12) + 0.5) * TWO_M52


cdef inline void insertion_sort(double *a, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double key
    for i in range(1, m):
        key = a[i]
        j = i - 1
        while j >= 0 and a[j] > key:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = key


def sorting_network(Py_ssize_t m):
    """Comparator pairs of Batcher's odd-even merge sort restricted to ``m`` inputs.

    The network is built for the next power of two; padding slots would hold
    values above every input, so comparators touching them never swap and are
    dropped.
    """
    cdef Py_ssize_t size = 1, p, k, j, i
    while size < m:
        size *= 2
    pairs = []
    p = 1
    while p < size:
        k = p
        while k >= 1:
            j = k % p
            while j + k < size:
                for i in range(min(k, size - j - k)):
                    if (i + j) // (2 * p) == (i + j + k) // (2 * p) and i + j + k < m:
                        pairs.append((i + j, i + j + k))
                j += 2 * k
            k //= 2
        p *= 2
    return np.array(pairs, dtype=np.intp).reshape(-1, 2)


cdef inline void network_sort(double *a, const Py_ssize_t *pairs, Py_ssize_t npairs) noexcept nogil:
    # data-independent compare-exchange sequence; bc_min/bc_max become minsd/maxsd
    cdef Py_ssize_t c, i, j
    cdef double x, y
    for c in range(npairs):
        i = pairs[2 * c]
        j = pairs[2 * c + 1]
        x = a[i]
        y = a[j]
        a[i] = bc_min(x, y)
        a[j] = bc_max(x, y)


cdef inline void sort_uniforms(double *a, Py_ssize_t m, double *tmp, Py_ssize_t *count) noexcept nogil:
    # values lie in (0, 1): scatter into m buckets by floor(u*m), then a
    # final insertion pass fixes the (expected O(1)) order inside buckets
    cdef Py_ssize_t i, b
    for i in range(m + 1):
        count[i] = 0
    for i in range(m):
        b = <Py_ssize_t>(a[i] * m)
        if b >= m:
            b = m - 1
        count[b + 1] += 1
    for i in range(m):
        count[i + 1] += count[i]
    for i in range(m):
        b = <Py_ssize_t>(a[i] * m)
        if b >= m:
            b = m - 1
        tmp[count[b]] = a[i]
        count[b] += 1
    for i in range(m):
        a[i] = tmp[i]
    insertion_sort(a, m)


cdef bitgen_t *get_bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, CAPSULE_NAME):
        raise ValueError("invalid bit generator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, CAPSULE_NAME)


def standard_means(values, Py_ssize_t B, bit_generator):
    """Means of ``B`` with-replacement resamples of ``values``."""
    cdef const double[::1] x = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(B, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef bitgen_t *bg = get_bitgen(bit_generator)
    cdef Py_ssize_t r, j, idx
    cdef double acc, dn = <double>n

    with bit_generator.lock, nogil:
        for r in range(B):
            acc = 0.0
            for j in range(n):
                idx = <Py_ssize_t>(open_uniform(bg) * dn)
                if idx >= n:
                    idx = n - 1
                acc = acc + x[idx]
            out[r] = acc / dn
    return out_arr


def bayesian_means(values, Py_ssize_t B, bit_generator, bint with_loglik=False):
    """Flat-Dirichlet weighted means of ``values`` via sorted-uniform gaps.

    Returns ``(means, loglik)``; ``loglik[r]`` is the sum of log weights of
    replicate ``r``, or ``None`` unless requested.
    """
    cdef const double[::1] x = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = n - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(B, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ll_arr = np.zeros(B if with_loglik else 0, dtype=np.float64)
    cdef double[::1] ll = ll_arr
    cdef double[::1] buf = np.empty(m if m > 0 else 1, dtype=np.float64)
    cdef double[::1] tmp = np.empty(m if m > 0 else 1, dtype=np.float64)
    cdef Py_ssize_t[::1] count = np.empty(m + 2, dtype=np.intp)
    cdef bint use_network = m <= NETWORK_MAX
    cdef Py_ssize_t[:, ::1] pairs = sorting_network(m if use_network else 1)
    cdef Py_ssize_t npairs = pairs.shape[0]
    cdef const Py_ssize_t *pair_ptr = &pairs[0, 0] if npairs > 0 else NULL
    cdef bitgen_t *bg = get_bitgen(bit_generator)
    cdef Py_ssize_t r, j
    cdef double acc, lacc, prev, gap

    with bit_generator.lock, nogil:
        for r in range(B):
            for j in range(m):
                buf[j] = open_uniform(bg)
            if use_network:
                network_sort(&buf[0], pair_ptr, npairs)
            else:
                sort_uniforms(&buf[0], m, &tmp[0], &count[0])
            acc = 0.0
            lacc = 0.0
            prev = 0.0
            for j in range(m):
                gap = buf[j] - prev
                prev = buf[j]
                acc = acc + gap * x[j]
                if with_loglik:
                    lacc = lacc + log(gap)
            gap = 1.0 - prev
            acc = acc + gap * x[m]
            out[r] = acc
            if with_loglik:
                ll[r] = lacc + log(gap)
    return out_arr, (ll_arr if with_loglik else None)
