# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. ``_fallback.py`` mirrors these in numpy."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    SMALL_WINDOW = 64


def moving_moments(x, Py_ssize_t w):
    """Mean and population variance of every length-``w`` window of ``x``.

    Sliding sums of ``x - ref`` in long double, with ``ref`` re-anchored
    (and the sums recomputed from scratch) every ``chunk`` window starts.
    """
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    if w < 1 or w > n:
        raise ValueError(f"window {w} invalid for length {n}")
    cdef Py_ssize_t n_out = n - w + 1
    mean_arr = np.empty(n_out, dtype=np.float64)
    var_arr = np.empty(n_out, dtype=np.float64)
    cdef double[::1] mean = mean_arr
    cdef double[::1] var = var_arr
    cdef Py_ssize_t i, j, s0, s1, chunk
    cdef double m, acc, d, ref
    cdef long double s, q, a, b, lm, lv
    cdef long double inv_w = 1.0 / <long double>w

    with nogil:
        if w <= SMALL_WINDOW:
            for i in range(n_out):
                acc = 0.0
                for j in range(i, i + w):
                    acc += xv[j]
                m = acc / w
                acc = 0.0
                for j in range(i, i + w):
                    d = xv[j] - m
                    acc += d * d
                mean[i] = m
                var[i] = acc / w
        else:
            chunk = 4 * w
            if chunk < 4096:
                chunk = 4096
            s0 = 0
            while s0 < n_out:
                s1 = s0 + chunk
                if s1 > n_out:
                    s1 = n_out
                acc = 0.0
                for j in range(s0, s0 + w):
                    acc += xv[j]
                ref = acc / w
                s = 0.0
                q = 0.0
                for j in range(s0, s0 + w):
                    a = xv[j] - ref
                    s += a
                    q += a * a
                i = s0
                while True:
                    lm = s * inv_w
                    lv = q * inv_w - lm * lm
                    if lv < 0:
                        lv = 0
                    mean[i] = <double>(lm + ref)
                    var[i] = <double>lv
                    i += 1
                    if i >= s1:
                        break
                    a = xv[i + w - 1] - ref
                    b = xv[i - 1] - ref
                    s += a - b
                    q += a * a - b * b
                s0 = s1
    return mean_arr, var_arr


def gather_sq_dev(x, centers, delays, ref):
    """``out[b] = mean_k (x[centers[b] + delays[k]] - ref[b])**2`` (unchecked indices)."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.int64_t[::1] cv = np.ascontiguousarray(centers, dtype=np.int64)
    cdef cnp.int64_t[::1] dv = np.ascontiguousarray(delays, dtype=np.int64)
    cdef double[::1] rv = np.ascontiguousarray(ref, dtype=np.float64)
    cdef Py_ssize_t nb = cv.shape[0], nk = dv.shape[0], bi, k
    out_arr = np.empty(nb, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double acc, d
    with nogil:
        for bi in range(nb):
            acc = 0.0
            for k in range(nk):
                d = xv[cv[bi] + dv[k]] - rv[bi]
                acc += d * d
            out[bi] = acc / nk
    return out_arr
