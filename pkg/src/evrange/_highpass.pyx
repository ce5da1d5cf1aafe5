# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled temporal high-pass kernel.

Single pass over the stream keeping two registers per pixel: the latest
event time and the latest strictly earlier time. The second register makes
the survival rule exact when several events at one pixel share a timestamp.
"""

import numpy as np

cimport numpy as cnp


def highpass_mask(cnp.uint16_t[::1] xs,
                  cnp.uint16_t[::1] ys,
                  cnp.uint64_t[::1] ts,
                  cnp.int64_t cutoff_us,
                  Py_ssize_t width,
                  Py_ssize_t height):
    """Survival mask: event i survives iff a prior event hit the same pixel
    strictly inside (t_i - cutoff_us, t_i)."""
    cdef Py_ssize_t n = ts.shape[0]
    keep_arr = np.zeros(n, dtype=np.uint8)
    latest_arr = np.full(width * height, -1, dtype=np.int64)
    prev_arr = np.full(width * height, -1, dtype=np.int64)
    cdef cnp.uint8_t[::1] keep = keep_arr
    cdef cnp.int64_t[::1] latest = latest_arr
    cdef cnp.int64_t[::1] prev_strict = prev_arr
    cdef Py_ssize_t i, pid
    cdef cnp.int64_t t, a, qual
    for i in range(n):
        pid = <Py_ssize_t> ys[i] * width + <Py_ssize_t> xs[i]
        t = <cnp.int64_t> ts[i]
        a = latest[pid]
        if a < 0:
            qual = -1
        elif a < t:
            qual = a
        else:
            # a == t: duplicate timestamp, fall back to the earlier register
            qual = prev_strict[pid]
        if qual >= 0 and t - qual < cutoff_us:
            keep[i] = 1
        if a < t:
            prev_strict[pid] = a
            latest[pid] = t
    return keep_arr.view(np.bool_)
