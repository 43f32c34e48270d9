# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""C loops for the per-step hot ops; see _fallback.py for semantics.

Kept bitwise-identical to the numpy fallback: selection multiplies by
the 0/1 bit (adding the resulting +0.0 never moves a finite total, so
the running sum equals cumsum over the zero-filled array) and
normalization multiplies by the reciprocal of the total, one rounding
on either side.
"""


def renorm_masked(const double[::1] p, const unsigned char[::1] mask, double[::1] out):
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t nb = n >> 3
    cdef Py_ssize_t i, base
    cdef unsigned int m
    cdef double total = 0.0
    cdef double rt
    for i in range(nb):
        m = mask[i]
        base = i << 3
        out[base] = p[base] * (m & 1)
        out[base + 1] = p[base + 1] * ((m >> 1) & 1)
        out[base + 2] = p[base + 2] * ((m >> 2) & 1)
        out[base + 3] = p[base + 3] * ((m >> 3) & 1)
        out[base + 4] = p[base + 4] * ((m >> 4) & 1)
        out[base + 5] = p[base + 5] * ((m >> 5) & 1)
        out[base + 6] = p[base + 6] * ((m >> 6) & 1)
        out[base + 7] = p[base + 7] * ((m >> 7) & 1)
        # strictly sequential adds: same fold order as the fallback's cumsum
        total += out[base]
        total += out[base + 1]
        total += out[base + 2]
        total += out[base + 3]
        total += out[base + 4]
        total += out[base + 5]
        total += out[base + 6]
        total += out[base + 7]
    for i in range(nb << 3, n):
        out[i] = p[i] * ((mask[i >> 3] >> (i & 7)) & 1)
        total += out[i]
    if total > 0.0:
        rt = 1.0 / total
        for i in range(n):
            out[i] = out[i] * rt
    else:
        for i in range(n):
            out[i] = 0.0
    return total


def cum_pick(const double[::1] q, const unsigned char[::1] mask, double u):
    cdef Py_ssize_t n = q.shape[0]
    cdef Py_ssize_t i
    cdef double c = 0.0
    for i in range(n):
        c = c + q[i]
        if c > u:
            return i
    for i in range(n - 1, -1, -1):
        if mask[i >> 3] & (1 << (i & 7)):
            return i
    return -1
