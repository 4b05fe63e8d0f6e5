# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled d_F kernels. Mirrors ``_kernels_py`` exactly in semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t i64

# dF values within this distance of the running sum are recomputed from scratch
cdef double RECHECK = 1e-9
cdef long long REFRESH = 1 << 16


cdef double _full_df(const double* mu, double mu_total, const i64* hist,
                     const i64* codes, i64* stamp, i64 tag, Py_ssize_t m) noexcept nogil:
    cdef double s = mu_total
    cdef Py_ssize_t w
    cdef i64 c
    cdef double dm = <double>m
    for w in range(m):
        c = codes[w]
        if stamp[c] != tag:
            stamp[c] = tag
            s += fabs(mu[c] - hist[c] / dm) - mu[c]
    return s


def df_batch(const i64[:, ::1] labels, const i64[:, ::1] inv, const double[::1] mu, int u):
    """d_F for each row of ``labels`` (one labeling of m points per row)."""
    cdef Py_ssize_t n = labels.shape[0], m = labels.shape[1], nf = inv.shape[0]
    cdef Py_ssize_t U = mu.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef i64* hist = <i64*>malloc(U * sizeof(i64))
    cdef i64* stamp = <i64*>malloc(U * sizeof(i64))
    cdef i64* codes = <i64*>malloc(m * sizeof(i64))
    cdef Py_ssize_t r, w, k, c
    cdef i64 code, scale
    cdef double mu_total = 0.0
    if hist == NULL or stamp == NULL or codes == NULL:
        free(hist); free(stamp); free(codes)
        raise MemoryError()
    with nogil:
        for c in range(U):
            mu_total += mu[c]
            hist[c] = 0
            stamp[c] = -1
        for r in range(n):
            for w in range(m):
                code = 0
                scale = 1
                for k in range(nf):
                    code += labels[r, inv[k, w]] * scale
                    scale *= u
                codes[w] = code
                hist[code] += 1
            o[r] = _full_df(&mu[0], mu_total, hist, codes, stamp, r, m)
            for w in range(m):
                hist[codes[w]] = 0
    free(hist); free(stamp); free(codes)
    return out


def count_range(const i64[:, ::1] inv, const double[::1] mu, int u, long long start,
                long long stop, double eps, double tol, cnp.uint8_t[::1] mask=None):
    """Count labelings with index in [start, stop) whose d_F is <= eps + tol.

    Labeling ``idx`` gives point v the label ``(idx // u**v) % u``. When
    ``mask`` is given, ``mask[idx - start]`` is set to 1 for accepted labelings.
    """
    cdef Py_ssize_t m = inv.shape[1], nf = inv.shape[0], U = mu.shape[0]
    cdef i64* labels = <i64*>malloc(m * sizeof(i64))
    cdef i64* codes = <i64*>malloc(m * sizeof(i64))
    cdef i64* hist = <i64*>malloc(U * sizeof(i64))
    cdef i64* stamp = <i64*>malloc(U * sizeof(i64))
    cdef i64* fwd = <i64*>malloc(nf * m * sizeof(i64))
    cdef i64* powu = <i64*>malloc((nf + 1) * sizeof(i64))
    if not (labels and codes and hist and stamp and fwd and powu):
        free(labels); free(codes); free(hist); free(stamp); free(fwd); free(powu)
        raise MemoryError()
    cdef bint want_mask = mask is not None
    cdef bint carry
    cdef Py_ssize_t v, w, k, c, j
    cdef long long idx, count = 0, x, steps = 0
    cdef i64 code, old, tag = 0
    cdef double s, mu_total = 0.0, dm = <double>m, limit = eps + tol
    cdef i64 hc
    with nogil:
        powu[0] = 1
        for k in range(nf):
            powu[k + 1] = powu[k] * u
        for k in range(nf):
            for w in range(m):
                fwd[k * m + inv[k, w]] = w
        for c in range(U):
            mu_total += mu[c]
            hist[c] = 0
            stamp[c] = -1
        x = start
        for v in range(m):
            labels[v] = x % u
            x //= u
        for w in range(m):
            code = 0
            for k in range(nf):
                code += labels[inv[k, w]] * powu[k]
            codes[w] = code
            hist[code] += 1
        s = _full_df(&mu[0], mu_total, hist, codes, stamp, tag, m)
        tag += 1
        idx = start
        while idx < stop:
            if s <= limit + RECHECK:
                if s > limit - RECHECK:
                    s = _full_df(&mu[0], mu_total, hist, codes, stamp, tag, m)
                    tag += 1
                if s <= limit:
                    count += 1
                    if want_mask:
                        mask[idx - start] = 1
            idx += 1
            if idx >= stop:
                break
            # base-u increment; each changed digit updates the codes it feeds
            v = 0
            while True:
                labels[v] += 1
                if labels[v] == u:
                    labels[v] = 0
                    carry = 1
                else:
                    carry = 0
                for k in range(nf):
                    w = fwd[k * m + v]
                    old = codes[w]
                    code = 0
                    for j in range(nf):
                        code += labels[inv[j, w]] * powu[j]
                    if code != old:
                        hc = hist[old]
                        s += fabs(mu[old] - (hc - 1) / dm) - fabs(mu[old] - hc / dm)
                        hist[old] = hc - 1
                        hc = hist[code]
                        s += fabs(mu[code] - (hc + 1) / dm) - fabs(mu[code] - hc / dm)
                        hist[code] = hc + 1
                        codes[w] = code
                if not carry:
                    break
                v += 1
            steps += 1
            if steps >= REFRESH:
                steps = 0
                s = _full_df(&mu[0], mu_total, hist, codes, stamp, tag, m)
                tag += 1
    free(labels); free(codes); free(hist); free(stamp); free(fwd); free(powu)
    return count
