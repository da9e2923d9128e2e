# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled coordinate-descent sweeps for the weighted elastic net.

Mirrors the pure-numpy fallback in ``_cd_numpy.py``; both maintain the
residual in place and use the same active-set schedule.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def enet_cd(double[::1, :] X, double[::1] w, double[::1] r, double[::1] beta,
            double[::1] col_norm2, double[::1] l1, double[::1] l2,
            int max_sweeps, double tol):
    """Run CD until the max coefficient update in a full sweep < tol.

    Returns (sweeps_used, max_update_last_full_sweep).
    """
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    cdef Py_ssize_t i, j, c
    cdef double z, bj, b_new, delta, az, nrm, max_delta
    cdef int sweeps = 0
    cdef bint full_pass = True
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] active_arr = np.ones(d, dtype=np.uint8)
    cdef unsigned char[::1] active = active_arr

    max_delta = float("inf")
    while sweeps < max_sweeps:
        sweeps += 1
        max_delta = 0.0
        for j in range(d):
            if not full_pass and not active[j]:
                continue
            nrm = col_norm2[j]
            if nrm <= 0.0:
                continue
            bj = beta[j]
            z = 0.0
            for i in range(n):
                z += X[i, j] * w[i] * r[i]
            z += nrm * bj
            az = (z if z >= 0 else -z) - l1[j]
            if az <= 0.0:
                b_new = 0.0
            else:
                b_new = (az if z >= 0 else -az) / (nrm + l2[j])
            delta = b_new - bj
            if delta != 0.0:
                for i in range(n):
                    r[i] -= delta * X[i, j]
                beta[j] = b_new
                active[j] = 1
            elif b_new == 0.0:
                active[j] = 0
            if delta < 0:
                delta = -delta
            if delta > max_delta:
                max_delta = delta
        if full_pass:
            if max_delta < tol:
                return sweeps, max_delta
            full_pass = False
        elif max_delta < tol:
            full_pass = True
    return sweeps, max_delta
