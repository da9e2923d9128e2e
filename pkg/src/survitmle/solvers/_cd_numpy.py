"""Pure-numpy coordinate descent sweeps. Fallback when the compiled kernel is absent.

Semantics must match ``_cd_kernel.pyx`` exactly: cyclic sweeps with an
active-set phase, soft-threshold updates, residual maintained in place.
"""

import numpy as np


def enet_cd(X, w, r, beta, col_norm2, l1, l2, max_sweeps, tol):
    """Run coordinate descent until the max coefficient update in a full sweep < tol.

    X: (n, d) design, Fortran order preferred. w: row weights summing to 1.
    r: residual y - X @ beta, updated in place. beta updated in place.
    col_norm2[j] = sum_i w_i X_ij^2. l1/l2: per-column penalty levels.
    Returns (sweeps_used, max_update_last_full_sweep).
    """
    d = beta.shape[0]
    wr_buf = np.empty_like(r)
    sweeps = 0
    max_delta = np.inf
    active = np.ones(d, dtype=bool)
    full_pass = True
    while sweeps < max_sweeps:
        sweeps += 1
        max_delta = 0.0
        cols = range(d) if full_pass else np.flatnonzero(active)
        for j in cols:
            nrm = col_norm2[j]
            if nrm <= 0.0:
                continue
            bj = beta[j]
            np.multiply(w, r, out=wr_buf)
            z = X[:, j] @ wr_buf + nrm * bj
            az = abs(z) - l1[j]
            if az <= 0.0:
                b_new = 0.0
            else:
                b_new = np.copysign(az, z) / (nrm + l2[j])
            delta = b_new - bj
            if delta != 0.0:
                r -= delta * X[:, j]
                beta[j] = b_new
                active[j] = True
            elif b_new == 0.0:
                active[j] = False
            ad = abs(delta)
            if ad > max_delta:
                max_delta = ad
        if full_pass:
            if max_delta < tol:
                return sweeps, max_delta
            full_pass = False
        elif max_delta < tol:
            full_pass = True
    return sweeps, max_delta
