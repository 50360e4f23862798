# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled feasibility kernel: alternating projections on qubit quadruples.

Mirrors ``_jm_pure.alternate`` exactly; see that module for the layout of
the 16-double iterate and the stall rule. Only the arithmetic lives here.
"""

from libc.math cimport sqrt, INFINITY

DEF STALL_WINDOW = 2000
DEF STALL_ABS = 1e-15
DEF STALL_REL = 1e-7


cdef inline void _psd_project(double* e) noexcept nogil:
    cdef double a = e[0], re = e[1], im = e[2], d = e[3]
    cdef double c = 0.5 * (a + d)
    cdef double wz = 0.5 * (a - d)
    cdef double r = sqrt(re * re + im * im + wz * wz)
    cdef double lo = c - r
    cdef double hi, s
    if lo >= 0.0:
        return
    hi = c + r
    if hi <= 0.0:
        e[0] = 0.0; e[1] = 0.0; e[2] = 0.0; e[3] = 0.0
        return
    s = hi / (2.0 * r)
    e[0] = s * (r + wz)
    e[1] = s * re
    e[2] = s * im
    e[3] = s * (r - wz)


cdef inline double _margin_error(double* g, double* p, double* q) noexcept nogil:
    cdef double worst = 0.0, err, dlt, tgt, ident
    cdef int c
    cdef int diag
    # rows: (G++ + G+-) vs P+, (G-+ + G--) vs P-
    err = 0.0
    for c in range(4):
        diag = 1 if (c == 0 or c == 3) else 0
        dlt = g[c] + g[4 + c] - p[c]
        err += dlt * dlt if diag else 2.0 * dlt * dlt
    worst = err
    err = 0.0
    for c in range(4):
        diag = 1 if (c == 0 or c == 3) else 0
        ident = 1.0 if diag else 0.0
        dlt = g[8 + c] + g[12 + c] - (ident - p[c])
        err += dlt * dlt if diag else 2.0 * dlt * dlt
    if err > worst:
        worst = err
    # columns: (G++ + G-+) vs Q+, (G+- + G--) vs Q-
    err = 0.0
    for c in range(4):
        diag = 1 if (c == 0 or c == 3) else 0
        dlt = g[c] + g[8 + c] - q[c]
        err += dlt * dlt if diag else 2.0 * dlt * dlt
    if err > worst:
        worst = err
    err = 0.0
    for c in range(4):
        diag = 1 if (c == 0 or c == 3) else 0
        ident = 1.0 if diag else 0.0
        dlt = g[4 + c] + g[12 + c] - (ident - q[c])
        err += dlt * dlt if diag else 2.0 * dlt * dlt
    if err > worst:
        worst = err
    return sqrt(worst)


cdef inline void _affine_project(double* g, double* p, double* q) noexcept nogil:
    cdef double ident, gpp, gpm, gmp, gmm, rp, rm, cp, cm, s, pp, pm, qp, qm, shift
    cdef double fix_rp, fix_rm, fix_cp, fix_cm
    cdef int c
    for c in range(4):
        ident = 1.0 if (c == 0 or c == 3) else 0.0
        gpp = g[c]; gpm = g[4 + c]; gmp = g[8 + c]; gmm = g[12 + c]
        rp = gpp + gpm
        rm = gmp + gmm
        cp = gpp + gmp
        cm = gpm + gmm
        s = rp + rm
        pp = p[c]; pm = ident - p[c]
        qp = q[c]; qm = ident - q[c]
        shift = (s - ident) * 0.25
        fix_rp = (pp - rp) * 0.5
        fix_rm = (pm - rm) * 0.5
        fix_cp = (qp - cp) * 0.5
        fix_cm = (qm - cm) * 0.5
        g[c] = gpp + fix_rp + fix_cp + shift
        g[4 + c] = gpm + fix_rp + fix_cm + shift
        g[8 + c] = gmp + fix_rm + fix_cp + shift
        g[12 + c] = gmm + fix_rm + fix_cm + shift


def alternate(double[::1] g, double[::1] p, double[::1] q, double tol, long max_iter):
    """Drop-in replacement for ``_jm_pure.alternate`` on contiguous buffers."""
    cdef double best = INFINITY
    cdef double best_at_window = INFINITY
    cdef double residual = INFINITY
    cdef double thresh
    cdef long it = 0
    cdef int e
    cdef bint converged = False
    if g.shape[0] != 16 or p.shape[0] != 4 or q.shape[0] != 4:
        raise ValueError("expected buffers of length 16, 4, 4")
    with nogil:
        while it < max_iter:
            it += 1
            for e in range(4):
                _psd_project(&g[4 * e])
            residual = _margin_error(&g[0], &p[0], &q[0])
            if residual <= tol:
                converged = True
                break
            if residual < best:
                best = residual
            if it % STALL_WINDOW == 0:
                thresh = STALL_REL * best
                if thresh < STALL_ABS:
                    thresh = STALL_ABS
                if best_at_window - best < thresh:
                    break
                best_at_window = best
            _affine_project(&g[0], &p[0], &q[0])
    return converged, residual, it
