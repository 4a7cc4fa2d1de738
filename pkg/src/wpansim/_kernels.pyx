# cython: language_level=3
"""Compiled layout-scoring kernel; mirrors _kernels_py.best_layout exactly."""

from libc.math cimport fabs

BACKEND = "compiled"

cdef double _INVALID = 1e300


def best_layout(double r0, double r3, double r4,
                double x_lo, double x_step, int nx,
                double b0, double b1, double b2, double b3,
                double lo, double hi, double w):
    """See _kernels_py.best_layout; identical semantics, identical results."""
    cdef double best_score = _INVALID
    cdef double best_x1 = 0.0, best_x2 = 0.0, best_x3 = 0.0
    cdef double x1, x2, x3, e2, e2b, ov, s, sa, sb
    cdef double l_any, l_any_x, l_g3, l_g3_x
    cdef double r_any, r_any_x, r_g3, r_g3_x
    cdef int i1, i2, i3

    for i2 in range(nx):
        x2 = x_lo + i2 * x_step
        e2 = fabs(x2 - r0 - b1)
        e2b = fabs(x2 + r0 - b2)
        if e2b > e2:
            e2 = e2b
        if e2 >= best_score:
            continue

        l_any = _INVALID
        l_any_x = 0.0
        l_g3 = _INVALID
        l_g3_x = 0.0
        for i1 in range(nx):
            x1 = x_lo + i1 * x_step
            if x1 - r0 > lo:
                continue
            if x1 + r0 >= x2 - r0:
                continue
            if x1 + r4 < x2 - r4:
                continue
            ov = (x1 + r4) - (x2 - r4)
            s = fabs(x1 + r0 - b0) + w * ov
            if s < l_any:
                l_any = s
                l_any_x = x1
            if x1 + r3 < x2 - r3 and s < l_g3:
                l_g3 = s
                l_g3_x = x1
        if l_any >= _INVALID:
            continue

        r_any = _INVALID
        r_any_x = 0.0
        r_g3 = _INVALID
        r_g3_x = 0.0
        for i3 in range(nx):
            x3 = x_lo + i3 * x_step
            if x3 + r0 < hi:
                continue
            if x2 + r0 >= x3 - r0:
                continue
            if x3 - r4 > x2 + r4:
                continue
            ov = (x2 + r4) - (x3 - r4)
            s = fabs(x3 - r0 - b3) + w * ov
            if s < r_any:
                r_any = s
                r_any_x = x3
            if x2 + r3 < x3 - r3 and s < r_g3:
                r_g3 = s
                r_g3_x = x3
        if r_any >= _INVALID:
            continue

        if l_g3 < _INVALID:
            sa = e2
            if l_g3 > sa:
                sa = l_g3
            if r_any > sa:
                sa = r_any
            if sa < best_score:
                best_score = sa
                best_x1 = l_g3_x
                best_x2 = x2
                best_x3 = r_any_x
        if r_g3 < _INVALID:
            sb = e2
            if l_any > sb:
                sb = l_any
            if r_g3 > sb:
                sb = r_g3
            if sb < best_score:
                best_score = sb
                best_x1 = l_any_x
                best_x2 = x2
                best_x3 = r_g3_x

    return best_score, best_x1, best_x2, best_x3
