# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled interval/value kernels.

Must stay operation-for-operation identical to _kernels_py.py: the test suite
asserts bit-identical output between the two implementations.
"""

from libc.math cimport nextafter, INFINITY

IS_COMPILED = True


cdef inline double _pow_down(double x, int e) noexcept nogil:
    cdef double r = 1.0
    cdef int i
    for i in range(e):
        r = nextafter(r * x, -INFINITY)
        if r < 0.0:
            r = 0.0
    return r


cdef inline double _pow_up(double x, int e) noexcept nogil:
    cdef double r = 1.0
    cdef int i
    for i in range(e):
        r = nextafter(r * x, INFINITY)
    return r


def interval_bounds_many(int n, int[::1] offs, int[::1] exps,
                         double[::1] clo, double[::1] chi,
                         double[::1] boxes_lo, double[::1] boxes_hi,
                         double[::1] out_lo, double[::1] out_hi):
    cdef int npolys = offs.shape[0] - 1
    cdef int nboxes = out_lo.shape[0]
    cdef int b, p, t, j, e
    cdef double m_lo, m_hi, s_lo, s_hi, f_lo, f_hi, plo, phi
    cdef double a, bb, c, d, lo, hi, sq_lo, sq_hi, aa, bb2
    with nogil:
        for b in range(nboxes):
            m_lo = 0.0
            m_hi = 0.0
            for p in range(npolys):
                s_lo = 0.0
                s_hi = 0.0
                for t in range(offs[p], offs[p + 1]):
                    f_lo = 1.0
                    f_hi = 1.0
                    for j in range(n):
                        e = exps[t * n + j]
                        if e == 0:
                            continue
                        plo = _pow_down(boxes_lo[b * n + j], e)
                        phi = _pow_up(boxes_hi[b * n + j], e)
                        f_lo = nextafter(f_lo * plo, -INFINITY)
                        f_hi = nextafter(f_hi * phi, INFINITY)
                    a = f_lo * clo[t]
                    bb = f_lo * chi[t]
                    c = f_hi * clo[t]
                    d = f_hi * chi[t]
                    lo = a
                    if bb < lo: lo = bb
                    if c < lo: lo = c
                    if d < lo: lo = d
                    hi = a
                    if bb > hi: hi = bb
                    if c > hi: hi = c
                    if d > hi: hi = d
                    s_lo = nextafter(s_lo + nextafter(lo, -INFINITY), -INFINITY)
                    s_hi = nextafter(s_hi + nextafter(hi, INFINITY), INFINITY)
                if s_lo >= 0.0:
                    sq_lo = nextafter(s_lo * s_lo, -INFINITY)
                    sq_hi = nextafter(s_hi * s_hi, INFINITY)
                elif s_hi <= 0.0:
                    sq_lo = nextafter(s_hi * s_hi, -INFINITY)
                    sq_hi = nextafter(s_lo * s_lo, INFINITY)
                else:
                    sq_lo = 0.0
                    aa = s_lo * s_lo
                    bb2 = s_hi * s_hi
                    sq_hi = nextafter(aa if aa > bb2 else bb2, INFINITY)
                m_lo = nextafter(m_lo + sq_lo, -INFINITY)
                m_hi = nextafter(m_hi + sq_hi, INFINITY)
            if m_lo < 0.0:
                m_lo = 0.0
            out_lo[b] = m_lo
            out_hi[b] = m_hi


def values_many(int n, int[::1] offs, int[::1] exps, double[::1] cmid,
                double[::1] pts, double[::1] out):
    cdef int npolys = offs.shape[0] - 1
    cdef int npts = out.shape[0]
    cdef int b, p, t, j, e, i
    cdef double m, s, f, x
    with nogil:
        for b in range(npts):
            m = 0.0
            for p in range(npolys):
                s = 0.0
                for t in range(offs[p], offs[p + 1]):
                    f = cmid[t]
                    for j in range(n):
                        e = exps[t * n + j]
                        if e:
                            x = pts[b * n + j]
                            for i in range(e):
                                f *= x
                    s += f
                m += s * s
            out[b] = m
