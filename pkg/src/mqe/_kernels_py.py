"""Pure-Python interval/value kernels (fallback for the compiled module).

Semantics contract shared with _kernels_c.pyx, operation for operation, so the
two produce bit-identical output: every floating add/multiply is followed by an
outward nextafter nudge, which makes the interval bounds rigorous enclosures
of the exact rational evaluation (coefficients enter as [clo, chi] enclosures).

Boxes live in the closed positive orthant (callers substitute signs into the
coefficients), which keeps the monomial powers monotone.
"""

from __future__ import annotations

from math import inf, nextafter

__all__ = ["interval_bounds_many", "values_many", "IS_COMPILED"]

IS_COMPILED = False


def _pow_down(x: float, e: int) -> float:
    r = 1.0
    for _ in range(e):
        r = nextafter(r * x, -inf)
        if r < 0.0:
            r = 0.0
    return r


def _pow_up(x: float, e: int) -> float:
    r = 1.0
    for _ in range(e):
        r = nextafter(r * x, inf)
    return r


def interval_bounds_many(n, offs, exps, clo, chi, boxes_lo, boxes_hi, out_lo, out_hi):
    """Interval enclosure of m(xi) = sum_p (sum_t c_t xi^alpha_t)^2 per box.

    offs delimits the terms of each real polynomial component p; exps is the
    flattened nterms x n exponent table; [clo, chi] encloses each coefficient.
    """
    npolys = len(offs) - 1
    nboxes = len(out_lo)
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
                    # f is nonneg, [plo, phi] nonneg: endpoint products suffice
                    f_lo = nextafter(f_lo * plo, -inf)
                    f_hi = nextafter(f_hi * phi, inf)
                a = f_lo * clo[t]
                bb = f_lo * chi[t]
                c = f_hi * clo[t]
                d = f_hi * chi[t]
                lo = min(a, bb, c, d)
                hi = max(a, bb, c, d)
                s_lo = nextafter(s_lo + nextafter(lo, -inf), -inf)
                s_hi = nextafter(s_hi + nextafter(hi, inf), inf)
            if s_lo >= 0.0:
                sq_lo = nextafter(s_lo * s_lo, -inf)
                sq_hi = nextafter(s_hi * s_hi, inf)
            elif s_hi <= 0.0:
                sq_lo = nextafter(s_hi * s_hi, -inf)
                sq_hi = nextafter(s_lo * s_lo, inf)
            else:
                sq_lo = 0.0
                aa = s_lo * s_lo
                bb2 = s_hi * s_hi
                sq_hi = nextafter(aa if aa > bb2 else bb2, inf)
            m_lo = nextafter(m_lo + sq_lo, -inf)
            m_hi = nextafter(m_hi + sq_hi, inf)
        if m_lo < 0.0:
            m_lo = 0.0
        out_lo[b] = m_lo
        out_hi[b] = m_hi


def values_many(n, offs, exps, cmid, pts, out):
    """Plain float evaluation of m(xi) at each point (no interval nudging)."""
    npolys = len(offs) - 1
    npts = len(out)
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
                        for _ in range(e):
                            f *= x
                s += f
            m += s * s
        out[b] = m
