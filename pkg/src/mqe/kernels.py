"""Kernel selection and the polynomial-system layout fed to the kernels.

At import time the compiled extension is preferred; the pure-Python module is
a drop-in replacement with identical semantics (and identical bits).
"""

from __future__ import annotations

from fractions import Fraction
from math import inf, nextafter
from typing import Sequence

import numpy as np

from .symbols import OperatorSymbol

try:  # pragma: no cover - exercised implicitly by which path imports
    from . import _kernels_c as _impl

    USING_COMPILED = True
except ImportError:  # pragma: no cover
    from . import _kernels_py as _impl

    USING_COMPILED = False

from . import _kernels_py as _pure

__all__ = ["PolySystemLayout", "USING_COMPILED", "implementations"]


def _coeff_enclosure(value: Fraction) -> tuple[float, float]:
    f = float(value)  # correctly rounded for Fraction
    if Fraction(f) == value:
        return f, f
    return nextafter(f, -inf), nextafter(f, inf)


class PolySystemLayout:
    """Flat arrays describing m(xi) = sum_p (sum_t c_t xi^alpha_t)^2.

    Each entry of ``components`` is one real polynomial: a list of
    (exponent tuple, Fraction coefficient) pairs.  Use
    ``from_symbols`` to split complex symbols into real/imaginary components.
    """

    def __init__(self, dim: int, components: Sequence[Sequence[tuple[tuple[int, ...], Fraction]]]):
        self.dim = dim
        offs = [0]
        exps: list[int] = []
        clo: list[float] = []
        chi: list[float] = []
        cmid: list[float] = []
        for comp in components:
            for alpha, coeff in comp:
                exps.extend(int(e) for e in alpha)
                lo, hi = _coeff_enclosure(coeff)
                clo.append(lo)
                chi.append(hi)
                cmid.append(float(coeff))
            offs.append(offs[-1] + len(comp))
        self.offs = np.asarray(offs, dtype=np.intc)
        self.exps = np.asarray(exps if exps else [0], dtype=np.intc)
        self.clo = np.asarray(clo, dtype=np.float64)
        self.chi = np.asarray(chi, dtype=np.float64)
        self.cmid = np.asarray(cmid, dtype=np.float64)

    @staticmethod
    def from_symbols(symbols: Sequence[OperatorSymbol], signs: Sequence[int] | None = None) -> "PolySystemLayout":
        """Real/imaginary split of each symbol; optional orthant sign baking.

        With ``signs`` s in {-1, +1}^n the layout represents m(s * t) as a
        polynomial in t, so boxes stay in the positive orthant.
        """
        dim = symbols[0].dim
        comps = []
        for sym in symbols:
            re_terms, im_terms = [], []
            for alpha, coeff in sym.terms.items():
                sgn = 1
                if signs is not None:
                    for sj, e in zip(signs, alpha):
                        if sj < 0 and e % 2 == 1:
                            sgn = -sgn
                if coeff.re:
                    re_terms.append((tuple(alpha), coeff.re * sgn))
                if coeff.im:
                    im_terms.append((tuple(alpha), coeff.im * sgn))
            if re_terms:
                comps.append(re_terms)
            if im_terms:
                comps.append(im_terms)
        if not comps:
            comps = [[(((0,) * dim), Fraction(0))]]
        return PolySystemLayout(dim, comps)

    def interval_bounds(self, boxes_lo: np.ndarray, boxes_hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Rigorous [lo, hi] enclosures of m over each box (rows of the inputs)."""
        blo = np.ascontiguousarray(boxes_lo, dtype=np.float64).reshape(-1)
        bhi = np.ascontiguousarray(boxes_hi, dtype=np.float64).reshape(-1)
        nboxes = blo.size // self.dim
        out_lo = np.empty(nboxes, dtype=np.float64)
        out_hi = np.empty(nboxes, dtype=np.float64)
        _impl.interval_bounds_many(
            self.dim, self.offs, self.exps, self.clo, self.chi, blo, bhi, out_lo, out_hi
        )
        return out_lo, out_hi

    def values(self, pts: np.ndarray) -> np.ndarray:
        flat = np.ascontiguousarray(pts, dtype=np.float64).reshape(-1)
        npts = flat.size // self.dim
        out = np.empty(npts, dtype=np.float64)
        _impl.values_many(self.dim, self.offs, self.exps, self.cmid, flat, out)
        return out


def implementations():
    """(active, pure) kernel modules, for parity tests and benchmarks."""
    return _impl, _pure
