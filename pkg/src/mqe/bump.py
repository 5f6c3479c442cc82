"""Radial plateau bump with derivative evaluation to a declared order.

The bump is phi(x) = g(|x|^2 / delta^2) where g is a smooth step built from
the compactly supported profile f(t) = exp(-t^(-p)): g == 1 for u <= 1
(|x| <= delta), g == 0 for u >= 4 (|x| >= 2*delta).  Larger profile powers p
give a sharper (closer to Gevrey-1) profile with smaller high-order
derivative norms; p = 1 recovers the classic exp(-1/t) shape.

Mixed partials come from the radial structure: D^gamma phi is a finite sum
sum_m g^(m)(u(x)) * Q_{gamma,m}(x) with polynomial Q, built by an exact
recursion in gamma, while the 1-D derivatives g^(m) come from truncated
Taylor-jet arithmetic (automatic differentiation) on the profile.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .symbols import ExactComplex, MultiIndex, OperatorSymbol

__all__ = ["Jet", "BumpFunction", "make_bump", "MAX_ORDER"]

MAX_ORDER = 20

_T_FLOOR = 1e-8  # below this the profile and all tracked derivatives underflow to 0


class Jet:
    """Truncated Taylor series (c_0 .. c_M) at a point; c_k = f^(k)/k!."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence[float]):
        self.c = list(coeffs)

    @staticmethod
    def constant(value: float, order: int) -> "Jet":
        return Jet([value] + [0.0] * order)

    @staticmethod
    def variable(value: float, order: int) -> "Jet":
        c = [value] + [0.0] * order
        if order >= 1:
            c[1] = 1.0
        return Jet(c)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def __add__(self, other: "Jet") -> "Jet":
        return Jet([a + b for a, b in zip(self.c, other.c)])

    def __sub__(self, other: "Jet") -> "Jet":
        return Jet([a - b for a, b in zip(self.c, other.c)])

    def __neg__(self) -> "Jet":
        return Jet([-a for a in self.c])

    def scale(self, k: float) -> "Jet":
        return Jet([k * a for a in self.c])

    def __mul__(self, other: "Jet") -> "Jet":
        m = self.order
        out = [0.0] * (m + 1)
        for i, a in enumerate(self.c):
            if a == 0.0:
                continue
            for j in range(m + 1 - i):
                b = other.c[j]
                if b != 0.0:
                    out[i + j] += a * b
        return Jet(out)

    def reciprocal(self) -> "Jet":
        if self.c[0] == 0.0:
            raise ZeroDivisionError("jet reciprocal at a zero value")
        m = self.order
        out = [0.0] * (m + 1)
        out[0] = 1.0 / self.c[0]
        for k in range(1, m + 1):
            s = 0.0
            for j in range(1, k + 1):
                s += self.c[j] * out[k - j]
            out[k] = -s / self.c[0]
        return Jet(out)

    def __truediv__(self, other: "Jet") -> "Jet":
        return self * other.reciprocal()

    def powi(self, n: int) -> "Jet":
        out = Jet.constant(1.0, self.order)
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def exp(self) -> "Jet":
        m = self.order
        out = [0.0] * (m + 1)
        out[0] = math.exp(self.c[0])
        for k in range(1, m + 1):
            s = 0.0
            for j in range(1, k + 1):
                s += j * self.c[j] * out[k - j]
            out[k] = s / k
        return Jet(out)

    def derivative(self, k: int) -> float:
        """f^(k) at the expansion point."""
        return self.c[k] * math.factorial(k)


def _profile_jet(t: Jet, power: int) -> Jet:
    """Jet of f(t) = exp(-t^(-p)), zero (with all derivatives) for t <= floor."""
    if t.c[0] <= _T_FLOOR:
        return Jet.constant(0.0, t.order)
    return (-t.reciprocal().powi(power)).exp()


def _smooth_step_jet(t: Jet, power: int) -> Jet:
    """Jet of S(t) = f(t) / (f(t) + f(1-t)): 0 for t <= 0, 1 for t >= 1."""
    one = Jet.constant(1.0, t.order)
    ft = _profile_jet(t, power)
    fc = _profile_jet(one - t, power)
    return ft / (ft + fc)


class BumpFunction:
    """Plateau bump with derivative evaluation and sup-norm estimates.

    Invariants: phi == 1 on |x| <= delta, phi == 0 on |x| >= 2*delta,
    0 <= phi <= 1, and every derivative of order 1..order vanishes at 0.
    """

    def __init__(self, dim: int, delta: float, order: int, profile_power: int = 6):
        if delta <= 0:
            raise ValueError("plateau radius delta must be > 0")
        if order < 0 or order > MAX_ORDER:
            raise ValueError(f"derivative order must be in 0..{MAX_ORDER}")
        if profile_power < 1:
            raise ValueError("profile_power must be >= 1")
        self.dim = dim
        self.delta = float(delta)
        self.order = int(order)
        self.profile_power = int(profile_power)
        self._inv_d2 = Fraction(1) / (Fraction(self.delta) * Fraction(self.delta))
        self._rep_cache: dict[MultiIndex, dict[int, OperatorSymbol]] = {}
        self._sup_cache: dict[MultiIndex, float] = {}
        self._grid_jets: dict[int, list[tuple[float, list[float]]]] = {}

    # -- 1-D machinery -------------------------------------------------------

    def _g_jet(self, u: float, order: int) -> Jet:
        """Jet of the radial step g(u) = S((4-u)/3) at u, exact on the flats."""
        if u <= 1.0:
            return Jet.constant(1.0, order)
        if u >= 4.0:
            return Jet.constant(0.0, order)
        t = Jet.variable(u, order)
        s_arg = (Jet.constant(4.0, order) - t).scale(1.0 / 3.0)
        return _smooth_step_jet(s_arg, self.profile_power)

    # -- derivative representation -------------------------------------------

    def _representation(self, gamma: MultiIndex) -> dict[int, OperatorSymbol]:
        """D^gamma phi = sum_m g^(m)(u(x)) Q_m(x), Q_m exact polynomials."""
        if gamma in self._rep_cache:
            return self._rep_cache[gamma]
        if gamma.order == 0:
            rep = {0: OperatorSymbol(self.dim, {MultiIndex.zero(self.dim): 1})}
        else:
            j = next(i for i, e in enumerate(gamma) if e > 0)
            prev = self._representation(gamma - MultiIndex.unit(self.dim, j))
            rep = {}
            xj = OperatorSymbol(self.dim, {MultiIndex.unit(self.dim, j): ExactComplex(2 * self._inv_d2)})
            for m, poly in prev.items():
                up = xj * poly  # chain-rule factor d(u)/dx_j = 2 x_j / delta^2
                rep[m + 1] = rep.get(m + 1, OperatorSymbol(self.dim, {})) + up
                dpoly = _partial(poly, j)
                if not dpoly.is_zero():
                    rep[m] = rep.get(m, OperatorSymbol(self.dim, {})) + dpoly
            rep = {m: p for m, p in rep.items() if not p.is_zero()}
        self._rep_cache[gamma] = rep
        return rep

    # -- public surface --------------------------------------------------------

    def value(self, x: Sequence[float]) -> float:
        u = sum(v * v for v in x) * float(self._inv_d2)
        return self._g_jet(u, 0).c[0]

    def derivative(self, gamma: Sequence[int], x: Sequence[float]) -> float:
        """Pointwise mixed partial d^gamma phi (plain derivative convention)."""
        g = gamma if isinstance(gamma, MultiIndex) else MultiIndex(gamma)
        if g.order > self.order:
            raise ValueError(f"order {g.order} exceeds the declared bump order {self.order}")
        rep = self._representation(g)
        if not rep:
            return 0.0
        u = sum(v * v for v in x) * float(self._inv_d2)
        jet = self._g_jet(u, max(rep))
        total = 0.0
        for m, poly in rep.items():
            total += jet.derivative(m) * poly.evaluate(x).real
        return total

    def _radial_derivative_table(self, grid: int) -> list[tuple[float, list[float]]]:
        """(rho, [|g^(m)(u(rho))| for m <= order]) per grid point, cached."""
        if grid in self._grid_jets:
            return self._grid_jets[grid]
        table = []
        for i in range(grid + 1):
            rho = self.delta * (1.0 + i / grid)  # derivatives live on delta <= |x| <= 2 delta
            u = (rho / self.delta) ** 2
            jet = self._g_jet(u, self.order)
            table.append((rho, [abs(jet.derivative(m)) for m in range(self.order + 1)]))
        self._grid_jets[grid] = table
        return table

    def sup_norm(self, gamma: Sequence[int], grid: int = 4000) -> float:
        """Upper estimate of sup_x |d^gamma phi| via radial majorization.

        |Q(x)| <= sum |coef| * rho^{|kappa|} on the sphere |x| = rho, so the
        returned value majorizes the true sup up to the radial grid
        resolution.  Exact for first-order derivatives (single-monomial Q).
        """
        g = gamma if isinstance(gamma, MultiIndex) else MultiIndex(gamma)
        if g.order > self.order:
            raise ValueError(f"order {g.order} exceeds the declared bump order {self.order}")
        if g.order == 0:
            return 1.0
        if g in self._sup_cache:
            return self._sup_cache[g]
        rep = self._representation(g)
        if not rep:
            self._sup_cache[g] = 0.0
            return 0.0
        majorants = {
            m: [(kappa.order, abs(float(c.re))) for kappa, c in poly.terms.items()]
            for m, poly in rep.items()
        }
        best = 0.0
        for rho, derivs in self._radial_derivative_table(grid):
            total = 0.0
            for m, terms in majorants.items():
                gm = derivs[m]
                if gm:
                    total += gm * sum(c * rho**k for k, c in terms)
            if total > best:
                best = total
        self._sup_cache[g] = best
        return best


def _partial(poly: OperatorSymbol, j: int) -> OperatorSymbol:
    return poly.xi_derivative(MultiIndex.unit(poly.dim, j))


def make_bump(delta: float, order: int, dim: int = 2, profile_power: int = 6) -> BumpFunction:
    """Plateau bump of the given support scale and derivative order."""
    return BumpFunction(dim=dim, delta=delta, order=order, profile_power=profile_power)
