"""Oscillatory wave-packet construction for non-elliptic witness directions.

For a witness direction xi0 (all components nonzero) on a facet q, the packet

    u(x) = integral_1^inf phi[r^{eps q}(x - x0)] e^{-r^eta}
                          e^{i <x - x0, r^q xi0>} dr

concentrates frequency along the anisotropic ray r^q xi0.  Its derivatives at
the center grow too fast for the polyhedron-weighted derivative classes of
index s, while its operator iterates stay inside the iterate-bound class:
that growth dichotomy is what this module measures.

Derivative convention: the operator acts as P(D) with D = -i d/dx, so that
P(D) e^{i<x,w>} = P(w) e^{i<x,w>}.  Amplitude coefficients c_gamma then carry
no phase factors, and the basis functions (D^gamma phi) differ from the plain
partials by a unit-modulus phase that never affects a magnitude estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import quadrature
from .bounds import GevreyParams, derivative_bound
from .bump import BumpFunction, make_bump
from .polyhedron import NewtonPolyhedron, k_of
from .symbols import MultiIndex, OperatorSymbol, RPolynomial, SymbolSystem

__all__ = [
    "WavepacketSpec",
    "choose_parameters",
    "build_spec",
    "derivative_at_center",
    "center_derivative_log_magnitude",
    "lower_bound_threshold",
    "ViolationReport",
    "gevrey_violation_check",
    "ACoefficients",
    "iterate_coefficients",
    "iterate_norm_estimate",
    "auto_bump_scale",
    "make_bump",
    "pick_test_ray",
]

MIN_WITNESS_COMPONENT = 1e-3


@dataclass(frozen=True)
class WavepacketSpec:
    """Parameters of one wave packet.

    eta is tied to epsilon by eta = (1 - eps/mu) / (mu s); both are exact
    rationals so every r-exponent downstream stays rational.
    """

    x0: tuple[float, ...]
    q: tuple[Fraction, ...]
    xi0: tuple[float, ...]
    s: float
    sigma: float
    epsilon: Fraction
    eta: Fraction
    delta: float
    F: NewtonPolyhedron

    def __post_init__(self):
        if not (self.s > self.sigma >= 1.0):
            raise ValueError("the construction needs s > sigma >= 1")
        if not (0 < self.epsilon < Fraction(1, 2)):
            raise ValueError("epsilon must lie in (0, 1/2)")
        mu = self.F.mu
        expected = (1 - self.epsilon / mu) / (mu * Fraction(self.s))
        if self.eta != expected:
            raise ValueError("eta must equal (1 - eps/mu) / (mu s)")
        if 1 / (mu * self.eta) <= Fraction(self.s):
            raise ValueError("parameters violate 1/(mu eta) > s")
        if min(abs(x) for x in self.xi0) < MIN_WITNESS_COMPONENT:
            raise ValueError(
                f"witness component below {MIN_WITNESS_COMPONENT}; ask the ellipticity "
                "search for a better conditioned direction"
            )
        if abs(sum(x * x for x in self.xi0) - 1.0) > 1e-9:
            raise ValueError("xi0 must be a Euclidean unit vector")
        if self.delta <= 0:
            raise ValueError("delta must be > 0")

    @property
    def eta_f(self) -> float:
        return float(self.eta)

    def frequency_power(self, beta: Sequence[int]) -> Fraction:
        return sum(Fraction(int(e)) * w for e, w in zip(beta, self.q))


def choose_parameters(
    s: float, sigma: float, poly: NewtonPolyhedron, system: SymbolSystem, q: Sequence[Fraction]
) -> tuple[Fraction, Fraction]:
    """Largest admissible epsilon and the tied eta, as exact rationals.

    epsilon is capped by mu(s - sigma)/(2 mu s - sigma) (< 1/2) and by
    mu (1 - <beta, q>) over the system's below-facet support; with no
    below-facet terms the second cap degrades to mu (the beta = 0 reading),
    which never binds because the first cap is < 1/2 <= mu.
    """
    if not (s > sigma >= 1.0):
        raise ValueError("the construction needs s > sigma >= 1")
    poly.require_regular()
    s_r, sigma_r = Fraction(s), Fraction(sigma)
    mu = poly.mu
    cap1 = mu * (s_r - sigma_r) / (2 * mu * s_r - sigma_r)
    qv = tuple(Fraction(x) for x in q)
    cap2 = mu
    for beta in system.support():
        bq = sum(Fraction(int(e)) * w for e, w in zip(beta, qv))
        if bq > 1:
            raise ValueError("system support exceeds the facet half-space <beta,q> <= 1")
        if bq < 1:
            cap2 = min(cap2, mu * (1 - bq))
    eps = min(cap1, cap2)
    eta = (1 - eps / mu) / (mu * s_r)
    assert 1 / (mu * eta) > s_r
    return eps, eta


def build_spec(
    system: SymbolSystem,
    poly: NewtonPolyhedron,
    q: Sequence[Fraction],
    xi0: Sequence[float],
    s: float,
    sigma: float,
    delta: float = 0.5,
    x0: Sequence[float] | None = None,
) -> WavepacketSpec:
    eps, eta = choose_parameters(s, sigma, poly, system, q)
    center = tuple(x0) if x0 is not None else (0.0,) * system.dim
    return WavepacketSpec(
        x0=center,
        q=tuple(Fraction(x) for x in q),
        xi0=tuple(float(x) for x in xi0),
        s=float(s),
        sigma=float(sigma),
        epsilon=eps,
        eta=eta,
        delta=float(delta),
        F=poly,
    )


# -- center derivatives --------------------------------------------------------


def _xi0_power_log(spec: WavepacketSpec, beta: Sequence[int]) -> float:
    return sum(e * math.log(abs(x)) for e, x in zip(beta, spec.xi0) if e)


def derivative_at_center(spec: WavepacketSpec, beta: Sequence[int]) -> complex:
    """d^beta u at the center: i^{|beta|} xi0^beta * integral r^{<beta,q>} e^{-r^eta} dr.

    Exact identity: the bump is flat at the center, so only the oscillatory
    factor differentiates.  The integral runs through adaptive quadrature;
    raises OverflowError when the value leaves the double range (use the log
    magnitude form then).
    """
    b = beta if isinstance(beta, MultiIndex) else MultiIndex(beta)
    if b.dim != spec.F.dim:
        raise ValueError("beta has wrong dimension")
    a = float(spec.frequency_power(b))
    integral = quadrature.decaying_power_integral(a, spec.eta_f)
    xi_pow = 1.0
    for x, e in zip(spec.xi0, b):
        xi_pow *= x**e
    return (1j) ** (b.order % 4) * xi_pow * integral


def center_derivative_log_magnitude(spec: WavepacketSpec, beta: Sequence[int]) -> float:
    """log |d^beta u(x0)|, robust for arbitrarily high orders."""
    b = beta if isinstance(beta, MultiIndex) else MultiIndex(beta)
    a = float(spec.frequency_power(b))
    return quadrature.log_decaying_power_integral(a, spec.eta_f) + _xi0_power_log(spec, b)


def lower_bound_threshold(spec: WavepacketSpec, alpha: Sequence[int], m_max: int = 64) -> int | None:
    """Smallest m with |d^{m alpha}u(x0)| > (1/(2 eta)) |xi0^{m alpha}| Gamma((<m alpha,q>+1)/eta).

    The closed-form lower bound holds for all sufficiently large m; the
    threshold is found empirically and reported.
    """
    a1 = alpha if isinstance(alpha, MultiIndex) else MultiIndex(alpha)
    eta = spec.eta_f
    for m in range(1, m_max + 1):
        beta = MultiIndex(tuple(m * e for e in a1))
        lhs = center_derivative_log_magnitude(spec, beta)
        shape = (float(spec.frequency_power(beta)) + 1.0) / eta
        rhs = -math.log(2.0 * eta) + _xi0_power_log(spec, beta) + math.lgamma(shape)
        if lhs > rhs:
            return m
    return None


# -- derivative-class violation sweep -------------------------------------------


@dataclass(frozen=True)
class ViolationReport:
    alpha: MultiIndex
    s_index: float
    orders: tuple[int, ...]
    lhs_logs: tuple[float, ...]  # log |d^{m alpha} u(x0)| per order
    exceedance: dict[float, tuple[int, ...]]  # C -> orders where lhs > bound

    def all_constants_exceeded(self) -> bool:
        return all(len(orders) > 0 for orders in self.exceedance.values())

    def to_json_dict(self) -> dict:
        return {
            "alpha": list(map(int, self.alpha)),
            "s_index": self.s_index,
            "orders": list(self.orders),
            "lhs_log": list(self.lhs_logs),
            "exceedance_orders": {str(c): list(v) for c, v in self.exceedance.items()},
            "arithmetic": "float",
        }


def gevrey_violation_check(
    spec: WavepacketSpec,
    alpha: Sequence[int],
    m_range: Iterable[int],
    s_index: float,
    C_values: Sequence[float] = (1.0, 10.0, 100.0),
) -> ViolationReport:
    """Compare log |d^{m alpha}u(x0)| with the derivative-class bound of index s.

    Requires the ray to attain its gauge on the chosen facet (k(alpha) =
    <alpha, q>), so the bound's Gamma argument grows exactly with the packet's
    frequency power.  For every fixed C the packet derivatives must eventually
    exceed the bound when s < 1/(mu eta); the report records which sweep
    orders already do.
    """
    a1 = alpha if isinstance(alpha, MultiIndex) else MultiIndex(alpha)
    gauge = k_of(spec.F, a1)
    if gauge != spec.frequency_power(a1):
        raise ValueError("alpha must attain its gauge on the witness facet: k(alpha) = <alpha,q>")
    orders = tuple(sorted(set(int(m) for m in m_range)))
    lhs_logs = []
    bounds_per_c: dict[float, list[float]] = {float(c): [] for c in C_values}
    for m in orders:
        beta = MultiIndex(tuple(m * e for e in a1))
        lhs_logs.append(center_derivative_log_magnitude(spec, beta))
        for c in bounds_per_c:
            params = GevreyParams(s=s_index, sigma=spec.sigma, C=c, F=spec.F)
            bounds_per_c[c].append(derivative_bound(beta, params, log=True))
    exceedance = {
        c: tuple(m for m, lhs, bnd in zip(orders, lhs_logs, blist) if lhs > bnd)
        for c, blist in bounds_per_c.items()
    }
    return ViolationReport(
        alpha=a1,
        s_index=float(s_index),
        orders=orders,
        lhs_logs=tuple(lhs_logs),
        exceedance=exceedance,
    )


def pick_test_ray(poly: NewtonPolyhedron, q: Sequence[Fraction], stretch: int = 1) -> MultiIndex:
    """A facet-attaining ray: a hull vertex on the facet, optionally stretched.

    Any positive multiple keeps the gauge equality k(alpha) = <alpha, q>.
    """
    qv = tuple(Fraction(x) for x in q)
    for v in sorted(poly.vertices):
        if v.order and sum(Fraction(int(e)) * w for e, w in zip(v, qv)) == 1:
            return MultiIndex(tuple(int(e) * stretch for e in v))
    raise ValueError("no facet vertex found for the given q")


# -- iterate amplitude recursion -------------------------------------------------


@dataclass(frozen=True)
class ACoefficients:
    """Level-k iterate amplitude in the derivative basis:

        A(x, r) = sum_gamma c_gamma(r) * (D^gamma phi)(r^{eps q}(x - x0)).

    Level 0 is exactly {gamma = 0: 1}; every c_gamma exponent is a nonnegative
    rational.
    """

    level: int
    coeffs: dict[MultiIndex, RPolynomial]
    spec: WavepacketSpec

    def max_gamma_order(self) -> int:
        return max((g.order for g in self.coeffs), default=0)

    def evaluate(self, x: Sequence[float], r: float, bump: BumpFunction) -> complex:
        """A(x, r) with the physical (-i)^{|gamma|} phases of the basis."""
        y = tuple(
            r ** (float(self.spec.epsilon) * float(w)) * (xj - cj)
            for w, xj, cj in zip(self.spec.q, x, self.spec.x0)
        )
        total = 0j
        for gamma, c in self.coeffs.items():
            d = bump.derivative(gamma, y)
            if d:
                total += c(r) * (-1j) ** (gamma.order % 4) * d
        return total


def _derivative_ray_polys(
    symbol: OperatorSymbol, spec: WavepacketSpec
) -> dict[MultiIndex, RPolynomial]:
    """alpha -> (1/alpha!) P^(alpha)(r^q xi0) * r^{eps <alpha,q>} as r-polynomials."""
    out: dict[MultiIndex, RPolynomial] = {}
    alphas: set[MultiIndex] = set()
    for beta in symbol.terms:
        for alpha in _sub_indices(beta):
            alphas.add(alpha)
    for alpha in alphas:
        deriv = symbol.xi_derivative(alpha)
        if deriv.is_zero():
            continue
        terms: dict[Fraction, complex] = {}
        for rest, coeff in deriv.terms.items():
            exponent = spec.frequency_power(rest)
            xi_pow = 1.0
            for x, e in zip(spec.xi0, rest):
                xi_pow *= x**e
            terms[exponent] = terms.get(exponent, 0j) + coeff.to_complex() * xi_pow
        rp = RPolynomial(terms) * (1.0 / alpha.factorial())
        rp = rp * RPolynomial({spec.epsilon * spec.frequency_power(alpha): 1.0})
        if not rp.is_zero():
            out[alpha] = rp
    return out


def _sub_indices(beta: MultiIndex) -> Iterable[MultiIndex]:
    ranges = [range(e + 1) for e in beta]

    def rec(i: int, acc: list[int]):
        if i == len(ranges):
            yield MultiIndex(acc)
            return
        for v in ranges[i]:
            yield from rec(i + 1, acc + [v])

    yield from rec(0, [])


def iterate_coefficients(
    spec: WavepacketSpec, system: SymbolSystem, sequence: Sequence[int]
) -> ACoefficients:
    """Amplitude coefficients after applying the operators in ``sequence``.

    ``sequence`` holds 1-based symbol indices, applied left to right.  Each
    application maps c_gamma to sum_alpha weight_alpha(r) * c_gamma shifted to
    gamma + alpha, where the weights are the scaled symbol derivatives along
    the frequency ray.  Rejects symbols with support above the facet
    (<beta, q> > 1), which would contradict the polyhedron.
    """
    for j, sym in enumerate(system.symbols, start=1):
        for beta in sym.terms:
            if spec.frequency_power(beta) > 1:
                raise ValueError(
                    f"symbol {j} has support with <beta,q> > 1 on the witness facet"
                )
    weights = [_derivative_ray_polys(sym, spec) for sym in system.symbols]
    dim = system.dim
    coeffs: dict[MultiIndex, RPolynomial] = {MultiIndex.zero(dim): RPolynomial({0: 1.0})}
    for idx in sequence:
        if not (1 <= idx <= len(system.symbols)):
            raise ValueError(f"symbol index {idx} out of range")
        w = weights[idx - 1]
        nxt: dict[MultiIndex, RPolynomial] = {}
        for gamma, c in coeffs.items():
            for alpha, weight in w.items():
                key = gamma + alpha
                add = weight * c
                if key in nxt:
                    nxt[key] = nxt[key] + add
                else:
                    nxt[key] = add
        coeffs = {g: c for g, c in nxt.items() if not c.is_zero()}
    return ACoefficients(level=len(sequence), coeffs=coeffs, spec=spec)


def auto_bump_scale(dim: int, profile_power: int = 6, target: float = 0.2) -> float:
    """Plateau radius that normalizes sup|grad phi| to roughly ``target``.

    The first-derivative sup scales like 1/delta, and an O(1) normalization
    keeps the level-k norm estimates free of a large geometric prefactor that
    the intercept-free growth fit cannot absorb.  Every bump invariant and
    every upper-bound property is independent of this choice.
    """
    probe = BumpFunction(dim=dim, delta=1.0, order=1, profile_power=profile_power)
    k1 = max(probe.sup_norm(MultiIndex.unit(dim, j)) for j in range(dim))
    return max(k1 / target, 1.0)


def iterate_norm_estimate(
    coeffs: ACoefficients, spec: WavepacketSpec, bump: BumpFunction
) -> float:
    """Upper bound for sup_x |P_{i_k} ... P_{i_1} u(x)| by the triangle inequality:

        integral_1^inf sum_gamma |c_gamma(r)| sup|D^gamma phi| e^{-r^eta} dr.
    """
    top = coeffs.max_gamma_order()
    if bump.order < top:
        raise ValueError(f"bump order {bump.order} below the needed derivative order {top}")
    groups: list[tuple[float, np.ndarray, np.ndarray]] = []
    growth = 0.0
    for gamma, c in coeffs.coeffs.items():
        sup = bump.sup_norm(gamma)
        if sup == 0.0 or c.is_zero():
            continue
        exps = np.array([float(e) for e in c.terms], dtype=np.float64)
        cof = np.array(list(c.terms.values()), dtype=np.complex128)
        groups.append((sup, exps, cof))
        growth = max(growth, float(c.max_exponent()))
    if not groups:
        return 0.0

    def amplitude(r: float) -> float:
        total = 0.0
        logr = math.log(r)
        for sup, exps, cof in groups:
            val = np.abs(np.sum(cof * np.exp(exps * logr)))
            total += sup * float(val)
        return total

    return quadrature.amplitude_decay_integral(amplitude, spec.eta_f, growth)
