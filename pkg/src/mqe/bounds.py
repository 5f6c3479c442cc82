"""Gevrey bound sequences and the gamma-function toolkit.

All bound arithmetic runs in log space: Gamma(mu*k+1)^s leaves the double
range around derivative order 30 in typical cases, so every operation has a
log form and the linear forms raise OverflowError instead of returning inf.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .polyhedron import NewtonPolyhedron, k_of
from .symbols import MultiIndex

__all__ = [
    "GevreyParams",
    "derivative_bound",
    "iterate_bound",
    "gamma_shift",
    "check_convexity_inequality",
    "binomial_gamma_constant",
    "GrowthFit",
    "fit_growth",
    "theorem_hypothesis",
]

_LOG_FLOAT_MAX = math.log(sys.float_info.max)


@dataclass(frozen=True)
class GevreyParams:
    """Parameters (s, sigma, C) of the bound sequences for a polyhedron F."""

    s: float
    sigma: float
    C: float
    F: NewtonPolyhedron

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("derivative class index s must be > 0")
        if self.sigma <= 0:
            raise ValueError("coefficient class index sigma must be > 0")
        if self.C <= 0:
            raise ValueError("bound constant C must be > 0")


def theorem_hypothesis(s: float, sigma: float) -> str:
    """Which inclusion-theorem ordering the pair satisfies.

    The sufficiency direction assumes sigma > s >= 1; the necessity
    (counterexample) direction assumes s > sigma >= 1.  The two orderings are
    mutually exclusive; callers get told which applies instead of a verdict.
    """
    if sigma > s >= 1:
        return "sufficiency (sigma > s >= 1)"
    if s > sigma >= 1:
        return "necessity (s > sigma >= 1)"
    if s == sigma and s >= 1:
        return "boundary (s == sigma)"
    return "neither (requires min(s, sigma) >= 1)"


def derivative_bound(alpha: Sequence[int], params: GevreyParams, log: bool = False) -> float:
    """Bound C^{|alpha|+1} * Gamma(mu * k(alpha) + 1)^s for one derivative.

    With log=True returns the natural logarithm (always finite); otherwise
    raises OverflowError when the value exceeds the double range.
    """
    params.F.require_regular()
    a = alpha if isinstance(alpha, MultiIndex) else MultiIndex(alpha)
    gauge = k_of(params.F, a)
    log_val = (a.order + 1) * math.log(params.C) + params.s * math.lgamma(
        float(params.F.mu * gauge) + 1.0
    )
    if log:
        return log_val
    if log_val > _LOG_FLOAT_MAX:
        raise OverflowError(
            f"derivative bound exp({log_val:.1f}) exceeds float range; request the log form"
        )
    return math.exp(log_val)


def iterate_bound(level: int, params: GevreyParams, log: bool = False) -> float:
    """Bound C^{l+1} * (l!)^{s*mu} for an l-fold operator iterate."""
    if level < 0:
        raise ValueError("iterate level must be >= 0")
    params.F.require_regular()
    log_val = (level + 1) * math.log(params.C) + params.s * float(params.F.mu) * math.lgamma(
        level + 1.0
    )
    if log:
        return log_val
    if log_val > _LOG_FLOAT_MAX:
        raise OverflowError(
            f"iterate bound exp({log_val:.1f}) exceeds float range; request the log form"
        )
    return math.exp(log_val)


def gamma_shift(a: float, p: int) -> float:
    """Gamma(a + p) via the product form Gamma(a) * a * (a+1) ... (a+p-1).

    Cross-checks the log-Gamma path: the product uses plain multiplication.
    """
    if a <= 0:
        raise ValueError("gamma_shift needs a > 0")
    if p < 1 or p != int(p):
        raise ValueError("gamma_shift needs a positive integer shift")
    out = math.gamma(a)
    for i in range(int(p)):
        out *= a + i
    return out


def check_convexity_inequality(
    lam: float, tau: float, a: float, b: float, c: float, sigma: float, omega: float
) -> bool:
    """Log-safe check of the gamma convexity inequality

        lam^a Gamma(b+c+1)^sigma tau^c
            <= 2^(sigma/omega) [lam^(a+c) Gamma(b+1)^sigma
                                + Gamma(a+b+c+1)^sigma tau^(a+c)]

    on its domain lam, tau > 0; a, b, c >= omega > 0; sigma >= 1.  Expected to
    hold everywhere on the domain; a False return is a reportable defect.
    """
    if lam <= 0 or tau <= 0:
        raise ValueError("lam and tau must be > 0")
    if omega <= 0:
        raise ValueError("omega must be > 0")
    if min(a, b, c) < omega:
        raise ValueError("a, b, c must all be >= omega")
    if sigma < 1:
        raise ValueError("sigma must be >= 1")
    lhs = a * math.log(lam) + sigma * math.lgamma(b + c + 1.0) + c * math.log(tau)
    rhs_1 = (a + c) * math.log(lam) + sigma * math.lgamma(b + 1.0)
    rhs_2 = sigma * math.lgamma(a + b + c + 1.0) + (a + c) * math.log(tau)
    rhs = (sigma / omega) * math.log(2.0) + np.logaddexp(rhs_1, rhs_2)
    return lhs <= rhs


def _iter_multi_indices(dim: int, max_order: int):
    if dim == 1:
        for t in range(max_order + 1):
            yield (t,)
        return
    for head in range(max_order + 1):
        for tail in _iter_multi_indices(dim - 1, max_order - head):
            yield (head,) + tail


def binomial_gamma_constant(dim: int, q: Sequence, search_bound: int) -> float:
    """Least C (numerically, up to the search bound) such that

        gamma! / (beta! (gamma-beta)!)
            <= C^{<gamma-beta, q>} Gamma(<gamma,q>+1)
               / (Gamma(<beta,q>+1) Gamma(<gamma-beta,q>+1))

    holds for all beta <= gamma with |gamma| <= search_bound.  Monotone
    nondecreasing in the bound; the exact constant is only asserted to exist.
    """
    qv = [Fraction(x) for x in q]
    if len(qv) != dim or any(x <= 0 for x in qv):
        raise ValueError("q must be a strictly positive vector of length dim")
    best = 0.0  # log C
    for gamma in _iter_multi_indices(dim, search_bound):
        g = MultiIndex(gamma)
        gq = float(sum(Fraction(e) * x for e, x in zip(gamma, qv)))
        lg_gamma_fact = sum(math.lgamma(e + 1.0) for e in gamma)
        for beta in _iter_multi_indices(dim, g.order):
            if not g.dominates(beta):
                continue
            diff = tuple(ge - be for ge, be in zip(gamma, beta))
            dq = float(sum(Fraction(e) * x for e, x in zip(diff, qv)))
            if dq == 0.0:
                continue  # beta == gamma: both sides are 1
            bq = gq - dq
            log_multinomial = (
                lg_gamma_fact
                - sum(math.lgamma(e + 1.0) for e in beta)
                - sum(math.lgamma(e + 1.0) for e in diff)
            )
            log_gamma_ratio = math.lgamma(gq + 1.0) - math.lgamma(bq + 1.0) - math.lgamma(dq + 1.0)
            need = (log_multinomial - log_gamma_ratio) / dq
            if need > best:
                best = need
    return math.exp(best)


class GrowthFit(NamedTuple):
    C_fit: float
    s_fit: float
    residual: float
    degenerate: bool


def fit_growth(norms: Sequence[float], mu) -> GrowthFit:
    """Invert the iterate-bound shape: fit log N_l = (l+1) log C + s mu log(l!).

    Needs at least 4 positive entries.  A constant sequence is flagged
    degenerate with s_fit = 0 rather than fitted.
    """
    vals = [float(x) for x in norms]
    if len(vals) < 4:
        raise ValueError("need at least 4 norm values to fit growth")
    if any(v <= 0 for v in vals):
        raise ValueError("norms must be positive")
    mu_f = float(mu)
    y = np.array([math.log(v) for v in vals])
    if float(np.ptp(y)) < 1e-12:
        return GrowthFit(C_fit=math.exp(y[0] / 1.0), s_fit=0.0, residual=0.0, degenerate=True)
    ls = np.arange(len(vals), dtype=np.float64)
    design = np.column_stack([ls + 1.0, mu_f * np.array([math.lgamma(l + 1.0) for l in ls])])
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    return GrowthFit(C_fit=math.exp(coef[0]), s_fit=float(coef[1]), residual=resid, degenerate=False)
