"""Quadrature for the wave-packet integrals: smooth, rapidly decaying tails.

Primary route: adaptive Gauss-Kronrod panels (QUADPACK) on the r axis with an
explicit truncation radius.  The independent cross-check used by the tests is
the upper-incomplete-gamma closed form, which never touches a quadrature rule.
"""

from __future__ import annotations

import math

from scipy import integrate, special

__all__ = [
    "truncation_radius",
    "decaying_power_integral",
    "log_decaying_power_integral",
    "upper_gamma_closed_form",
    "log_upper_gamma_closed_form",
    "amplitude_decay_integral",
]

#: Integrand values below PEAK_CUTOFF * peak are treated as zero tail.
PEAK_CUTOFF = 1e-18


def _log_integrand_peak(a: float, eta: float) -> tuple[float, float]:
    """(r_peak, log peak value) of r^a exp(-r^eta) on [1, inf)."""
    if a <= 0:
        return 1.0, -1.0  # decreasing; peak at the left endpoint, g(1) = -1
    r_peak = (a / eta) ** (1.0 / eta)
    r_peak = max(r_peak, 1.0)
    return r_peak, a * math.log(r_peak) - r_peak**eta


def truncation_radius(a: float, eta: float, cutoff: float = PEAK_CUTOFF) -> float:
    """Smallest radius past the peak where r^a exp(-r^eta) < cutoff * peak."""
    if eta <= 0:
        raise ValueError("eta must be > 0")
    r_peak, log_peak = _log_integrand_peak(a, eta)
    target = log_peak + math.log(cutoff)

    def g(r: float) -> float:
        return a * math.log(r) - r**eta

    hi = max(2.0 * r_peak, 2.0)
    while g(hi) > target:
        hi *= 2.0
    lo = r_peak
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-9 * hi:
            break
    return hi


def decaying_power_integral(a: float, eta: float, rel_tol: float = 1e-11) -> float:
    """integral_1^inf r^a exp(-r^eta) dr by adaptive panels on the r axis.

    Raises on non-convergence; use the log form when the integrand magnitude
    would leave the double range.
    """
    if eta <= 0:
        raise ValueError("eta must be > 0")
    r_peak, log_peak = _log_integrand_peak(a, eta)
    if log_peak > 700.0:
        raise OverflowError("integrand exceeds float range; use log_decaying_power_integral")
    r_max = truncation_radius(a, eta)

    def f(r: float) -> float:
        # single exp of the log keeps r^a from overflowing before the decay bites
        return math.exp(a * math.log(r) - r**eta) if r > 0 else 0.0

    pts = [r_peak] if 1.0 < r_peak < r_max else None
    value, err = integrate.quad(f, 1.0, r_max, epsabs=0.0, epsrel=rel_tol, limit=400, points=pts)
    if not math.isfinite(value) or (value > 0 and err > 1e-6 * value):
        raise ArithmeticError(f"quadrature did not converge (value={value}, err={err})")
    return value


def log_decaying_power_integral(a: float, eta: float, rel_tol: float = 1e-11) -> float:
    """log of integral_1^inf r^a exp(-r^eta) dr, robust for any power a.

    Substitutes y = log r (a plain reparameterization, not the gamma-function
    substitution used by the closed-form oracle) and integrates
    exp((a+1)y - e^{eta y} - M) with the running maximum M factored out.
    """
    if eta <= 0:
        raise ValueError("eta must be > 0")

    def g(y: float) -> float:
        return (a + 1.0) * y - math.exp(eta * y)

    if a + 1.0 > 0:
        y_peak = max(math.log((a + 1.0) / eta) / eta, 0.0)
    else:
        y_peak = 0.0
    m_val = g(y_peak)
    y_hi = y_peak + 1.0
    while g(y_hi) > m_val + math.log(PEAK_CUTOFF) - 5.0:
        y_hi += 1.0

    def f(y: float) -> float:
        return math.exp(g(y) - m_val)

    pts = [y_peak] if 0.0 < y_peak < y_hi else None
    value, err = integrate.quad(f, 0.0, y_hi, epsabs=0.0, epsrel=rel_tol, limit=400, points=pts)
    if value <= 0 or not math.isfinite(value) or err > 1e-6 * value:
        raise ArithmeticError(f"log-quadrature did not converge (value={value}, err={err})")
    return m_val + math.log(value)


def upper_gamma_closed_form(a: float, eta: float) -> float:
    """(1/eta) * Gamma_upper((a+1)/eta, 1): the closed form of the integral."""
    shape = (a + 1.0) / eta
    return special.gammaincc(shape, 1.0) * math.exp(math.lgamma(shape)) / eta


def log_upper_gamma_closed_form(a: float, eta: float) -> float:
    shape = (a + 1.0) / eta
    q = special.gammaincc(shape, 1.0)
    return math.log(q) + math.lgamma(shape) - math.log(eta)


def amplitude_decay_integral(
    amplitude, eta: float, growth_power: float, rel_tol: float = 1e-9
) -> float:
    """integral_1^inf amplitude(r) exp(-r^eta) dr for amplitude >= 0.

    ``growth_power`` bounds the polynomial growth of the amplitude and fixes
    the truncation radius.
    """
    r_max = truncation_radius(max(growth_power, 0.0), eta)
    r_peak, _ = _log_integrand_peak(max(growth_power, 0.0), eta)

    def f(r: float) -> float:
        return amplitude(r) * math.exp(-(r**eta))

    pts = [r_peak] if 1.0 < r_peak < r_max else None
    value, err = integrate.quad(f, 1.0, r_max, epsabs=0.0, epsrel=rel_tol, limit=400, points=pts)
    if not math.isfinite(value):
        raise ArithmeticError("amplitude quadrature diverged")
    return value
