"""Bundled invariant suites, runnable from the CLI.

Each check is a pure function returning (passed, detail); run_selfcheck
collects them with a shared seed so the whole battery is reproducible.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from . import bounds, oracles, quadrature
from .bump import make_bump
from .ellipticity import EllipticityStatus, check_proposition, qh_part
from .polyhedron import build_polyhedron, k_of
from .symbols import ExactComplex, MultiIndex, OperatorSymbol, SymbolSystem, parse_symbol, parse_system_text
from .wavepacket import build_spec, iterate_coefficients

__all__ = ["CheckResult", "run_selfcheck", "random_system", "bundled_system", "BUNDLED"]

BUNDLED = {
    "laplacian": EllipticityStatus.ELLIPTIC,
    "heat": EllipticityStatus.ELLIPTIC,
    "wave": EllipticityStatus.NOT_ELLIPTIC,
    "multi_quasi": EllipticityStatus.ELLIPTIC,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def bundled_system(name: str) -> SymbolSystem:
    text = resources.files("mqe.data").joinpath(f"{name}.sys").read_text(encoding="utf-8")
    return parse_system_text(text)


def random_system(rng: random.Random, dim: int, max_points: int = 8, max_exp: int = 10) -> SymbolSystem:
    """Random rational-coefficient system for hull cross-checks."""
    n_syms = rng.randint(1, 3)
    symbols = []
    remaining = rng.randint(1, max_points)
    for j in range(n_syms):
        count = max(1, remaining // (n_syms - j)) if j < n_syms - 1 else max(1, remaining)
        terms = {}
        for _ in range(count):
            alpha = tuple(rng.randint(0, max_exp) for _ in range(dim))
            num = rng.randint(-9, 9) or 1
            den = rng.randint(1, 9)
            im = Fraction(rng.randint(-3, 3)) if rng.random() < 0.3 else Fraction(0)
            terms[MultiIndex(alpha)] = ExactComplex(Fraction(num, den), im)
        remaining -= count
        symbols.append(OperatorSymbol(dim, terms))
    return SymbolSystem(symbols)


def random_symbol(rng: random.Random, dim: int, max_terms: int = 6, max_exp: int = 8) -> OperatorSymbol:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        alpha = MultiIndex(tuple(rng.randint(0, max_exp) for _ in range(dim)))
        re = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        im = Fraction(rng.randint(-9, 9), rng.randint(1, 9)) if rng.random() < 0.5 else Fraction(0)
        if re == 0 and im == 0:
            re = Fraction(1)
        terms[alpha] = ExactComplex(re, im)
    return OperatorSymbol(dim, terms)


# -- individual checks ---------------------------------------------------------


def check_hull_oracle(seed: int, cases: int = 24) -> CheckResult:
    rng = random.Random(seed)
    for i in range(cases):
        dim = rng.choice((2, 3))
        system = random_system(rng, dim, max_points=6, max_exp=8)
        poly = build_polyhedron(system)
        pts = sorted({tuple(int(x) for x in a) for a in system.support()} | {(0,) * dim})
        verts = oracles.brute_force_vertices(pts)
        if verts != sorted(tuple(int(x) for x in v) for v in poly.vertices):
            return CheckResult("hull-oracle", False, f"vertex mismatch on case {i}")
        if not poly.degenerate:
            qs = oracles.oracle_positive_normals(pts)
            mine = sorted(poly.facet_normals)
            if poly.regular != oracles.oracle_is_regular(pts) or (poly.regular and qs != mine):
                return CheckResult("hull-oracle", False, f"facet mismatch on case {i}")
    return CheckResult("hull-oracle", True, f"{cases} random systems, exact match")


def check_gauge_oracle(seed: int, samples: int = 20) -> CheckResult:
    rng = random.Random(seed)
    for name in ("laplacian", "heat", "multi_quasi"):
        poly = build_polyhedron(bundled_system(name))
        for _ in range(samples):
            alpha = tuple(Fraction(rng.randint(0, 12), rng.randint(1, 4)) for _ in range(poly.dim))
            direct = k_of(poly, alpha)
            bis = oracles.bisection_gauge(poly, alpha)
            if direct != bis:
                return CheckResult("gauge-oracle", False, f"{name}: {alpha} -> {direct} vs {bis}")
    return CheckResult("gauge-oracle", True, f"3 polyhedra x {samples} exact bisection matches")


def check_gauge_laws(seed: int, samples: int = 60) -> CheckResult:
    rng = random.Random(seed)
    poly = build_polyhedron(bundled_system("multi_quasi"))
    for _ in range(samples):
        a = tuple(Fraction(rng.randint(0, 10), rng.randint(1, 5)) for _ in range(poly.dim))
        b = tuple(x + Fraction(rng.randint(0, 6), rng.randint(1, 5)) for x in a)
        lam = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        if k_of(poly, tuple(lam * x for x in a)) != lam * k_of(poly, a):
            return CheckResult("gauge-laws", False, f"scaling failed at {a}")
        if k_of(poly, a) > k_of(poly, b):
            return CheckResult("gauge-laws", False, f"monotonicity failed at {a} <= {b}")
    return CheckResult("gauge-laws", True, f"{samples} scaling/monotonicity samples")


def check_parser_roundtrip(seed: int, samples: int = 120) -> CheckResult:
    rng = random.Random(seed)
    for i in range(samples):
        dim = rng.randint(1, 4)
        sym = random_symbol(rng, dim)
        back = parse_symbol(sym.to_text(), dim)
        if back != sym:
            return CheckResult("parser-roundtrip", False, f"case {i}: {sym.to_text()}")
    return CheckResult("parser-roundtrip", True, f"{samples} print/parse round trips")


def check_quasi_homogeneity(seed: int) -> CheckResult:
    rng = random.Random(seed)
    for name in ("laplacian", "heat", "multi_quasi", "wave"):
        system = bundled_system(name)
        poly = build_polyhedron(system)
        for q in poly.facet_normals:
            for sym in system.symbols:
                part = qh_part(sym, q).part
                if part.is_zero():
                    continue
                for _ in range(12):
                    xi = [rng.uniform(-1, 1) or 0.5 for _ in range(poly.dim)]
                    for r in (2.0, 10.0, 100.0):
                        scaled = [r ** float(w) * x for w, x in zip(q, xi)]
                        lhs = part.evaluate(scaled)
                        rhs = r * part.evaluate(xi)
                        if abs(lhs - rhs) > 1e-10 * (1.0 + abs(rhs)) * r:
                            return CheckResult(
                                "quasi-homogeneity", False, f"{name} q={q} xi={xi} r={r}"
                            )
    return CheckResult("quasi-homogeneity", True, "scaling identity on all bundled facets")


def check_gamma_identities(seed: int, samples: int = 400) -> CheckResult:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        a = rng.uniform(0.05, 20.0)
        p = rng.randint(1, 12)
        lhs = bounds.gamma_shift(a, p)
        rhs = math.gamma(a + p)
        worst = max(worst, abs(lhs - rhs) / rhs)
    if worst > 1e-12:
        return CheckResult("gamma-shift", False, f"relative error {worst:.2e}")
    return CheckResult("gamma-shift", True, f"{samples} samples, worst rel {worst:.1e}")


def check_convexity_sweep(seed: int, samples: int = 10_000) -> CheckResult:
    rng = random.Random(seed)
    for i in range(samples):
        omega = rng.uniform(0.05, 2.0)
        args = dict(
            lam=math.exp(rng.uniform(-3, 3)),
            tau=math.exp(rng.uniform(-3, 3)),
            a=omega + rng.uniform(0, 8),
            b=omega + rng.uniform(0, 8),
            c=omega + rng.uniform(0, 8),
            sigma=rng.uniform(1.0, 4.0),
            omega=omega,
        )
        if not bounds.check_convexity_inequality(**args):
            return CheckResult("gamma-convexity", False, f"counterexample at sweep {i}: {args}")
    return CheckResult("gamma-convexity", True, f"{samples} domain points, inequality held")


def check_quadrature_vs_gamma(seed: int) -> CheckResult:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(40):
        a = rng.uniform(0.0, 25.0)
        eta = rng.uniform(0.12, 0.9)
        qv = quadrature.decaying_power_integral(a, eta)
        cf = quadrature.upper_gamma_closed_form(a, eta)
        worst = max(worst, abs(qv - cf) / cf)
    if worst > 1e-8:
        return CheckResult("quadrature-vs-gamma", False, f"relative error {worst:.2e}")
    return CheckResult("quadrature-vs-gamma", True, f"worst rel {worst:.1e}")


def check_recursion_vs_fd(seed: int) -> CheckResult:
    """Level-1 amplitude reconstruction against direct operator application."""
    rng = random.Random(seed)
    system = bundled_system("heat")
    poly = build_polyhedron(system)
    s2 = 1.0 / math.sqrt(2.0)
    spec = build_spec(system, poly, poly.facet_normals[0], (s2, s2), 2.0, 1.0, delta=1.0)
    bump = make_bump(1.0, 4, dim=2, profile_power=1)
    level1 = iterate_coefficients(spec, system, [1])
    sym = system.symbols[0]
    r = 3.0
    omega = [r ** float(w) * x for w, x in zip(spec.q, spec.xi0)]
    scale = [r ** (float(spec.epsilon) * float(w)) for w in spec.q]

    def integrand(x):
        y = [s * xj for s, xj in zip(scale, x)]
        phase = cmath.exp(1j * sum(xj * wj for xj, wj in zip(x, omega)))
        return bump.value(y) * phase

    def apply_opd(x, h=2e-4):
        # P(D) with D = -i d/dx, derivatives by central differences
        total = 0j
        for beta, coeff in sym.terms.items():
            if beta == (1, 0):
                d = (integrand((x[0] + h, x[1])) - integrand((x[0] - h, x[1]))) / (2 * h)
            elif beta == (0, 2):
                d = (
                    integrand((x[0], x[1] + h))
                    - 2 * integrand(x)
                    + integrand((x[0], x[1] - h))
                ) / (h * h)
            else:
                raise AssertionError("unexpected heat support")
            total += coeff.to_complex() * (-1j) ** (beta.order % 4) * d
        # strip the oscillatory factor to compare amplitudes
        phase = cmath.exp(1j * sum(xj * wj for xj, wj in zip(x, omega)))
        return total / phase

    worst = 0.0
    for _ in range(14):
        rho = rng.uniform(0.2, 1.9)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        y = (rho * math.cos(ang), rho * math.sin(ang))
        x = tuple(yj / s for yj, s in zip(y, scale))
        direct = apply_opd(x)
        recon = level1.evaluate(x, r, bump)
        err = abs(direct - recon) / (1.0 + abs(recon))
        worst = max(worst, err)
    if worst > 1e-4:
        return CheckResult("recursion-vs-fd", False, f"worst rel {worst:.2e}")
    return CheckResult("recursion-vs-fd", True, f"level-1 reconstruction, worst rel {worst:.1e}")


def check_bundled_examples() -> CheckResult:
    try:
        for name, expected in BUNDLED.items():
            system = bundled_system(name)
            poly = build_polyhedron(system)
            if not poly.regular:
                return CheckResult("bundled-examples", False, f"{name}: polyhedron not regular")
            verdict = check_proposition(system, poly)
            if verdict.status is not expected:
                return CheckResult(
                    "bundled-examples",
                    False,
                    f"{name}: expected {expected.value}, got {verdict.status.value}",
                )
    except Exception as exc:  # corrupted bundled file, parse failure, ...
        return CheckResult("bundled-examples", False, f"error: {exc}")
    return CheckResult("bundled-examples", True, "all bundled systems analyze as recorded")


def run_selfcheck(seed: int = 0) -> list[CheckResult]:
    return [
        check_parser_roundtrip(seed),
        check_hull_oracle(seed + 1),
        check_gauge_oracle(seed + 2),
        check_gauge_laws(seed + 3),
        check_quasi_homogeneity(seed + 4),
        check_gamma_identities(seed + 5),
        check_convexity_sweep(seed + 6),
        check_quadrature_vs_gamma(seed + 7),
        check_recursion_vs_fd(seed + 8),
        check_bundled_examples(),
    ]
