"""Brute-force geometric oracles.

These deliberately use different algorithms from polyhedron.py so the two can
cross-check each other: hull membership goes through Caratheodory subset
enumeration instead of facet inequalities, facets come from scanning all
d-point hyperplanes instead of double description, and the gauge is found by
rational bisection instead of the max-over-normals formula.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Sequence

from .polyhedron import NewtonPolyhedron, _rank, _row_reduce

Point = tuple[Fraction, ...]


def _to_fracs(p: Sequence) -> Point:
    return tuple(Fraction(x) for x in p)


def _solve_barycentric(basis: list[Point], target: Point) -> list[Fraction] | None:
    """Coefficients lam >= 0, sum lam = 1 with sum lam*b = target, else None."""
    d = len(target)
    m = len(basis)
    # unknowns lam_1..lam_m; rows: d coordinate equations + affine row of ones
    aug = [[basis[j][i] for j in range(m)] + [target[i]] for i in range(d)]
    aug.append([Fraction(1)] * m + [Fraction(1)])
    red, pivots = _row_reduce(aug)
    lam = [Fraction(0)] * m
    for row, c in zip(red, pivots):
        if c == m:  # pivot in the rhs column: inconsistent
            return None
        lam[c] = row[m]
    # non-pivot unknowns stay 0; verify (handles underdetermined rows)
    for i in range(d):
        if sum(lam[j] * basis[j][i] for j in range(m)) != target[i]:
            return None
    if sum(lam) != 1:
        return None
    if any(x < 0 for x in lam):
        return None
    return lam


def hull_contains(points: Sequence[Sequence], target: Sequence) -> bool:
    """Exact membership of target in conv(points) by Caratheodory enumeration."""
    pts = [_to_fracs(p) for p in points]
    tgt = _to_fracs(target)
    if tgt in pts:
        return True
    d = len(tgt)
    for size in range(1, d + 2):
        for subset in combinations(pts, size):
            if _solve_barycentric(list(subset), tgt) is not None:
                return True
    return False


def brute_force_vertices(points: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Extreme points: p is a vertex iff it is outside the hull of the rest."""
    pts = [tuple(int(x) for x in p) for p in points]
    out = []
    for i, p in enumerate(pts):
        rest = [q for j, q in enumerate(pts) if j != i]
        if not rest or not hull_contains(rest, p):
            out.append(p)
    return sorted(set(out))


def _primitive_int(vec: Sequence[Fraction]) -> tuple[int, ...]:
    denom = 1
    for x in vec:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    return tuple(v // g for v in ints)


def _hyperplane_through(points: list[Point]) -> tuple[tuple[int, ...], Fraction] | None:
    """(normal, offset) with <normal, p> = offset for all points, or None.

    Works for d affinely independent points in dimension d; the normal spans
    the 1-dimensional null space of the homogeneous system [(p, 1)].
    """
    d = len(points[0])
    rows = [list(p) + [Fraction(1)] for p in points]
    red, pivots = _row_reduce(rows)
    if len(red) != d:
        return None  # affinely dependent
    free = [c for c in range(d + 1) if c not in pivots]
    if len(free) != 1:
        return None
    f = free[0]
    sol = [Fraction(0)] * (d + 1)
    sol[f] = Fraction(1)
    for row, c in zip(red, pivots):
        sol[c] = -row[f]
    normal, offset = sol[:d], -sol[d]
    prim = _primitive_int(normal)
    scale = next(Fraction(p, q) for p, q in zip(prim, normal) if q != 0)
    return prim, offset * scale


def brute_force_facets(points: Sequence[Sequence]) -> list[tuple[tuple[Fraction, ...], str]]:
    """All supporting facet hyperplanes of a full-dimensional hull.

    Scans every d-subset of the point set, keeps hyperplanes with all points
    on one side, and classifies them the same way the polyhedron module does:
    returns the strictly positive normals scaled to <alpha, q> = 1 tagged
    "positive", plus tags for coordinate and irregular facets.
    """
    pts = [_to_fracs(p) for p in points]
    d = len(pts[0])
    facets: dict[tuple, tuple[tuple[Fraction, ...], str]] = {}
    for subset in combinations(range(len(pts)), d):
        hp = _hyperplane_through([pts[i] for i in subset])
        if hp is None:
            continue
        normal, offset = hp
        vals = [sum(Fraction(a) * x for a, x in zip(normal, p)) for p in pts]
        if all(v <= offset for v in vals):
            n, off = normal, offset
        elif all(v >= offset for v in vals):
            n, off = tuple(-a for a in normal), -offset
        else:
            continue
        # now <n, p> <= off on the hull; require a genuine facet: tight set rank d-1 affine
        tight = [pts[i] for i, v_ in enumerate(vals) if sum(Fraction(a) * x for a, x in zip(n, pts[i])) == off]
        hom = [[x - y for x, y in zip(p, tight[0])] for p in tight[1:]]
        if len(tight) < d or (hom and _rank([list(r) for r in hom]) < d - 1):
            continue
        if off > 0:
            if all(a > 0 for a in n):
                q = tuple(Fraction(a, 1) / off for a in n)
                facets[("positive",) + q] = (q, "positive")
            else:
                facets[("irregular",) + tuple(n)] = (tuple(Fraction(a) for a in n), "irregular")
        elif off == 0:
            nz = [j for j, a in enumerate(n) if a != 0]
            if len(nz) == 1 and n[nz[0]] < 0:
                facets[("coordinate", nz[0])] = (tuple(Fraction(a) for a in n), "coordinate")
            else:
                facets[("irregular0",) + tuple(n)] = (tuple(Fraction(a) for a in n), "irregular")
        else:
            facets[("irregular-",) + tuple(n)] = (tuple(Fraction(a) for a in n), "irregular")
    return sorted(facets.values())


def oracle_positive_normals(points: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    return sorted(q for q, kind in brute_force_facets(points) if kind == "positive")


def oracle_is_regular(points: Sequence[Sequence]) -> bool:
    kinds = [kind for _, kind in brute_force_facets(points)]
    return "irregular" not in kinds and "positive" in kinds


def bisection_gauge(
    poly: NewtonPolyhedron, alpha: Sequence, denominator_bound: int | None = None
) -> Fraction:
    """inf {t > 0 : alpha/t in hull}, by bisection on exact hull membership.

    The infimum is a rational with denominator dividing the product of the
    alpha and facet-normal denominators; once the bracket is narrower than
    1/bound^2 the unique such rational in it is recovered exactly.
    """
    a = _to_fracs(alpha)
    verts = [tuple(Fraction(int(x)) for x in v) for v in poly.vertices]
    if all(x == 0 for x in a):
        return Fraction(0)
    if denominator_bound is None:
        denominator_bound = 1
        for q in poly.facet_normals:
            for c in q:
                denominator_bound = denominator_bound * c.denominator // gcd(denominator_bound, c.denominator)
        lcm_a = 1
        for x in a:
            lcm_a = lcm_a * x.denominator // gcd(lcm_a, x.denominator)
        denominator_bound *= lcm_a

    def member(t: Fraction) -> bool:
        return hull_contains(verts, tuple(x / t for x in a))

    hi = Fraction(1)
    while not member(hi):
        hi *= 2
    lo = Fraction(0)
    width_target = Fraction(1, 2 * denominator_bound * denominator_bound)
    while hi - lo > width_target:
        mid = (lo + hi) / 2
        if member(mid):
            hi = mid
        else:
            lo = mid
    snapped = Fraction((lo + hi) / 2).limit_denominator(denominator_bound)
    if not member(snapped):
        raise AssertionError("bisection snap missed the gauge value")
    return snapped
