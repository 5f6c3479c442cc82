"""Exact Newton polyhedron construction and anisotropy indices.

Everything in this module runs in exact rational arithmetic: regularity of a
Newton polyhedron is a strict-inequality property of facet normals and a
single rounding error could flip a verdict, so floating point is banned here.

The facet enumeration is a double-description pass on the homogenization cone:
lift every support point v to (1, v), describe the dual cone
{h : h0 + <h', v> >= 0 for all v} by its extreme rays, and read each ray as a
facet h0 + <h', x> >= 0 of the hull.  Vertices are the support points at which
the tight facets have full rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .symbols import MultiIndex, SymbolSystem

__all__ = [
    "NewtonPolyhedron",
    "PolyhedronError",
    "build_polyhedron",
    "k_of",
    "weight_V",
]

Vector = tuple[Fraction, ...]


class PolyhedronError(ValueError):
    pass


# -- small exact linear algebra helpers -------------------------------------


def _row_reduce(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Gaussian elimination; returns (echelon rows, pivot column indices)."""
    mat = [row[:] for row in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(mat[0]) if mat else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = mat[r][c]
        mat[r] = [x / inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def _rank(rows: Iterable[Sequence[Fraction]]) -> int:
    as_lists = [list(r) for r in rows]
    if not as_lists:
        return 0
    return len(_row_reduce(as_lists)[0])


def _solve_square(rows: list[list[Fraction]], rhs_cols: list[list[Fraction]]) -> list[list[Fraction]]:
    """Solve A X = B exactly for square invertible A; columns of B given as lists."""
    n = len(rows)
    aug = [rows[i][:] + [col[i] for col in rhs_cols] for i in range(n)]
    red, pivots = _row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise PolyhedronError("singular matrix in exact solve")
    return [[red[i][n + j] for i in range(n)] for j in range(len(rhs_cols))]


def _primitive(vec: Sequence[Fraction]) -> Vector:
    """Scale a rational vector to a primitive integer vector (canonical ray)."""
    denom = 1
    for x in vec:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g == 0:
        raise PolyhedronError("zero vector has no primitive form")
    return tuple(Fraction(v // g) for v in ints)


# -- double description ------------------------------------------------------


def _dual_rays(rows: list[Vector]) -> list[Vector]:
    """Extreme rays of {h : <row, h> >= 0 for all rows}.

    Requires the rows to span the ambient space (pointed dual cone).  Standard
    incremental double description with the combinatorial adjacency test.
    """
    d = len(rows[0])
    # initial simplicial cone from d independent rows
    base_idx: list[int] = []
    seen: list[list[Fraction]] = []
    for i, row in enumerate(rows):
        if _rank(seen + [list(row)]) > len(seen):
            seen.append(list(row))
            base_idx.append(i)
        if len(base_idx) == d:
            break
    if len(base_idx) < d:
        raise PolyhedronError("constraint rows do not span the space")
    basis = [list(rows[i]) for i in base_idx]
    unit_cols = [[Fraction(1 if i == j else 0) for i in range(d)] for j in range(d)]
    rays = [_primitive(col) for col in _solve_square(basis, unit_cols)]

    def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
        return sum(x * y for x, y in zip(a, b))

    processed = list(base_idx)
    active: dict[Vector, set[int]] = {
        r: {i for i in processed if dot(rows[i], r) == 0} for r in rays
    }
    for i, row in enumerate(rows):
        if i in base_idx:
            continue
        vals = {r: dot(row, r) for r in rays}
        pos = [r for r in rays if vals[r] > 0]
        neg = [r for r in rays if vals[r] < 0]
        zero = [r for r in rays if vals[r] == 0]
        if not neg:
            processed.append(i)
            for r in zero:
                active[r].add(i)
            rays = pos + zero
            continue
        new_rays = list(pos) + list(zero)
        new_active = {r: active[r] for r in new_rays}
        for r in zero:
            new_active[r] = active[r] | {i}
        for p in pos:
            for m in neg:
                common = active[p] & active[m]
                # adjacency: no third ray's zero set contains the common set
                adjacent = not any(
                    r3 is not p and r3 is not m and common <= active[r3] for r3 in rays
                )
                if not adjacent:
                    continue
                combo = [vals[p] * rm - vals[m] * rp for rp, rm in zip(p, m)]
                ray = _primitive(combo)
                new_active[ray] = {j for j in processed if dot(rows[j], ray) == 0} | {i}
                if ray not in new_rays:
                    new_rays.append(ray)
        processed.append(i)
        rays = new_rays
        active = new_active
    return sorted(set(rays))


# -- Newton polyhedron --------------------------------------------------------


@dataclass(frozen=True)
class NewtonPolyhedron:
    """Convex hull of {0} and a system's support, with anisotropy indices.

    ``facet_normals`` holds Q(F): the normals q of the facets not contained in
    a coordinate hyperplane, scaled so the facet lies on <alpha, q> = 1.
    Coordinate facets are implicit in alpha >= 0 and never stored.  The index
    fields are None unless the polyhedron is regular.
    """

    dim: int
    vertices: tuple[MultiIndex, ...]
    facet_normals: tuple[Vector, ...]
    regular: bool
    diagnostic: str | None
    degenerate: bool
    mu_per_axis: tuple[Fraction, ...] | None
    mu: Fraction | None
    theta: tuple[Fraction, ...] | None
    sobolev_index: Fraction | None  # k(e) = max_q sum_j q_j

    def is_regular(self) -> tuple[bool, str | None]:
        return self.regular, self.diagnostic

    def require_regular(self) -> None:
        if not self.regular:
            raise PolyhedronError(f"polyhedron is not regular: {self.diagnostic}")

    def to_json_dict(self) -> dict:
        out = {
            "vertices": [list(map(int, v)) for v in self.vertices],
            "facets": [[str(c) for c in q] for q in self.facet_normals],
            "regular": self.regular,
            "arithmetic": "rational",
        }
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        if self.regular:
            out["mu"] = str(self.mu)
            out["mu_per_axis"] = [str(m) for m in self.mu_per_axis]
            out["theta"] = [str(t) for t in self.theta]
            out["k_e"] = str(self.sobolev_index)
        return out


def _extreme_among(points: list[tuple[int, ...]], dim: int) -> list[tuple[int, ...]]:
    """Extreme points of a possibly rank-deficient point set containing 0.

    Projects onto an exact basis of the linear span and reruns the facet
    machinery in the lower dimension.
    """
    frac_pts = [[Fraction(x) for x in p] for p in points]
    echelon, pivots = _row_reduce([p[:] for p in frac_pts])
    rank = len(echelon)
    if rank == 0:
        return [(0,) * dim]
    # coordinates of each point in the echelon basis: x = sum_i y_i * b_i,
    # where b_i has a unit pivot; read y_i off the pivot columns.
    ys = [tuple(p[c] for c in pivots) for p in frac_pts]
    if rank == 1:
        top = max(ys)
        bottom = min(ys)
        keep = {ys.index(bottom), ys.index(top)}
        return sorted({points[i] for i in keep})
    facets = _facets_full_dim(sorted(set(ys)), rank)
    vertices_y = _vertices_from_facets(sorted(set(ys)), facets, rank)
    vset = set(vertices_y)
    return sorted({points[i] for i, y in enumerate(ys) if y in vset})


def _facets_full_dim(points: list[Vector], dim: int) -> list[Vector]:
    """Facets (h0, h) with h0 + <h, x> >= 0 of a full-dimensional hull."""
    rows = [tuple([Fraction(1)] + list(p)) for p in points]
    return _dual_rays(rows)


def _vertices_from_facets(points: list[Vector], facets: list[Vector], dim: int) -> list[Vector]:
    verts = []
    for p in points:
        tight = [f[1:] for f in facets if f[0] + sum(a * b for a, b in zip(f[1:], p)) == 0]
        if _rank(tight) == dim:
            verts.append(p)
    return verts


def build_polyhedron(system: SymbolSystem) -> NewtonPolyhedron:
    """Exact hull of {0} union the system support, with regularity verdict.

    An all-zero system yields the degenerate polyhedron {0}, flagged not
    regular rather than raised: downstream callers decide how hard to fail.
    """
    n = system.dim
    support = {tuple(a) for a in system.support()}
    points = sorted(support | {(0,) * n})

    frac_points = [tuple(Fraction(x) for x in p) for p in points]
    rank = _rank([list(p) for p in frac_points if any(p)])

    if rank < n:
        vertices = tuple(MultiIndex(v) for v in _extreme_among(points, n))
        if len(points) == 1:
            diag = "support is {0}: the polyhedron is a single point"
        else:
            diag = (
                f"support spans only {rank} of {n} dimensions; no strictly "
                "positive facet description exists"
            )
        return NewtonPolyhedron(
            dim=n,
            vertices=vertices,
            facet_normals=(),
            regular=False,
            diagnostic=diag,
            degenerate=True,
            mu_per_axis=None,
            mu=None,
            theta=None,
            sobolev_index=None,
        )

    facets = _facets_full_dim(frac_points, n)
    vertices_f = _vertices_from_facets(frac_points, facets, n)
    vertices = tuple(MultiIndex(int(x) for x in v) for v in sorted(vertices_f))

    normals: list[Vector] = []
    diagnostic: str | None = None
    for f in facets:
        h0, h = f[0], f[1:]
        if h0 == 0:
            nonzero = [j for j, c in enumerate(h) if c != 0]
            if len(nonzero) == 1 and h[nonzero[0]] > 0:
                continue  # coordinate facet alpha_j >= 0, implicit
            diagnostic = (
                "facet through the origin with normal "
                f"{tuple(str(c) for c in h)} is not a coordinate hyperplane"
            )
            continue
        # h0 > 0 always (0 satisfies every valid inequality strictly or tightly)
        q = tuple(-c / h0 for c in h)
        if any(qj <= 0 for qj in q):
            diagnostic = (
                f"facet normal {tuple(str(c) for c in q)} has a non-positive "
                "component; the hull is not complete in that direction"
            )
            continue
        normals.append(q)

    regular = diagnostic is None and bool(normals)
    if not normals and diagnostic is None:
        diagnostic = "no facet separates the hull from infinity"

    if not regular:
        return NewtonPolyhedron(
            dim=n,
            vertices=vertices,
            facet_normals=tuple(sorted(normals)),
            regular=False,
            diagnostic=diagnostic,
            degenerate=False,
            mu_per_axis=None,
            mu=None,
            theta=None,
            sobolev_index=None,
        )

    mu_axis = tuple(max(1 / q[j] for q in normals) for j in range(n))
    mu = max(mu_axis)
    theta = tuple(mu / m for m in mu_axis)
    k_e = max(sum(q) for q in normals)
    return NewtonPolyhedron(
        dim=n,
        vertices=vertices,
        facet_normals=tuple(sorted(normals)),
        regular=True,
        diagnostic=None,
        degenerate=False,
        mu_per_axis=mu_axis,
        mu=mu,
        theta=theta,
        sobolev_index=k_e,
    )


def k_of(poly: NewtonPolyhedron, alpha: Sequence) -> Fraction:
    """Gauge of alpha: the least t > 0 with alpha/t inside the polyhedron.

    Equals max over facet normals q of <alpha, q>, computed exactly.
    """
    poly.require_regular()
    if len(alpha) != poly.dim:
        raise ValueError("alpha has wrong dimension")
    a = [Fraction(x) for x in alpha]
    if any(x < 0 for x in a):
        raise ValueError("alpha must be componentwise >= 0")
    return max(sum(x * qj for x, qj in zip(a, q)) for q in poly.facet_normals)


def weight_V(poly: NewtonPolyhedron, xi: Sequence[float]) -> float:
    """Anisotropic weight V(xi) = sum over vertices of |xi^alpha|."""
    if len(xi) != poly.dim:
        raise ValueError("xi has wrong dimension")
    total = 0.0
    for v in poly.vertices:
        mono = 1.0
        for x, e in zip(xi, v):
            if e:
                mono *= abs(x) ** e
        total += mono
    return total
