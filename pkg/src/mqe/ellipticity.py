"""Quasi-homogeneous decomposition and the multi-quasi-ellipticity decision.

The decision criterion: a system with regular Newton polyhedron is
multi-quasi-elliptic iff for every facet normal q the facet parts P_{jq} have
no common zero off the coordinate hyperplanes.  By quasi-homogeneity
(P_{jq}(r^q xi) = r P_{jq}(xi)) it suffices to examine the compact slice
{sum_j |xi_j|^{1/q_j} = 1}; the search certifies positivity of
m = sum_j |P_{jq}|^2 over slice boxes clear of delta-margins around the
hyperplanes with rigorous interval bounds, while hunting for zeros with local
descent.  "Elliptic" is a certificate, not a sample survey; near-hyperplane
ambiguity is reported as Inconclusive rather than guessed.

Branch-and-bound boxes are disjoint and the result is a commutative
min-reduction over them, so boxes could be processed concurrently; the
implementation is sequential at this scale.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .kernels import PolySystemLayout
from .polyhedron import NewtonPolyhedron, weight_V
from .symbols import MultiIndex, OperatorSymbol, SymbolSystem

__all__ = [
    "QuasiHomogeneousPart",
    "qh_part",
    "EllipticityStatus",
    "EllipticityConfig",
    "FacetCertificate",
    "Witness",
    "EllipticityVerdict",
    "check_proposition",
    "witness_for_wavepacket",
    "InequalityConfig",
    "InequalityEstimate",
    "check_inequality",
]


@dataclass(frozen=True)
class QuasiHomogeneousPart:
    """Terms of a symbol on the facet <alpha, q> = 1 (exact filter)."""

    q: tuple[Fraction, ...]
    part: OperatorSymbol


def qh_part(symbol: OperatorSymbol, q: Sequence) -> QuasiHomogeneousPart:
    """Exact facet part: keep exactly the terms with <alpha, q> = 1.

    May be the zero symbol when no support point lies on the facet.
    """
    qv = tuple(Fraction(x) for x in q)
    if len(qv) != symbol.dim:
        raise ValueError("q has wrong dimension")
    if any(x <= 0 for x in qv):
        raise ValueError("q must be strictly positive")
    kept = {
        alpha: coeff
        for alpha, coeff in symbol.terms.items()
        if sum(Fraction(e) * w for e, w in zip(alpha, qv)) == 1
    }
    return QuasiHomogeneousPart(q=qv, part=OperatorSymbol(symbol.dim, kept))


class EllipticityStatus(enum.Enum):
    ELLIPTIC = "elliptic"
    NOT_ELLIPTIC = "not-elliptic"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class EllipticityConfig:
    """Margins and budgets for the facet-positivity search."""

    delta_min: float = 1e-4
    delta_start: float = 1e-1
    delta_shrink: float = 10.0  # geometric factor between margin levels
    witness_tol: float = 1e-10
    near_zero_tol: float = 1e-9  # relative to the squared coefficient scale
    max_boxes: int = 200_000
    min_box_side: float = 1e-5
    initial_split: float = 0.25  # subdivide until boxes are at most this wide
    presample: int = 128
    polish_iterations: int = 200
    seed: int = 0

    def deltas(self) -> list[float]:
        if self.delta_min <= 0:
            raise ValueError("delta_min must be > 0")
        out = []
        d = self.delta_start
        while d > self.delta_min * (1 + 1e-12):
            out.append(d)
            d /= self.delta_shrink
        out.append(self.delta_min)
        return out


@dataclass(frozen=True)
class Witness:
    q: tuple[Fraction, ...]
    xi0: tuple[float, ...]
    part_value: float  # sum_j |P_{jq}(xi0)|


@dataclass(frozen=True)
class FacetCertificate:
    q: tuple[Fraction, ...]
    certified: bool
    min_certified: float  # lower bound of m on the final margin region
    delta: float
    levels: tuple[tuple[float, float], ...]  # (delta, certified min) per level
    vanishing_axes: tuple[int, ...]  # axes whose facet restriction is identically 0
    near_zero: bool
    boxes_processed: int
    note: str | None = None


@dataclass(frozen=True)
class EllipticityVerdict:
    status: EllipticityStatus
    per_facet: tuple[FacetCertificate, ...]
    witness: Witness | None
    margin_config: EllipticityConfig

    def to_json_dict(self) -> dict:
        out = {
            "status": self.status.value,
            "arithmetic": "float",
            "facets": [
                {
                    "q": [str(c) for c in f.q],
                    "certified": f.certified,
                    "min_certified": f.min_certified,
                    "delta": f.delta,
                    "levels": [[d, m] for d, m in f.levels],
                    "vanishing_axes": list(f.vanishing_axes),
                    **({"note": f.note} if f.note else {}),
                }
                for f in self.per_facet
            ],
        }
        if self.witness is not None:
            out["witness"] = {
                "q": [str(c) for c in self.witness.q],
                "xi0": list(self.witness.xi0),
                "part_value": self.witness.part_value,
            }
        return out


# -- helpers -----------------------------------------------------------------


def _parts_for_facet(system: SymbolSystem, q: Sequence[Fraction]) -> list[OperatorSymbol]:
    return [qh_part(s, q).part for s in system.symbols]


def _vanishing_axes(parts: list[OperatorSymbol], dim: int) -> tuple[int, ...]:
    """Axes j where substituting xi_j = 0 kills every facet term of every part."""
    out = []
    for j in range(dim):
        if all(all(alpha[j] > 0 for alpha in p.terms) for p in parts if not p.is_zero()):
            out.append(j)
    return tuple(out)


def _coeff_scale2(parts: list[OperatorSymbol]) -> float:
    total = 0.0
    for p in parts:
        for c in p.terms.values():
            total += float(c.abs2())
    return max(total, 1e-300)


def _part_value_sum(parts: list[OperatorSymbol], xi: Sequence[float]) -> float:
    return sum(abs(p.evaluate(xi)) for p in parts)


def _slice_normalize(xi: Sequence[float], q: Sequence[Fraction]) -> tuple[float, ...]:
    """Rescale along the anisotropic orbit onto sum_j |xi_j|^{1/q_j} = 1."""
    lam = sum(abs(x) ** (1.0 / float(w)) for x, w in zip(xi, q))
    if lam <= 0:
        raise ValueError("cannot normalize the zero vector")
    return tuple(x / lam ** float(w) for x, w in zip(xi, q))


def _sphere_normalize(xi: Sequence[float], q: Sequence[Fraction]) -> tuple[float, ...]:
    """Rescale along the anisotropic orbit onto the Euclidean unit sphere."""
    qf = [float(w) for w in q]

    def norm_at(r: float) -> float:
        return math.sqrt(sum((r**w * x) ** 2 for x, w in zip(xi, qf)))

    lo, hi = 1.0, 1.0
    while norm_at(hi) < 1.0:
        hi *= 2.0
    while norm_at(lo) > 1.0:
        lo /= 2.0
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if norm_at(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    r = math.sqrt(lo * hi)
    return tuple(r**w * x for x, w in zip(xi, qf))


# -- local descent polish ------------------------------------------------------


class _MinimizationTarget:
    """m(xi) = sum_j |P_j(xi)|^2 with coordinate first/second derivatives."""

    def __init__(self, parts: list[OperatorSymbol]):
        dim = parts[0].dim
        comps: list[OperatorSymbol] = []
        for p in parts:
            re_terms = {a: c.re for a, c in p.terms.items() if c.re}
            im_terms = {a: c.im for a, c in p.terms.items() if c.im}
            if re_terms:
                comps.append(OperatorSymbol(dim, re_terms))
            if im_terms:
                comps.append(OperatorSymbol(dim, im_terms))
        self.dim = dim
        self.comps = comps
        self.d1 = [[c.xi_derivative(MultiIndex.unit(dim, j)) for c in comps] for j in range(dim)]
        self.d2 = [
            [d.xi_derivative(MultiIndex.unit(dim, j)) for d in self.d1[j]] for j in range(dim)
        ]

    def value(self, xi: Sequence[float]) -> float:
        return sum(c.evaluate(xi).real ** 2 for c in self.comps)

    def grad_j(self, xi: Sequence[float], j: int) -> float:
        return 2.0 * sum(
            c.evaluate(xi).real * d.evaluate(xi).real for c, d in zip(self.comps, self.d1[j])
        )

    def hess_jj(self, xi: Sequence[float], j: int) -> float:
        total = 0.0
        for c, d, dd in zip(self.comps, self.d1[j], self.d2[j]):
            cv = c.evaluate(xi).real
            dv = d.evaluate(xi).real
            total += 2.0 * (dv * dv + cv * dd.evaluate(xi).real)
        return total


def _golden_section(f, lo: float, hi: float, iters: int = 60) -> float:
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _polish_witness(
    target: _MinimizationTarget, start: Sequence[float], iterations: int
) -> tuple[list[float], float]:
    """Coordinate-wise damped Newton on m with golden-section fallback."""
    xi = list(start)
    best = target.value(xi)
    for _ in range(iterations):
        improved = False
        for j in range(target.dim):
            g = target.grad_j(xi, j)
            h = target.hess_jj(xi, j)
            step = -g / h if h > 1e-300 else -math.copysign(0.1, g)
            lam = 1.0
            for _ in range(25):
                trial = list(xi)
                trial[j] = xi[j] + lam * step
                val = target.value(trial)
                if val < best:
                    xi, best = trial, val
                    improved = True
                    break
                lam *= 0.5
        if best <= 1e-32:
            break
        if not improved:
            j = max(range(target.dim), key=lambda i: abs(target.grad_j(xi, i)))
            span = 0.5

            def line(t: float, j=j) -> float:
                trial = list(xi)
                trial[j] = t
                return target.value(trial)

            t_best = _golden_section(line, xi[j] - span, xi[j] + span)
            if line(t_best) < best:
                xi[j] = t_best
                best = target.value(xi)
            else:
                break
    return xi, best


# -- certified facet search ----------------------------------------------------


@dataclass
class _FacetSearch:
    certified_min: float = math.inf
    boxes: int = 0
    uncertified: list[tuple[tuple[float, ...], tuple[float, ...], tuple[int, ...]]] = field(
        default_factory=list
    )
    argmin_box: tuple[tuple[float, ...], tuple[float, ...], tuple[int, ...]] | None = None


def _annulus_state(lo, hi, inv_q: Sequence[float]) -> int:
    """-1: outside slice annulus, 0: straddles, +1: inside."""
    s_lo = sum(l**w for l, w in zip(lo, inv_q))
    s_hi = sum(h**w for h, w in zip(hi, inv_q))
    if s_lo > 1.0 + 1e-12 or s_hi < 0.5 - 1e-12:
        return -1
    return 0


def _certify_facet(
    parts: list[OperatorSymbol],
    q: Sequence[Fraction],
    delta: float,
    cfg: EllipticityConfig,
    budget: int,
) -> _FacetSearch:
    """Interval branch-and-bound for m > 0 over the margin slice annulus.

    Works per sign orthant in positive box coordinates; a box is discarded
    when it cannot meet the annulus 1/2 <= sum |xi_j|^{1/q_j} <= 1 (which
    covers the whole slice), certified when the interval lower bound of m is
    positive, and split otherwise.
    """
    dim = parts[0].dim
    inv_q = [1.0 / float(w) for w in q]
    state = _FacetSearch()
    for signs in itertools.product((1, -1), repeat=dim):
        layout = PolySystemLayout.from_symbols(parts, signs=signs)
        root = (tuple([delta] * dim), tuple([1.0] * dim))
        stack = [root]
        while stack:
            if state.boxes >= budget:
                state.uncertified.extend(
                    (lo, hi, signs) for lo, hi in stack[: max(1, len(stack) // 16)]
                )
                break
            lo, hi = stack.pop()
            if _annulus_state(lo, hi, inv_q) < 0:
                continue
            state.boxes += 1
            wide = max(h - l for l, h in zip(lo, hi))
            if wide > cfg.initial_split:
                j = max(range(dim), key=lambda i: hi[i] - lo[i])
                mid = 0.5 * (lo[j] + hi[j])
                stack.append((lo, tuple(mid if i == j else h for i, h in enumerate(hi))))
                stack.append((tuple(mid if i == j else l for i, l in enumerate(lo)), hi))
                continue
            blo = np.asarray(lo)
            bhi = np.asarray(hi)
            m_lo, _ = layout.interval_bounds(blo, bhi)
            bound = float(m_lo[0])
            if bound > 0.0:
                if bound < state.certified_min:
                    state.certified_min = bound
                    state.argmin_box = (lo, hi, signs)
                continue
            if wide <= cfg.min_box_side:
                state.uncertified.append((lo, hi, signs))
                continue
            j = max(range(dim), key=lambda i: hi[i] - lo[i])
            mid = 0.5 * (lo[j] + hi[j])
            stack.append((lo, tuple(mid if i == j else h for i, h in enumerate(hi))))
            stack.append((tuple(mid if i == j else l for i, l in enumerate(lo)), hi))
    return state


def _hunt_witness(
    parts: list[OperatorSymbol],
    q: Sequence[Fraction],
    cfg: EllipticityConfig,
    starts: list[Sequence[float]],
) -> Witness | None:
    target = _MinimizationTarget(parts)
    scale = math.sqrt(_coeff_scale2(parts))
    for start in starts:
        xi, val = _polish_witness(target, start, cfg.polish_iterations)
        if any(x == 0.0 for x in xi):
            continue
        sigma = _slice_normalize(xi, q)
        value = _part_value_sum(parts, sigma)
        if value < cfg.witness_tol * max(1.0, scale) and min(abs(x) for x in sigma) >= cfg.delta_min:
            return Witness(q=tuple(q), xi0=sigma, part_value=value)
    return None


def _presample_starts(
    parts: list[OperatorSymbol], q: Sequence[Fraction], cfg: EllipticityConfig
) -> list[Sequence[float]]:
    rng = random.Random(cfg.seed)
    dim = parts[0].dim
    target = _MinimizationTarget(parts)
    scored = []
    for _ in range(cfg.presample):
        raw = [rng.gauss(0.0, 1.0) for _ in range(dim)]
        if any(x == 0.0 for x in raw):
            continue
        sigma = _slice_normalize(raw, q)
        scored.append((target.value(sigma), sigma))
    scored.sort(key=lambda t: t[0])
    return [s for _, s in scored[:8]]


def check_proposition(
    system: SymbolSystem, poly: NewtonPolyhedron, cfg: EllipticityConfig | None = None
) -> EllipticityVerdict:
    """Decide multi-quasi-ellipticity facet by facet.

    Elliptic: every facet's m is certified positive on the margin regions down
    to delta_min (and any near-zero minima sit against an axis whose facet
    restriction vanishes identically, where decay is structural).
    NotElliptic: a verified common zero with all components off the
    hyperplanes.  Inconclusive: bounds straddle zero at the delta_min
    resolution, or a non-vanishing hyperplane restriction makes the near-zero
    minima ambiguous.
    """
    cfg = cfg or EllipticityConfig()
    if cfg.delta_min <= 0:
        raise ValueError("delta_min must be > 0")
    poly.require_regular()

    facets: list[FacetCertificate] = []
    witness: Witness | None = None
    for q in poly.facet_normals:
        parts = _parts_for_facet(system, q)
        van_axes = _vanishing_axes(parts, system.dim)
        scale2 = _coeff_scale2(parts)

        starts = _presample_starts(parts, q, cfg)
        maybe = _hunt_witness(parts, q, cfg, starts)
        if maybe is not None:
            witness = maybe
            facets.append(
                FacetCertificate(
                    q=tuple(q),
                    certified=False,
                    min_certified=0.0,
                    delta=cfg.delta_min,
                    levels=(),
                    vanishing_axes=van_axes,
                    near_zero=True,
                    boxes_processed=0,
                    note="witness found by presample descent",
                )
            )
            break

        levels: list[tuple[float, float]] = []
        boxes_total = 0
        failed: _FacetSearch | None = None
        final_search: _FacetSearch | None = None
        for delta in cfg.deltas():
            search = _certify_facet(parts, q, delta, cfg, cfg.max_boxes)
            boxes_total += search.boxes
            if search.uncertified:
                failed = search
                break
            final_search = search
            levels.append((delta, search.certified_min))

        if failed is not None:
            centers = [
                tuple(s * 0.5 * (l + h) for l, h, s in zip(lo, hi, signs))
                for lo, hi, signs in failed.uncertified[:12]
            ]
            maybe = _hunt_witness(parts, q, cfg, centers)
            if maybe is not None:
                witness = maybe
                facets.append(
                    FacetCertificate(
                        q=tuple(q),
                        certified=False,
                        min_certified=0.0,
                        delta=cfg.delta_min,
                        levels=tuple(levels),
                        vanishing_axes=van_axes,
                        near_zero=True,
                        boxes_processed=boxes_total,
                        note="witness refined from an uncertifiable box",
                    )
                )
                break
            facets.append(
                FacetCertificate(
                    q=tuple(q),
                    certified=False,
                    min_certified=0.0,
                    delta=cfg.delta_min,
                    levels=tuple(levels),
                    vanishing_axes=van_axes,
                    near_zero=True,
                    boxes_processed=boxes_total,
                    note="interval bounds straddle zero at the delta_min resolution",
                )
            )
            continue

        final_delta, final_min = levels[-1]
        near_zero = final_min < cfg.near_zero_tol * scale2
        note = None
        certified = True
        if near_zero:
            argmin = final_search.argmin_box if final_search is not None else None
            adjacent_vanishing = False
            if argmin is not None:
                lo, _hi, _signs = argmin
                adjacent_vanishing = any(lo[j] <= 2.0 * final_delta for j in van_axes)
            if not adjacent_vanishing:
                certified = False
                note = (
                    "minima near zero beside an axis whose facet restriction does "
                    "not vanish identically; cannot distinguish a hyperplane limit "
                    "from a genuine zero at this resolution"
                )
        facets.append(
            FacetCertificate(
                q=tuple(q),
                certified=certified,
                min_certified=final_min,
                delta=final_delta,
                levels=tuple(levels),
                vanishing_axes=van_axes,
                near_zero=near_zero,
                boxes_processed=boxes_total,
                note=note,
            )
        )

    if witness is not None:
        status = EllipticityStatus.NOT_ELLIPTIC
    elif all(f.certified for f in facets):
        status = EllipticityStatus.ELLIPTIC
    else:
        status = EllipticityStatus.INCONCLUSIVE
    return EllipticityVerdict(
        status=status, per_facet=tuple(facets), witness=witness, margin_config=cfg
    )


def witness_for_wavepacket(verdict: EllipticityVerdict) -> tuple[tuple[Fraction, ...], tuple[float, ...]]:
    """Witness rescaled to the Euclidean unit sphere along its anisotropic orbit.

    Only meaningful for NotElliptic verdicts; the zero set of a facet part is
    invariant under the orbit scaling, so the part still vanishes there.
    """
    if verdict.status is not EllipticityStatus.NOT_ELLIPTIC or verdict.witness is None:
        raise ValueError("witness_for_wavepacket needs a NotElliptic verdict with a witness")
    w = verdict.witness
    if any(x == 0.0 for x in w.xi0):
        raise ValueError("witness has a zero component; contract violation")
    return w.q, _sphere_normalize(w.xi0, w.q)


# -- asymptotic weight-inequality scan ----------------------------------------


@dataclass(frozen=True)
class InequalityConfig:
    directions: int = 64
    radii: int = 32
    span: float = 1e4  # radii sweep [R, span*R], log-spaced
    seed: int = 0
    witness: tuple[float, ...] | None = None  # slice point near the zero set
    witness_q: tuple[Fraction, ...] | None = None


@dataclass(frozen=True)
class InequalityEstimate:
    C_hat: float
    R: float
    worst_ratio_point: tuple[float, ...]
    samples: int
    ratio_profile: tuple[float, ...]  # max ratio per radius, ascending radii
    radii: tuple[float, ...]
    zero_denominator_at: tuple[float, ...] | None

    def bounded(self, factor: float = 2.0) -> bool:
        base = self.ratio_profile[0]
        return math.isfinite(self.C_hat) and max(self.ratio_profile) <= factor * base

    def growth_factor(self) -> float:
        return max(self.ratio_profile) / self.ratio_profile[0]

    def to_json_dict(self) -> dict:
        return {
            "C_hat": self.C_hat if math.isfinite(self.C_hat) else "inf",
            "R": self.R,
            "worst_ratio_point": list(self.worst_ratio_point),
            "samples": self.samples,
            "radii": list(self.radii),
            "ratio_profile": list(self.ratio_profile),
            "zero_denominator_at": list(self.zero_denominator_at)
            if self.zero_denominator_at
            else None,
            "arithmetic": "float",
        }


def check_inequality(
    system: SymbolSystem,
    poly: NewtonPolyhedron,
    R: float,
    cfg: InequalityConfig | None = None,
) -> InequalityEstimate:
    """Scan the ratio V(xi) / sum_j |P_j(xi)| over anisotropic shells.

    Shells are r^q * (slice directions) for r log-spaced in [R, span*R].  A
    bounded profile is the finite-scan face of the weight inequality; a
    diverging profile is evidence against it.  When a witness direction is
    supplied, extra directions approaching it at rate 1/r expose the
    divergence that fixed directions cannot see (a facet part with no
    lower-order terms gives a radius-independent ratio along any fixed ray).
    A sampled zero denominator is recorded and the estimate marked infinite.
    """
    if R <= 0:
        raise ValueError("R must be > 0")
    cfg = cfg or InequalityConfig()
    poly.require_regular()
    rng = random.Random(cfg.seed)
    dim = system.dim

    radii = [R * cfg.span ** (i / (cfg.radii - 1)) for i in range(cfg.radii)] if cfg.radii > 1 else [R]
    base_dirs: dict[tuple[Fraction, ...], list[tuple[float, ...]]] = {}
    for q in poly.facet_normals:
        dirs = []
        for _ in range(cfg.directions):
            raw = [rng.gauss(0.0, 1.0) for _ in range(dim)]
            if any(x == 0.0 for x in raw):
                continue
            dirs.append(_slice_normalize(raw, q))
        base_dirs[tuple(q)] = dirs

    witness_q = None
    if cfg.witness is not None:
        witness_q = cfg.witness_q or poly.facet_normals[0]

    c_hat = 0.0
    worst: tuple[float, ...] = tuple([0.0] * dim)
    samples = 0
    zero_at: tuple[float, ...] | None = None
    profile: list[float] = []
    for r in radii:
        best_here = 0.0
        for q, dirs in base_dirs.items():
            qf = [float(w) for w in q]
            all_dirs = list(dirs)
            if witness_q is not None and tuple(witness_q) == q:
                shrink = radii[0] / r
                for j in range(dim):
                    for sgn in (1.0, -1.0):
                        pert = list(cfg.witness)
                        pert[j] += sgn * 0.5 * shrink
                        if all(x != 0.0 for x in pert):
                            all_dirs.append(_slice_normalize(pert, q))
            for sigma in all_dirs:
                xi = tuple(r**w * x for x, w in zip(sigma, qf))
                samples += 1
                denom = sum(abs(s.evaluate(xi)) for s in system.symbols)
                num = weight_V(poly, xi)
                if denom == 0.0:
                    zero_at = xi
                    c_hat = math.inf
                    continue
                ratio = num / denom
                if ratio > best_here:
                    best_here = ratio
                if math.isfinite(c_hat) and ratio > c_hat:
                    c_hat = ratio
                    worst = xi
        profile.append(best_here)
    return InequalityEstimate(
        C_hat=c_hat,
        R=R,
        worst_ratio_point=worst,
        samples=samples,
        ratio_profile=tuple(profile),
        radii=tuple(radii),
        zero_denominator_at=zero_at,
    )
