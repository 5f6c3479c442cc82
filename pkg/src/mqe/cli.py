"""Command-line front end.

Subcommands:
  analyze     parse a system file, build the polyhedron, decide ellipticity
  bounds      emit derivative/iterate bound tables
  wavepacket  run the growth-dichotomy lab on a non-elliptic system
  selfcheck   run the bundled invariant suites

Exit codes: 0 success (analyze: elliptic; wavepacket: dichotomy observed),
1 input error, 2 usage error, 3 not elliptic, 4 inconclusive, 5 irregular
polyhedron, 6 wavepacket on an elliptic system, 7 dichotomy not observed.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from fractions import Fraction

try:
    import tomllib  # Python 3.11+
except ImportError:  # pragma: no cover
    import tomli as tomllib

from . import __version__, report
from .bounds import GevreyParams, derivative_bound, fit_growth, iterate_bound, theorem_hypothesis
from .ellipticity import (
    EllipticityConfig,
    EllipticityStatus,
    InequalityConfig,
    check_inequality,
    check_proposition,
    witness_for_wavepacket,
)
from .polyhedron import build_polyhedron, k_of
from .selfcheck import run_selfcheck
from .symbols import MultiIndex, SymbolSyntaxError, parse_system_file
from .wavepacket import (
    auto_bump_scale,
    build_spec,
    gevrey_violation_check,
    iterate_coefficients,
    iterate_norm_estimate,
    lower_bound_threshold,
    make_bump,
    pick_test_ray,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_USAGE = 2
EXIT_NOT_ELLIPTIC = 3
EXIT_INCONCLUSIVE = 4
EXIT_IRREGULAR = 5
EXIT_ELLIPTIC_INPUT = 6
EXIT_NO_DICHOTOMY = 7


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_system(path: str, dim: int | None):
    try:
        return parse_system_file(path, dim)
    except (OSError, SymbolSyntaxError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _ellipticity_config(args, file_cfg: dict) -> EllipticityConfig:
    section = file_cfg.get("ellipticity", {})
    return EllipticityConfig(
        delta_min=args.delta_min if args.delta_min is not None else section.get("delta_min", 1e-4),
        witness_tol=section.get("witness_tol", 1e-10),
        seed=args.seed,
    )


# -- analyze -------------------------------------------------------------------


def cmd_analyze(args) -> int:
    file_cfg = _load_config(args.config)
    system = _read_system(args.system, args.dim)
    with open(args.system, "r", encoding="utf-8") as fh:
        source_lines = [ln.strip() for ln in fh if ln.strip() and not ln.strip().startswith("#")]
    poly = build_polyhedron(system)

    verdict = None
    inequality = None
    exit_code = EXIT_IRREGULAR
    if poly.regular:
        cfg = _ellipticity_config(args, file_cfg)
        verdict = check_proposition(system, poly, cfg)
        icfg = InequalityConfig(
            directions=args.samples,
            radii=args.radii,
            seed=args.seed,
            witness=verdict.witness.xi0 if verdict.witness else None,
            witness_q=verdict.witness.q if verdict.witness else None,
        )
        inequality = check_inequality(system, poly, R=args.radius, cfg=icfg)
        exit_code = {
            EllipticityStatus.ELLIPTIC: EXIT_OK,
            EllipticityStatus.NOT_ELLIPTIC: EXIT_NOT_ELLIPTIC,
            EllipticityStatus.INCONCLUSIVE: EXIT_INCONCLUSIVE,
        }[verdict.status]

    rep = report.analysis_report(
        source=args.system,
        system_lines=source_lines,
        dim=system.dim,
        poly=poly,
        verdict=verdict,
        inequality=inequality,
        config={"seed": args.seed, "radius": args.radius, "samples": args.samples, "radii": args.radii},
    )
    if args.json:
        _emit(report.render_json(rep), args.out)
    else:
        _emit(_human_analysis(rep, poly, verdict), args.out)
    return exit_code


def _human_analysis(rep, poly, verdict) -> str:
    buf = io.StringIO()
    print(f"mqe {__version__} analysis of {rep['input']['source']}", file=buf)
    print(f"  dimension: {poly.dim}", file=buf)
    print(f"  vertices:  {[tuple(v) for v in poly.vertices]}", file=buf)
    if poly.regular:
        print(f"  facets:    {[tuple(str(c) for c in q) for q in poly.facet_normals]}", file=buf)
        print(f"  mu={poly.mu}  mu_per_axis={[str(m) for m in poly.mu_per_axis]}", file=buf)
        print(f"  theta={[str(t) for t in poly.theta]}  k_e={poly.sobolev_index}", file=buf)
    else:
        print(f"  not regular: {poly.diagnostic}", file=buf)
    if verdict is not None:
        print(f"  ellipticity: {verdict.status.value}", file=buf)
        for f in verdict.per_facet:
            print(
                f"    q={tuple(str(c) for c in f.q)} certified={f.certified} "
                f"min={f.min_certified:.3e} at delta={f.delta:g}",
                file=buf,
            )
        if verdict.witness:
            print(
                f"    witness xi0={tuple(round(x, 6) for x in verdict.witness.xi0)} "
                f"part value {verdict.witness.part_value:.2e}",
                file=buf,
            )
    return buf.getvalue()


# -- bounds --------------------------------------------------------------------


def _parse_alpha(text: str) -> MultiIndex:
    try:
        return MultiIndex(int(t) for t in text.replace(",", " ").split())
    except ValueError as exc:
        print(f"error: bad multi-index {text!r}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def cmd_bounds(args) -> int:
    system = _read_system(args.system, args.dim)
    poly = build_polyhedron(system)
    if not poly.regular:
        print(f"error: polyhedron not regular: {poly.diagnostic}", file=sys.stderr)
        return EXIT_IRREGULAR
    if args.s < 1:
        print(
            "warning: s < 1 is outside the inclusion theorems' hypotheses; "
            "bounds are still well defined",
            file=sys.stderr,
        )
    params = GevreyParams(s=args.s, sigma=args.sigma, C=args.C, F=poly)
    rows: list[dict] = []
    if args.l_range:
        lo, hi = (int(t) for t in args.l_range.split(":"))
        for level in range(lo, hi + 1):
            rows.append(
                {
                    "kind": "iterate",
                    "index": level,
                    "log_bound": iterate_bound(level, params, log=True),
                }
            )
    for alpha_text in args.alpha or []:
        alpha = _parse_alpha(alpha_text)
        rows.append(
            {
                "kind": "derivative",
                "index": "(" + ",".join(str(e) for e in alpha) + ")",
                "log_bound": derivative_bound(alpha, params, log=True),
                "gauge": str(k_of(poly, alpha)),
            }
        )
    if args.json:
        payload = {
            "schema_version": report.SCHEMA_VERSION,
            "tool_version": __version__,
            "params": {"s": args.s, "sigma": args.sigma, "C": args.C, "mu": str(poly.mu)},
            "hypothesis": theorem_hypothesis(args.s, args.sigma),
            "rows": rows,
            "arithmetic": "float",
        }
        _emit(report.render_json(payload), args.out)
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["kind", "index", "log_bound", "gauge"])
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


# -- wavepacket ------------------------------------------------------------------


def cmd_wavepacket(args) -> int:
    if args.s <= args.sigma or args.sigma < 1:
        print("error: the dichotomy needs s > sigma >= 1", file=sys.stderr)
        return EXIT_USAGE
    system = _read_system(args.system, args.dim)
    poly = build_polyhedron(system)
    if not poly.regular:
        print(f"error: polyhedron not regular: {poly.diagnostic}", file=sys.stderr)
        return EXIT_IRREGULAR

    if args.witness:
        xi0 = tuple(float(t) for t in args.witness.replace(",", " ").split())
        norm = math.sqrt(sum(x * x for x in xi0))
        xi0 = tuple(x / norm for x in xi0)
        q = (
            tuple(Fraction(t) for t in args.witness_q.replace(",", " ").split())
            if args.witness_q
            else poly.facet_normals[0]
        )
    else:
        verdict = check_proposition(system, poly, EllipticityConfig(seed=args.seed))
        if verdict.status is not EllipticityStatus.NOT_ELLIPTIC:
            print(
                "system is multi-quasi-elliptic (or undecided); no growth "
                "counterexample exists for it",
                file=sys.stderr,
            )
            return EXIT_ELLIPTIC_INPUT
        q, xi0 = witness_for_wavepacket(verdict)

    delta = args.delta if args.delta is not None else auto_bump_scale(system.dim)
    spec = build_spec(system, poly, q, xi0, args.s, args.sigma, delta=delta)
    alpha = pick_test_ray(poly, q)
    mu = float(poly.mu)
    s_prime = 1.0 / (mu * float(spec.eta)) + 0.1

    c_values = tuple(float(t) for t in args.C_sweep.split(","))
    m_range = range(1, args.m_max + 1)
    violation = gevrey_violation_check(spec, alpha, m_range, args.s, c_values)
    # class membership is an "exists C" statement: probe with a generous constant
    c_membership = max(100.0, max(c_values))
    membership_probe = gevrey_violation_check(spec, alpha, m_range, s_prime, (c_membership,))
    membership_clear = all(len(v) == 0 for v in membership_probe.exceedance.values())

    max_step = max(b.order for s_ in system.symbols for b in s_.terms)
    k_max = args.k_max
    if k_max * max_step > 20:
        k_max = 20 // max_step
        print(f"warning: clamping --k-max to {k_max} (bump differentiation cap)", file=sys.stderr)
    bump = make_bump(delta, k_max * max_step, dim=system.dim)
    norms = []
    for k in range(0, k_max + 1):
        coeffs = iterate_coefficients(spec, system, [1] * k)
        norms.append(iterate_norm_estimate(coeffs, spec, bump))
    fit = fit_growth(norms, poly.mu)
    fitted_exponent = fit.s_fit * mu
    iterate_ok = fitted_exponent <= args.s * mu + 0.25

    violation_ok = violation.all_constants_exceeded()
    dichotomy = violation_ok and membership_clear and iterate_ok

    payload = {
        "schema_version": report.SCHEMA_VERSION,
        "tool_version": __version__,
        "witness": {"q": [str(c) for c in q], "xi0": list(xi0)},
        "parameters": {
            "s": args.s,
            "sigma": args.sigma,
            "epsilon": str(spec.epsilon),
            "eta": str(spec.eta),
            "delta": delta,
            "alpha": list(map(int, alpha)),
            "s_prime": s_prime,
            "hypothesis": theorem_hypothesis(args.s, args.sigma),
        },
        "violation": violation.to_json_dict(),
        "membership_probe": membership_probe.to_json_dict(),
        "lower_bound_threshold_m": lower_bound_threshold(spec, alpha),
        "iterates": {
            "levels": list(range(0, k_max + 1)),
            "norm_estimates": norms,
            "fitted_exponent": fitted_exponent,
            "fitted_C": fit.C_fit,
            "residual": fit.residual,
            "arithmetic": "float",
        },
        "dichotomy_observed": dichotomy,
    }
    if args.json:
        _emit(report.render_json(payload), args.out)
    else:
        buf = io.StringIO()
        print(f"wavepacket dichotomy for {args.system}", file=buf)
        print(f"  witness xi0={tuple(round(x, 6) for x in xi0)} on facet q={tuple(str(c) for c in q)}", file=buf)
        print(f"  epsilon={spec.epsilon} eta={spec.eta} alpha={tuple(alpha)}", file=buf)
        for c, orders in sorted(violation.exceedance.items()):
            head = ", ".join(str(m) for m in orders[:5])
            print(f"  C={c:g}: exceedance at {len(orders)} orders [{head}...]" if orders else f"  C={c:g}: no exceedance in sweep", file=buf)
        print(f"  membership probe at s'={s_prime:.3f}: {'clear' if membership_clear else 'exceeded'}", file=buf)
        print(f"  iterate fit exponent {fitted_exponent:.3f} (target <= {args.s * mu + 0.25:.2f})", file=buf)
        print(f"  dichotomy observed: {dichotomy}", file=buf)
        _emit(buf.getvalue(), args.out)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "lhs_log"] + [f"bound_log_C{c:g}" for c in c_values])
            for i, m in enumerate(violation.orders):
                row = [m, violation.lhs_logs[i]]
                for c in c_values:
                    params = GevreyParams(s=args.s, sigma=args.sigma, C=c, F=poly)
                    beta = MultiIndex(tuple(m * e for e in alpha))
                    row.append(derivative_bound(beta, params, log=True))
                writer.writerow(row)
    return EXIT_OK if dichotomy else EXIT_NO_DICHOTOMY


# -- selfcheck -------------------------------------------------------------------


def cmd_selfcheck(args) -> int:
    results = run_selfcheck(seed=args.seed)
    if args.json:
        payload = {
            "schema_version": report.SCHEMA_VERSION,
            "tool_version": __version__,
            "seed": args.seed,
            "checks": [
                {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
            ],
            "all_passed": all(r.passed for r in results),
        }
        _emit(report.render_json(payload), args.out)
    else:
        buf = io.StringIO()
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}", file=buf)
        _emit(buf.getvalue(), args.out)
    return EXIT_OK if all(r.passed for r in results) else 1


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mqe",
        description="Newton polyhedra, multi-quasi-ellipticity and Gevrey growth diagnostics",
    )
    parser.add_argument("--version", action="version", version=f"mqe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="polyhedron + ellipticity verdict for a system file")
    pa.add_argument("system", help="path to a .sys file (one symbol per line)")
    pa.add_argument("--dim", type=int, default=None, help="ambient dimension (default: inferred)")
    pa.add_argument("--delta-min", type=float, default=None, dest="delta_min")
    pa.add_argument("--samples", type=int, default=64, help="slice directions for the ratio scan")
    pa.add_argument("--radii", type=int, default=32, help="radii in the ratio sweep")
    pa.add_argument("--radius", type=float, default=2.0, help="inner radius R of the sweep")
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--json", action="store_true", help="emit the full JSON report")
    pa.add_argument("--out", default=None, help="write output to a file")
    pa.add_argument("--config", default=None, help="TOML config file")
    pa.set_defaults(func=cmd_analyze)

    pb = sub.add_parser("bounds", help="derivative/iterate bound tables")
    pb.add_argument("system")
    pb.add_argument("--dim", type=int, default=None)
    pb.add_argument("--s", type=float, default=1.0)
    pb.add_argument("--sigma", type=float, default=1.0)
    pb.add_argument("--C", type=float, default=1.0)
    pb.add_argument("--l-range", default=None, dest="l_range", help="iterate levels lo:hi")
    pb.add_argument("--alpha", action="append", help="multi-index, e.g. '2,0' (repeatable)")
    pb.add_argument("--json", action="store_true")
    pb.add_argument("--out", default=None)
    pb.set_defaults(func=cmd_bounds)

    pw = sub.add_parser("wavepacket", help="growth dichotomy for a non-elliptic system")
    pw.add_argument("system")
    pw.add_argument("--dim", type=int, default=None)
    pw.add_argument("--s", type=float, required=True)
    pw.add_argument("--sigma", type=float, required=True)
    pw.add_argument("--witness", default=None, help="explicit witness direction 'x,y,...'")
    pw.add_argument("--witness-q", default=None, dest="witness_q", help="facet normal 'p/q,...'")
    pw.add_argument("--m-max", type=int, default=30, dest="m_max")
    pw.add_argument("--k-max", type=int, default=6, dest="k_max")
    pw.add_argument("--C-sweep", default="1,10", dest="C_sweep")
    pw.add_argument("--delta", type=float, default=None, help="bump plateau radius (default: auto)")
    pw.add_argument("--seed", type=int, default=0)
    pw.add_argument("--json", action="store_true")
    pw.add_argument("--csv", default=None, help="write the m-sweep table to a CSV file")
    pw.add_argument("--out", default=None)
    pw.set_defaults(func=cmd_wavepacket)

    ps = sub.add_parser("selfcheck", help="run the bundled invariant suites")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--json", action="store_true")
    ps.add_argument("--out", default=None)
    ps.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        raise exc
    except SymbolSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
