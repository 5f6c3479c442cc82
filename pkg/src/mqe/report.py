"""Deterministic JSON report assembly.

Rationals are serialized as "p/q" strings to preserve exactness; floats stay
JSON numbers.  Each block carries an "arithmetic" tag telling which kind its
numeric fields are.  Reports are byte-identical for identical inputs, config
and seed: keys are sorted and nothing time- or id-dependent is recorded.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from fractions import Fraction
from typing import Any

from . import __version__
from .ellipticity import EllipticityConfig, EllipticityVerdict, InequalityEstimate
from .polyhedron import NewtonPolyhedron

SCHEMA_VERSION = 1

__all__ = ["analysis_report", "render_json", "SCHEMA_VERSION"]


def _config_dict(cfg: EllipticityConfig) -> dict[str, Any]:
    return asdict(cfg)


def analysis_report(
    source: str,
    system_lines: list[str],
    dim: int,
    poly: NewtonPolyhedron,
    verdict: EllipticityVerdict | None = None,
    inequality: InequalityEstimate | None = None,
    extras: dict[str, Any] | None = None,
    config: dict[str, Any] | None = None,
) -> dict[str, Any]:
    report: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "input": {"source": source, "dim": dim, "symbols": system_lines},
        "polyhedron": poly.to_json_dict(),
    }
    if config:
        report["config"] = config
    if verdict is not None:
        report["ellipticity"] = verdict.to_json_dict()
        report["config"] = dict(report.get("config", {}), **_config_dict(verdict.margin_config))
    if inequality is not None:
        report["inequality"] = inequality.to_json_dict()
    if extras:
        report.update(extras)
    return report


def render_json(report: dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_fallback) + "\n"


def _fallback(obj: Any):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return obj
    raise TypeError(f"not JSON serializable: {type(obj)}")
