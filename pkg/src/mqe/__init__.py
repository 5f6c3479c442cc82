"""Analysis of linear differential-operator symbol systems.

Computes exact Newton polyhedra with their anisotropy indices, decides
multi-quasi-ellipticity through certified facet-part positivity, generates
Gevrey-type derivative/iterate bound sequences, and builds the oscillatory
wave-packet witness that separates the growth classes for non-elliptic
systems.
"""

from .symbols import (
    ExactComplex,
    MultiIndex,
    OperatorSymbol,
    RPolynomial,
    SymbolSyntaxError,
    SymbolSystem,
    parse_symbol,
    parse_system_file,
    parse_system_text,
)
from .polyhedron import NewtonPolyhedron, PolyhedronError, build_polyhedron, k_of, weight_V

__version__ = "0.1.0"

__all__ = [
    "ExactComplex",
    "MultiIndex",
    "OperatorSymbol",
    "RPolynomial",
    "SymbolSyntaxError",
    "SymbolSystem",
    "parse_symbol",
    "parse_system_file",
    "parse_system_text",
    "NewtonPolyhedron",
    "PolyhedronError",
    "build_polyhedron",
    "k_of",
    "weight_V",
    "__version__",
]
