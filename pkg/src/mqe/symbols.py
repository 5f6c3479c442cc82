"""Multi-indices, operator symbols and generalized one-variable polynomials.

Symbols are finite maps from exponent multi-indices to exact complex-rational
coefficients.  All values are immutable after construction and every operation
is pure, so everything here is safe to share between threads.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "MultiIndex",
    "ExactComplex",
    "OperatorSymbol",
    "SymbolSystem",
    "RPolynomial",
    "SymbolSyntaxError",
    "parse_symbol",
    "parse_system_text",
    "parse_system_file",
]

#: Largest exponent the parser accepts; anything above is a user error.
MAX_EXPONENT = 10_000


class MultiIndex(tuple):
    """An exponent vector in N^n (the atom of symbol and polyhedron work)."""

    def __new__(cls, entries: Iterable[int]) -> "MultiIndex":
        vals = tuple(int(e) for e in entries)
        if not vals:
            raise ValueError("multi-index needs at least one entry")
        if any(e < 0 for e in vals):
            raise ValueError(f"multi-index entries must be >= 0, got {vals}")
        return super().__new__(cls, vals)

    @property
    def dim(self) -> int:
        return len(self)

    @property
    def order(self) -> int:
        """Total order |alpha| = sum of entries."""
        return sum(self)

    def factorial(self) -> int:
        """alpha! = prod alpha_j!"""
        out = 1
        for e in self:
            out *= math.factorial(e)
        return out

    def __add__(self, other: Sequence[int]) -> "MultiIndex":  # type: ignore[override]
        return MultiIndex(a + b for a, b in zip(self, other))

    def __sub__(self, other: Sequence[int]) -> "MultiIndex":
        return MultiIndex(a - b for a, b in zip(self, other))

    def dominates(self, other: Sequence[int]) -> bool:
        """Componentwise self >= other."""
        return all(a >= b for a, b in zip(self, other))

    @staticmethod
    def zero(dim: int) -> "MultiIndex":
        return MultiIndex((0,) * dim)

    @staticmethod
    def unit(dim: int, j: int) -> "MultiIndex":
        return MultiIndex(tuple(1 if i == j else 0 for i in range(dim)))


ScalarLike = Union[int, float, complex, Fraction, "ExactComplex"]


@dataclass(frozen=True)
class ExactComplex:
    """Complex scalar with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(value: ScalarLike) -> "ExactComplex":
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, complex):
            return ExactComplex(Fraction(value.real), Fraction(value.imag))
        return ExactComplex(Fraction(value))

    def __add__(self, other: "ExactComplex") -> "ExactComplex":
        return ExactComplex(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ExactComplex") -> "ExactComplex":
        return ExactComplex(self.re - other.re, self.im - other.im)

    def __mul__(self, other: ScalarLike) -> "ExactComplex":
        o = ExactComplex.of(other)
        return ExactComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self) -> "ExactComplex":
        return ExactComplex(-self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        return f"({self.re}+{self.im}i)"


def _as_terms(dim: int, terms: Mapping) -> dict[MultiIndex, ExactComplex]:
    canon: dict[MultiIndex, ExactComplex] = {}
    for alpha, coeff in terms.items():
        mi = alpha if isinstance(alpha, MultiIndex) else MultiIndex(alpha)
        if mi.dim != dim:
            raise ValueError(f"multi-index {tuple(mi)} has length {mi.dim}, expected {dim}")
        c = ExactComplex.of(coeff)
        if mi in canon:
            c = canon[mi] + c
        if c.is_zero():
            canon.pop(mi, None)
        else:
            canon[mi] = c
    return canon


class OperatorSymbol:
    """A constant-coefficient symbol P(xi) = sum_alpha a_alpha xi^alpha.

    Canonical form: exact-zero coefficients are dropped on construction so the
    support set (the input of the Newton polyhedron) is well defined.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping) -> None:
        if dim < 1:
            raise ValueError("symbol dimension must be >= 1")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "terms", _as_terms(dim, terms))

    def __setattr__(self, *_):
        raise AttributeError("OperatorSymbol is immutable")

    def support(self) -> frozenset[MultiIndex]:
        return frozenset(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, alpha: Sequence[int]) -> ExactComplex:
        return self.terms.get(MultiIndex(alpha), ExactComplex())

    def evaluate(self, xi: Sequence[float]) -> complex:
        """P(xi) for a real frequency vector xi."""
        if len(xi) != self.dim:
            raise ValueError(f"point has length {len(xi)}, expected {self.dim}")
        total = 0j
        for alpha, coeff in self.terms.items():
            mono = 1.0
            for x, e in zip(xi, alpha):
                if e:
                    mono *= x**e
            total += coeff.to_complex() * mono
        return total

    def xi_derivative(self, alpha: Sequence[int]) -> "OperatorSymbol":
        """Partial derivative d^alpha/d xi^alpha with falling-factorial weights."""
        a = alpha if isinstance(alpha, MultiIndex) else MultiIndex(alpha)
        if a.dim != self.dim:
            raise ValueError("derivative order has wrong dimension")
        out: dict[MultiIndex, ExactComplex] = {}
        for beta, coeff in self.terms.items():
            if not beta.dominates(a):
                continue
            factor = 1
            for bj, aj in zip(beta, a):
                for i in range(aj):
                    factor *= bj - i
            out[beta - a] = coeff * factor
        return OperatorSymbol(self.dim, out)

    def __add__(self, other: "OperatorSymbol") -> "OperatorSymbol":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        merged = dict(self.terms)
        for alpha, coeff in other.terms.items():
            merged[alpha] = merged.get(alpha, ExactComplex()) + coeff
        return OperatorSymbol(self.dim, merged)

    def __sub__(self, other: "OperatorSymbol") -> "OperatorSymbol":
        return self + (other * -1)

    def __mul__(self, other: Union["OperatorSymbol", ScalarLike]) -> "OperatorSymbol":
        if isinstance(other, OperatorSymbol):
            if other.dim != self.dim:
                raise ValueError("dimension mismatch")
            prod: dict[MultiIndex, ExactComplex] = {}
            for a, ca in self.terms.items():
                for b, cb in other.terms.items():
                    key = a + b
                    c = ca * cb
                    if key in prod:
                        c = prod[key] + c
                    prod[key] = c
            return OperatorSymbol(self.dim, prod)
        scale = ExactComplex.of(other)
        return OperatorSymbol(self.dim, {a: c * scale for a, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, OperatorSymbol)
            and self.dim == other.dim
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.terms.items())))

    def to_text(self) -> str:
        """Render in the input grammar; ``parse_symbol`` round-trips it."""
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for alpha in sorted(self.terms, key=lambda a: (a.order, tuple(a))):
            coeff = self.terms[alpha]
            if coeff.re:
                pieces.append(_format_term(coeff.re, False, alpha))
            if coeff.im:
                pieces.append(_format_term(coeff.im, True, alpha))
        text = pieces[0]
        for p in pieces[1:]:
            text += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
        return text

    def __repr__(self) -> str:
        return f"OperatorSymbol({self.dim}, {self.to_text()!r})"


def _format_term(value: Fraction, imaginary: bool, alpha: MultiIndex) -> str:
    factors = []
    for j, e in enumerate(alpha):
        if e == 1:
            factors.append(f"xi{j + 1}")
        elif e > 1:
            factors.append(f"xi{j + 1}^{e}")
    sign = "-" if value < 0 else ""
    mag = abs(value)
    if imaginary:
        lit = "i" if mag == 1 else f"{mag}i"
    else:
        lit = None if (mag == 1 and factors) else f"{mag}"
    if lit is None:
        return sign + " ".join(factors)
    if not factors:
        return sign + lit
    return sign + lit + "*" + " ".join(factors)


class SymbolSystem:
    """An ordered, nonempty family of symbols sharing one dimension."""

    __slots__ = ("dim", "symbols")

    def __init__(self, symbols: Sequence[OperatorSymbol]) -> None:
        syms = tuple(symbols)
        if not syms:
            raise ValueError("a system needs at least one symbol")
        dim = syms[0].dim
        if any(s.dim != dim for s in syms):
            raise ValueError("all symbols in a system must share the dimension")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "symbols", syms)

    def __setattr__(self, *_):
        raise AttributeError("SymbolSystem is immutable")

    def __iter__(self) -> Iterator[OperatorSymbol]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def support(self) -> frozenset[MultiIndex]:
        out: set[MultiIndex] = set()
        for s in self.symbols:
            out |= s.support()
        return frozenset(out)

    def scaled(self, factor: ScalarLike) -> "SymbolSystem":
        return SymbolSystem([s * factor for s in self.symbols])


class RPolynomial:
    """sum_e a_e r^e with distinct rational exponents e >= 0.

    Houses every r-dependent quantity of the wave-packet machinery (frequency
    powers r^{<alpha,q>} and localization powers r^{eps <alpha,q>}), whose
    exponents are always rational.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping = ()) -> None:
        canon: dict[Fraction, complex] = {}
        for e, c in dict(terms).items():
            exp = Fraction(e)
            if exp < 0:
                raise ValueError(f"negative exponent {exp}")
            val = canon.get(exp, 0j) + complex(c)
            if val == 0:
                canon.pop(exp, None)
            else:
                canon[exp] = val
        object.__setattr__(self, "terms", canon)

    def __setattr__(self, *_):
        raise AttributeError("RPolynomial is immutable")

    def __call__(self, r: float) -> complex:
        """Evaluate at r >= 1."""
        return sum((c * r**float(e) for e, c in self.terms.items()), 0j)

    def __add__(self, other: "RPolynomial") -> "RPolynomial":
        merged = dict(self.terms)
        for e, c in other.terms.items():
            merged[e] = merged.get(e, 0j) + c
        return RPolynomial(merged)

    def __mul__(self, other: Union["RPolynomial", complex, float, int]) -> "RPolynomial":
        if isinstance(other, RPolynomial):
            prod: dict[Fraction, complex] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    key = e1 + e2
                    prod[key] = prod.get(key, 0j) + c1 * c2
            return RPolynomial(prod)
        return RPolynomial({e: c * other for e, c in self.terms.items()})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def max_exponent(self) -> Fraction:
        return max(self.terms, default=Fraction(0))

    def abs_coeff_sum(self) -> float:
        return sum(abs(c) for c in self.terms.values())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RPolynomial) and self.terms == other.terms

    def __repr__(self) -> str:
        body = " + ".join(f"({c})r^{e}" for e, c in sorted(self.terms.items()))
        return f"RPolynomial({body or '0'})"


def rpoly_eval(poly: RPolynomial, r: float) -> complex:
    """Functional alias for RPolynomial evaluation."""
    return poly(r)


# ---------------------------------------------------------------------------
# Parser.  Grammar (ASCII):
#   symbol   := term (("+"|"-") term)*
#   term     := [complex-literal "*"] factor*   (at least one of the two)
#   factor   := "xi" INDEX ["^" NAT]
#   complex-literal := rational | rational "i" | "i"
#   rational := NAT ["/" NAT]
# '#' starts a comment; one symbol per line in system files.
# ---------------------------------------------------------------------------


class SymbolSyntaxError(ValueError):
    """Parse failure with 1-based line/column position."""

    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"\s*(?:(?P<xi>xi(?P<index>\d+))|(?P<num>\d+(?:/\d+)?)|(?P<op>[-+*^i]))"
)


def _tokenize(text: str, line: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise SymbolSyntaxError(f"unexpected character {text[pos:].lstrip()[0]!r}", line, pos + 1)
        if m.group("xi"):
            tokens.append(("xi", m.group("index"), m.start("xi") + 1))
        elif m.group("num"):
            tokens.append(("num", m.group("num"), m.start("num") + 1))
        else:
            tokens.append((m.group("op"), m.group("op"), m.start("op") + 1))
        pos = m.end()
    return tokens


def parse_symbol(text: str, dim: int, line: int = 1) -> OperatorSymbol:
    """Parse one symbol in the grammar above.

    Raises SymbolSyntaxError with position info on malformed input, exponent
    overflow, or an xi index exceeding ``dim``.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    toks = _tokenize(text, line)
    if not toks:
        raise SymbolSyntaxError("empty symbol", line, 1)
    terms: dict[MultiIndex, ExactComplex] = {}
    k = 0

    def peek(kind: str) -> bool:
        return k < len(toks) and toks[k][0] == kind

    while k < len(toks):
        sign = 1
        while peek("+") or peek("-"):
            if toks[k][0] == "-":
                sign = -sign
            k += 1
        if k >= len(toks):
            raise SymbolSyntaxError("dangling sign", line, toks[-1][2])
        coeff = ExactComplex(Fraction(1))
        saw_literal = False
        if peek("num"):
            value = Fraction(toks[k][1])
            k += 1
            if peek("i"):
                coeff = ExactComplex(Fraction(0), value)
                k += 1
            else:
                coeff = ExactComplex(value)
            saw_literal = True
        elif peek("i"):
            coeff = ExactComplex(Fraction(0), Fraction(1))
            k += 1
            saw_literal = True
        if saw_literal and peek("*"):
            k += 1
        exponents = [0] * dim
        saw_factor = False
        while True:
            if peek("*") and saw_factor:  # tolerate xi1*xi2 on input
                k += 1
                continue
            if not peek("xi"):
                break
            idx_text, col = toks[k][1], toks[k][2]
            idx = int(idx_text)
            if idx < 1 or idx > dim:
                raise SymbolSyntaxError(f"xi{idx} out of range for dimension {dim}", line, col)
            k += 1
            power = 1
            if peek("^"):
                k += 1
                if not peek("num") or "/" in toks[k][1]:
                    where = toks[k][2] if k < len(toks) else col
                    raise SymbolSyntaxError("expected integer exponent after '^'", line, where)
                power = int(toks[k][1])
                if power > MAX_EXPONENT:
                    raise SymbolSyntaxError(f"exponent {power} exceeds limit {MAX_EXPONENT}", line, toks[k][2])
                k += 1
            exponents[idx - 1] += power
            saw_factor = True
        if not saw_literal and not saw_factor:
            raise SymbolSyntaxError(f"expected a term, found {toks[k][1]!r}", line, toks[k][2])
        alpha = MultiIndex(exponents)
        add = coeff * sign
        terms[alpha] = terms.get(alpha, ExactComplex()) + add
        if k < len(toks) and not (peek("+") or peek("-")):
            raise SymbolSyntaxError(f"expected '+' or '-', found {toks[k][1]!r}", line, toks[k][2])
    return OperatorSymbol(dim, terms)


def _system_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((ln, body))
    return out


def _infer_dim(lines: Iterable[tuple[int, str]]) -> int:
    best = 0
    for _, body in lines:
        for m in re.finditer(r"xi(\d+)", body):
            best = max(best, int(m.group(1)))
    return max(best, 1)


def parse_system_text(text: str, dim: int | None = None) -> SymbolSystem:
    """Parse a system file body: one symbol per line, '#' comments.

    When ``dim`` is omitted it is inferred as the largest xi index present.
    """
    lines = _system_lines(text)
    if not lines:
        raise SymbolSyntaxError("no symbols in input", 1, 1)
    n = dim if dim is not None else _infer_dim(lines)
    return SymbolSystem([parse_symbol(body, n, line=ln) for ln, body in lines])


def parse_system_file(path, dim: int | None = None) -> SymbolSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_system_text(fh.read(), dim)
