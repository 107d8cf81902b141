"""
Polynomial Module
Exact univariate polynomials over Z and Q(sqrt(a)), bivariate polynomials over
F_p, resultants, discriminants and root finding modulo p
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import sympy
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from src.exactmath import RationalLike, as_rational
from src.exceptions import (
    ConstantPolynomial,
    NonIntegralResult,
    RadicalResidue,
    ZeroPolynomial,
)

logger = logging.getLogger(__name__)


def _strip(coeffs: Iterable) -> tuple:
    values = list(coeffs)
    while values and values[-1] == 0:
        values.pop()
    return tuple(values)


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial with coefficients a_0..a_deg in ascending degree."""
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(int(c) for c in self.coeffs))

    @classmethod
    def parse(cls, text: str) -> "IntPoly":
        """Build from an ascending comma separated list such as "1,-8,8"."""
        return cls(tuple(int(part) for part in text.split(",") if part.strip()))

    @classmethod
    def monomial(cls, degree: int, coefficient: int = 1) -> "IntPoly":
        return cls((0,) * degree + (coefficient,))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, x: RationalLike) -> Fraction | int:
        if isinstance(x, int):
            acc = 0
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        q = as_rational(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def __add__(self, other: "IntPoly") -> "IntPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "IntPoly":
        return IntPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return self + (-other)

    def __mul__(self, other: "IntPoly | int") -> "IntPoly":
        if isinstance(other, int):
            return IntPoly(tuple(c * other for c in self.coeffs))
        if self.is_zero or other.is_zero:
            return IntPoly(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "IntPoly":
        result = IntPoly((1,))
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def derivative(self) -> "IntPoly":
        return IntPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def reversed(self, degree: int | None = None) -> "IntPoly":
        """x^degree * f(1/x); degree defaults to deg f."""
        degree = self.degree if degree is None else degree
        padded = self.coeffs + (0,) * (degree + 1 - len(self.coeffs))
        return IntPoly(tuple(reversed(padded)))

    def to_expr(self, x: sympy.Symbol) -> sympy.Expr:
        return sum((sympy.Integer(c) * x**i for i, c in enumerate(self.coeffs)), sympy.Integer(0))

    def homogeneous_expr(self, m: sympy.Symbol, n: sympy.Symbol, degree: int | None = None) -> sympy.Expr:
        """F(m, n) = n^degree * f(m/n) as a sympy expression."""
        degree = self.degree if degree is None else degree
        return sum((sympy.Integer(c) * m**i * n**(degree - i) for i, c in enumerate(self.coeffs)),
                   sympy.Integer(0))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            power = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            magnitude = abs(c)
            body = str(magnitude) if not power else (power if magnitude == 1 else f"{magnitude}*{power}")
            terms.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def eval_homogeneous(f: IntPoly, m: int, n: int, degree: int | None = None) -> int:
    """
    Evaluate F(m, n) = n^deg * f(m/n) exactly

    Args:
        f: Integer polynomial
        m: Numerator
        n: Denominator
        degree: Homogenizing degree, deg f by default

    Returns:
        Integer value of the binary form
    """
    degree = f.degree if degree is None else degree
    coeffs = f.coeffs + (0,) * (degree + 1 - len(f.coeffs))
    acc = 0
    n_power = 1
    for c in reversed(coeffs):
        acc = acc * m + c * n_power
        n_power *= n
    return acc


def eval_homogeneous_mod(f: IntPoly, m: int, n: int, modulus: int, degree: int | None = None) -> int:
    """F(m, n) mod modulus, reducing at every step; same homogenizing degree rule as eval_homogeneous."""
    degree = f.degree if degree is None else degree
    coeffs = f.coeffs + (0,) * (degree + 1 - len(f.coeffs))
    acc = 0
    n_power = 1
    for c in reversed(coeffs):
        acc = (acc * m + c * n_power) % modulus
        n_power = (n_power * n) % modulus
    return acc


def sylvester_matrix(f: IntPoly, g: IntPoly) -> list[list[int]]:
    """Sylvester matrix with rows of f (deg g copies) above rows of g (deg f copies)."""
    m, n = f.degree, g.degree
    size = m + n
    f_desc = list(reversed(f.coeffs))
    g_desc = list(reversed(g.coeffs))
    rows = []
    for i in range(n):
        rows.append([0] * i + f_desc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + g_desc + [0] * (size - n - 1 - i))
    return rows


def resultant(f: IntPoly, g: IntPoly) -> int:
    """
    Resultant as the determinant of the Sylvester matrix

    Args:
        f: Nonzero integer polynomial
        g: Nonzero integer polynomial

    Returns:
        res(f, g) = lc(f)^deg g * prod g(alpha) over the roots alpha of f
    """
    if f.is_zero or g.is_zero:
        raise ZeroPolynomial("resultant of the zero polynomial")
    if f.degree == 0 and g.degree == 0:
        return 1
    if f.degree == 0:
        return f.leading ** g.degree
    if g.degree == 0:
        return g.leading ** f.degree
    rows = sylvester_matrix(f, g)
    size = len(rows)
    # fraction-free Bareiss elimination over ZZ
    matrix = DomainMatrix([[ZZ(x) for x in row] for row in rows], (size, size), ZZ)
    return int(matrix.det())


def discriminant(f: IntPoly) -> int:
    """
    Discriminant (-1)^(n(n-1)/2) * res(f, f') / lc(f)

    Args:
        f: Integer polynomial of degree >= 1

    Returns:
        disc(f)
    """
    if f.degree < 1:
        raise ConstantPolynomial("discriminant needs degree at least one")
    n = f.degree
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    value = resultant(f, f.derivative())
    if value % f.leading:
        raise NonIntegralResult("res(f, f') is not divisible by lc(f)")
    return sign * value // f.leading


@dataclass(frozen=True)
class RootsModP:
    """Roots of f in P^1(F_p)."""
    p: int
    roots: frozenset[int]
    at_infinity: bool

    @property
    def has_projective_root(self) -> bool:
        return bool(self.roots) or self.at_infinity


def roots_mod_p(f: IntPoly, p: int) -> RootsModP:
    """
    Roots of f modulo p by exhaustive scan, plus the projective root at infinity

    Args:
        f: Integer polynomial
        p: Prime (scan cost is linear in p)

    Returns:
        RootsModP with the finite roots and the infinity flag (p | lc(f))
    """
    finite = frozenset(r for r in range(p) if f(r) % p == 0)
    return RootsModP(p=p, roots=finite, at_infinity=(f.leading % p == 0))


# --- Q(sqrt(a)) arithmetic ---------------------------------------------------

@dataclass(frozen=True)
class QuadExtElem:
    """x + y*sqrt(a) with rational x, y and squarefree radicand a."""
    rational: Fraction
    radical: Fraction
    radicand: int

    def _check(self, other: "QuadExtElem") -> None:
        if self.radicand != other.radicand:
            raise RadicalResidue(f"radicands {self.radicand} and {other.radicand} differ")

    def __add__(self, other: "QuadExtElem") -> "QuadExtElem":
        self._check(other)
        return QuadExtElem(self.rational + other.rational, self.radical + other.radical, self.radicand)

    def __mul__(self, other: "QuadExtElem") -> "QuadExtElem":
        self._check(other)
        return QuadExtElem(
            self.rational * other.rational + self.radicand * self.radical * other.radical,
            self.rational * other.radical + self.radical * other.rational,
            self.radicand,
        )

    @property
    def is_rational(self) -> bool:
        return self.radical == 0

    @classmethod
    def parse(cls, text: str, radicand: int) -> "QuadExtElem":
        """Parse "rat:rad" (or a bare rational) into an element of Q(sqrt(radicand))."""
        rational, _, radical = text.strip().partition(":")
        return cls(Fraction(rational), Fraction(radical or "0"), radicand)


@dataclass(frozen=True)
class QuadExtPoly:
    """Polynomial over Q(sqrt(a)), ascending coefficients sharing one radicand."""
    coeffs: tuple[QuadExtElem, ...]
    radicand: int

    def __mul__(self, other: "QuadExtPoly") -> "QuadExtPoly":
        if self.radicand != other.radicand:
            raise RadicalResidue(f"radicands {self.radicand} and {other.radicand} differ")
        zero = QuadExtElem(Fraction(0), Fraction(0), self.radicand)
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return QuadExtPoly(tuple(out), self.radicand)


def parse_quad_poly(text: str, radicand: int) -> QuadExtPoly:
    """Parse an ascending list like "-1/2:-1/2,1" into a QuadExtPoly."""
    return QuadExtPoly(tuple(QuadExtElem.parse(part, radicand) for part in text.split(",")), radicand)


def expand_product(factors: Sequence[QuadExtPoly], content: int = 1) -> IntPoly:
    """
    Expand a product of Q(sqrt(a))-polynomials back to Z[x]

    Args:
        factors: Factors sharing one radicand
        content: Integer multiplier applied after expansion

    Returns:
        The rational, integral product content * prod(factors)
    """
    if not factors:
        return IntPoly((content,))
    radicands = {factor.radicand for factor in factors}
    if len(radicands) != 1:
        raise RadicalResidue(f"factors use several radicands: {sorted(radicands)}")
    product = factors[0]
    for factor in factors[1:]:
        product = product * factor
    coefficients = []
    for i, c in enumerate(product.coeffs):
        if not c.is_rational:
            raise RadicalResidue(f"coefficient of x^{i} keeps radical part {c.radical}")
        value = c.rational * content
        if value.denominator != 1:
            raise NonIntegralResult(f"coefficient of x^{i} is {value} after clearing content {content}")
        coefficients.append(int(value))
    return IntPoly(tuple(coefficients))


# --- bivariate polynomials over F_p -----------------------------------------

@dataclass(frozen=True)
class BivarPolyModP:
    """Polynomial in u, v over F_p stored as sorted ((i, j), c) terms for u^i v^j."""
    p: int
    terms: tuple[tuple[tuple[int, int], int], ...]

    @classmethod
    def from_dict(cls, p: int, coeffs: dict[tuple[int, int], int]) -> "BivarPolyModP":
        reduced = {k: c % p for k, c in coeffs.items() if c % p}
        return cls(p, tuple(sorted(reduced.items())))

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def bidegree(self) -> tuple[int, int]:
        if self.is_zero:
            return (-1, -1)
        return (max(i for (i, _), _ in self.terms), max(j for (_, j), _ in self.terms))

    @property
    def total_degree(self) -> int:
        return max((i + j for (i, j), _ in self.terms), default=-1)

    def __mul__(self, other: "BivarPolyModP") -> "BivarPolyModP":
        out: dict[tuple[int, int], int] = {}
        for (i1, j1), c1 in self.terms:
            for (i2, j2), c2 in other.terms:
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + c1 * c2
        return BivarPolyModP.from_dict(self.p, out)

    def evaluate(self, u: int, v: int) -> int:
        return sum(c * pow(u, i, self.p) * pow(v, j, self.p) for (i, j), c in self.terms) % self.p

    def divmod(self, divisor: "BivarPolyModP") -> tuple["BivarPolyModP", "BivarPolyModP"]:
        """Division with remainder in lex order u > v."""
        if divisor.is_zero:
            raise ZeroPolynomial("division by the zero polynomial")
        p = self.p
        lead_key = max(k for k, _ in divisor.terms)
        lead_inv = pow(divisor.as_dict()[lead_key], -1, p)
        remainder = self.as_dict()
        quotient: dict[tuple[int, int], int] = {}
        leftover: dict[tuple[int, int], int] = {}
        while remainder:
            key = max(remainder)
            coefficient = remainder[key]
            if key[0] >= lead_key[0] and key[1] >= lead_key[1]:
                shift = (key[0] - lead_key[0], key[1] - lead_key[1])
                factor = (coefficient * lead_inv) % p
                quotient[shift] = (quotient.get(shift, 0) + factor) % p
                for (i, j), c in divisor.terms:
                    target = (i + shift[0], j + shift[1])
                    remainder[target] = (remainder.get(target, 0) - factor * c) % p
                    if remainder[target] == 0:
                        del remainder[target]
            else:
                leftover[key] = coefficient
                del remainder[key]
        return BivarPolyModP.from_dict(p, quotient), BivarPolyModP.from_dict(p, leftover)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms, key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0])):
            mono = "".join(
                name if e == 1 else f"{name}^{e}" for name, e in (("u", i), ("v", j)) if e
            ) or "1"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def _candidate_divisors(f: BivarPolyModP) -> list[BivarPolyModP]:
    """
    Every nonconstant polynomial over F_2 that could be the smaller factor of f

    Any factorization f = g*h has one factor with deg_u <= deg_u(f)//2 and one
    with deg_v <= deg_v(f)//2, so the union of both boxes covers a factor.
    """
    du, dv = f.bidegree
    boxes = [(du // 2, dv), (du, dv // 2)]
    seen: set[tuple] = set()
    candidates = []
    for bu, bv in boxes:
        monomials = [(i, j) for i in range(bu + 1) for j in range(bv + 1)]
        for mask in range(1, 1 << len(monomials)):
            keys = tuple(sorted(monomials[k] for k in range(len(monomials)) if mask >> k & 1))
            if keys == ((0, 0),) or keys in seen:
                continue
            seen.add(keys)
            candidates.append(BivarPolyModP(2, tuple((key, 1) for key in keys)))
    candidates.sort(key=lambda g: (g.total_degree, g.bidegree, g.terms))
    return candidates


def factor_bivariate_mod2(f: BivarPolyModP) -> list[BivarPolyModP]:
    """
    Complete factorization over F_2 by exhaustive divisor search

    Args:
        f: Nonzero polynomial over F_2 of bidegree at most (3, 3)

    Returns:
        Irreducible factors with multiplicity, smallest degree first
    """
    if f.p != 2:
        raise ValueError("factor_bivariate_mod2 works over F_2 only")
    if f.is_zero:
        raise ZeroPolynomial("cannot factor the zero polynomial")
    factors: list[BivarPolyModP] = []
    remaining = f
    while remaining.total_degree > 0:
        for candidate in _candidate_divisors(remaining):
            if candidate.total_degree == remaining.total_degree:
                factors.append(remaining)
                remaining = BivarPolyModP(2, (((0, 0), 1),))
                break
            quotient, rest = remaining.divmod(candidate)
            if rest.is_zero:
                logger.debug("🔍 found factor %s", candidate)
                factors.append(candidate)
                remaining = quotient
                break
        else:
            factors.append(remaining)
            break
    return factors


def multiply_all(polys: Iterable[BivarPolyModP], p: int) -> BivarPolyModP:
    product = BivarPolyModP(p, (((0, 0), 1),))
    for poly in polys:
        product = product * poly
    return product


def product_of_int_polys(polys: Iterable[tuple[IntPoly, int]]) -> IntPoly:
    """prod f_i^e_i for (f_i, e_i) pairs."""
    result = IntPoly((1,))
    for poly, exponent in polys:
        result = result * poly**exponent
    return result
