"""
Exact Arithmetic Module
Integer and rational arithmetic, p-adic valuations, quadratic residue symbols
and squarefree decomposition
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import sympy
from sympy.ntheory.residue_ntheory import is_quad_residue

from src.exceptions import NotOddPrime, NotPrime, ZeroInput

RationalLike = Union[int, Fraction, str]

# Valuation of zero
INFINITE_VALUATION = math.inf


def as_rational(x: RationalLike) -> Fraction:
    """
    Coerce an integer, Fraction or string such as "-3/4" into a reduced Fraction

    Args:
        x: Value to convert

    Returns:
        Reduced Fraction with positive denominator
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def gcd(a: int, b: int) -> int:
    """Nonnegative greatest common divisor, gcd(0, 0) = 0."""
    return math.gcd(a, b)


@lru_cache(maxsize=4096)
def is_prime(p: int) -> bool:
    return p >= 2 and bool(sympy.isprime(p))


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")


def _int_valuation(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x: RationalLike, p: int) -> int | float:
    """
    Exact p-adic valuation of a rational number

    Args:
        x: Rational number
        p: Prime

    Returns:
        v_p(x) as an integer, or INFINITE_VALUATION when x = 0
    """
    _require_prime(p)
    q = as_rational(x)
    if q == 0:
        return INFINITE_VALUATION
    return _int_valuation(q.numerator, p) - _int_valuation(q.denominator, p)


@lru_cache(maxsize=65536)
def factor_integer(n: int) -> tuple[tuple[int, int], ...]:
    """
    Prime factorization of a positive integer as sorted (prime, exponent) pairs

    sympy.factorint does trial division first, then Pollard rho / p-1 with
    primality certification of every reported factor.
    """
    if n < 1:
        raise ValueError("factor_integer expects a positive integer")
    return tuple(sorted(sympy.factorint(n).items()))


@dataclass(frozen=True)
class SquarefreeDecomp:
    """d = D * s^2 with D a squarefree integer and s a positive rational"""
    D: int
    s: Fraction

    def recompose(self) -> Fraction:
        return self.D * self.s * self.s


def _split_square(n: int) -> tuple[int, int]:
    """Write n > 0 as core * root^2 with core squarefree."""
    core, root = 1, 1
    for prime, exponent in factor_integer(n):
        if exponent % 2:
            core *= prime
        root *= prime ** (exponent // 2)
    return core, root


def squarefree_part(d: RationalLike) -> SquarefreeDecomp:
    """
    Squarefree decomposition d = D * s^2 of a nonzero rational

    Args:
        d: Nonzero rational number

    Returns:
        SquarefreeDecomp with sign(D) = sign(d)
    """
    q = as_rational(d)
    if q == 0:
        raise ZeroInput("0 has no squarefree part")
    # d = num/den = (num*den) / den^2, and num, den are coprime
    sign = -1 if q < 0 else 1
    num_core, num_root = _split_square(abs(q.numerator))
    den_core, den_root = _split_square(q.denominator)
    D = sign * num_core * den_core
    s = Fraction(num_root, den_root * den_core)
    return SquarefreeDecomp(D=D, s=s)


def legendre(a: int, p: int) -> int:
    """
    Legendre symbol (a/p) for an odd prime p

    Args:
        a: Any integer
        p: Odd prime

    Returns:
        0 if p | a, 1 if a is a nonzero square mod p, otherwise -1
    """
    if p == 2 or not is_prime(p):
        raise NotOddPrime(f"{p} is not an odd prime")
    return int(sympy.legendre_symbol(a % p, p))


def kronecker(a: int, n: int) -> int:
    """
    Kronecker symbol (a/n) for arbitrary integers

    Args:
        a: Numerator
        n: Denominator

    Returns:
        Symbol value in {-1, 0, 1}
    """
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * int(sympy.jacobi_symbol(a % n, n))


def is_square_mod(a: int, n: int) -> bool:
    """True when a is congruent to a square modulo n (0 counts as a square)."""
    if n < 1:
        raise ValueError("modulus must be positive")
    return bool(is_quad_residue(a % n, n))


def nonzero_squares(p: int) -> frozenset[int]:
    """Nonzero quadratic residues modulo p."""
    return frozenset((x * x) % p for x in range(1, p))


def int_to_factored_string(n: int) -> str:
    """
    Render an integer as a signed product of prime powers, e.g. -2^8*3^6*11^5

    Args:
        n: Nonzero integer

    Returns:
        Factored representation; "1" and "-1" for units
    """
    if n == 0:
        return "0"
    sign = "-" if n < 0 else ""
    parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in factor_integer(abs(n))] if abs(n) > 1 else ["1"]
    return sign + "*".join(parts)


def parse_factored_int(text: str) -> int:
    """Inverse of int_to_factored_string; accepts plain decimal integers too."""
    text = text.strip().replace(" ", "")
    sign = 1
    if text.startswith("-"):
        sign, text = -1, text[1:]
    value = 1
    for part in text.split("*"):
        base, _, exponent = part.partition("^")
        value *= int(base) ** (int(exponent) if exponent else 1)
    return sign * value
