"""
Exact Arithmetic Tests
Valuations, squarefree parts and quadratic symbols
"""
import math
import random
from fractions import Fraction

import pytest

from src.exactmath import (
    INFINITE_VALUATION,
    as_rational,
    factor_integer,
    int_to_factored_string,
    is_prime,
    is_square_mod,
    kronecker,
    legendre,
    nonzero_squares,
    parse_factored_int,
    squarefree_part,
    valuation,
)
from src.exceptions import NotOddPrime, NotPrime, ZeroInput


def test_as_rational_accepts_strings_and_ints():
    assert as_rational("-3/4") == Fraction(-3, 4)
    assert as_rational(6) == Fraction(6)
    with pytest.raises(TypeError):
        as_rational(True)


def test_valuation_of_integers_and_fractions():
    assert valuation(48, 2) == 4
    assert valuation(Fraction(1, 9), 3) == -2
    assert valuation(Fraction(10, 7), 5) == 1
    assert valuation(0, 5) == INFINITE_VALUATION
    with pytest.raises(NotPrime):
        valuation(12, 4)


def test_valuation_is_additive():
    rng = random.Random(11)
    for _ in range(1000):
        a = Fraction(rng.randint(-10**6, 10**6) or 1, rng.randint(1, 10**4))
        b = Fraction(rng.randint(-10**6, 10**6) or 1, rng.randint(1, 10**4))
        p = rng.choice([2, 3, 5, 7, 11, 13])
        assert valuation(a * b, p) == valuation(a, p) + valuation(b, p)


def test_squarefree_part_keeps_sign():
    decomp = squarefree_part(-12)
    assert decomp.D == -3
    assert decomp.s == 2
    half = squarefree_part(Fraction(1, 2))
    assert half.D == 2
    assert half.recompose() == Fraction(1, 2)
    with pytest.raises(ZeroInput):
        squarefree_part(0)


def test_squarefree_part_recomposes():
    rng = random.Random(5)
    for _ in range(1000):
        d = Fraction(rng.randint(-10**5, 10**5) or 3, rng.randint(1, 500))
        decomp = squarefree_part(d)
        assert decomp.recompose() == d
        assert all(e == 1 for _, e in factor_integer(abs(decomp.D))) if abs(decomp.D) > 1 else True


def test_legendre_values():
    assert legendre(2, 7) == 1
    assert legendre(3, 7) == -1
    assert legendre(14, 7) == 0
    with pytest.raises(NotOddPrime):
        legendre(3, 2)
    with pytest.raises(NotOddPrime):
        legendre(3, 9)


def test_legendre_is_multiplicative():
    rng = random.Random(2024)
    primes = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 97]
    for _ in range(1000):
        p = rng.choice(primes)
        a, b = rng.randint(-500, 500), rng.randint(-500, 500)
        assert legendre(a * b, p) == legendre(a, p) * legendre(b, p)


def test_legendre_matches_root_count():
    for p in (3, 5, 7, 11, 13):
        squares = nonzero_squares(p)
        for a in range(1, p):
            assert (legendre(a, p) == 1) == (a in squares)


def test_kronecker_at_two():
    assert kronecker(-7, 2) == 1
    assert kronecker(5, 2) == -1
    assert kronecker(6, 2) == 0
    assert kronecker(3, 15) == 0


def test_is_square_mod():
    assert is_square_mod(2, 7)
    assert not is_square_mod(3, 7)
    assert is_square_mod(0, 5)
    assert is_square_mod(-7, 2)


def test_is_square_mod_large_prime_moduli():
    # 2^61 - 1 and 10^9 + 7 are 7 mod 8: -1 is not a square, 2 is
    for q in (2**61 - 1, 10**9 + 7):
        assert not is_square_mod(-1, q)
        assert is_square_mod(2, q)
        assert is_square_mod(29, q) == (legendre(29, q) != -1)


def test_is_square_mod_matches_brute_force():
    for n in range(1, 80):
        squares = {x * x % n for x in range(n)}
        for a in range(-n, n):
            assert is_square_mod(a, n) == (a % n in squares), (a, n)


def test_is_prime():
    assert is_prime(2) and is_prime(97)
    assert not is_prime(1) and not is_prime(91) and not is_prime(-7)


def test_factored_strings():
    n = -(2**8) * 3**6 * 11**5
    assert int_to_factored_string(n) == "-2^8*3^6*11^5"
    assert parse_factored_int("-2^8*3^6*11^5") == n
    assert int_to_factored_string(1) == "1"
    assert int_to_factored_string(7) == "7"
    assert parse_factored_int("2^20*13^3") == 2**20 * 13**3
    assert factor_integer(360) == ((2, 3), (3, 2), (5, 1))
    assert math.prod(p**e for p, e in factor_integer(2**20 * 13**3)) == 2**20 * 13**3
