"""
Polynomial Tests
Arithmetic, binary forms, resultants, discriminants, Q(sqrt a) expansion and F_2 factoring
"""
import random
from fractions import Fraction

import pytest

from src.exceptions import ConstantPolynomial, RadicalResidue, ZeroPolynomial
from src.poly import (
    BivarPolyModP,
    IntPoly,
    discriminant,
    eval_homogeneous,
    eval_homogeneous_mod,
    expand_product,
    factor_bivariate_mod2,
    multiply_all,
    parse_quad_poly,
    resultant,
    roots_mod_p,
)


def _random_poly(rng: random.Random, max_degree: int = 3) -> IntPoly:
    degree = rng.randint(1, max_degree)
    coeffs = [rng.randint(-9, 9) for _ in range(degree)] + [rng.choice([-3, -2, -1, 1, 2, 3])]
    return IntPoly(tuple(coeffs))


def test_parse_strips_and_prints():
    f = IntPoly.parse("1,-8,8,0,0")
    assert f.coeffs == (1, -8, 8)
    assert f.degree == 2
    assert str(IntPoly.parse("-1,-2,1,1")) == "x^3 + x^2 - 2*x - 1"
    assert IntPoly(()).degree == -1


def test_arithmetic():
    x = IntPoly.monomial(1)
    f = x * x - IntPoly((5,))
    assert f == IntPoly((-5, 0, 1))
    assert (x + IntPoly((1,))) ** 3 == IntPoly((1, 3, 3, 1))
    assert 2 * f == IntPoly((-10, 0, 2))
    assert f.derivative() == IntPoly((0, 2))
    assert f(Fraction(1, 2)) == Fraction(-19, 4)
    assert f(3) == 4


def test_reversal():
    f = IntPoly.parse("1,2,3")
    assert f.reversed() == IntPoly.parse("3,2,1")
    assert IntPoly.parse("0,0,1").reversed() == IntPoly((1,))


def test_eval_homogeneous():
    f = IntPoly.parse("1,0,1")
    assert eval_homogeneous(f, 1, 2) == 5
    assert eval_homogeneous(f, 3, 1) == 10
    # odd homogenizing degree
    assert eval_homogeneous(IntPoly.parse("1,1"), 2, 3, degree=3) == 3**3 + 2 * 3**2
    assert eval_homogeneous_mod(IntPoly.parse("1,1"), 2, 3, 7, degree=3) == 45 % 7
    assert eval_homogeneous_mod(IntPoly.parse("1,1"), 2, 3, 7) == 5


def test_homogeneity_property():
    rng = random.Random(7)
    for _ in range(1000):
        f = _random_poly(rng, 6)
        m, n, k = rng.randint(-30, 30), rng.randint(1, 30), rng.randint(-5, 5)
        assert eval_homogeneous(f, k * m, k * n) == k ** f.degree * eval_homogeneous(f, m, n)
        modulus = rng.choice([8, 9, 25, 49, 512])
        assert eval_homogeneous_mod(f, m, n, modulus) == eval_homogeneous(f, m, n) % modulus


def test_resultant_linear_factor_evaluates():
    g = IntPoly.parse("1,6,19,36,34,36,53,44,20,14,13,6,1")
    for c in (-3, 0, 2, 5):
        assert abs(resultant(IntPoly((-c, 1)), g)) == abs(g(c))


def test_resultant_constants_and_zero():
    assert resultant(IntPoly((3,)), IntPoly.parse("1,0,1")) == 9
    assert resultant(IntPoly((3,)), IntPoly((4,))) == 1
    with pytest.raises(ZeroPolynomial):
        resultant(IntPoly(()), IntPoly((1, 1)))


def test_resultant_multiplicative():
    rng = random.Random(99)
    for _ in range(1000):
        f, g, h = _random_poly(rng), _random_poly(rng), _random_poly(rng)
        assert resultant(f, g * h) == resultant(f, g) * resultant(f, h)


def test_discriminants():
    assert discriminant(IntPoly.parse("-5,0,1")) == 20
    assert discriminant(IntPoly.parse("-1,-2,1,1")) == 49
    assert discriminant(IntPoly.parse("1,-8,8,-18,8,-8,1")) == 2**20 * 13**3
    with pytest.raises(ConstantPolynomial):
        discriminant(IntPoly((4,)))


def test_roots_mod_p():
    roots = roots_mod_p(IntPoly.parse("1,0,1"), 5)
    assert roots.roots == frozenset({2, 3})
    assert not roots_mod_p(IntPoly.parse("1,0,1"), 3).has_projective_root
    assert roots_mod_p(IntPoly.parse("1,0,2"), 2).at_infinity


def test_expand_product_over_quadratic_field():
    conjugates = [parse_quad_poly("0:-1,1", 5), parse_quad_poly("0:1,1", 5)]
    assert expand_product(conjugates) == IntPoly.parse("-5,0,1")
    assert expand_product(conjugates, content=3) == IntPoly.parse("-15,0,3")
    with pytest.raises(RadicalResidue):
        expand_product([parse_quad_poly("0:-1,1", 5)])


def _family_mod2() -> BivarPolyModP:
    # f(u, v) = A(u) v(v+1) + A(v) u(u+1), A = u^3 + u^2 - 2u - 1
    A = (-1, -2, 1, 1)
    coeffs = {}
    for i, a in enumerate(A):
        for j in (1, 2):
            coeffs[(i, j)] = coeffs.get((i, j), 0) + a
            coeffs[(j, i)] = coeffs.get((j, i), 0) + a
    return BivarPolyModP.from_dict(2, coeffs)


def test_factor_bivariate_mod2():
    f = _family_mod2()
    factors = factor_bivariate_mod2(f)
    assert multiply_all(factors, 2) == f
    assert sorted(str(g) for g in factors) == ["u + v", "uv + u + 1", "uv + v + 1"]


def test_bivariate_division():
    f = _family_mod2()
    u_plus_v = BivarPolyModP.from_dict(2, {(1, 0): 1, (0, 1): 1})
    quotient, remainder = f.divmod(u_plus_v)
    assert remainder.is_zero
    assert quotient * u_plus_v == f
    assert f.evaluate(1, 1) == 0
