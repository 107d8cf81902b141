"""
Splitting Tests
Prime behaviour in quadratic fields and the residue-class deductions on D
"""
import random

import pytest

from src.exactmath import nonzero_squares, squarefree_part
from src.exceptions import InsufficientPrecision, NotAField, NotPrime
from src.splitting import (
    CanonicalClass,
    Claim,
    SplitBehavior,
    behavior_from_kronecker,
    canonical_class,
    claims_hold,
    classify_prime,
    deduce_d_constraints,
    expand_claims,
    refutes,
    required_precision,
    summarize_behaviour,
)


def test_classify_prime_at_two():
    assert classify_prime(-7, 2) == SplitBehavior.SPLIT
    assert classify_prime(5, 2) == SplitBehavior.INERT
    assert classify_prime(3, 2) == SplitBehavior.RAMIFIED
    assert classify_prime(-2, 2) == SplitBehavior.RAMIFIED


def test_classify_prime_odd():
    assert classify_prime(-1, 5) == SplitBehavior.SPLIT
    assert classify_prime(-1, 7) == SplitBehavior.INERT
    assert classify_prime(21, 7) == SplitBehavior.RAMIFIED
    # reduced to the squarefree part first
    assert classify_prime(-28, 2) == SplitBehavior.SPLIT


def test_classify_prime_errors():
    with pytest.raises(NotAField):
        classify_prime(1, 3)
    with pytest.raises(NotAField):
        classify_prime(49, 3)
    with pytest.raises(NotAField):
        classify_prime(0, 3)
    with pytest.raises(NotPrime):
        classify_prime(5, 9)


def test_classify_prime_matches_root_count():
    rng = random.Random(31)
    for _ in range(1000):
        D = rng.choice([d for d in range(-60, 61) if d not in (0, 1) and squarefree_part(d).D == d])
        p = rng.choice([3, 5, 7, 11, 13, 17, 19, 23])
        roots = sum(1 for x in range(p) if (x * x - D) % p == 0)
        expected = {0: SplitBehavior.INERT, 1: SplitBehavior.RAMIFIED, 2: SplitBehavior.SPLIT}[roots]
        assert classify_prime(D, p) == expected
        assert behavior_from_kronecker(D, p) == expected


def test_kronecker_oracle_at_two():
    for D in (-7, -3, -1, 2, 3, 5, 6, 17, 21, -15):
        assert behavior_from_kronecker(D, 2) == classify_prime(D, 2)


def test_claim_closure():
    assert expand_claims([Claim.SPLITS]) == {Claim.SPLITS, Claim.NOT_INERT, Claim.UNRAMIFIED}
    assert claims_hold(SplitBehavior.RAMIFIED, [Claim.NOT_INERT])
    assert not claims_hold(SplitBehavior.RAMIFIED, [Claim.UNRAMIFIED])
    assert not claims_hold(SplitBehavior.INERT, [Claim.NOT_INERT])


def test_canonical_class():
    cls = canonical_class(64, 2, 9)
    assert cls == CanonicalClass(p=2, exponent=9, t=6, a=1)
    assert cls.describe() == "Ds^2 = 1*2^6 (mod 512)"
    assert canonical_class(512, 2, 9) is None
    assert canonical_class(3 * 7, 7, 2).a == 3
    with pytest.raises(ValueError):
        CanonicalClass(p=3, exponent=2, t=0, a=3)


def test_required_precision():
    assert required_precision([Claim.SPLITS]) == 3
    assert required_precision([Claim.NOT_INERT]) == 3
    assert required_precision([Claim.UNRAMIFIED]) == 2
    assert required_precision([]) == 1


def test_deduce_n22_dyadic_footnote():
    # 1 mod 8, 32 mod 64 (both units mod 4 occur) and 64 mod 512
    classes = [
        CanonicalClass(p=2, exponent=9, t=0, a=1),
        CanonicalClass(p=2, exponent=9, t=5, a=1),
        CanonicalClass(p=2, exponent=9, t=5, a=3),
        CanonicalClass(p=2, exponent=9, t=6, a=1),
    ]
    constraint = deduce_d_constraints(classes, 2, claims=[Claim.NOT_INERT])
    assert constraint.residues == {1, 2, 6}
    assert constraint.ramified_possible
    assert summarize_behaviour(constraint.residues, 2) == {Claim.NOT_INERT}


def test_deduce_odd_prime():
    squares = nonzero_squares(3)
    constraint = deduce_d_constraints([CanonicalClass(p=3, exponent=1, t=0, a=1)], 3)
    assert constraint.residues == squares
    assert summarize_behaviour(constraint.residues, 3) == {Claim.SPLITS, Claim.NOT_INERT, Claim.UNRAMIFIED}


def test_deduce_needs_precision():
    shallow = CanonicalClass(p=2, exponent=4, t=2, a=1)
    with pytest.raises(InsufficientPrecision) as info:
        deduce_d_constraints([shallow], 2, claims=[Claim.SPLITS])
    assert info.value.needed_exponent == 5


def test_saturated_leaves_d_free():
    constraint = deduce_d_constraints([], 5, saturated=True)
    assert constraint.saturated
    assert constraint.residues == frozenset(range(5))
    assert summarize_behaviour(constraint.residues, 5) == frozenset()


def test_refutation_by_definite_class():
    odd_offset = CanonicalClass(p=2, exponent=7, t=1, a=1)
    assert refutes([odd_offset], 2, Claim.UNRAMIFIED) == odd_offset
    five = CanonicalClass(p=2, exponent=7, t=0, a=5)
    assert refutes([five], 2, Claim.NOT_INERT) == five
    assert refutes([five], 2, Claim.UNRAMIFIED) is None
    nonresidue = CanonicalClass(p=3, exponent=1, t=0, a=2)
    assert refutes([nonresidue], 3, Claim.SPLITS) == nonresidue
