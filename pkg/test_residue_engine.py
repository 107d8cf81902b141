"""
Residue Engine Tests
Attained residue sets, canonical classes and the deduction workflow
"""
import time

import pytest

from src.curvedb import get_curve
from src.exceptions import EscalationExceeded
from src.residue_engine import (
    BOTH_ODD,
    EnumerationSpec,
    certify_claims,
    enumerate_classes,
    run_paper_deduction,
    scan_residues,
    spec_for,
)
from src.splitting import CanonicalClass, Claim


def _spec(N: int, p: int, exponent: int, **kwargs) -> EnumerationSpec:
    return EnumerationSpec(N=N, p=p, exponent=exponent, f=get_curve(N).f, **kwargs)


def test_n28_mod3_attains_one():
    result = enumerate_classes(spec_for(28, 3))
    assert result.attained == {1}
    assert result.describe() == ["Ds^2 = 1 (mod 3)"]


def test_small_attained_sets():
    assert scan_residues(_spec(30, 5, 2)) == {1, 5, 6, 11, 16, 21}
    assert scan_residues(_spec(39, 13, 1)) == {1, 3, 4, 9, 10, 12}
    assert scan_residues(_spec(29, 2, 5)) == {1, 9, 12, 16, 17, 25, 28}
    assert scan_residues(_spec(33, 2, 3)) == {1}


def test_n22_mod512_classes():
    result = enumerate_classes(spec_for(22, 2))
    assert result.spec.modulus == 512
    assert not result.saturated_zero
    grouped = result.units_by_offset()
    assert sorted(grouped) == [0, 5, 6]
    assert all(a % 8 == 1 for a in grouped[0])
    assert grouped[5] == list(range(1, 16, 2))
    assert grouped[6] == [1]


def test_orbit_and_grid_agree():
    for N, p, exponent in [(28, 7, 2), (29, 2, 5), (30, 5, 2), (26, 2, 5), (35, 7, 1), (48, 3, 2)]:
        spec = _spec(N, p, exponent)
        assert scan_residues(spec, strategy="orbit") == scan_residues(spec, strategy="grid")


def test_grid_partition_is_deterministic():
    spec = _spec(26, 13, 2)
    assert scan_residues(spec, strategy="grid", jobs=3) == scan_residues(spec, strategy="grid", jobs=1)


def test_constrained_enumerations():
    diagonal = _spec(39, 3, 4, diagonal=3)
    assert scan_residues(diagonal) == {6 + 9 * k for k in range(9)}
    both_odd = _spec(40, 2, 7, parity=BOTH_ODD)
    assert scan_residues(both_odd) == {16}
    with pytest.raises(ValueError):
        scan_residues(diagonal, strategy="orbit")


def test_spec_validation():
    with pytest.raises(ValueError):
        _spec(39, 3, 2, diagonal=4)
    with pytest.raises(ValueError):
        _spec(39, 3, 2, parity=BOTH_ODD)
    with pytest.raises(ValueError):
        _spec(39, 3, 0)
    assert _spec(40, 2, 7, parity=BOTH_ODD).label() == "N=40 mod 2^7, m,n odd"


def test_escalation_limit():
    spec = _spec(50, 5, 1, escalation_limit=2)
    with pytest.raises(EscalationExceeded) as info:
        enumerate_classes(spec)
    assert info.value.last_exponent == 1
    assert enumerate_classes(spec, escalate=False).saturated_zero


def test_deduction_n22_footnote():
    result = run_paper_deduction(22, 2)
    assert result.residues == {1, 2, 6}
    assert result.claims == {Claim.NOT_INERT}
    assert result.trace[-1] == "summarized"


def test_deduction_escalates_n50():
    result = run_paper_deduction(50, 5)
    assert result.escalations == 1
    assert result.exponent == 3
    assert result.residues == {0, 1, 4}
    assert Claim.NOT_INERT in result.claims
    assert any(step.startswith("escalate") for step in result.trace)


def test_deduction_splits():
    assert Claim.SPLITS in run_paper_deduction(28, 3).claims
    assert Claim.SPLITS in run_paper_deduction(33, 2).claims
    assert Claim.NOT_INERT in run_paper_deduction(28, 7).claims


def test_certify_refutes_unramified_at_two_for_n22():
    result = certify_claims(22, 2, {Claim.UNRAMIFIED})
    assert Claim.UNRAMIFIED not in result.claims
    refuting = result.refutations[Claim.UNRAMIFIED]
    assert isinstance(refuting, CanonicalClass) and refuting.t % 2 == 1


QR13 = (1, 3, 4, 9, 10, 12)

# (N, p, exponent, constraints, quoted classes as (r, M) for Ds^2 = r (mod M))
CITED_ENUMERATIONS = [
    (22, 2, 9, {}, [(1, 8), (32, 64), (64, 512)]),
    (23, 2, 2, {}, [(1, 4)]),
    (26, 2, 7, {}, [(1, 2), (4, 16), (16, 32), (64, 128)]),
    (26, 13, 2, {}, [(r, 13) for r in QR13] + [(52, 169), (117, 169)]),
    (28, 3, 1, {}, [(1, 3)]),
    (28, 7, 2, {}, [(1, 7), (2, 7), (4, 7), (14, 49)]),
    (29, 2, 5, {}, [(1, 2), (12, 16), (16, 32)]),
    (30, 2, 7, {}, [(1, 8), (16, 128)]),
    (30, 3, 1, {}, [(1, 3)]),
    (30, 5, 2, {}, [(1, 5), (5, 25)]),
    (31, 2, 2, {}, [(1, 4)]),
    (33, 2, 3, {}, [(1, 8)]),
    (35, 2, 2, {}, [(1, 4)]),
    (35, 5, 2, {}, [(1, 5), (5, 25)]),
    (35, 7, 1, {}, [(1, 7), (2, 7), (4, 7)]),
    (39, 2, 2, {}, [(1, 4)]),
    (39, 13, 1, {}, [(r, 13) for r in QR13]),
    (40, 2, 7, {}, [(1, 8), (16, 128)]),
    (40, 2, 7, {"parity": BOTH_ODD}, [(16, 128)]),
    (40, 3, 1, {}, [(1, 3)]),
    (40, 5, 1, {}, [(1, 5), (4, 5)]),
    (46, 2, 9, {}, [(1, 8), (64, 512)]),
    (47, 2, 2, {}, [(1, 4)]),
    (48, 2, 7, {}, [(1, 8), (16, 128)]),
    (48, 2, 7, {"parity": BOTH_ODD}, [(16, 128)]),
    (48, 3, 1, {}, [(1, 3)]),
    (48, 5, 1, {}, [(1, 5)]),
    (50, 2, 7, {}, [(1, 4), (4, 16), (16, 32), (64, 128)]),
    (50, 2, 7, {"parity": BOTH_ODD}, [(4, 16), (16, 32), (64, 128)]),
    (50, 5, 1, {}, [(0, 5), (1, 5), (4, 5)]),
    (71, 2, 2, {}, [(1, 4)]),
]


@pytest.mark.parametrize("N,p,exponent,constraints,quoted", CITED_ENUMERATIONS)
def test_cited_enumerations(N, p, exponent, constraints, quoted):
    started = time.perf_counter()
    attained = scan_residues(_spec(N, p, exponent, **constraints))
    assert time.perf_counter() - started < 2.0
    assert attained
    uncovered = [x for x in attained if not any(x % M == r for r, M in quoted)]
    assert not uncovered, uncovered
    # every quoted class is attained, except 2 mod 7 for N = 28 which the form never reaches
    unreached = [(r, M) for r, M in quoted if not any(x % M == r for x in attained)]
    assert unreached == ([(2, 7)] if (N, p) == (28, 7) else [])
