"""
Verifier Tests
Sampled points, the splitting table, identities, radicand criterion, witnesses and Table 4
"""
import json
import time
from fractions import Fraction

import pytest

from src.curvedb import default_registry, get_curve
from src.exactmath import squarefree_part, valuation
from src.exceptions import HypothesisViolated, MissingFactorization
from src.reports import CheckStatus, to_wire
from src.splitting import SplitBehavior, classify_prime
from src.verifiers import (
    PointKind,
    check_identities,
    check_lemma_referee,
    check_reciprocity_chain,
    check_sampling_soundness,
    check_table2,
    check_table4,
    check_thm2_1b,
    check_witnesses,
    find_ramification_witnesses,
    identities_pass,
    iter_coprime_pairs,
    prove_table2,
    sample_points,
    table3_levels,
    table4_unramified,
    witness_primes,
)

HEIGHT = 20


def test_coprime_pairs_order_and_count():
    pairs = list(iter_coprime_pairs(2))
    assert pairs[:3] == [(-1, 1), (0, 1), (1, 1)]
    assert set(pairs) == {(-1, 1), (0, 1), (1, 1), (-2, 1), (-1, 2), (1, 2), (2, 1)}
    assert len(pairs) == len(set(pairs))


def test_sampled_point_data():
    points = {pt.x0: pt for pt in sample_points(22, 3)}
    pt = points[Fraction(0)]
    assert pt.value == -32
    assert pt.kind == PointKind.QUADRATIC
    assert pt.D == -2
    assert pt.behavior(2) == SplitBehavior.RAMIFIED
    half = points[Fraction(1, 2)]
    assert half.D == squarefree_part(get_curve(22).f(Fraction(1, 2))).D
    assert half.D * half.s ** 2 == half.d


def test_local_behaviour_matches_factored_d():
    for pt in sample_points(30, 12):
        if pt.kind != PointKind.QUADRATIC:
            continue
        for p in (2, 3, 5, 7):
            assert pt.behavior(p) == classify_prime(pt.D, p)


@pytest.mark.parametrize("N", [22, 28, 30, 33, 35, 40, 48])
def test_table2_holds_on_samples(N):
    reports = check_table2(N, HEIGHT)
    assert reports
    assert all(report.status == CheckStatus.PASS for report in reports), [r.witnesses for r in reports if not r.ok]


@pytest.mark.parametrize("N", [22, 28, 39])
def test_sampling_soundness(N):
    assert check_sampling_soundness(N, HEIGHT).status == CheckStatus.PASS


def test_identities():
    reports = check_identities()
    assert len(reports) == 11
    assert all(report.status == CheckStatus.PASS for report in reports)
    assert identities_pass(30) and identities_pass(35)
    faulty = check_identities(fault=True)
    assert faulty[0].status == CheckStatus.FAIL
    assert "difference" in faulty[0].witnesses[0]


def test_table3_levels():
    assert table3_levels() == [26, 28, 29, 30, 33, 35, 39, 40, 41, 48, 50]


@pytest.mark.parametrize("N", [26, 28, 30, 33, 35, 40, 48])
def test_radicand_criterion(N):
    report = check_thm2_1b(N)
    assert report.status == CheckStatus.PASS
    assert report.check_id == f"verifiers.thm2_1b.{N}"


def test_radicand_criterion_needs_factorization():
    with pytest.raises(MissingFactorization):
        check_thm2_1b(22)


def test_radicand_trace_skips_two_for_n28():
    report = check_thm2_1b(28)
    assert any(step.get("p") == 2 and "skipped" in step for step in report.witnesses)


def test_lemma_referee_hypotheses():
    with pytest.raises(HypothesisViolated):
        check_lemma_referee(22, 2)
    with pytest.raises(HypothesisViolated):
        check_lemma_referee(26, 3)
    assert isinstance(check_lemma_referee(22, 3), bool)


def test_witness_primes():
    assert witness_primes(-7) == [11, 23, 29]
    assert witness_primes(5) == [11, 19, 29]
    assert witness_primes(-11) == [3, 5, 23]


@pytest.mark.parametrize("N,a,p", [
    (N, a, p) for N, a in [(28, -7), (30, 5), (33, -11), (35, 5)] for p in witness_primes(a)
])
def test_ramification_witnesses(N, a, p):
    found = find_ramification_witnesses(N, a, p, 5)
    assert len(set(found.D_values)) == 5
    for D in found.D_values:
        assert valuation(D, p) == 1
        assert squarefree_part(D).D == D


def test_witness_checks_pass():
    reports = check_witnesses(28)
    assert [r.check_id for r in reports] == ["verifiers.witness.28.11", "verifiers.witness.28.23",
                                             "verifiers.witness.28.29"]
    assert all(r.status == CheckStatus.PASS for r in reports)


def test_witness_hypotheses():
    with pytest.raises(HypothesisViolated):
        find_ramification_witnesses(28, 5, 11, 1)
    with pytest.raises(HypothesisViolated):
        find_ramification_witnesses(28, -7, 2, 1)


@pytest.mark.parametrize("N", [29, 33, 41])
def test_reciprocity_chains(N):
    started = time.perf_counter()
    assert check_reciprocity_chain(N, HEIGHT).status == CheckStatus.PASS
    # radicand prime factors reach 10^11 at this height
    assert time.perf_counter() - started < 10.0


def test_reciprocity_chain_unknown_level():
    with pytest.raises(HypothesisViolated):
        check_reciprocity_chain(22, HEIGHT)


def test_table4_reproduces_every_row():
    registry = default_registry()
    for curve in registry.curves():
        assert table4_unramified(curve.N, registry) == list(curve.unramified_primes), curve.N


def test_table4_check_reports_differences():
    report = check_table4(22)
    assert report.status == CheckStatus.PASS
    perturbed = default_registry().with_perturbed_coefficient(22)
    assert check_table4(22, perturbed).status == CheckStatus.FAIL


@pytest.mark.parametrize("N", default_registry().levels)
def test_prove_table2_routes(N):
    reports = prove_table2(N, HEIGHT)
    assert all(report.status == CheckStatus.PASS for report in reports), [r.witnesses for r in reports if not r.ok]
    routes = {report.witnesses[0]["route"] for report in reports}
    assert routes <= {"engine", "reciprocity", "identity", "real_roots", "engine-parity", "engine-mod8"}


def test_prove_table2_witnesses_are_json():
    reports = prove_table2(28, HEIGHT)
    flags = [w for r in reports for w in r.witnesses if w["route"] == "real_roots"]
    assert flags and all(type(w["real_roots"]) is int for w in flags)
    document = json.loads(json.dumps(to_wire([r.witnesses for r in reports])))
    assert len(document) == len(reports)


def test_prove_table2_identity_route_for_mod5():
    reports = {r.check_id: r for r in prove_table2(30, HEIGHT)}
    witness = reports["verifiers.prove_table2.30.mod5_01"].witnesses[0]
    assert witness["route"] == "identity"
    assert set(witness["refined"]) <= {0, 1}
