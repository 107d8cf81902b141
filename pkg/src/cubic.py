"""
Cubic Family Module
Reduction types along the family on X1(2,14), the resultant facts behind them,
residue degrees in Q(zeta_7)^+ and the structure of the model modulo 2
"""
import logging
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Literal, Mapping, Optional, Tuple, Union

import sympy

from src.curvedb import CubicFamilyData, default_registry
from src.exactmath import INFINITE_VALUATION, RationalLike, as_rational, int_to_factored_string, is_prime, valuation
from src.exceptions import CuspParameter, HypothesisViolated, NotPrime, Undefined
from src.poly import (
    BivarPolyModP,
    IntPoly,
    eval_homogeneous,
    factor_bivariate_mod2,
    multiply_all,
    resultant,
)
from src.reports import CheckReport, compare_claim, outcome, run_check

logger = logging.getLogger(__name__)


class ReductionType(str, Enum):
    MULTIPLICATIVE = "multiplicative"
    NON_MULTIPLICATIVE = "non_multiplicative"


class Branch(str, Enum):
    """Which case of the valuation argument decided the verdict"""
    U_POSITIVE = "v_p(u)>0"
    U_NEGATIVE = "v_p(u)<0"
    U_PLUS_ONE = "v_p(u+1)>0"
    CUBIC = "v_p(A(u))>0"
    H12 = "v_p(h12(u))>0"
    SEVEN_SPECIAL = "seven_special"
    GOOD_OR_ADDITIVE = "good_or_additive"


@dataclass(frozen=True)
class ReductionVerdict:
    p: int
    type: ReductionType
    n: Optional[int]
    branch: Branch

    @property
    def kodaira(self) -> str:
        return f"I_{self.n}" if self.type == ReductionType.MULTIPLICATIVE else "not multiplicative"


def _family(family: Optional[CubicFamilyData]) -> CubicFamilyData:
    family = family or default_registry().cubic
    if family is None:
        raise Undefined("the registry carries no cubic family data")
    return family


def _parameter(u: RationalLike, p: int) -> Fraction:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    value = as_rational(u)
    if value in (0, -1):
        raise CuspParameter(f"u={value} is a cusp of the family")
    return value


def classify_reduction(u: RationalLike, p: int, family: Optional[CubicFamilyData] = None) -> ReductionVerdict:
    """
    Reduction type at p of the curve with parameter u

    Args:
        u: Rational parameter other than 0 and -1
        p: Prime
        family: Cubic family data, the registry's by default

    Returns:
        ReductionVerdict with the branch that fired
    """
    family = _family(family)
    u = _parameter(u, p)

    v_u = valuation(u, p)
    if v_u > 0:
        return ReductionVerdict(p, ReductionType.MULTIPLICATIVE, 14 * v_u, Branch.U_POSITIVE)
    if v_u < 0:
        # v := 1/u has v_p(v) = -v_p(u) > 0
        return ReductionVerdict(p, ReductionType.MULTIPLICATIVE, -14 * v_u, Branch.U_NEGATIVE)
    v_u1 = valuation(u + 1, p)
    if v_u1 > 0:
        return ReductionVerdict(p, ReductionType.MULTIPLICATIVE, 14 * v_u1, Branch.U_PLUS_ONE)

    k = valuation(family.A(u), p)
    if k > 0:
        if p == 7:
            residue = (u.numerator * pow(u.denominator, -1, 7)) % 7
            if residue != 2 or k != 1:
                raise HypothesisViolated(f"A(u) divisible by 7 with u = {residue} mod 7 and k = {k}")
            return ReductionVerdict(p, ReductionType.NON_MULTIPLICATIVE, None, Branch.SEVEN_SPECIAL)
        if p % 7 not in (1, 6):
            raise HypothesisViolated(f"A has a root modulo {p} but {p} is not +-1 mod 7")
        return ReductionVerdict(p, ReductionType.MULTIPLICATIVE, 2 * k, Branch.CUBIC)
    if valuation(family.h12(u), p) > 0:
        # c4 and Delta share the h12 pole, v_p(j) = 0
        return ReductionVerdict(p, ReductionType.NON_MULTIPLICATIVE, None, Branch.H12)
    return ReductionVerdict(p, ReductionType.NON_MULTIPLICATIVE, None, Branch.GOOD_OR_ADDITIVE)


def j_valuation(u: RationalLike, p: int, family: Optional[CubicFamilyData] = None) -> int:
    """v_p(j(u)) from the factor valuations of the printed j."""
    family = _family(family)
    value = as_rational(u)
    if value in (0, -1):
        raise Undefined(f"j has a pole at the cusp u={value}")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    return family.j.valuation(value, p)


def c4_valuation(u: RationalLike, p: int, family: Optional[CubicFamilyData] = None) -> int:
    """
    v_p of the c4 numerator form G(m, n) = n^20 g2 g6 g12 (m/n) at u = m/n in lowest terms

    Scaling invariant, so it reads the same for p dividing n.
    """
    family = _family(family)
    value = as_rational(u)
    v = valuation(eval_homogeneous(family.g_c4, value.numerator, value.denominator), p)
    if v == INFINITE_VALUATION:
        raise Undefined(f"the c4 numerator vanishes at u={value}")
    return int(v)


def multiplicative_by_j(u: RationalLike, p: int, family: Optional[CubicFamilyData] = None) -> Optional[int]:
    """
    Independent criterion: I_n with n = -v_p(j) when v_p(j) < 0 and c4 is a unit

    Returns:
        n, or None when the reduction is not multiplicative
    """
    v_j = j_valuation(u, p, family)
    if v_j < 0 and c4_valuation(u, p, family) == 0:
        return -v_j
    return None


def residue_degree_zeta7_plus(q: int) -> Union[Literal[1, 3], Literal["ramified"]]:
    """
    Residue degree of q in Q(zeta_7)^+

    Args:
        q: Prime

    Returns:
        1 if q = +-1 mod 7, "ramified" for q = 7, otherwise 3
    """
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    if q == 7:
        return "ramified"
    return 1 if q % 7 in (1, 6) else 3


# --- resultants ---------------------------------------------------------------

def _render(value: Union[int, Fraction]) -> str:
    value = abs(value)
    if isinstance(value, Fraction) and value.denominator != 1:
        return f"{int_to_factored_string(value.numerator)}/{int_to_factored_string(value.denominator)}"
    return int_to_factored_string(int(value))


def _matches(value: Union[int, Fraction], claimed: int) -> bool:
    value = abs(Fraction(value))
    return value == claimed or value == Fraction(1, claimed)


@dataclass(frozen=True)
class ResultantClaim:
    """A printed resultant with its literal reading and alternative readings"""
    check_id: str
    claimed: int
    literal: Tuple[IntPoly, IntPoly]
    interpretations: Tuple[Tuple[str, Union[int, Fraction]], ...] = ()


def resultant_claims(family: CubicFamilyData) -> List[ResultantClaim]:
    A, h12, g6 = family.A, family.h12, family.g6
    u, u1 = family.u, family.u_plus_1
    g_c4, g_delta = family.g_c4, family.g_delta
    u14, u1_14 = u ** 14, u1 ** 14
    delta_cofactor = u14 * u1_14

    # res(A, gh) = res(A, g) res(A, h)
    res_A_h12 = resultant(A, h12)
    res_c4_num = resultant(A, g_c4)
    res_c4_den = res_A_h12 ** 4
    res_delta_num = resultant(A, delta_cofactor)
    res_delta_den = res_A_h12 ** 12
    res_delta_star = res_delta_num * resultant(A, g6) ** 2

    return [
        ResultantClaim("cubic.resultant.h12_gdelta", 1, (h12, g_delta)),
        ResultantClaim("cubic.resultant.h12_gc4", 1, (h12, g_c4)),
        ResultantClaim("cubic.resultant.A_gc4", 7 ** 12, (A, g_c4), (
            ("numerator", res_c4_num),
            ("denominator", res_c4_den),
            ("quotient", Fraction(res_c4_num, res_c4_den)),
        )),
        ResultantClaim("cubic.resultant.A_delta", 7 ** 30, (A, delta_cofactor), (
            ("numerator", res_delta_num),
            ("denominator", res_delta_den),
            ("quotient", Fraction(res_delta_num, res_delta_den)),
            ("j_consistent_numerator", res_delta_star),
            ("j_consistent_quotient", Fraction(res_delta_star, res_delta_den)),
        )),
        ResultantClaim("cubic.resultant.u_gc4", 1, (u, g_c4)),
        ResultantClaim("cubic.resultant.u_gdelta", 1, (u, u1_14 * A ** 2)),
        ResultantClaim("cubic.resultant.u1_gc4", 1, (u1, g_c4)),
        ResultantClaim("cubic.resultant.u1_gdelta", 1, (u1, u14 * A ** 2)),
        ResultantClaim("cubic.resultant.v_gdelta", 1, (u, g_delta.reversed())),
        ResultantClaim("cubic.resultant.v_gc4", 1, (u, g_c4.reversed())),
    ]


def _check_resultant(claim: ResultantClaim, discrepancies: Mapping):
    value = resultant(*claim.literal)
    status, witnesses = compare_claim(claim.check_id, _render(value), _render(claim.claimed), discrepancies)
    if claim.interpretations:
        witnesses[0]["interpretations"] = [
            {"reading": name, "value": _render(v), "matches": _matches(v, claim.claimed)}
            for name, v in claim.interpretations
        ]
    return status, witnesses


def verify_resultant_identities(family: Optional[CubicFamilyData] = None,
                                discrepancies: Optional[Mapping] = None) -> List[CheckReport]:
    """
    Recompute every printed resultant, up to sign

    Args:
        family: Cubic family data
        discrepancies: Documented discrepancies, the registry's by default

    Returns:
        One report per claim; alternative readings are attached as witnesses
    """
    family = _family(family)
    if discrepancies is None:
        discrepancies = default_registry().discrepancies
    return [run_check(claim.check_id, _check_resultant, claim, discrepancies) for claim in resultant_claims(family)]


# --- structure modulo 2 -------------------------------------------------------

def _gf4_mul(a: int, b: int) -> int:
    """Multiply in F_4 = F_2[w]/(w^2+w+1), elements encoded as 2-bit integers."""
    product = 0
    for shift in range(2):
        if b >> shift & 1:
            product ^= a << shift
    if product & 4:
        product ^= 0b111
    return product


def _gf4_pow(a: int, e: int) -> int:
    result = 1
    for _ in range(e):
        result = _gf4_mul(result, a)
    return result


# P^1 points as (x0, x1) meaning x0/x1
P1_F2 = ((0, 1), (1, 1), (1, 0))
P1_F4 = tuple((x, 1) for x in range(4)) + ((1, 0),)


def _bihomogeneous_eval(poly: BivarPolyModP, point_u: Tuple[int, int], point_v: Tuple[int, int]) -> int:
    du, dv = poly.bidegree
    total = 0
    for (i, j), c in poly.terms:
        if c % 2 == 0:
            continue
        term = _gf4_mul(_gf4_pow(point_u[0], i), _gf4_pow(point_u[1], du - i))
        term = _gf4_mul(term, _gf4_mul(_gf4_pow(point_v[0], j), _gf4_pow(point_v[1], dv - j)))
        total ^= term
    return total


def mod2_polynomial(family: Optional[CubicFamilyData] = None) -> BivarPolyModP:
    return BivarPolyModP.from_dict(2, _family(family).f_uv())


def render_factorization(factors: List[BivarPolyModP]) -> str:
    return "".join(f"({text})" for text in sorted(str(factor) for factor in factors))


def _check_mod2_factorization(poly: BivarPolyModP, discrepancies: Mapping):
    factors = factor_bivariate_mod2(poly)
    if multiply_all(factors, 2) != poly:
        return outcome(False, [{"reason": "factor product differs from f mod 2", "factors": render_factorization(factors)}])
    return compare_claim("cubic.mod2.factorization", render_factorization(factors),
                         "(u + v)(uv + v + 1)(uv + v + 1)", discrepancies)


def _check_mod2_closure(poly: BivarPolyModP):
    solutions = [(pu, pv) for pu in P1_F4 for pv in P1_F4 if _bihomogeneous_eval(poly, pu, pv) == 0]
    rational = set(P1_F2)
    for pu, pv in solutions:
        if (pu in rational) != (pv in rational):
            return outcome(False, [{"u": pu, "v": pv}])
    swapped = {(pv, pu) for pu, pv in solutions}
    if swapped != set(solutions):
        return outcome(False, [{"reason": "solution set is not symmetric"}])
    over_f2 = sorted((pu, pv) for pu, pv in solutions if pu in rational)
    return outcome(bool(over_f2), [{"solutions_f4": len(solutions), "solutions_f2": over_f2}])


def verify_mod2_structure(family: Optional[CubicFamilyData] = None,
                          discrepancies: Optional[Mapping] = None) -> List[CheckReport]:
    """
    Factor f(u, v) modulo 2 and check that u in P^1(F_2) forces v in P^1(F_2)

    Args:
        family: Cubic family data
        discrepancies: Documented discrepancies, the registry's by default

    Returns:
        Reports cubic.mod2.factorization and cubic.mod2.closure
    """
    poly = mod2_polynomial(family)
    if discrepancies is None:
        discrepancies = default_registry().discrepancies
    return [
        run_check("cubic.mod2.factorization", _check_mod2_factorization, poly, discrepancies),
        run_check("cubic.mod2.closure", _check_mod2_closure, poly),
    ]


# --- classifier coherence -----------------------------------------------------

def random_parameters(count: int, seed: int, bound: int = 50, max_prime: int = 100) -> List[Tuple[Fraction, int]]:
    """Deterministic sample of (u, p) with u = m/n, |m|, |n| <= bound, u not a cusp."""
    rng = random.Random(seed)
    primes = [int(p) for p in sympy.primerange(2, max_prime + 1)]
    samples = []
    while len(samples) < count:
        m, n = rng.randint(-bound, bound), rng.randint(1, bound)
        u = Fraction(m, n)
        if u in (0, -1):
            continue
        samples.append((u, rng.choice(primes)))
    return samples


def _check_coherence(count: int, seed: int, family: CubicFamilyData):
    for u, p in random_parameters(count, seed):
        verdict = classify_reduction(u, p, family)
        by_j = multiplicative_by_j(u, p, family)
        if (verdict.type == ReductionType.MULTIPLICATIVE) != (by_j is not None) or (by_j is not None and by_j != verdict.n):
            return outcome(False, [{"u": str(u), "p": p, "branch": verdict.branch.value, "n": verdict.n, "by_j": by_j}])
        if verdict.n is not None and not (verdict.n % 14 == 0 or (verdict.n % 2 == 0 and p % 7 in (1, 6))):
            return outcome(False, [{"u": str(u), "p": p, "n": verdict.n, "reason": "type outside I_14k and I_2k"}])
    return outcome(True, [{"samples": count, "seed": seed}])


def check_classifier_coherence(count: int = 200, seed: int = 14,
                               family: Optional[CubicFamilyData] = None) -> CheckReport:
    """classify_reduction agrees with the j-valuation criterion on a fixed random sample."""
    return run_check("cubic.classifier.coherence", _check_coherence, count, seed, _family(family))


def _check_two_adic(count: int, seed: int, family: CubicFamilyData):
    for u, _ in random_parameters(count, seed):
        verdict = classify_reduction(u, 2, family)
        if verdict.type != ReductionType.MULTIPLICATIVE or verdict.n % 14:
            return outcome(False, [{"u": str(u), "branch": verdict.branch.value, "n": verdict.n}])
    return outcome(True, [{"samples": count, "seed": seed}])


def check_two_adic_reduction(count: int = 200, seed: int = 2,
                             family: Optional[CubicFamilyData] = None) -> CheckReport:
    """At 2 one of u, 1/u, u+1 is non-unital, so every verdict is I_14k."""
    return run_check("cubic.classifier.two_adic", _check_two_adic, count, seed, _family(family))


def verify_cubic(family: Optional[CubicFamilyData] = None, discrepancies: Optional[Mapping] = None) -> List[CheckReport]:
    """Every cubic-family check, sorted by id."""
    family = _family(family)
    reports = verify_resultant_identities(family, discrepancies)
    reports += verify_mod2_structure(family, discrepancies)
    reports += [check_classifier_coherence(family=family), check_two_adic_reduction(family=family)]
    logger.info("✅ cubic family: %d checks", len(reports))
    return sorted(reports, key=lambda r: r.check_id)
