"""
Splitting Module
Behaviour of rational primes in Q(sqrt(D)) and the constraints on D that follow
from residue classes of D*s^2 modulo p^l
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from src.exactmath import gcd, is_prime, kronecker, legendre, nonzero_squares, squarefree_part
from src.exceptions import InsufficientPrecision, NotAField, NotPrime

logger = logging.getLogger(__name__)

# Residues of a squarefree D modulo 8
DYADIC_RESIDUES = frozenset({1, 2, 3, 5, 6, 7})


class SplitBehavior(str, Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


class Claim(str, Enum):
    """Statements about a prime that Table-2 style results assert for every point"""
    SPLITS = "splits"
    NOT_INERT = "not_inert"
    UNRAMIFIED = "unramified"


def expand_claims(claims: Iterable[Claim]) -> frozenset:
    """Close a claim set under implication: splits gives not_inert and unramified."""
    closed = set(Claim(c) for c in claims)
    if Claim.SPLITS in closed:
        closed |= {Claim.NOT_INERT, Claim.UNRAMIFIED}
    return frozenset(closed)


def claims_hold(behavior: SplitBehavior, claims: Iterable[Claim]) -> bool:
    """True when a prime with the given behaviour satisfies every claim."""
    for claim in claims:
        if claim == Claim.SPLITS and behavior != SplitBehavior.SPLIT:
            return False
        if claim == Claim.NOT_INERT and behavior == SplitBehavior.INERT:
            return False
        if claim == Claim.UNRAMIFIED and behavior == SplitBehavior.RAMIFIED:
            return False
    return True


@dataclass(frozen=True, order=True)
class CanonicalClass:
    """
    The statement D*s^2 = a*p^t (mod p^exponent) with p not dividing a

    The unit a is reduced modulo p^(exponent - t).
    """
    p: int
    exponent: int
    t: int
    a: int

    def __post_init__(self):
        if not 0 <= self.t < self.exponent:
            raise ValueError(f"offset t={self.t} outside [0, {self.exponent})")
        if gcd(self.a, self.p) != 1 or not 0 < self.a < self.p ** (self.exponent - self.t):
            raise ValueError(f"{self.a} is not a reduced unit modulo {self.p}^{self.exponent - self.t}")

    @property
    def r(self) -> int:
        """Precision left for the unit part."""
        return self.exponent - self.t

    @property
    def modulus(self) -> int:
        return self.p ** self.exponent

    def describe(self) -> str:
        scale = "" if self.t == 0 else (f"*{self.p}" if self.t == 1 else f"*{self.p}^{self.t}")
        return f"Ds^2 = {self.a}{scale} (mod {self.modulus})"


def canonical_class(value: int, p: int, exponent: int) -> Optional[CanonicalClass]:
    """
    Canonical form of a residue modulo p^exponent

    Args:
        value: Residue of D*s^2
        p: Prime
        exponent: Exponent of the modulus

    Returns:
        The class, or None when value = 0 (mod p^exponent)
    """
    modulus = p ** exponent
    value %= modulus
    if value == 0:
        return None
    t = 0
    while value % p == 0:
        value //= p
        t += 1
    return CanonicalClass(p=p, exponent=exponent, t=t, a=value % p ** (exponent - t))


def classify_prime(D: int, p: int) -> SplitBehavior:
    """
    Split, inert or ramified behaviour of p in Q(sqrt(D))

    Args:
        D: Integer that is not a perfect square; reduced to its squarefree part
        p: Prime

    Returns:
        SplitBehavior of p
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if D in (0, 1):
        raise NotAField(f"Q(sqrt({D})) is not a quadratic field")
    D = squarefree_part(D).D
    if D == 1:
        raise NotAField("D is a perfect square")
    if p == 2:
        if D % 4 != 1:
            return SplitBehavior.RAMIFIED
        return SplitBehavior.SPLIT if D % 8 == 1 else SplitBehavior.INERT
    symbol = legendre(D, p)
    if symbol == 0:
        return SplitBehavior.RAMIFIED
    return SplitBehavior.SPLIT if symbol == 1 else SplitBehavior.INERT


def behavior_from_kronecker(D: int, p: int) -> SplitBehavior:
    """Same verdict read off the Kronecker symbol (D/p) for a fundamental-style D."""
    symbol = kronecker(D if D % 4 == 1 else 4 * D, p)
    if symbol == 0:
        return SplitBehavior.RAMIFIED
    return SplitBehavior.SPLIT if symbol == 1 else SplitBehavior.INERT


def required_precision(claims: Iterable[Claim]) -> int:
    """
    Unit precision 2^r an even-offset dyadic class needs to decide the claims

    splits and not_inert need D mod 8, unramified needs D mod 4.
    """
    closed = expand_claims(claims)
    if Claim.SPLITS in closed or Claim.NOT_INERT in closed:
        return 3
    if Claim.UNRAMIFIED in closed:
        return 2
    return 1


def class_refutes(cls: CanonicalClass, claim: Claim) -> bool:
    """
    True when an attained class forces D into a residue that contradicts the claim

    Only definite classes refute: those whose residue of D is fixed at the
    precision the claim needs.
    """
    claim = Claim(claim)
    if cls.p == 2:
        if cls.t % 2:
            return claim in (Claim.SPLITS, Claim.UNRAMIFIED)
        if cls.r >= 2 and cls.a % 4 == 3:
            return claim in (Claim.SPLITS, Claim.UNRAMIFIED)
        if cls.r >= 3 and cls.a % 8 == 5:
            return claim in (Claim.SPLITS, Claim.NOT_INERT)
        return False
    if cls.t % 2:
        return claim in (Claim.SPLITS, Claim.UNRAMIFIED)
    if legendre(cls.a, cls.p) == -1:
        return claim in (Claim.SPLITS, Claim.NOT_INERT)
    return False


def refutes(classes: Iterable[CanonicalClass], p: int, claim: Claim) -> Optional[CanonicalClass]:
    """First class in canonical order that refutes the claim, or None."""
    for cls in sorted(c for c in classes if c.p == p):
        if class_refutes(cls, claim):
            return cls
    return None


@dataclass(frozen=True)
class DConstraint:
    """Admissible residues of D modulo p (odd p) or 8 (p = 2)"""
    p: int
    residues: frozenset
    ramified_possible: bool
    saturated: bool = False

    @property
    def modulus(self) -> int:
        return 8 if self.p == 2 else self.p


def _dyadic_residues(cls: CanonicalClass) -> set[int]:
    if cls.t % 2 == 0:
        precision = 2 ** min(cls.r, 3)
        return {x for x in DYADIC_RESIDUES if x % 2 == 1 and (x - cls.a) % precision == 0}
    precision = 2 ** min(cls.r + 1, 3)
    return {x for x in DYADIC_RESIDUES if x % 4 == 2 and (x - 2 * cls.a) % precision == 0}


def deduce_d_constraints(
    classes: Iterable[CanonicalClass],
    p: int,
    *,
    saturated: bool = False,
    claims: Iterable[Claim] = (),
) -> DConstraint:
    """
    Admissible residues of D given every attained class of D*s^2

    Args:
        classes: Canonical classes of the attained nonzero residues
        p: The prime of the classes
        saturated: True when 0 mod p^l was attained, which leaves D unconstrained
        claims: Claims the caller wants to decide; sets the dyadic precision needed

    Returns:
        DConstraint with residues modulo p, or modulo 8 for p = 2
    """
    classes = list(classes)
    if saturated:
        residues = DYADIC_RESIDUES if p == 2 else frozenset(range(p))
        return DConstraint(p=p, residues=frozenset(residues), ramified_possible=True, saturated=True)

    residues: set[int] = set()
    if p == 2:
        needed = required_precision(claims)
        for cls in classes:
            if cls.t % 2 == 0 and cls.r < needed:
                raise InsufficientPrecision(
                    f"{cls.describe()} leaves D only modulo 2^{cls.r}, claims need 2^{needed}",
                    needed_exponent=cls.exponent + needed - cls.r,
                )
            residues |= _dyadic_residues(cls)
        ramified = any(x % 4 != 1 for x in residues)
    else:
        squares = nonzero_squares(p)
        for cls in classes:
            if cls.t % 2:
                residues.add(0)
            else:
                residues |= {(cls.a * q) % p for q in squares}
        ramified = 0 in residues
    logger.debug("🔍 D residues mod %s: %s", 8 if p == 2 else p, sorted(residues))
    return DConstraint(p=p, residues=frozenset(residues), ramified_possible=ramified)


def summarize_behaviour(residues: Iterable[int], p: int) -> frozenset:
    """
    Claims that hold for every admissible residue of D

    Args:
        residues: Admissible residues of D (mod p, or mod 8 for p = 2)
        p: Prime

    Returns:
        Subset of {splits, not_inert, unramified}
    """
    residues = frozenset(residues)
    claims = set()
    if p == 2:
        if residues <= {1}:
            claims.add(Claim.SPLITS)
        if all(x % 4 == 1 for x in residues):
            claims.add(Claim.UNRAMIFIED)
        if 5 not in residues:
            claims.add(Claim.NOT_INERT)
        return frozenset(claims)
    squares = nonzero_squares(p)
    if residues <= squares:
        claims.add(Claim.SPLITS)
    if 0 not in residues:
        claims.add(Claim.UNRAMIFIED)
    if not any(x % p and x % p not in squares for x in residues):
        claims.add(Claim.NOT_INERT)
    return frozenset(claims)
