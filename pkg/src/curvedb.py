"""
Curve Registry Module
Loads the hyperelliptic models of X0(N), their published factorizations and
tables, and the data of the cubic family on X1(2,14) from the checksummed data file
"""
import dataclasses
import hashlib
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import sympy

from src.config import settings
from src.exactmath import INFINITE_VALUATION, int_to_factored_string, parse_factored_int, valuation
from src.exceptions import (
    MissingFactorization,
    NonIntegralResult,
    RadicalResidue,
    RegistryError,
    Undefined,
    UnsupportedLevel,
)
from src.poly import IntPoly, QuadExtPoly, discriminant, expand_product, parse_quad_poly, product_of_int_polys
from src.reports import CheckReport, CheckStatus, compare_claim, outcome, run_check
from src.splitting import Claim

logger = logging.getLogger(__name__)

REGISTRY_FORMAT_VERSION = "1"

SUPPORTED_LEVELS = (22, 23, 26, 28, 29, 30, 31, 33, 35, 39, 40, 41, 46, 47, 48, 50, 59, 71)

# Table-2 statements are the splitting claims
SplitExpectation = Claim


class DFlag(str, Enum):
    """Properties of D asserted for every point"""
    POSITIVE = "positive"
    ODD = "odd"
    MOD8_126 = "mod8_126"
    MOD5_01 = "mod5_01"


@dataclass(frozen=True)
class QuadFactorization:
    """f_N = content * prod(factors) over Q(sqrt(radicand))"""
    radicand: int
    content: int
    factors: Tuple[QuadExtPoly, ...]


@dataclass(frozen=True)
class EnumerationRecord:
    """Residue enumeration modulo p^exponent, optionally restricted to a sub-case"""
    N: int
    p: int
    exponent: int
    diagonal: Optional[int] = None
    parity: Optional[str] = None

    @property
    def constrained(self) -> bool:
        return self.diagonal is not None or self.parity is not None


@dataclass(frozen=True)
class Discrepancy:
    """A printed claim that recomputation does not reproduce"""
    check_id: str
    claimed: str
    computed: str
    note: str


@dataclass(frozen=True)
class CurveModel:
    """Everything the registry knows about one level N"""
    N: int
    f: IntPoly
    factors: Tuple[IntPoly, ...] = ()
    published_discriminants: Tuple[int, ...] = ()
    quad_factorizations: Tuple[QuadFactorization, ...] = ()
    expectations: Tuple[Tuple[int, frozenset], ...] = ()
    d_flags: frozenset = frozenset()
    unramified_primes: Tuple[int, ...] = ()
    enumerations: Tuple[EnumerationRecord, ...] = ()

    @property
    def expected(self) -> Dict[int, frozenset]:
        """Expected claims by prime."""
        return dict(self.expectations)

    @property
    def radicands(self) -> Tuple[int, ...]:
        return tuple(q.radicand for q in self.quad_factorizations)

    def quad_factorization(self, radicand: Optional[int] = None) -> QuadFactorization:
        for quad in self.quad_factorizations:
            if radicand is None or quad.radicand == radicand:
                return quad
        raise MissingFactorization(f"no Q(sqrt a) factorization of f_{self.N} for a={radicand}")

    def enumeration(self, p: int) -> Optional[EnumerationRecord]:
        """First unconstrained enumeration for p, the one deductions start from."""
        for record in self.enumerations:
            if record.p == p and not record.constrained:
                return record
        return None

    def discriminant_targets(self) -> Tuple[IntPoly, ...]:
        """Polynomials whose discriminants were published, in publication order."""
        if self.factors and len(self.factors) == len(self.published_discriminants):
            return self.factors
        return (self.f,)


@dataclass(frozen=True)
class RationalFunctionData:
    """Rational function stored as factor lists with multiplicities"""
    numerator: Tuple[Tuple[IntPoly, int], ...]
    denominator: Tuple[Tuple[IntPoly, int], ...] = ()

    def numerator_poly(self) -> IntPoly:
        return product_of_int_polys(self.numerator)

    def denominator_poly(self) -> IntPoly:
        return product_of_int_polys(self.denominator)

    def to_expr(self, u: sympy.Symbol) -> sympy.Expr:
        return self.numerator_poly().to_expr(u) / self.denominator_poly().to_expr(u)

    def valuation(self, u: Fraction, p: int) -> int:
        """
        Sum of multiplicity * v_p(factor(u)) over the factor lists

        Raises:
            Undefined: when some factor vanishes at u
        """
        total = 0
        for factors, sign in ((self.numerator, 1), (self.denominator, -1)):
            for poly, multiplicity in factors:
                v = valuation(poly(u), p)
                if v == INFINITE_VALUATION:
                    raise Undefined(f"factor {poly} vanishes at u={u}")
                total += sign * multiplicity * v
        return total


@dataclass(frozen=True)
class CubicFamilyData:
    """
    Polynomials of the cubic family f(u,v) = A(u) v(v+1) + A(v) u(u+1)

    A = u^3+u^2-2u-1, and j, Delta, c4 are rational functions of u.
    """
    A: IntPoly
    h12: IntPoly
    g2: IntPoly
    g6: IntPoly
    g12: IntPoly
    f12: IntPoly

    @property
    def u(self) -> IntPoly:
        return IntPoly((0, 1))

    @property
    def u_plus_1(self) -> IntPoly:
        return IntPoly((1, 1))

    @property
    def g_c4(self) -> IntPoly:
        return self.g2 * self.g6 * self.g12

    @property
    def g_delta(self) -> IntPoly:
        return self.delta.numerator_poly()

    @property
    def j(self) -> RationalFunctionData:
        return RationalFunctionData(
            numerator=((self.g2, 3), (self.g6, 1), (self.f12, 3)),
            denominator=((self.u, 14), (self.u_plus_1, 14), (self.A, 2)),
        )

    @property
    def delta(self) -> RationalFunctionData:
        return RationalFunctionData(
            numerator=((self.u, 14), (self.u_plus_1, 14), (self.A, 2)),
            denominator=((self.h12, 12),),
        )

    @property
    def c4(self) -> RationalFunctionData:
        return RationalFunctionData(
            numerator=((self.g2, 1), (self.g6, 1), (self.g12, 1)),
            denominator=((self.h12, 4),),
        )

    def f_uv(self) -> Dict[Tuple[int, int], int]:
        """Integer coefficients of u^i v^j in f(u, v)."""
        coeffs: Dict[Tuple[int, int], int] = {}
        v_times_v_plus_1 = ((1, 1), (2, 1))
        for i, a in enumerate(self.A.coeffs):
            for j, b in v_times_v_plus_1:
                coeffs[(i, j)] = coeffs.get((i, j), 0) + a * b
                coeffs[(j, i)] = coeffs.get((j, i), 0) + a * b
        return {key: c for key, c in coeffs.items() if c}


class Registry:
    """Immutable view of the data file"""

    def __init__(
        self,
        curves: Dict[int, CurveModel],
        cubic: Optional[CubicFamilyData],
        discrepancies: Dict[str, Discrepancy],
        source: str = "",
    ):
        self._curves = dict(curves)
        self.cubic = cubic
        self.discrepancies = dict(discrepancies)
        self.source = source

    @property
    def levels(self) -> List[int]:
        return sorted(self._curves)

    def get_curve(self, N: int) -> CurveModel:
        if N == 37:
            raise UnsupportedLevel(
                "N=37 is excluded: the quadratic points on X0(37) are not, up to finitely many, "
                "pullbacks of rational points under the hyperelliptic map"
            )
        if N not in self._curves:
            raise UnsupportedLevel(f"N={N} is not a supported hyperelliptic level {SUPPORTED_LEVELS}")
        return self._curves[N]

    def curves(self) -> List[CurveModel]:
        return [self._curves[N] for N in self.levels]

    def with_perturbed_coefficient(self, N: int = 22, index: int = 0, delta: int = 1) -> "Registry":
        """
        Copy of the registry with one coefficient of f_N shifted

        Args:
            N: Level to corrupt
            index: Coefficient index (ascending degree)
            delta: Amount added to the coefficient

        Returns:
            New Registry; self is unchanged
        """
        curve = self.get_curve(N)
        coeffs = list(curve.f.coeffs)
        coeffs[index] += delta
        curves = dict(self._curves)
        curves[N] = dataclasses.replace(curve, f=IntPoly(tuple(coeffs)))
        logger.warning("⚠️ registry perturbed: f_%s coefficient %s shifted by %s", N, index, delta)
        return Registry(curves, self.cubic, self.discrepancies, source=f"{self.source} (perturbed)")


# --- parsing ----------------------------------------------------------------

def _fields(line: str, lineno: int) -> Tuple[str, Dict[str, str]]:
    parts = [part.strip() for part in line.split(";")]
    kind, values = parts[0], {}
    for part in parts[1:]:
        key, sep, value = part.partition("=")
        if not sep:
            raise RegistryError(f"line {lineno}: field '{part}' has no '='")
        values[key.strip()] = value.strip()
    return kind, values


def _require(values: Dict[str, str], key: str, lineno: int) -> str:
    if key not in values:
        raise RegistryError(f"line {lineno}: missing field '{key}'")
    return values[key]


@dataclass
class _CurveDraft:
    f: Optional[IntPoly] = None
    factors: Tuple[IntPoly, ...] = ()
    discs: Tuple[int, ...] = ()
    quads: List[QuadFactorization] = field(default_factory=list)
    expectations: Dict[int, frozenset] = field(default_factory=dict)
    flags: frozenset = frozenset()
    unramified: Tuple[int, ...] = ()
    enumerations: List[EnumerationRecord] = field(default_factory=list)


def parse_registry(text: str, source: str = "<memory>") -> Registry:
    """
    Parse registry text into a Registry

    Args:
        text: Contents of the data file
        source: Name used in log messages

    Returns:
        Registry instance
    """
    drafts: Dict[int, _CurveDraft] = {}
    cubic: Dict[str, IntPoly] = {}
    discrepancies: Dict[str, Discrepancy] = {}
    version = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind, values = _fields(line, lineno)
        try:
            if kind == "format":
                version = _require(values, "version", lineno)
                continue
            if kind == "cubic":
                cubic[_require(values, "name", lineno)] = IntPoly.parse(_require(values, "f", lineno))
                continue
            if kind == "discrepancy":
                check_id = _require(values, "id", lineno)
                discrepancies[check_id] = Discrepancy(
                    check_id=check_id,
                    claimed=_require(values, "claimed", lineno),
                    computed=_require(values, "computed", lineno),
                    note=values.get("note", ""),
                )
                continue

            N = int(_require(values, "N", lineno))
            draft = drafts.setdefault(N, _CurveDraft())
            if kind == "curve":
                draft.f = IntPoly.parse(_require(values, "f", lineno))
                if "factors" in values:
                    draft.factors = tuple(IntPoly.parse(part) for part in values["factors"].split("|"))
            elif kind == "disc":
                draft.discs = tuple(parse_factored_int(part) for part in _require(values, "values", lineno).split("|"))
            elif kind == "quad":
                radicand = int(_require(values, "a", lineno))
                draft.quads.append(QuadFactorization(
                    radicand=radicand,
                    content=int(values.get("content", "1")),
                    factors=tuple(
                        parse_quad_poly(part, radicand) for part in _require(values, "factors", lineno).split("|")
                    ),
                ))
            elif kind == "expect":
                p = int(_require(values, "p", lineno))
                draft.expectations[p] = frozenset(
                    Claim(c.strip()) for c in _require(values, "claims", lineno).split(",")
                )
            elif kind == "dflags":
                draft.flags = frozenset(DFlag(c.strip()) for c in _require(values, "flags", lineno).split(","))
            elif kind == "unramified":
                draft.unramified = tuple(int(c) for c in _require(values, "primes", lineno).split(","))
            elif kind == "enum":
                draft.enumerations.append(EnumerationRecord(
                    N=N,
                    p=int(_require(values, "p", lineno)),
                    exponent=int(_require(values, "l", lineno)),
                    diagonal=int(values["diagonal"]) if "diagonal" in values else None,
                    parity=values.get("parity"),
                ))
            else:
                raise RegistryError(f"line {lineno}: unknown record kind '{kind}'")
        except (ValueError, ArithmeticError) as e:
            raise RegistryError(f"line {lineno}: {e}") from e

    if version != REGISTRY_FORMAT_VERSION:
        raise RegistryError(f"{source}: unsupported registry format version {version!r}")

    curves = {}
    for N, draft in drafts.items():
        if draft.f is None:
            raise RegistryError(f"{source}: level {N} has records but no curve line")
        curves[N] = CurveModel(
            N=N,
            f=draft.f,
            factors=draft.factors,
            published_discriminants=draft.discs,
            quad_factorizations=tuple(draft.quads),
            expectations=tuple(sorted(draft.expectations.items())),
            d_flags=draft.flags,
            unramified_primes=draft.unramified,
            enumerations=tuple(draft.enumerations),
        )

    missing = set(SUPPORTED_LEVELS) - set(curves)
    if missing:
        raise RegistryError(f"{source}: levels {sorted(missing)} are missing")

    cubic_data = None
    if cubic:
        try:
            cubic_data = CubicFamilyData(**{name: cubic[name] for name in ("A", "h12", "g2", "g6", "g12", "f12")})
        except KeyError as e:
            raise RegistryError(f"{source}: cubic family polynomial {e} is missing") from e

    logger.info("✅ Loaded %s curves from %s", len(curves), source)
    return Registry(curves, cubic_data, discrepancies, source=source)


def checksum_path(path: Path) -> Path:
    return path.with_name(path.name + ".sha256")


def load_registry(path: Optional[str] = None, verify_checksum: Optional[bool] = None) -> Registry:
    """
    Load and checksum-verify the registry data file

    Args:
        path: Data file, settings.registry_path by default
        verify_checksum: Compare against <path>.sha256, settings.verify_checksum by default

    Returns:
        Registry instance
    """
    path = Path(path or settings.registry_path)
    verify = settings.verify_checksum if verify_checksum is None else verify_checksum
    try:
        data = path.read_bytes()
    except OSError as e:
        raise RegistryError(f"cannot read registry {path}: {e}") from e

    if verify:
        expected_file = checksum_path(path)
        try:
            expected = expected_file.read_text(encoding="utf-8").split()[0].lower()
        except (OSError, IndexError) as e:
            raise RegistryError(f"cannot read checksum {expected_file}: {e}") from e
        actual = hashlib.sha256(data).hexdigest()
        if actual != expected:
            raise RegistryError(f"checksum mismatch for {path}: expected {expected}, got {actual}")
        logger.debug("🔍 checksum ok for %s", path)

    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise RegistryError(f"{path} is not UTF-8: {e}") from e
    return parse_registry(text, source=str(path))


@lru_cache(maxsize=1)
def default_registry() -> Registry:
    return load_registry()


def get_curve(N: int, registry: Optional[Registry] = None) -> CurveModel:
    """
    Registry record for level N

    Args:
        N: Level
        registry: Registry to read, the default registry otherwise

    Returns:
        CurveModel
    """
    return (registry or default_registry()).get_curve(N)


# --- self-consistency -------------------------------------------------------

def _check_factor_product(curve: CurveModel):
    product = product_of_int_polys((factor, 1) for factor in curve.factors)
    return outcome(product == curve.f, [{"product": str(product), "f": str(curve.f)}])


def _check_discriminants(curve: CurveModel):
    targets = curve.discriminant_targets()
    computed = [discriminant(poly) for poly in targets]
    witnesses = [
        {"polynomial": str(poly), "published": int_to_factored_string(pub), "computed": int_to_factored_string(val)}
        for poly, pub, val in zip(targets, curve.published_discriminants, computed)
    ]
    matches = len(computed) == len(curve.published_discriminants) and all(
        pub == val for pub, val in zip(curve.published_discriminants, computed)
    )
    return outcome(matches, witnesses)


def _check_quad_expansion(curve: CurveModel, quad: QuadFactorization):
    try:
        expanded = expand_product(quad.factors, quad.content)
    except (RadicalResidue, NonIntegralResult) as e:
        return outcome(False, [{"error": type(e).__name__, "message": str(e)}])
    return outcome(expanded == curve.f, [{"expanded": str(expanded), "f": str(curve.f)}])


def _check_f12_is_g12(cubic: CubicFamilyData):
    return outcome(cubic.f12 == cubic.g12, [{"f12": str(cubic.f12), "g12": str(cubic.g12)}])


def _check_j_identity(cubic: CubicFamilyData, discrepancies):
    u = sympy.Symbol("u")
    quotient = sympy.cancel(cubic.c4.to_expr(u) ** 3 / (cubic.j.to_expr(u) * cubic.delta.to_expr(u)))
    g6 = cubic.g6.to_expr(u)
    if sympy.expand(quotient - 1) == 0:
        computed = "1"
    elif sympy.expand(quotient - g6**2) == 0:
        computed = "g6^2"
    else:
        computed = str(quotient)
    return compare_claim("curvedb.cubic.j_identity", computed, "1", discrepancies)


def is_square_polynomial(poly: IntPoly) -> bool:
    """True when poly is the square of an integer polynomial."""
    if poly.is_zero:
        return True
    u = sympy.Symbol("u")
    coefficient, factors = sympy.Poly(list(reversed(poly.coeffs)), u).sqf_list()
    coefficient = int(coefficient)
    return coefficient > 0 and math.isqrt(coefficient) ** 2 == coefficient and all(m % 2 == 0 for _, m in factors)


def _check_c6_square(cubic: CubicFamilyData):
    # j - 1728 = c6^2 / Delta needs N_j - 1728 * D_j to be a square
    numerator = cubic.j.numerator_poly()
    denominator = cubic.j.denominator_poly()
    difference = numerator - denominator * 1728
    return outcome(is_square_polynomial(difference), [{"degree": difference.degree}])


def validate_registry(registry: Optional[Registry] = None) -> List[CheckReport]:
    """
    Recompute every internal consistency condition of the registry

    Args:
        registry: Registry to validate, the default registry otherwise

    Returns:
        One CheckReport per condition, ordered by check id
    """
    registry = registry or default_registry()
    reports = []
    for curve in registry.curves():
        if curve.factors:
            reports.append(run_check(f"curvedb.factors.{curve.N}", _check_factor_product, curve))
        if curve.published_discriminants:
            reports.append(run_check(f"curvedb.disc.{curve.N}", _check_discriminants, curve))
        for quad in curve.quad_factorizations:
            reports.append(run_check(f"curvedb.quad.{curve.N}.{quad.radicand}", _check_quad_expansion, curve, quad))
    if registry.cubic is not None:
        reports.append(run_check("curvedb.cubic.f12", _check_f12_is_g12, registry.cubic))
        reports.append(run_check("curvedb.cubic.j_identity", _check_j_identity, registry.cubic, registry.discrepancies))
        reports.append(run_check("curvedb.cubic.c6_square", _check_c6_square, registry.cubic))
    failed = sum(1 for report in reports if report.status == CheckStatus.FAIL)
    logger.info("✅ Registry validation: %s checks, %s failed", len(reports), failed)
    return sorted(reports, key=lambda report: report.check_id)
