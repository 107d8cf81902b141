"""
Curve Registry Tests
Loading, checksum protection, lookups and the internal consistency checks
"""
import hashlib
from fractions import Fraction
from pathlib import Path

import pytest

from src.config import settings
from src.curvedb import (
    DFlag,
    default_registry,
    get_curve,
    load_registry,
    parse_registry,
    validate_registry,
)
from src.exceptions import MissingFactorization, RegistryError, Undefined, UnsupportedLevel
from src.poly import IntPoly
from src.reports import CheckStatus
from src.splitting import Claim

LEVELS = [22, 23, 26, 28, 29, 30, 31, 33, 35, 39, 40, 41, 46, 47, 48, 50, 59, 71]


def test_registry_has_every_level():
    assert default_registry().levels == LEVELS


def test_curve_records():
    curve = get_curve(26)
    assert curve.f == IntPoly.parse("1,-8,8,-18,8,-8,1")
    assert curve.published_discriminants == (2**20 * 13**3,)
    assert curve.expected[13] == {Claim.NOT_INERT}
    assert curve.d_flags == {DFlag.ODD}
    assert curve.radicands == (13,)
    assert get_curve(46).f.coeffs[10] == 5


def test_n37_is_excluded():
    with pytest.raises(UnsupportedLevel, match="N=37"):
        get_curve(37)
    with pytest.raises(UnsupportedLevel):
        get_curve(43)


def test_missing_factorization():
    with pytest.raises(MissingFactorization):
        get_curve(22).quad_factorization()


def test_enumeration_records():
    curve = get_curve(39)
    first = curve.enumeration(3)
    assert first.exponent == 4 and not first.constrained
    assert any(record.diagonal == 3 for record in curve.enumerations)
    assert get_curve(23).enumeration(2) is None


def test_validate_registry_passes():
    reports = validate_registry()
    by_id = {report.check_id: report for report in reports}
    assert [r.check_id for r in reports] == sorted(by_id)
    assert by_id["curvedb.disc.26"].status == CheckStatus.PASS
    assert by_id["curvedb.quad.28.-7"].status == CheckStatus.PASS
    assert by_id["curvedb.quad.40.-1"].status == CheckStatus.PASS
    assert by_id["curvedb.cubic.f12"].status == CheckStatus.PASS
    assert by_id["curvedb.cubic.c6_square"].status == CheckStatus.PASS
    assert by_id["curvedb.cubic.j_identity"].status == CheckStatus.SKIPPED
    assert by_id["curvedb.cubic.j_identity"].witnesses[0]["computed"] == "g6^2"
    assert not [r for r in reports if r.status == CheckStatus.FAIL]


def test_perturbed_registry_fails_validation():
    registry = default_registry().with_perturbed_coefficient(22)
    by_id = {report.check_id: report for report in validate_registry(registry)}
    assert by_id["curvedb.factors.22"].status == CheckStatus.FAIL
    assert default_registry().get_curve(22).f.coeffs[0] == -32


def test_checksum_mismatch_is_rejected(tmp_path: Path):
    text = Path(settings.registry_path).read_text(encoding="utf-8")
    data = tmp_path / "curves.txt"
    data.write_text(text.replace("curve; N=22; f=-32", "curve; N=22; f=-31"), encoding="utf-8")
    (tmp_path / "curves.txt.sha256").write_text(hashlib.sha256(text.encode()).hexdigest() + "  curves.txt\n")
    with pytest.raises(RegistryError):
        load_registry(str(data), verify_checksum=True)
    assert load_registry(str(data), verify_checksum=False).get_curve(22).f.coeffs[0] == -31


def test_missing_file_is_registry_error(tmp_path: Path):
    with pytest.raises(RegistryError):
        load_registry(str(tmp_path / "absent.txt"), verify_checksum=False)


def test_parse_errors():
    with pytest.raises(RegistryError):
        parse_registry("format; version=1\ncurve; N=22; f=1,x,2\n")
    with pytest.raises(RegistryError):
        parse_registry("format; version=2\n")
    with pytest.raises(RegistryError):
        parse_registry("format; version=1\nbogus; N=22\n")


def test_cubic_family_data():
    cubic = default_registry().cubic
    assert cubic.A == IntPoly.parse("-1,-2,1,1")
    assert cubic.g_delta.degree == 34
    assert cubic.g_delta.leading == 1
    assert cubic.g_c4.degree == 20
    assert cubic.j.valuation(Fraction(2), 2) == -14
    with pytest.raises(Undefined):
        cubic.j.valuation(Fraction(0), 3)


def test_discrepancies_loaded():
    discrepancies = default_registry().discrepancies
    assert discrepancies["cubic.resultant.A_gc4"].computed == "7^4"
    assert discrepancies["cubic.mod2.factorization"].computed == "(u + v)(uv + u + 1)(uv + v + 1)"
