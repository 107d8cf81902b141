"""
Reports Module
Pydantic models for check results and the JSON document emitted by the CLI
"""
import logging
import numbers
import time
from enum import Enum
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from src.exceptions import ToolkitError

logger = logging.getLogger(__name__)

REPORT_VERSION = "1"


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class CheckReport(BaseModel):
    """Outcome of one registered check"""
    check_id: str = Field(..., description="Key of the form <module>.<op>.<N>.<p>")
    status: CheckStatus = Field(..., description="pass, fail or skipped")
    witnesses: List[Any] = Field(default_factory=list, description="Structured evidence")
    runtime_ms: Optional[float] = Field(None, description="Wall time, only emitted with --timings")

    class Config:
        json_schema_extra = {
            "example": {
                "check_id": "verifiers.table4.22",
                "status": "pass",
                "witnesses": [{"primes": ["3", "5", "23"]}],
            }
        }

    @model_validator(mode="after")
    def _fail_has_witness(self) -> "CheckReport":
        if self.status == CheckStatus.FAIL and not self.witnesses:
            raise ValueError(f"failed check {self.check_id} carries no witness")
        return self

    @property
    def ok(self) -> bool:
        """True unless the check failed."""
        return self.status != CheckStatus.FAIL


class VerificationReport(BaseModel):
    """Top-level JSON document"""
    paper_tables: Dict[str, Any] = Field(default_factory=dict, description="Recomputed tables")
    checks: List[CheckReport] = Field(default_factory=list, description="Reports ordered by check id")
    meta: Dict[str, Any] = Field(default_factory=dict, description="Version and run parameters")

    class Config:
        json_schema_extra = {
            "example": {
                "paper_tables": {"4": {"22": ["3", "5", "23", "31"]}},
                "checks": [{"check_id": "curvedb.factors.22", "status": "pass", "witnesses": []}],
                "meta": {"version": "1", "height": "200"},
            }
        }

    @property
    def failed(self) -> List[CheckReport]:
        return [check for check in self.checks if check.status == CheckStatus.FAIL]


CheckOutcome = Tuple[CheckStatus, List[Any]]


def outcome(passed: bool, witnesses: Optional[List[Any]] = None) -> CheckOutcome:
    return (CheckStatus.PASS if passed else CheckStatus.FAIL, list(witnesses or []))


def compare_claim(check_id: str, computed: str, claimed: str, discrepancies: Mapping[str, Any]) -> CheckOutcome:
    """
    Compare a computed value against a printed claim

    Args:
        check_id: Check key, also the key of any documented discrepancy
        computed: Computed value rendered as text
        claimed: Printed value rendered as text
        discrepancies: Documented discrepancies by check id

    Returns:
        pass on agreement, skipped when the disagreement is documented, otherwise fail
    """
    witness = {"claimed": claimed, "computed": computed}
    if computed == claimed:
        return CheckStatus.PASS, [witness]
    record = discrepancies.get(check_id)
    if record is not None and record.computed == computed:
        logger.info("⚠️ %s: documented discrepancy (%s)", check_id, record.note)
        return CheckStatus.SKIPPED, [{**witness, "note": record.note}]
    return CheckStatus.FAIL, [witness]


def run_check(check_id: str, func: Callable[..., CheckOutcome], *args, **kwargs) -> CheckReport:
    """
    Run one check, timing it and turning toolkit errors into failed reports

    Args:
        check_id: Report key
        func: Callable returning (status, witnesses)

    Returns:
        CheckReport for the call
    """
    start = time.perf_counter()
    try:
        status, witnesses = func(*args, **kwargs)
    except ToolkitError as e:
        logger.error("❌ %s raised %s: %s", check_id, type(e).__name__, e)
        status, witnesses = CheckStatus.FAIL, [{"error": type(e).__name__, "message": str(e)}]
    elapsed = (time.perf_counter() - start) * 1000.0
    if status == CheckStatus.FAIL:
        logger.warning("❌ %s failed", check_id)
    else:
        logger.debug("✅ %s %s", check_id, status.value)
    return CheckReport(check_id=check_id, status=status, witnesses=witnesses, runtime_ms=elapsed)


def to_wire(value: Any) -> Any:
    """
    Prepare a value for JSON output with every integer as a decimal string

    Args:
        value: Nested structure of dicts, lists, tuples, sets, enums, rationals and scalars

    Returns:
        JSON-ready structure; booleans, floats and None are kept as they are
    """
    if isinstance(value, bool) or value is None or isinstance(value, float):
        return value
    if isinstance(value, Enum):
        return value.value
    # int, Fraction and sympy integers alike
    if isinstance(value, numbers.Rational):
        return str(value)
    if isinstance(value, BaseModel):
        return to_wire(value.model_dump(exclude_none=True))
    if isinstance(value, Mapping):
        return {str(to_wire(k)): to_wire(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return [to_wire(v) for v in sorted(value, key=lambda v: (str(type(v)), v))]
    if isinstance(value, (list, tuple)):
        return [to_wire(v) for v in value]
    return value
