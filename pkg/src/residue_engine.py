"""
Residue Engine Module
Enumerates the residues of F_N(m, n) modulo p^l over coprime pairs, canonicalizes
them and runs the enumerate -> deduce -> summarize workflow with automatic escalation
"""
import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Literal, Optional, Tuple, TypedDict

from langgraph.graph import END, StateGraph

from src.config import settings
from src.curvedb import EnumerationRecord, Registry, get_curve
from src.exactmath import gcd
from src.exceptions import EscalationExceeded, InsufficientPrecision
from src.poly import IntPoly, eval_homogeneous_mod
from src.splitting import (
    CanonicalClass,
    Claim,
    DConstraint,
    canonical_class,
    class_refutes,
    deduce_d_constraints,
    expand_claims,
    summarize_behaviour,
)

logger = logging.getLogger(__name__)

BOTH_ODD = "both_odd"


@dataclass(frozen=True)
class EnumerationSpec:
    """
    Residues of F(m, n) modulo p^exponent over pairs with p not dividing both

    Optional constraints restrict the pairs to m = n (mod diagonal) or to
    both m and n odd.
    """
    N: int
    p: int
    exponent: int
    f: IntPoly
    diagonal: Optional[int] = None
    parity: Optional[str] = None
    escalation_limit: Optional[int] = None

    def __post_init__(self):
        if self.exponent < 1:
            raise ValueError("exponent must be at least 1")
        if self.diagonal is not None and self.modulus % self.diagonal:
            raise ValueError(f"diagonal modulus {self.diagonal} does not divide {self.modulus}")
        if self.parity is not None and (self.parity != BOTH_ODD or self.p != 2):
            raise ValueError(f"parity constraint {self.parity!r} needs p = 2 and value '{BOTH_ODD}'")
        if self.escalation_limit is None:
            object.__setattr__(self, "escalation_limit", self.exponent + settings.escalation_margin)

    @classmethod
    def from_record(cls, record: EnumerationRecord, f: IntPoly) -> "EnumerationSpec":
        return cls(N=record.N, p=record.p, exponent=record.exponent, f=f,
                   diagonal=record.diagonal, parity=record.parity)

    @property
    def modulus(self) -> int:
        return self.p ** self.exponent

    @property
    def constrained(self) -> bool:
        return self.diagonal is not None or self.parity is not None

    @property
    def step(self) -> int:
        """Escalation step: one power of 2, two powers of an odd prime."""
        return 1 if self.p == 2 else 2

    def with_exponent(self, exponent: int) -> "EnumerationSpec":
        return dataclasses.replace(self, exponent=exponent)

    def admits(self, m: int, n: int) -> bool:
        if m % self.p == 0 and n % self.p == 0:
            return False
        if self.diagonal is not None and (m - n) % self.diagonal:
            return False
        if self.parity == BOTH_ODD and (m % 2 == 0 or n % 2 == 0):
            return False
        return True

    def label(self) -> str:
        extra = ""
        if self.diagonal is not None:
            extra = f", m=n mod {self.diagonal}"
        elif self.parity is not None:
            extra = ", m,n odd"
        return f"N={self.N} mod {self.p}^{self.exponent}{extra}"


def spec_for(N: int, p: int, exponent: Optional[int] = None, registry: Optional[Registry] = None) -> EnumerationSpec:
    """
    Unconstrained spec for (N, p), taking the exponent from the registry when not given

    Without a registry record the exponent defaults to 3 for p = 2 and 1 otherwise.
    """
    curve = get_curve(N, registry)
    if exponent is None:
        record = curve.enumeration(p)
        exponent = record.exponent if record else (3 if p == 2 else 1)
    return EnumerationSpec(N=N, p=p, exponent=exponent, f=curve.f)


@dataclass(frozen=True)
class ResidueClassSet:
    """Attained residues of F(m, n) and their canonical classes"""
    spec: EnumerationSpec
    attained: frozenset
    canonical: frozenset
    saturated_zero: bool

    def describe(self) -> List[str]:
        return [cls.describe() for cls in sorted(self.canonical)]

    def units_by_offset(self) -> Dict[int, List[int]]:
        """Unit parts grouped by the power of p."""
        grouped: Dict[int, List[int]] = {}
        for cls in sorted(self.canonical):
            grouped.setdefault(cls.t, []).append(cls.a)
        return grouped


def _scan_grid_rows(args: Tuple[EnumerationSpec, int, int]) -> frozenset:
    spec, start, stop = args
    modulus = spec.modulus
    attained = set()
    for m in range(start, stop):
        for n in range(modulus):
            if spec.admits(m, n):
                attained.add(eval_homogeneous_mod(spec.f, m, n, modulus))
    return frozenset(attained)


def _scan_orbits(spec: EnumerationSpec) -> frozenset:
    """
    Attained set from the unit orbits of the dehomogenized values

    With n a unit F(m, n) = n^d f(m/n); otherwise m is a unit and
    F(m, n) = m^d F(1, n/m) with n/m in pZ.
    """
    modulus, p = spec.modulus, spec.p
    degree = spec.f.degree
    powers = {pow(u, degree, modulus) for u in range(1, modulus) if u % p}
    base = {eval_homogeneous_mod(spec.f, x, 1, modulus) for x in range(modulus)}
    base |= {eval_homogeneous_mod(spec.f, 1, y, modulus) for y in range(0, modulus, p)}
    return frozenset((w * b) % modulus for w in powers for b in base)


def scan_residues(spec: EnumerationSpec, strategy: str = "auto", jobs: Optional[int] = None) -> frozenset:
    """
    Attained residues of F(m, n) modulo p^exponent

    Args:
        spec: Enumeration spec
        strategy: "orbit", "grid" or "auto" (orbit unless the spec is constrained)
        jobs: Worker processes for the grid; settings.jobs by default

    Returns:
        Frozenset of attained residues
    """
    if strategy == "auto":
        strategy = "grid" if spec.constrained else "orbit"
    if strategy == "orbit":
        if spec.constrained:
            raise ValueError("orbit strategy does not support constrained specs")
        return _scan_orbits(spec)
    if strategy != "grid":
        raise ValueError(f"unknown strategy {strategy!r}")

    jobs = max(1, jobs or settings.jobs)
    modulus = spec.modulus
    if jobs == 1 or modulus < 2 * jobs:
        return _scan_grid_rows((spec, 0, modulus))
    bounds = [modulus * k // jobs for k in range(jobs + 1)]
    chunks = [(spec, bounds[k], bounds[k + 1]) for k in range(jobs)]
    attained = set()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(_scan_grid_rows, chunks):
            attained |= part
    return frozenset(attained)


def canonicalize(attained: Iterable[int], p: int, exponent: int) -> Tuple[frozenset, bool]:
    """Canonical classes of the nonzero residues and whether 0 was attained."""
    classes = set()
    saturated = False
    for value in attained:
        cls = canonical_class(value, p, exponent)
        if cls is None:
            saturated = True
        else:
            classes.add(cls)
    return frozenset(classes), saturated


def enumerate_classes(
    spec: EnumerationSpec,
    *,
    escalate: bool = True,
    strategy: str = "auto",
    jobs: Optional[int] = None,
) -> ResidueClassSet:
    """
    Enumerate and canonicalize, escalating the exponent while 0 is attained

    Args:
        spec: Enumeration spec
        escalate: Re-run at larger exponents while saturated
        strategy: Scan strategy passed to scan_residues
        jobs: Worker processes for the grid strategy

    Returns:
        ResidueClassSet for the final exponent
    """
    current = spec
    while True:
        attained = scan_residues(current, strategy=strategy, jobs=jobs)
        canonical, saturated = canonicalize(attained, current.p, current.exponent)
        logger.debug("🔍 %s: %s residues, %s classes, saturated=%s",
                     current.label(), len(attained), len(canonical), saturated)
        result = ResidueClassSet(spec=current, attained=attained, canonical=canonical, saturated_zero=saturated)
        if not (saturated and escalate):
            return result
        following = current.exponent + current.step
        if following > current.escalation_limit:
            raise EscalationExceeded(
                f"{current.label()} still attains 0 at the escalation limit {current.escalation_limit}",
                last_exponent=current.exponent,
            )
        logger.info("🔼 %s attains 0, escalating to exponent %s", current.label(), following)
        current = current.with_exponent(following)


# --- deduction workflow ------------------------------------------------------

class DeductionState(TypedDict):
    """State schema for the deduction graph"""
    spec: Any                 # EnumerationSpec at the current exponent
    targets: List[str]        # Claims the caller wants decided
    jobs: int
    classes: Any              # ResidueClassSet of the last enumeration
    constraint: Any           # DConstraint once deduced
    refutations: Dict[str, Any]
    needed_exponent: int
    escalations: int
    status: str
    trace: List[str]


@dataclass(frozen=True)
class DeductionResult:
    """Outcome of one enumerate -> deduce -> summarize run"""
    N: int
    p: int
    exponent: int
    claims: frozenset
    constraint: Optional[DConstraint]
    classes: ResidueClassSet
    refutations: Dict[Claim, CanonicalClass] = field(default_factory=dict)
    escalations: int = 0
    trace: Tuple[str, ...] = ()

    @property
    def residues(self) -> Optional[frozenset]:
        return self.constraint.residues if self.constraint else None


class DeductionWorkflow:
    """LangGraph workflow from residue enumeration to splitting claims"""

    def __init__(self):
        self.app = self._build_graph()

    def enumerate_node(self, state: DeductionState) -> DeductionState:
        """
        Node 1: Enumerate the attained classes at the current exponent

        Args:
            state: Current graph state

        Returns:
            Updated state with classes and refutations
        """
        spec = state["spec"]
        classes = enumerate_classes(spec, escalate=False, jobs=state.get("jobs") or None)
        state["classes"] = classes
        refutations = {}
        for target in state.get("targets", []):
            for cls in sorted(classes.canonical):
                if class_refutes(cls, Claim(target)):
                    refutations[target] = cls
                    break
        state["refutations"] = refutations
        state["trace"] = state.get("trace", []) + [
            f"enumerate {spec.label()}: {len(classes.canonical)} classes"
            + (", 0 attained" if classes.saturated_zero else "")
        ]
        return state

    def deduce_node(self, state: DeductionState) -> DeductionState:
        """
        Node 2: Turn the classes into admissible residues of D

        Args:
            state: Current graph state

        Returns:
            Updated state with the constraint, or the exponent still needed
        """
        classes = state["classes"]
        spec = state["spec"]
        try:
            state["constraint"] = deduce_d_constraints(
                classes.canonical, spec.p, claims=[Claim(t) for t in state.get("targets", [])]
            )
            state["status"] = "deduced"
        except InsufficientPrecision as e:
            logger.debug("🔍 %s: %s", spec.label(), e)
            state["needed_exponent"] = e.needed_exponent
            state["status"] = "insufficient"
            state["trace"] = state.get("trace", []) + [f"insufficient precision, need exponent {e.needed_exponent}"]
        return state

    def escalate_node(self, state: DeductionState) -> DeductionState:
        """
        Node 3: Raise the exponent, or give up at the escalation limit

        Args:
            state: Current graph state

        Returns:
            Updated state with the larger spec
        """
        spec = state["spec"]
        following = max(spec.exponent + spec.step, state.get("needed_exponent", 0))
        if following > spec.escalation_limit:
            raise EscalationExceeded(
                f"{spec.label()} undecided at the escalation limit {spec.escalation_limit}",
                last_exponent=spec.exponent,
            )
        logger.info("🔼 %s escalating to exponent %s", spec.label(), following)
        state["spec"] = spec.with_exponent(following)
        state["needed_exponent"] = 0
        state["escalations"] = state.get("escalations", 0) + 1
        state["trace"] = state.get("trace", []) + [f"escalate to exponent {following}"]
        return state

    def summarize_node(self, state: DeductionState) -> DeductionState:
        """
        Node 4: Record the final status

        Args:
            state: Current graph state

        Returns:
            Final state
        """
        targets = state.get("targets", [])
        refutations = state.get("refutations", {})
        if targets and all(t in refutations for t in targets):
            state["status"] = "refuted"
        else:
            state["status"] = "summarized"
        state["trace"] = state.get("trace", []) + [state["status"]]
        return state

    def route_after_enumerate(self, state: DeductionState) -> Literal["deduce", "escalate", "summarize"]:
        targets = state.get("targets", [])
        if targets and all(t in state.get("refutations", {}) for t in targets):
            return "summarize"
        if state["classes"].saturated_zero:
            return "escalate"
        return "deduce"

    def route_after_deduce(self, state: DeductionState) -> Literal["escalate", "summarize"]:
        return "escalate" if state.get("status") == "insufficient" else "summarize"

    def _build_graph(self):
        """
        Build the LangGraph workflow

        Returns:
            Compiled graph application
        """
        workflow = StateGraph(DeductionState)

        workflow.add_node("enumerate", self.enumerate_node)
        workflow.add_node("deduce", self.deduce_node)
        workflow.add_node("escalate", self.escalate_node)
        workflow.add_node("summarize", self.summarize_node)

        workflow.set_entry_point("enumerate")
        workflow.add_conditional_edges(
            "enumerate",
            self.route_after_enumerate,
            {"deduce": "deduce", "escalate": "escalate", "summarize": "summarize"},
        )
        workflow.add_conditional_edges(
            "deduce",
            self.route_after_deduce,
            {"escalate": "escalate", "summarize": "summarize"},
        )
        workflow.add_edge("escalate", "enumerate")
        workflow.add_edge("summarize", END)

        app = workflow.compile()
        logger.debug("✅ Deduction workflow compiled")
        return app

    def invoke(self, spec: EnumerationSpec, targets: Iterable[Claim] = (), jobs: Optional[int] = None) -> DeductionResult:
        """
        Execute the workflow for one spec

        Args:
            spec: Starting spec
            targets: Claims to decide
            jobs: Worker processes for grid scans

        Returns:
            DeductionResult
        """
        initial_state = {
            "spec": spec,
            "targets": sorted(Claim(t).value for t in expand_claims(targets)),
            "jobs": jobs or 0,
            "classes": None,
            "constraint": None,
            "refutations": {},
            "needed_exponent": 0,
            "escalations": 0,
            "status": "",
            "trace": [],
        }
        final = self.app.invoke(initial_state, config={"recursion_limit": 100})

        final_spec = final["spec"]
        constraint = final.get("constraint")
        if final.get("status") == "refuted" or constraint is None:
            claims = frozenset()
        else:
            claims = summarize_behaviour(constraint.residues, final_spec.p)
        result = DeductionResult(
            N=final_spec.N,
            p=final_spec.p,
            exponent=final_spec.exponent,
            claims=claims,
            constraint=constraint,
            classes=final["classes"],
            refutations={Claim(k): v for k, v in final.get("refutations", {}).items()},
            escalations=final.get("escalations", 0),
            trace=tuple(final.get("trace", [])),
        )
        logger.info("✅ %s: claims %s", final_spec.label(), sorted(c.value for c in claims))
        return result


@lru_cache(maxsize=1)
def deduction_workflow() -> DeductionWorkflow:
    return DeductionWorkflow()


def run_paper_deduction(N: int, p: int, registry: Optional[Registry] = None, jobs: Optional[int] = None) -> DeductionResult:
    """
    Claims about p that follow from the residue enumeration for level N

    Args:
        N: Level
        p: Prime
        registry: Registry to read, the default registry otherwise
        jobs: Worker processes for grid scans

    Returns:
        DeductionResult with the admissible D residues and the claims they imply
    """
    spec = spec_for(N, p, registry=registry)
    targets = get_curve(N, registry).expected.get(p, frozenset())
    return deduction_workflow().invoke(spec, targets=targets, jobs=jobs)


def certify_claims(
    N: int,
    p: int,
    claims: Iterable[Claim],
    exponent: Optional[int] = None,
    registry: Optional[Registry] = None,
) -> DeductionResult:
    """
    Run the workflow directed at the given claims

    Args:
        N: Level
        p: Prime
        claims: Claims to certify or refute
        exponent: Starting exponent, the registry exponent by default
        registry: Registry to read

    Returns:
        DeductionResult; a claim is certified when it is in result.claims
    """
    spec = spec_for(N, p, exponent=exponent, registry=registry)
    return deduction_workflow().invoke(spec, targets=claims)
