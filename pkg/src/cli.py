"""
Command Line Module
verify-all, table and query commands over the toolkit
"""
import dataclasses
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from enum import Enum
from itertools import repeat
from typing import Iterator, List, Optional

import click
import typer
from typer.core import TyperGroup

from src.config import configure_logging, settings
from src.cubic import classify_reduction, verify_cubic
from src.curvedb import Registry, default_registry, get_curve, validate_registry
from src.exceptions import RegistryError, ToolkitError, UnknownTable, UnsupportedLevel
from src.reports import REPORT_VERSION, CheckReport, CheckStatus, VerificationReport, to_wire
from src.residue_engine import BOTH_ODD, EnumerationSpec, enumerate_classes
from src.splitting import classify_prime
from src.tables import compute_table, render
from src.verifiers import (
    WITNESS_CASES,
    PointKind,
    check_identities,
    check_sampling_soundness,
    check_table2,
    check_table4,
    check_thm2_1b,
    check_witnesses,
    find_ramification_witnesses,
    prove_table2,
    sample_points,
)

logger = logging.getLogger(__name__)

EXIT_CHECK_FAILED = 1
EXIT_REGISTRY = 2
EXIT_USAGE = 64


class ToolkitGroup(TyperGroup):
    """Typer group whose usage errors exit with 64"""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise


class OutputFormat(str, Enum):
    MD = "md"
    CSV = "csv"
    JSON = "json"


class FaultTarget(str, Enum):
    REGISTRY = "registry"
    IDENTITY = "identity"


app = typer.Typer(
    cls=ToolkitGroup,
    help="Splitting of primes in fields generated by quadratic points on hyperelliptic X0(N)",
    add_completion=False,
)
query_app = typer.Typer(cls=ToolkitGroup, help="Ad-hoc queries against single engines")
app.add_typer(query_app, name="query")


@app.callback()
def main_callback(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Override LOG_LEVEL"),
):
    configure_logging(log_level)


def _registry(fault: Optional[FaultTarget]) -> Registry:
    registry = default_registry()
    if fault == FaultTarget.REGISTRY:
        return registry.with_perturbed_coefficient()
    return registry


@contextmanager
def _registry_errors() -> Iterator[None]:
    try:
        yield
    except (RegistryError, UnsupportedLevel) as e:
        typer.echo(f"❌ {e}", err=True)
        raise typer.Exit(code=EXIT_REGISTRY)


@contextmanager
def _query_errors() -> Iterator[None]:
    """Bad inputs are usage errors; a search that runs dry fails the command."""
    try:
        yield
    except (RegistryError, UnsupportedLevel) as e:
        typer.echo(f"❌ {e}", err=True)
        raise typer.Exit(code=EXIT_REGISTRY)
    except ValueError as e:
        raise typer.BadParameter(str(e))
    except ToolkitError as e:
        typer.echo(f"❌ {type(e).__name__}: {e}", err=True)
        raise typer.Exit(code=EXIT_CHECK_FAILED)


def _echo_json(value) -> None:
    typer.echo(json.dumps(to_wire(value), indent=2))


# --- verify-all ---------------------------------------------------------------

def curve_checks(N: int, height: int, fault: Optional[FaultTarget] = None) -> List[CheckReport]:
    """Every per-level check; runs in a worker process when --jobs > 1."""
    registry = _registry(fault)
    curve = get_curve(N, registry)
    reports = list(prove_table2(N, height, registry))
    reports += check_table2(N, height, registry)
    reports.append(check_sampling_soundness(N, height, registry))
    reports.append(check_table4(N, registry))
    if curve.quad_factorizations:
        reports.append(check_thm2_1b(N, registry))
    if N in WITNESS_CASES:
        reports += check_witnesses(N, registry=registry)
    return reports


def global_checks(registry: Registry, fault: Optional[FaultTarget], level: Optional[int]) -> List[CheckReport]:
    reports = validate_registry(registry) + check_identities(registry, fault=fault == FaultTarget.IDENTITY)
    if level is None:
        return reports + verify_cubic(registry.cubic, registry.discrepancies)
    return [report for report in reports if str(level) in report.check_id.split(".")]


def run_suite(
    height: int,
    level: Optional[int] = None,
    jobs: int = 1,
    fault: Optional[FaultTarget] = None,
) -> VerificationReport:
    """
    Run the whole verification and collect reports ordered by check id

    Args:
        height: Sampling height
        level: Restrict to one level; cubic-family checks run only without it
        jobs: Worker processes for the per-level groups
        fault: Fault to inject

    Returns:
        VerificationReport
    """
    registry = _registry(fault)
    levels = [level] if level is not None else registry.levels
    for N in levels:
        registry.get_curve(N)

    reports = global_checks(registry, fault, level)
    if jobs > 1 and len(levels) > 1:
        logger.info("🔍 Running %s levels on %s workers", len(levels), jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for group in pool.map(curve_checks, levels, repeat(height), repeat(fault)):
                reports += group
    else:
        for N in levels:
            reports += curve_checks(N, height, fault)

    tables = {
        "4": {str(row["N"]): row["primes"] for row in compute_table("4", registry, height, levels)},
        "disc": compute_table("disc", registry, height, levels),
    }
    meta = {
        "version": REPORT_VERSION,
        "height": height,
        "levels": levels,
        "fault_inject": fault.value if fault else None,
        "registry": registry.source,
    }
    return VerificationReport(
        paper_tables=tables,
        checks=sorted(reports, key=lambda report: report.check_id),
        meta=meta,
    )


def _render_checks(report: VerificationReport, fmt: OutputFormat, timings: bool) -> str:
    if fmt == OutputFormat.JSON:
        return json.dumps(to_wire(report), indent=2) + "\n"
    rows = []
    for check in report.checks:
        row = {"check_id": check.check_id, "status": check.status.value}
        if timings:
            row["runtime_ms"] = f"{check.runtime_ms:.1f}"
        rows.append(row)
    return render(rows, fmt.value)


@app.command("verify-all")
def verify_all(
    height: int = typer.Option(settings.sample_height, "--height", min=1, help="Sampling height H"),
    fmt: OutputFormat = typer.Option(OutputFormat.MD, "--format", help="md, csv or json"),
    level: Optional[int] = typer.Option(None, "--n", help="Restrict to one level"),
    jobs: int = typer.Option(settings.jobs, "--jobs", min=1, help="Worker processes"),
    fault_inject: Optional[FaultTarget] = typer.Option(None, "--fault-inject", help="Test-only fault"),
    timings: bool = typer.Option(False, "--timings", help="Emit per-check runtimes"),
):
    """Run every check; exit 0 iff no check fails."""
    with _registry_errors():
        report = run_suite(height, level, jobs, fault_inject)
    if not timings:
        report = report.model_copy(update={"checks": [c.model_copy(update={"runtime_ms": None}) for c in report.checks]})
    typer.echo(_render_checks(report, fmt, timings), nl=False)

    counts = {status: sum(1 for c in report.checks if c.status == status) for status in CheckStatus}
    summary = ", ".join(f"{counts[status]} {status.value}" for status in CheckStatus)
    if report.failed:
        typer.echo(f"❌ {len(report.checks)} checks: {summary}", err=True)
        raise typer.Exit(code=EXIT_CHECK_FAILED)
    typer.echo(f"✅ {len(report.checks)} checks: {summary}", err=True)


# --- tables -------------------------------------------------------------------

@app.command()
def table(
    which: str = typer.Argument(..., help="2, 3, 4 or disc"),
    fmt: OutputFormat = typer.Option(OutputFormat.MD, "--format", help="md, csv or json"),
    height: int = typer.Option(settings.sample_height, "--height", min=1),
    level: Optional[int] = typer.Option(None, "--n", help="Restrict to one level"),
):
    """Recompute a published table."""
    with _registry_errors():
        registry = default_registry()
        levels = None
        if level is not None:
            registry.get_curve(level)
            levels = [level]
        try:
            rows = compute_table(which, registry, height, levels)
        except UnknownTable as e:
            raise typer.BadParameter(str(e), param_hint="WHICH")
    typer.echo(render(rows, fmt.value, which), nl=False)


# --- queries ------------------------------------------------------------------

SIGNED = {"ignore_unknown_options": True}


@query_app.command("split", context_settings=SIGNED)
def split_cmd(d: int = typer.Argument(..., metavar="D"), p: int = typer.Argument(...)):
    """Behaviour of p in Q(sqrt D); negative D needs no -- guard."""
    with _query_errors():
        typer.echo(classify_prime(d, p).value)


@query_app.command("sample")
def sample_cmd(level: int = typer.Argument(..., metavar="N"), height: int = typer.Argument(...)):
    """Sampled points x0 = m/n up to height H with their D."""
    with _query_errors():
        points = sample_points(level, height)
        _echo_json([
            {"x0": str(pt.x0), "kind": pt.kind.value, "D": pt.D if pt.kind == PointKind.QUADRATIC else None}
            for pt in points
        ])


@query_app.command("witness", context_settings=SIGNED)
def witness_cmd(
    level: int = typer.Argument(..., metavar="N"),
    a: int = typer.Argument(...),
    p: int = typer.Argument(...),
    count: int = typer.Argument(5),
):
    """Squarefree D with v_p(D) = 1 from points near a simple root of f_N."""
    with _query_errors():
        _echo_json(dataclasses.asdict(find_ramification_witnesses(level, a, p, count)))


@query_app.command("reduce", context_settings=SIGNED)
def reduce_cmd(u: str = typer.Argument(...), p: int = typer.Argument(...)):
    """Reduction type at p of the cubic-family curve with parameter u."""
    with _query_errors():
        verdict = classify_reduction(u, p)
        typer.echo(f"{verdict.kodaira} ({verdict.branch.value})")


@query_app.command("enumerate")
def enumerate_cmd(
    level: int = typer.Argument(..., metavar="N"),
    p: int = typer.Argument(...),
    exponent: int = typer.Argument(...),
    diagonal: Optional[int] = typer.Option(None, "--diagonal", help="Only m = n modulo this"),
    both_odd: bool = typer.Option(False, "--both-odd", help="Only m, n odd (p = 2)"),
):
    """Attained residues of F_N(m, n) modulo p^l and their canonical classes."""
    with _query_errors():
        spec = EnumerationSpec(N=level, p=p, exponent=exponent, f=get_curve(level).f,
                               diagonal=diagonal, parity=BOTH_ODD if both_odd else None)
        result = enumerate_classes(spec, escalate=False)
        _echo_json({
            "spec": spec.label(),
            "attained": sorted(result.attained),
            "classes": result.describe(),
            "saturated": result.saturated_zero,
        })
