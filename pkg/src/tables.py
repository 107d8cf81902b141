"""
Tables Module
Recomputes the published tables row by row and renders them as markdown, CSV or JSON
"""
import csv
import io
import json
import logging
from typing import Any, Callable, Dict, List, Optional

from src.curvedb import Registry, default_registry
from src.exactmath import int_to_factored_string
from src.exceptions import UnknownTable
from src.poly import discriminant
from src.reports import to_wire
from src.verifiers import check_thm2_1b, prove_table2, table3_levels, table4_unramified

logger = logging.getLogger(__name__)

Row = Dict[str, Any]

TABLE_NAMES = ("2", "3", "4", "disc")
FORMATS = ("md", "csv", "json")


def _levels(registry: Registry, levels: Optional[List[int]]) -> List[int]:
    return levels if levels is not None else registry.levels


def table2_rows(registry: Registry, height: int, levels: Optional[List[int]] = None) -> List[Row]:
    """One row per (N, prime or D property) with the route that decided it."""
    rows = []
    for N in _levels(registry, levels):
        for report in prove_table2(N, height, registry):
            key = report.check_id.rsplit(".", 1)[1]
            witness = report.witnesses[0] if report.witnesses else {}
            if witness.get("route") == "engine" and "claims" in witness:
                verdict = ", ".join(witness["claims"]) or "none"
            else:
                verdict = "holds" if report.ok else "fails"
            rows.append({"N": N, "p": key, "route": witness.get("route") or "", "verdict": verdict})
    return rows


def table3_rows(registry: Registry, levels: Optional[List[int]] = None) -> List[Row]:
    rows = []
    wanted = set(_levels(registry, levels))
    for N in table3_levels(registry):
        if N not in wanted:
            continue
        report = check_thm2_1b(N, registry)
        for quad in registry.get_curve(N).quad_factorizations:
            primes = [step["p"] for step in report.witnesses if step.get("a") == quad.radicand and step.get("square")]
            rows.append({"N": N, "a": quad.radicand, "square_mod": primes, "status": report.status.value})
    return rows


def table4_rows(registry: Registry, levels: Optional[List[int]] = None) -> List[Row]:
    return [{"N": N, "primes": table4_unramified(N, registry)} for N in _levels(registry, levels)]


def disc_rows(registry: Registry, levels: Optional[List[int]] = None) -> List[Row]:
    rows = []
    for N in _levels(registry, levels):
        for poly in registry.get_curve(N).discriminant_targets():
            rows.append({"N": N, "factor": str(poly), "discriminant": int_to_factored_string(discriminant(poly))})
    return rows


def compute_table(
    which: str,
    registry: Optional[Registry] = None,
    height: int = 200,
    levels: Optional[List[int]] = None,
) -> List[Row]:
    """
    Rows of a published table, recomputed from the curve models

    Args:
        which: One of 2, 3, 4, disc
        registry: Registry to read
        height: Sampling height for the reciprocity route of table 2
        levels: Restrict to these levels

    Returns:
        Rows as ordered dicts
    """
    registry = registry or default_registry()
    builders: Dict[str, Callable[[], List[Row]]] = {
        "2": lambda: table2_rows(registry, height, levels),
        "3": lambda: table3_rows(registry, levels),
        "4": lambda: table4_rows(registry, levels),
        "disc": lambda: disc_rows(registry, levels),
    }
    if which not in builders:
        raise UnknownTable(f"unknown table '{which}', expected one of {', '.join(TABLE_NAMES)}")
    logger.info("🔍 Recomputing table %s", which)
    return builders[which]()


def _cell(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return ", ".join(str(v) for v in value)
    return str(value)


def render(rows: List[Row], fmt: str, which: str = "") -> str:
    """
    Render rows; output is LF-terminated and identical across runs

    Args:
        rows: Table rows sharing the same keys
        fmt: md, csv or json
        which: Table name recorded in the JSON document
    """
    if fmt == "json":
        return json.dumps(to_wire({"table": which, "rows": rows}), indent=2) + "\n"
    header = list(rows[0]) if rows else []
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(row[key]) for key in header])
        return buffer.getvalue()
    if fmt == "md":
        lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
        lines += ["| " + " | ".join(_cell(row[key]) for key in header) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format '{fmt}'")
