"""Split a search into independent work units and merge their reports.

The tree is cut at a frontier measured in total prime multiplicity: the
traversal runs the normal search down to that depth, classifies any
abundant node it meets on the way (those results land in a special
"frontier" report), and emits every surviving node at the frontier as a
work unit instead of recursing.  Units are disjoint subtrees, so running
them in any order on any number of workers and merging reproduces the
single-run report exactly, counter for counter.

Unit and report files are plain JSON, one per unit, written atomically
(write-then-rename), so a directory of them is a crash-resumable
checkpoint of the whole run.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path

from .factored import FactoredNumber, canonical, parse
from .primes import PrimeSource
from .search import (
    DEFAULT_PROGRESS_EVERY,
    SearchConfig,
    SearchReport,
    _run,
    search,
)

__all__ = [
    "FRONTIER_ID",
    "UnitReport",
    "WorkUnit",
    "load_manifest",
    "load_unit",
    "merge",
    "read_reports",
    "run_unit",
    "split",
    "write_report",
    "write_units",
]

FRONTIER_ID = "frontier"

_COMPARED_CONFIG_KEYS = ("bound", "abundance_cap", "barrier_stride")


@dataclass(frozen=True)
class WorkUnit:
    """A subtree root plus the configuration it must be searched under."""

    id: str
    root: FactoredNumber
    config: SearchConfig

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "root": canonical(self.root),
            "bound": self.config.bound,
            "abundance_cap": self.config.abundance_cap,
            "barrier_stride": self.config.barrier_stride,
        }

    @classmethod
    def from_json(cls, d: dict) -> "WorkUnit":
        root = parse(d["root"])
        config = SearchConfig(
            bound=int(d["bound"]),
            abundance_cap=None if d.get("abundance_cap") is None else int(d["abundance_cap"]),
            roots=(root,),
            barrier_stride=int(d.get("barrier_stride", 1)),
        )
        return cls(id=str(d["id"]), root=root, config=config)


@dataclass
class UnitReport:
    """Outcome of one unit: complete or aborted, plus the usual report."""

    unit_id: str
    status: str  # "complete" | "aborted"
    report: SearchReport

    def to_json(self) -> dict:
        return {"unit_id": self.unit_id, "status": self.status, **self.report.as_dict()}

    @classmethod
    def from_json(cls, d: dict) -> "UnitReport":
        return cls(
            unit_id=str(d["unit_id"]),
            status=str(d["status"]),
            report=SearchReport.from_dict(d),
        )


def split(
    config: SearchConfig,
    frontier_depth: int,
    prime_source: PrimeSource | None = None,
    sink=None,
    progress_every: int = DEFAULT_PROGRESS_EVERY,
    classify_node_budget: int | None = None,
) -> tuple[list[WorkUnit], UnitReport]:
    """Cut the configured search at the given frontier depth.

    Returns the work units (deficient, in-bound, unpruned nodes at the
    frontier) and the frontier report covering everything handled inline
    above it.  Unit ids are the decimal value of the subtree root.
    """
    if frontier_depth < 1:
        raise ValueError("frontier_depth must be >= 1")
    units: list[WorkUnit] = []

    def on_unit(node: FactoredNumber) -> None:
        units.append(
            WorkUnit(id=str(node.value), root=node, config=replace(config, roots=(node,)))
        )

    report = _run(
        config,
        sink,
        prime_source,
        progress_every,
        classify_node_budget,
        frontier_depth=frontier_depth,
        on_unit=on_unit,
    )
    status = "complete" if report.conclusive else "aborted"
    return units, UnitReport(unit_id=FRONTIER_ID, status=status, report=report)


def run_unit(
    unit: WorkUnit,
    prime_source: PrimeSource | None = None,
    sink=None,
    progress_every: int = DEFAULT_PROGRESS_EVERY,
    classify_node_budget: int | None = None,
) -> UnitReport:
    """Search exactly the unit's subtree; aborted runs keep their reason."""
    config = replace(unit.config, roots=(unit.root,))
    report = search(
        config,
        sink=sink,
        prime_source=prime_source,
        progress_every=progress_every,
        classify_node_budget=classify_node_budget,
    )
    status = "complete" if report.conclusive else "aborted"
    return UnitReport(unit_id=unit.id, status=status, report=report)


def merge(
    unit_reports: list[UnitReport],
    frontier: UnitReport,
    expected_ids: set[str] | None = None,
) -> SearchReport:
    """Combine unit reports (plus the frontier report) into one report.

    The merge is conclusive only when the frontier and every expected unit
    are present exactly once and completed; duplicates, missing or unknown
    ids, and aborted units all flag the result non-conclusive but still
    contribute their counters (a weird number found by a partial run is
    still a weird number).  weird_found is sorted ascending by value.
    """
    problems: list[str] = []
    merged = SearchReport(config_echo=dict(frontier.report.config_echo))
    conclusive = True
    if frontier.status != "complete" or not frontier.report.conclusive:
        conclusive = False
        problems.append("frontier aborted")

    def absorb(rep: SearchReport) -> None:
        merged.nodes_visited += rep.nodes_visited
        merged.barrier_prunes += rep.barrier_prunes
        merged.bound_prunes += rep.bound_prunes
        merged.abundant_found += rep.abundant_found
        merged.semiperfect_count += rep.semiperfect_count
        merged.unchecked_abundant_count += rep.unchecked_abundant_count
        merged.wall_time += rep.wall_time

    absorb(frontier.report)
    weird: set[str] = set(frontier.report.weird_found)
    seen: set[str] = set()
    for ur in unit_reports:
        if ur.unit_id in seen:
            conclusive = False
            problems.append(f"duplicate unit {ur.unit_id}")
            continue
        seen.add(ur.unit_id)
        if ur.status != "complete" or not ur.report.conclusive:
            conclusive = False
            reason = ur.report.error or "aborted"
            problems.append(f"unit {ur.unit_id} aborted ({reason})")
        for key in _COMPARED_CONFIG_KEYS:
            if ur.report.config_echo.get(key) != frontier.report.config_echo.get(key):
                conclusive = False
                problems.append(f"unit {ur.unit_id} config mismatch on {key}")
                break
        absorb(ur.report)
        weird.update(ur.report.weird_found)
    if expected_ids is not None:
        missing = set(expected_ids) - seen
        unknown = seen - set(expected_ids)
        if missing:
            conclusive = False
            problems.append(f"missing units: {sorted(missing)}")
        if unknown:
            conclusive = False
            problems.append(f"unknown units: {sorted(unknown)}")
    merged.weird_found = sorted(weird, key=lambda s: parse(s).value)
    merged.conclusive = conclusive
    merged.error = "; ".join(problems) if problems else None
    return merged


# ---------------------------------------------------------------------------
# on-disk layout: <dir>/manifest.json, <dir>/units/<id>.json,
# <dir>/reports/<id>.json (the frontier report is reports/frontier.json)


def _atomic_write(path: Path, payload: dict) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, path)


def write_units(
    units: list[WorkUnit],
    frontier: UnitReport,
    directory: str | os.PathLike,
    frontier_depth: int,
) -> None:
    """Persist a split: manifest, one unit file each, the frontier report."""
    base = Path(directory)
    (base / "units").mkdir(parents=True, exist_ok=True)
    (base / "reports").mkdir(parents=True, exist_ok=True)
    for unit in units:
        _atomic_write(base / "units" / f"{unit.id}.json", unit.to_json())
    write_report(frontier, base)
    manifest = {
        "frontier_depth": frontier_depth,
        "unit_ids": [u.id for u in units],
        "bound": frontier.report.config_echo.get("bound"),
        "abundance_cap": frontier.report.config_echo.get("abundance_cap"),
        "barrier_stride": frontier.report.config_echo.get("barrier_stride"),
    }
    _atomic_write(base / "manifest.json", manifest)


def load_manifest(directory: str | os.PathLike) -> dict:
    return json.loads((Path(directory) / "manifest.json").read_text())


def load_unit(path: str | os.PathLike) -> WorkUnit:
    return WorkUnit.from_json(json.loads(Path(path).read_text()))


def write_report(report: UnitReport, directory: str | os.PathLike) -> None:
    base = Path(directory) / "reports"
    base.mkdir(parents=True, exist_ok=True)
    _atomic_write(base / f"{report.unit_id}.json", report.to_json())


def read_reports(directory: str | os.PathLike) -> tuple[list[UnitReport], UnitReport | None]:
    """Load all persisted unit reports; the frontier comes back separately."""
    base = Path(directory) / "reports"
    frontier = None
    reports = []
    if base.is_dir():
        for path in sorted(base.glob("*.json")):
            ur = UnitReport.from_json(json.loads(path.read_text()))
            if ur.unit_id == FRONTIER_ID:
                frontier = ur
            else:
                reports.append(ur)
    return reports, frontier
