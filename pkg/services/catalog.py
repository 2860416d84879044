import logging
import time
from collections import Counter, defaultdict
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from config import get_settings
from models.catalog import CatalogEntry, CatalogSummary, EntryReport, ExpectedResult, RunReport
from models.diagram import HomogeneousSpace
from models.graph import GkmGraph
from models.report import ValidationReport
from services.cohomology import betti_numbers
from services.diagram import load_json, parse_document
from services.errors import GkmError, RankMismatch, SchemaError, UnknownEntry
from services.graph import build_graph, build_homogeneous_graph, validate_graph
from services.verdict import condition_roots_via_lambda, direct_weight_check, gkm_verdict, homogeneous_verdict

logger = logging.getLogger(__name__)

SIDECAR_SUFFIX = ".expected.json"
GRAPH_KEYS = {"vertex_count", "vertices_per_orbit", "edge_census", "labels", "betti"}


class CatalogRunner:
    """
    Runs catalog documents through verdict, graph and Betti computation and
    diffs the results against their expected-result sidecars.
    """

    def __init__(self, directory: Optional[str] = None, cap: Optional[int] = None):
        settings = get_settings()
        self.directory = Path(directory or settings.catalog_dir)
        self.cap = cap if cap is not None else settings.gen_cap

    def entry_ids(self) -> List[str]:
        return sorted(p.name[: -len(SIDECAR_SUFFIX)] for p in self.directory.glob(f"*{SIDECAR_SUFFIX}"))

    def load_entry(self, entry_id: str) -> CatalogEntry:
        document = self.directory / f"{entry_id}.json"
        sidecar = self.directory / f"{entry_id}{SIDECAR_SUFFIX}"
        if not document.is_file() or not sidecar.is_file():
            raise UnknownEntry(f"No catalog entry named {entry_id!r}")
        text = document.read_text()
        try:
            entry = CatalogEntry.model_validate({**load_json(sidecar.read_text()), "document": text})
        except ValidationError as e:
            raise SchemaError(f"{sidecar.name}: {e.errors()[0]['msg']}")
        if entry.id != entry_id:
            raise SchemaError(f"{sidecar.name}: id {entry.id!r} does not match the file name")
        entry.kind = "homogeneous" if "K" in load_json(text) else "diagram"
        return entry

    def entries(self) -> List[CatalogEntry]:
        return [self.load_entry(entry_id) for entry_id in self.entry_ids()]

    def summaries(self) -> List[CatalogSummary]:
        return [
            CatalogSummary(id=e.id, kind=e.kind, source=e.provenance.source, runs=len(e.runs), note=e.provenance.note)
            for e in self.entries()
        ]

    def run_entry(self, entry: CatalogEntry) -> EntryReport:
        runs = []
        for run in entry.runs:
            started = time.perf_counter()
            try:
                checks = self._run(entry, run.parameters, run.expected)
            except GkmError as e:
                logger.error(f"{entry.id} {run.parameters}: {type(e).__name__}: {e}")
                checks = ValidationReport()
                checks.add("pipeline", False, f"{type(e).__name__}: {e}")
            elapsed = (time.perf_counter() - started) * 1000
            runs.append(
                RunReport(
                    entry_id=entry.id,
                    parameters=run.parameters,
                    passed=checks.passed,
                    checks=checks.checks,
                    elapsed_ms=round(elapsed, 1),
                )
            )
        report = EntryReport(id=entry.id, passed=all(r.passed for r in runs), runs=runs)
        logger.info(f"Catalog entry {entry.id}: {'pass' if report.passed else 'FAIL'}")
        return report

    def run_all(self) -> List[EntryReport]:
        return [self.run_entry(entry) for entry in self.entries()]

    def _run(self, entry: CatalogEntry, parameters: Dict[str, int], expected: ExpectedResult) -> ValidationReport:
        report = ValidationReport()
        subject = parse_document(entry.document, parameters)
        wanted = expected.model_dump(exclude_none=True)
        graph: Optional[GkmGraph] = None

        if isinstance(subject, HomogeneousSpace):
            verdict = homogeneous_verdict(subject, self.cap)
            graph = build_homogeneous_graph(subject, self.cap)
        else:
            verdict = gkm_verdict(subject, self.cap)
            self._oracle_checks(subject, verdict.is_gkm, verdict.condition_rank.holds, verdict.condition_roots.holds, report)
            if verdict.is_gkm and GRAPH_KEYS & wanted.keys():
                graph = build_graph(subject, self.cap)
                for check in validate_graph(graph, subject, self.cap).checks:
                    report.checks.append(check)

        actual: Dict[str, Any] = {
            "is_gkm": verdict.is_gkm,
            "case_tag": verdict.case_tag,
            "condition_rank": verdict.condition_rank.holds,
            "condition_roots": verdict.condition_roots.holds,
            "offending_roots": verdict.condition_roots.offending_roots,
            "chi": verdict.euler,
        }
        if graph is not None:
            actual.update(graph_census(graph))
            if "betti" in wanted:
                if graph.n is None:
                    raise SchemaError(f"{entry.id}: Betti numbers need dims for G and H")
                actual["betti"] = betti_numbers(graph, graph.n).betti

        for key, value in wanted.items():
            report.add(f"expected.{key}", actual.get(key) == value, f"expected {value}, got {actual.get(key)}")
        return report

    def _oracle_checks(self, diagram, is_gkm: bool, rank_holds: bool, roots_holds: bool, report: ValidationReport) -> None:
        try:
            direct = direct_weight_check(diagram, self.cap)
        except RankMismatch:
            direct = False
        report.add("oracle.direct_weights", is_gkm == (rank_holds and direct), f"criterion {is_gkm}, direct {direct}")
        try:
            via_lambda = condition_roots_via_lambda(diagram).holds
            report.add("oracle.roots_via_lambda", via_lambda == roots_holds, f"{roots_holds} vs {via_lambda}")
        except RankMismatch:
            pass


def graph_census(graph: GkmGraph) -> Dict[str, Any]:
    labels: Dict[str, List[List[int]]] = defaultdict(list)
    for e in graph.edges:
        labels[e.kind].append(e.label)
    return {
        "vertex_count": len(graph.vertices),
        "vertices_per_orbit": dict(Counter(v.orbit for v in graph.vertices)),
        "edge_census": dict(Counter(e.kind for e in graph.edges)),
        "labels": {kind: sorted(values) for kind, values in labels.items()},
    }


def catalog_entries(directory: Optional[str] = None) -> List[CatalogEntry]:
    return CatalogRunner(directory).entries()


def load_entry(entry_id: str, directory: Optional[str] = None) -> CatalogEntry:
    return CatalogRunner(directory).load_entry(entry_id)


def run_entry(entry: CatalogEntry, directory: Optional[str] = None) -> EntryReport:
    return CatalogRunner(directory).run_entry(entry)


def export_rows(reports: List[EntryReport]) -> List[Dict[str, Any]]:
    """One flat row per run, for CSV export."""
    rows = []
    for report in reports:
        for run in report.runs:
            rows.append(
                {
                    "id": report.id,
                    "parameters": ";".join(f"{k}={v}" for k, v in sorted(run.parameters.items())),
                    "passed": run.passed,
                    "failed_checks": ";".join(c.name for c in run.checks if not c.passed),
                    "elapsed_ms": run.elapsed_ms,
                }
            )
    return rows
