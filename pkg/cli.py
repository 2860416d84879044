import logging
import os
import tempfile
import time
from pathlib import Path
from typing import Dict, List, Optional, Union

import typer
from pydantic import ValidationError

from config import get_settings
from models.diagram import GroupDiagram, HomogeneousSpace
from models.graph import GkmGraph
from models.settings import CliConfig, Settings
from services.catalog import CatalogRunner
from services.cohomology import betti_numbers, poincare_check
from services.diagram import parse_document, parse_homogeneous, validate
from services.errors import GkmError, SchemaError
from services.graph import build_graph, build_homogeneous_graph, emit_dot, emit_json
from services.verdict import gkm_verdict, homogeneous_verdict

logger = logging.getLogger(__name__)

app = typer.Typer(
    help="GKM verdicts, graphs and Betti numbers for cohomogeneity-one group diagrams.",
    no_args_is_help=True,
    add_completion=False,
)

# Exit codes
EXIT_OK = 0
EXIT_NOT_GKM = 1
EXIT_INVALID = 2

PARAM_HELP = "Bind a document parameter, e.g. -P p=2 (repeatable)."
VERBOSE_HELP = "-v prints coset representatives and words, -vv adds debug logging."


def _configure_logging(settings: Settings, verbosity: int) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, settings.log_level)
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


def _fail(message: str, code: int) -> typer.Exit:
    logger.error(message)
    typer.echo(message, err=True)
    return typer.Exit(code)


def _bindings(raw: Optional[List[str]]) -> Dict[str, int]:
    bound = {}
    for item in raw or []:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise SchemaError(f"Malformed parameter binding {item!r}, expected name=value")
        try:
            bound[name.strip()] = int(value)
        except ValueError:
            raise SchemaError(f"Parameter {name.strip()!r} must be an integer, got {value!r}")
    return bound


def _start(subcommand: str, verbosity: int, **fields) -> tuple:
    """Resolve settings and the invocation config; input errors exit 2."""
    try:
        settings = get_settings()
        raw = fields.pop("parameters", None)
        config = CliConfig(subcommand=subcommand, verbosity=verbosity, parameters=_bindings(raw), **fields)
    except ValidationError as e:
        raise _fail(f"Invalid option: {e.errors()[0]['msg']}", EXIT_INVALID)
    except GkmError as e:
        raise _fail(f"{type(e).__name__}: {e}", EXIT_INVALID)
    _configure_logging(settings, verbosity)
    logger.debug(f"Invocation: {config.model_dump()}")
    return settings, config


def _load(config: CliConfig) -> Union[GroupDiagram, HomogeneousSpace]:
    try:
        text = Path(config.input_path).read_text()
    except OSError as e:
        raise _fail(f"Cannot read {config.input_path}: {e.strerror}", EXIT_INVALID)
    try:
        subject = parse_document(text, config.parameters)
    except GkmError as e:
        raise _fail(f"{type(e).__name__}: {e}", EXIT_INVALID)
    if isinstance(subject, GroupDiagram):
        report = validate(subject)
        if not report.passed:
            details = "\n".join(f"  {c.name}: {c.message}" for c in report.failures())
            raise _fail(f"{subject.name}: diagram failed validation\n{details}", EXIT_INVALID)
    return subject


def _write(config: CliConfig, content: str) -> None:
    if config.output_path is None:
        typer.echo(content, nl=False)
        return
    target = Path(config.output_path)
    try:
        with tempfile.NamedTemporaryFile("w", dir=target.parent or ".", delete=False, suffix=".tmp") as handle:
            handle.write(content)
        os.replace(handle.name, target)
    except OSError as e:
        raise _fail(f"Cannot write {target}: {e.strerror}", EXIT_INVALID)
    logger.info(f"Wrote {target}")


def _render(graph: GkmGraph, config: CliConfig) -> str:
    return emit_json(graph) if config.format == "json" else emit_dot(graph)


def _print_vertices(graph: GkmGraph) -> None:
    for v in graph.vertices:
        representative = "[" + ", ".join("[" + ", ".join(row) + "]" for row in v.representative) + "]"
        typer.echo(f"  {v.id}  [{v.word}]  {representative}")


def _gkm_graph(settings: Settings, config: CliConfig) -> GkmGraph:
    """Parse, decide and build; shared by graph and betti."""
    subject = _load(config)
    try:
        if isinstance(subject, HomogeneousSpace):
            homogeneous_verdict(subject, settings.gen_cap)
            return build_homogeneous_graph(subject, settings.gen_cap)
        verdict = gkm_verdict(subject, settings.gen_cap)
    except GkmError as e:
        raise _fail(f"{type(e).__name__}: {e}", EXIT_INVALID)
    if not verdict.is_gkm:
        for message in verdict.messages:
            typer.echo(f"  {message}", err=True)
        raise _fail(f"{subject.name}: {verdict.summary()}", EXIT_NOT_GKM)
    try:
        graph = build_graph(subject, settings.gen_cap)
    except GkmError as e:
        raise _fail(f"{type(e).__name__}: {e}", EXIT_NOT_GKM)
    return graph


@app.command()
def check(
    path: Path = typer.Argument(..., help="Diagram or homogeneous-space JSON document."),
    parameters: Optional[List[str]] = typer.Option(None, "-P", "--param", help=PARAM_HELP),
    verbose: int = typer.Option(0, "-v", "--verbose", count=True, help=VERBOSE_HELP),
):
    """Decide whether the maximal-torus action is of GKM type."""
    settings, config = _start("check", verbose, input_path=str(path), parameters=parameters)
    subject = _load(config)
    try:
        if isinstance(subject, HomogeneousSpace):
            verdict = homogeneous_verdict(subject, settings.gen_cap)
        else:
            verdict = gkm_verdict(subject, settings.gen_cap)
    except GkmError as e:
        raise _fail(f"{type(e).__name__}: {e}", EXIT_INVALID)

    typer.echo(f"{subject.name}: {verdict.summary()}")
    rank = verdict.condition_rank
    typer.echo(
        f"  rank condition: {'holds' if rank.holds else 'fails'} "
        f"(rank G = {rank.rank_g}, rank H = {rank.rank_h}, K+ full rank: {rank.kplus_full_rank})"
    )
    typer.echo(f"  root condition: {'holds' if verdict.condition_roots.holds else 'fails'}")
    for message in verdict.messages:
        typer.echo(f"  {message}")
    if verdict.lambda_ is not None:
        typer.echo(f"  lambda = {verdict.lambda_}")

    if verbose and verdict.is_gkm:
        try:
            if isinstance(subject, HomogeneousSpace):
                graph = build_homogeneous_graph(subject, settings.gen_cap)
            else:
                graph = build_graph(subject, settings.gen_cap)
        except GkmError as e:
            raise _fail(f"{type(e).__name__}: {e}", EXIT_NOT_GKM)
        typer.echo("  fixed points:")
        _print_vertices(graph)

    raise typer.Exit(EXIT_OK if verdict.is_gkm else EXIT_NOT_GKM)


@app.command()
def graph(
    path: Path = typer.Argument(..., help="Diagram JSON document."),
    parameters: Optional[List[str]] = typer.Option(None, "-P", "--param", help=PARAM_HELP),
    format: str = typer.Option("dot", "--format", "-f", help="dot or json."),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write here instead of stdout."),
    verbose: int = typer.Option(0, "-v", "--verbose", count=True, help=VERBOSE_HELP),
):
    """Emit the labeled GKM graph as DOT or JSON."""
    settings, config = _start(
        "graph",
        verbose,
        input_path=str(path),
        output_path=str(output) if output else None,
        format=format,
        parameters=parameters,
    )
    g = _gkm_graph(settings, config)
    _write(config, _render(g, config))


@app.command()
def betti(
    path: Path = typer.Argument(..., help="Diagram JSON document with dims for G and H."),
    parameters: Optional[List[str]] = typer.Option(None, "-P", "--param", help=PARAM_HELP),
    max_degree: Optional[int] = typer.Option(None, "--max-degree", help="Check degrees up to this one (default n + 2)."),
    verbose: int = typer.Option(0, "-v", "--verbose", count=True, help=VERBOSE_HELP),
):
    """Compute H_T dimensions and Betti numbers from the GKM graph."""
    settings, config = _start("betti", verbose, input_path=str(path), max_degree=max_degree, parameters=parameters)
    g = _gkm_graph(settings, config)
    if g.n is None:
        raise _fail(f"{g.name}: Betti numbers need dims for G and H", EXIT_INVALID)
    if config.max_degree is not None and config.max_degree < 0:
        raise _fail("--max-degree must be non-negative", EXIT_INVALID)
    try:
        result = betti_numbers(g, g.n, config.max_degree)
    except GkmError as e:
        raise _fail(f"{type(e).__name__}: {e}", EXIT_NOT_GKM)

    typer.echo(f"{g.name}: n = {result.n}, r = {result.r}, checked to degree {result.max_degree}")
    typer.echo("  d   h_d   b_2d")
    for d, (h, b) in enumerate(zip(result.ht_dims, result.betti)):
        typer.echo(f"  {d:<3} {h:<5} {b}")
    for c in poincare_check(result, result.n, len(g.vertices)).checks:
        typer.echo(f"  {c.name}: {'ok' if c.passed else 'FAILED ' + c.message}")
    typer.echo("b = " + ",".join(str(b) for b in result.betti))


@app.command()
def homogeneous(
    path: Path = typer.Argument(..., help="Homogeneous-space JSON document with G and K."),
    parameters: Optional[List[str]] = typer.Option(None, "-P", "--param", help=PARAM_HELP),
    format: str = typer.Option("dot", "--format", "-f", help="dot or json."),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write here instead of stdout."),
    verbose: int = typer.Option(0, "-v", "--verbose", count=True, help=VERBOSE_HELP),
):
    """Emit the GKM graph of G/K for rank K = rank G."""
    settings, config = _start(
        "homogeneous",
        verbose,
        input_path=str(path),
        output_path=str(output) if output else None,
        format=format,
        parameters=parameters,
    )
    try:
        text = Path(config.input_path).read_text()
    except OSError as e:
        raise _fail(f"Cannot read {config.input_path}: {e.strerror}", EXIT_INVALID)
    try:
        space = parse_homogeneous(text, config.parameters)
        homogeneous_verdict(space, settings.gen_cap)
    except GkmError as e:
        raise _fail(f"{type(e).__name__}: {e}", EXIT_INVALID)
    try:
        g = build_homogeneous_graph(space, settings.gen_cap)
    except GkmError as e:
        raise _fail(f"{type(e).__name__}: {e}", EXIT_NOT_GKM)
    if verbose:
        _print_vertices(g)
    _write(config, _render(g, config))


@app.command()
def catalog(
    list_: bool = typer.Option(False, "--list", help="List catalog entries."),
    run: Optional[str] = typer.Option(None, "--run", help="Run one entry by id."),
    run_all: bool = typer.Option(False, "--run-all", help="Run every entry."),
    directory: Optional[Path] = typer.Option(None, "--dir", help="Catalog directory (default GKM_CATALOG_DIR)."),
    verbose: int = typer.Option(0, "-v", "--verbose", count=True, help=VERBOSE_HELP),
):
    """List or run the catalog of diagrams with expected results."""
    settings, _ = _start("catalog", verbose)
    if sum([list_, run is not None, run_all]) != 1:
        raise _fail("Give exactly one of --list, --run NAME, --run-all", EXIT_INVALID)
    runner = CatalogRunner(str(directory) if directory else None, settings.gen_cap)

    try:
        if list_:
            for s in runner.summaries():
                typer.echo(f"{s.id:<20} {s.kind:<12} {s.source:<10} runs={s.runs}  {s.note}")
            return
        started = time.perf_counter()
        entries = [runner.load_entry(run)] if run is not None else runner.entries()
    except GkmError as e:
        raise _fail(f"{type(e).__name__}: {e}", EXIT_INVALID)

    failed = 0
    for entry in entries:
        report = runner.run_entry(entry)
        for r in report.runs:
            bound = " ".join(f"{k}={v}" for k, v in sorted(r.parameters.items()))
            status = "pass" if r.passed else "FAIL"
            typer.echo(f"{status}  {entry.id} {bound}".rstrip() + f"  ({r.elapsed_ms} ms)")
            for c in r.checks:
                if not c.passed and c.level == "error":
                    typer.echo(f"      {c.name}: {c.message}")
        failed += not report.passed
    elapsed = time.perf_counter() - started
    typer.echo(f"{len(entries)} entries, {failed} failed in {elapsed:.2f}s")
    raise typer.Exit(EXIT_NOT_GKM if failed else EXIT_OK)


if __name__ == "__main__":
    app()
