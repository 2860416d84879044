from fastapi import FastAPI, APIRouter, HTTPException, UploadFile, File, Form
from fastapi.responses import StreamingResponse
from starlette.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field
import logging
import json
import csv
import io
from typing import List, Optional, Dict, Any, Union
from datetime import datetime

from config import get_settings

# Import models
from models.catalog import CatalogSummary, EntryReport
from models.cohomology import BettiResult
from models.diagram import GroupDiagram, HomogeneousSpace
from models.graph import GkmGraph
from models.verdict import GkmVerdict

# Import services
from services.catalog import CatalogRunner, export_rows
from services.cohomology import betti_numbers
from services.diagram import parse_document, parse_homogeneous, validate
from services.errors import GkmError, SchemaError, UnknownEntry
from services.graph import build_graph, build_homogeneous_graph
from services.verdict import gkm_verdict, homogeneous_verdict

app = FastAPI(title="GKM Diagram API", version="1.0.0")

# Create a router with the /api prefix
api_router = APIRouter(prefix="/api")

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class DocumentRequest(BaseModel):
    document: Dict[str, Any]
    parameters: Dict[str, int] = Field(default_factory=dict)


class BettiRequest(DocumentRequest):
    max_degree: Optional[int] = Field(default=None, ge=0)


def _bad_request(error: GkmError) -> HTTPException:
    logger.error(f"{type(error).__name__}: {error}")
    return HTTPException(status_code=400, detail=f"{type(error).__name__}: {error}")


def _load(text: str, parameters: Dict[str, int]) -> Union[GroupDiagram, HomogeneousSpace]:
    """Parse and validate a document; any input problem is a 400."""
    try:
        subject = parse_document(text, parameters)
    except GkmError as e:
        raise _bad_request(e)
    if isinstance(subject, GroupDiagram):
        report = validate(subject)
        if not report.passed:
            details = "; ".join(f"{c.name}: {c.message}" for c in report.failures())
            raise _bad_request(SchemaError(f"{subject.name}: diagram failed validation: {details}"))
    return subject


def _verdict(subject: Union[GroupDiagram, HomogeneousSpace]) -> GkmVerdict:
    cap = get_settings().gen_cap
    try:
        if isinstance(subject, HomogeneousSpace):
            return homogeneous_verdict(subject, cap)
        return gkm_verdict(subject, cap)
    except GkmError as e:
        raise _bad_request(e)


def _graph(subject: Union[GroupDiagram, HomogeneousSpace]) -> GkmGraph:
    verdict = _verdict(subject)
    if not verdict.is_gkm:
        raise HTTPException(status_code=409, detail=f"{subject.name}: {verdict.summary()}; " + "; ".join(verdict.messages))
    cap = get_settings().gen_cap
    try:
        if isinstance(subject, HomogeneousSpace):
            return build_homogeneous_graph(subject, cap)
        return build_graph(subject, cap)
    except GkmError as e:
        logger.error(f"Graph construction failed for {subject.name}: {e}")
        raise HTTPException(status_code=409, detail=f"{type(e).__name__}: {e}")


def _runner() -> CatalogRunner:
    try:
        return CatalogRunner()
    except GkmError as e:
        raise _bad_request(e)


# Verdict endpoints
@api_router.post("/check", response_model=GkmVerdict)
def check_diagram(request: DocumentRequest):
    """Decide whether the maximal-torus action of a diagram is GKM."""
    subject = _load(json.dumps(request.document), request.parameters)
    verdict = _verdict(subject)
    logger.info(f"Checked {subject.name}: {verdict.summary()}")
    return verdict


@api_router.post("/diagrams/upload", response_model=GkmVerdict)
def upload_diagram(file: UploadFile = File(...), parameters: str = Form("{}")):
    """Check an uploaded diagram JSON file."""
    if not file.filename.endswith('.json'):
        raise HTTPException(status_code=400, detail="File must be a JSON document")
    try:
        bindings = json.loads(parameters) if parameters else {}
    except json.JSONDecodeError as e:
        raise HTTPException(status_code=400, detail=f"Invalid parameters: {e}")
    if not isinstance(bindings, dict) or not all(isinstance(v, int) for v in bindings.values()):
        raise HTTPException(status_code=400, detail="Parameters must map names to integers")

    content = file.file.read()
    try:
        text = content.decode('utf-8')
    except UnicodeDecodeError:
        raise HTTPException(status_code=400, detail="File must be UTF-8 encoded")
    subject = _load(text, bindings)
    verdict = _verdict(subject)
    logger.info(f"Checked upload {file.filename}: {verdict.summary()}")
    return verdict


# Graph endpoints
@api_router.post("/graph", response_model=GkmGraph)
def diagram_graph(request: DocumentRequest):
    """Build the labeled GKM graph of a diagram."""
    subject = _load(json.dumps(request.document), request.parameters)
    graph = _graph(subject)
    logger.info(f"Built graph for {subject.name}: {len(graph.vertices)} vertices, {len(graph.edges)} edges")
    return graph


@api_router.post("/homogeneous", response_model=GkmGraph)
def homogeneous_graph(request: DocumentRequest):
    """Build the GKM graph of an equal-rank homogeneous space G/K."""
    try:
        space = parse_homogeneous(json.dumps(request.document), request.parameters)
    except GkmError as e:
        raise _bad_request(e)
    return _graph(space)


@api_router.post("/betti", response_model=BettiResult)
def diagram_betti(request: BettiRequest):
    """Betti numbers read off the GKM graph."""
    subject = _load(json.dumps(request.document), request.parameters)
    graph = _graph(subject)
    if graph.n is None:
        raise HTTPException(status_code=400, detail=f"{subject.name}: Betti numbers need dims for G and H")
    try:
        return betti_numbers(graph, graph.n, request.max_degree)
    except GkmError as e:
        logger.error(f"Betti computation failed for {subject.name}: {e}")
        raise HTTPException(status_code=409, detail=f"{type(e).__name__}: {e}")


# Catalog endpoints
@api_router.get("/catalog", response_model=List[CatalogSummary])
def list_catalog():
    """List catalog entries."""
    try:
        return _runner().summaries()
    except GkmError as e:
        raise _bad_request(e)


# Export endpoint
@api_router.get("/catalog/export")
def export_catalog():
    """Run every catalog entry and export the results to CSV."""
    runner = _runner()
    try:
        reports = runner.run_all()
    except GkmError as e:
        raise _bad_request(e)

    output = io.StringIO()
    writer = csv.DictWriter(output, fieldnames=["id", "parameters", "passed", "failed_checks", "elapsed_ms"])
    writer.writeheader()
    writer.writerows(export_rows(reports))
    output.seek(0)

    def iter_csv():
        yield output.getvalue()

    return StreamingResponse(
        iter(iter_csv()),
        media_type="text/csv",
        headers={"Content-Disposition": f"attachment; filename=gkm_catalog_{datetime.now().strftime('%Y%m%d')}.csv"}
    )


@api_router.get("/catalog/{entry_id}", response_model=EntryReport)
def run_catalog_entry(entry_id: str):
    """Run one catalog entry against its expected results."""
    runner = _runner()
    try:
        entry = runner.load_entry(entry_id)
    except UnknownEntry:
        raise HTTPException(status_code=404, detail="Catalog entry not found")
    except GkmError as e:
        raise _bad_request(e)
    return runner.run_entry(entry)


# Health check endpoint
@api_router.get("/health")
def health_check():
    """Health check endpoint."""
    try:
        settings = get_settings()
    except GkmError as e:
        raise _bad_request(e)
    runner = CatalogRunner(settings.catalog_dir, settings.gen_cap)
    return {
        "status": "healthy",
        "timestamp": datetime.utcnow(),
        "gen_cap": settings.gen_cap,
        "catalog_entries": len(runner.entry_ids()),
    }


# Root endpoint
@api_router.get("/")
def root():
    return {"message": "GKM Diagram API is running"}


# Include the router in the main app
app.include_router(api_router)

app.add_middleware(
    CORSMiddleware,
    allow_credentials=True,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)
