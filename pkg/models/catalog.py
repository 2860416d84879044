from pydantic import BaseModel, ConfigDict, Field
from typing import Dict, List, Literal, Optional

from models.report import CheckResult

# Provenance source enum
ProvenanceSource = Literal["published", "derived", "trivial"]

# Catalog document kind enum
DocumentKind = Literal["diagram", "homogeneous"]


class Provenance(BaseModel):
    source: ProvenanceSource
    note: str = ""


class ExpectedResult(BaseModel):
    """Only keys that are present are compared."""

    model_config = ConfigDict(extra="forbid")

    is_gkm: Optional[bool] = None
    case_tag: Optional[str] = None
    condition_rank: Optional[bool] = None
    condition_roots: Optional[bool] = None
    offending_roots: Optional[List[List[int]]] = None
    chi: Optional[int] = None
    vertex_count: Optional[int] = None
    vertices_per_orbit: Optional[Dict[str, int]] = None
    edge_census: Optional[Dict[str, int]] = None
    labels: Optional[Dict[str, List[List[int]]]] = None
    betti: Optional[List[int]] = None


class CatalogRun(BaseModel):
    parameters: Dict[str, int] = Field(default_factory=dict)
    expected: ExpectedResult


class CatalogEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    provenance: Provenance
    runs: List[CatalogRun] = Field(default_factory=list)
    kind: DocumentKind = "diagram"
    document: str = Field(default="", exclude=True, repr=False)


class CatalogSummary(BaseModel):
    id: str
    kind: DocumentKind
    source: ProvenanceSource
    runs: int
    note: str = ""


class RunReport(BaseModel):
    entry_id: str
    parameters: Dict[str, int] = Field(default_factory=dict)
    passed: bool
    checks: List[CheckResult] = Field(default_factory=list)
    elapsed_ms: float = 0.0


class EntryReport(BaseModel):
    id: str
    passed: bool
    runs: List[RunReport] = Field(default_factory=list)
