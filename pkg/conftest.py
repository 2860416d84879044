import json
from pathlib import Path

import pytest

from services.diagram import parse_document

CATALOG_DIR = Path(__file__).parent / "catalog"
CATALOG_IDS = sorted(p.name[: -len(".expected.json")] for p in CATALOG_DIR.glob("*.expected.json"))
HOMOGENEOUS_IDS = [i for i in CATALOG_IDS if "K" in json.loads((CATALOG_DIR / f"{i}.json").read_text())]
DIAGRAM_IDS = [i for i in CATALOG_IDS if i not in HOMOGENEOUS_IDS]


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("GKM_GEN_CAP", "GKM_CATALOG_DIR", "GKM_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def catalog_dir() -> Path:
    return CATALOG_DIR


@pytest.fixture
def catalog_text():
    def read(entry_id: str) -> str:
        return (CATALOG_DIR / f"{entry_id}.json").read_text()

    return read


@pytest.fixture
def load_catalog(catalog_text):
    """Parse a catalog document by id, binding parameters given as keywords."""

    def load(entry_id: str, **parameters: int):
        return parse_document(catalog_text(entry_id), parameters)

    return load
