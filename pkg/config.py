import os
from pathlib import Path

from dotenv import load_dotenv
from pydantic import ValidationError

from models.settings import DEFAULT_GEN_CAP, Settings
from services.errors import SchemaError

ROOT_DIR = Path(__file__).parent
load_dotenv(ROOT_DIR / '.env')


def get_settings() -> Settings:
    """Read settings from the environment on every call so overrides take effect."""
    raw_cap = os.getenv("GKM_GEN_CAP", str(DEFAULT_GEN_CAP))
    try:
        gen_cap = int(raw_cap)
    except ValueError:
        raise SchemaError(f"GKM_GEN_CAP must be an integer, got {raw_cap!r}")
    try:
        return Settings(
            gen_cap=gen_cap,
            catalog_dir=os.getenv("GKM_CATALOG_DIR", str(ROOT_DIR / "catalog")),
            log_level=os.getenv("GKM_LOG_LEVEL", "WARNING").upper(),
        )
    except ValidationError as e:
        raise SchemaError(f"Invalid settings: {e.errors()[0]['msg']}")
