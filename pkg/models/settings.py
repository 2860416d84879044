from pydantic import BaseModel, Field, field_validator
from typing import Dict, Literal, Optional

# Output format enum
GraphFormat = Literal["dot", "json"]
Subcommand = Literal["check", "graph", "betti", "homogeneous", "catalog"]
LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR"]

DEFAULT_GEN_CAP = 1_000_000


class Settings(BaseModel):
    # Weyl group generation
    gen_cap: int = DEFAULT_GEN_CAP

    # Fixtures
    catalog_dir: str = "catalog"

    # Logging
    log_level: LogLevel = "WARNING"

    @field_validator("gen_cap")
    @classmethod
    def cap_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("generation cap must be at least 1")
        return value


class CliConfig(BaseModel):
    subcommand: Subcommand
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    format: GraphFormat = "dot"
    max_degree: Optional[int] = None
    parameters: Dict[str, int] = Field(default_factory=dict)
    verbosity: int = 0
