from pydantic import BaseModel, Field
from typing import List, Optional


class BettiResult(BaseModel):
    name: str = ""
    betti: List[int] = Field(default_factory=list)
    ht_dims: List[int] = Field(default_factory=list)
    r: int
    n: int
    max_degree: Optional[int] = None
