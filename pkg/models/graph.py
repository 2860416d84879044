from pydantic import BaseModel, Field
from typing import List, Literal, Optional

# Singular orbit enum
Orbit = Literal["Plus", "Minus"]

# Edge kind enum
EdgeKind = Literal["TangentialPlus", "TangentialMinus", "Normal"]


class Vertex(BaseModel):
    id: str
    orbit: Orbit
    coset_index: int
    word: str
    representative: List[List[str]] = Field(default_factory=list)


class Edge(BaseModel):
    u: str
    v: str
    label: List[int]
    kind: EdgeKind


class GkmGraph(BaseModel):
    name: str = ""
    rank: int
    n: Optional[int] = None
    vertices: List[Vertex] = Field(default_factory=list)
    edges: List[Edge] = Field(default_factory=list)

    def vertex_ids(self) -> List[str]:
        return [v.id for v in self.vertices]
