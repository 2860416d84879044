from dataclasses import dataclass, field
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Dict, List, Literal, Optional, Tuple, Union

from services.ratlin import Matrix, Subspace
from services.weyl import GramForm, RootSet

# Root system family enum
Family = Literal["A", "B", "C", "D", "G2", "F4", "U", "torus"]

# Integers or "p/q" strings
RationalLiteral = Union[int, str]


class ConstructSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Family
    n: int
    offset: int = 0
    scale: int = 1


class GroupSpec(BaseModel):
    """One of G, K+, K-, K as written in a document."""

    model_config = ConfigDict(extra="forbid")

    roots: Optional[List[List[int]]] = None
    construct: Optional[ConstructSpec] = None
    product: Optional[List[ConstructSpec]] = None
    full_rank: bool = True
    weyl_generators: Optional[List[List[List[RationalLiteral]]]] = None
    torus_span: Optional[List[List[int]]] = None
    dim: Optional[int] = None
    note: Optional[str] = None

    @model_validator(mode="after")
    def single_root_source(self):
        sources = [s for s in (self.roots, self.construct, self.product) if s is not None]
        if len(sources) > 1:
            raise ValueError("give at most one of roots, construct, product")
        return self


class PrincipalSpec(BaseModel):
    """The principal isotropy group H."""

    model_config = ConfigDict(extra="forbid")

    torus_span: List[List[int]]
    weyl_generators: Optional[List[List[List[RationalLiteral]]]] = None
    dim: Optional[int] = None
    note: Optional[str] = None


class DiagramDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    name: str
    rank: int = Field(ge=1)
    gram: Optional[List[List[RationalLiteral]]] = None
    parameters: Dict[str, int] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    G: GroupSpec
    Kplus: GroupSpec
    Kminus: GroupSpec
    H: PrincipalSpec


class HomogeneousDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    rank: int = Field(ge=1)
    gram: Optional[List[List[RationalLiteral]]] = None
    parameters: Dict[str, int] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    G: GroupSpec
    K: GroupSpec


@dataclass(frozen=True)
class GroupDatum:
    roots: RootSet
    full_rank: bool = True
    weyl_generators: Optional[Tuple[Matrix, ...]] = None
    torus_span: Optional[Subspace] = None
    dim: Optional[int] = None
    note: Optional[str] = None

    def rank(self, r: int) -> Optional[int]:
        if self.full_rank:
            return r
        return self.torus_span.dim if self.torus_span is not None else None


@dataclass(frozen=True)
class GroupDiagram:
    name: str
    rank: int
    gram: GramForm
    G: GroupDatum
    Kplus: GroupDatum
    Kminus: GroupDatum
    H: GroupDatum
    parameters: Tuple[Tuple[str, int], ...] = ()
    notes: Tuple[str, ...] = field(default=())

    def side_rank(self, side: GroupDatum) -> Optional[int]:
        """
        Rank of K+ or K-: r when full rank, else its torus span. Without a span,
        K/H is a sphere, so rank K = rank H across an even-dimensional one and
        rank H + 1 across an odd-dimensional one.
        """
        known = side.rank(self.rank)
        if known is not None:
            return known
        if side.dim is None or self.H.dim is None:
            return None
        return self.H.torus_span.dim + (side.dim - self.H.dim) % 2

    @property
    def manifold_dim(self) -> Optional[int]:
        if self.G.dim is None or self.H.dim is None:
            return None
        return self.G.dim - self.H.dim + 1


@dataclass(frozen=True)
class HomogeneousSpace:
    name: str
    rank: int
    gram: GramForm
    G: GroupDatum
    K: GroupDatum
    parameters: Tuple[Tuple[str, int], ...] = ()
    notes: Tuple[str, ...] = ()

    @property
    def manifold_dim(self) -> Optional[int]:
        if self.G.dim is None or self.K.dim is None:
            return None
        return self.G.dim - self.K.dim
