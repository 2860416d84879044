from pydantic import BaseModel, ConfigDict, Field
from typing import List, Literal, Optional

# Case tag enum
CaseTag = Literal["Homogeneous", "Case1", "Case2", "NotGkm"]


class RankCondition(BaseModel):
    holds: bool
    kplus_full_rank: bool
    kminus_full_rank: bool
    rank_g: int
    rank_h: Optional[int] = None
    rank_kplus: Optional[int] = None
    rank_kminus: Optional[int] = None


class RootCondition(BaseModel):
    holds: bool
    offending_roots: List[List[int]] = Field(default_factory=list)


class GkmVerdict(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    condition_rank: RankCondition
    condition_roots: RootCondition
    is_gkm: bool
    case_tag: CaseTag
    lambda_: Optional[List[int]] = Field(default=None, alias="lambda")
    euler: Optional[int] = None

    # K+ / K- labels were exchanged so that K+ is a full-rank side
    swapped: bool = False
    messages: List[str] = Field(default_factory=list)

    def summary(self) -> str:
        if self.is_gkm:
            return f"GKM ({self.case_tag}), χ={self.euler}"
        return "not GKM"
