from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field


@dataclass(frozen=True)
class UnitScore:
    image_id: int
    category_id: int
    md_sum: float
    cp: int
    n: int
    matched: int
    tp: int
    gt_count: int
    pred_count: int

    @property
    def penalty(self) -> float:
        return (self.cp + self.md_sum) / self.n


class CategoryReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    category_id: int
    name: str
    cas: float
    cp_term: float = Field(serialization_alias="cp")
    md_term: float = Field(serialization_alias="md")
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    units: int


class CasReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    cas: float
    cp_term: float = Field(serialization_alias="cp")
    md_term: float = Field(serialization_alias="md")
    cas_s: float | None = None
    cas_m: float | None = None
    cas_l: float | None = None
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    units: int = 0
    aggregation: str = "pooled"
    band: str = "all"
    per_category: list[CategoryReport] = Field(default_factory=list)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True)
