from dataclasses import dataclass
from typing import Literal

from app.annotations.models import BoundingBox, SizeBand
from app.errors import DomainError

DeficientSide = Literal["none", "gt", "pred"]


@dataclass(frozen=True)
class MatchCostParams:
    lam: float = 1.0
    mu: float = 1.0

    def __post_init__(self) -> None:
        if self.lam < 0 or self.mu < 0:
            raise DomainError("match cost weights must be non-negative")
        if self.lam == 0 and self.mu == 0:
            raise DomainError("lambda and mu must not both be 0")


@dataclass(frozen=True)
class GroundTruthCenter:
    x: float
    y: float
    gc: float = 1.0
    D: float = 0.0
    band: SizeBand = "small"
    box: BoundingBox | None = None


@dataclass(frozen=True)
class MatchedPair:
    gt: int
    pred: int
    cost: float
    distance: float


@dataclass(frozen=True)
class MatchSet:
    pairs: tuple[MatchedPair, ...] = ()
    unmatched_gt: tuple[int, ...] = ()
    unmatched_pred: tuple[int, ...] = ()
    deficient_side: DeficientSide = "none"
    total_cost: float = 0.0


@dataclass(frozen=True)
class Assignment:
    pairs: tuple[tuple[int, int], ...]
    total: float
