from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel

from app.errors import DomainError


@dataclass(frozen=True)
class BcflParams:
    alpha: float = 0.984
    gamma: float = 2.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not np.isfinite(self.gamma) or self.gamma < 0:
            raise DomainError(f"gamma must be finite and non-negative, got {self.gamma}")


@dataclass(frozen=True)
class KernelParams:
    alpha: float = 0.984
    gamma: float = 2.0
    pos_weight: float = 1.0
    fl_positive_threshold: float = 0.6

    @property
    def bcfl(self) -> BcflParams:
        return BcflParams(alpha=self.alpha, gamma=self.gamma)


class LossReport(BaseModel):
    kernel: str
    total: float
    per_channel: list[float]
    cell_count: int
    gradcheck_max_rel_error: float | None = None
