from dataclasses import dataclass


@dataclass(frozen=True)
class SelftestCase:
    name: str
    passed: bool
    instances: int
    max_error: float = 0.0
    detail: str = ""
