import json
import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Literal

from pydantic import Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.errors import ConfigError, StorageError
from app.heatmap.models import GcParams
from app.loss.models import BcflParams
from app.matching.models import MatchCostParams
from app.peaks.models import PeakParams

GtKind = Literal["gc", "gaussian", "ellipse"]
Aggregation = Literal["pooled", "macro"]
BandFilter = Literal["small", "medium", "large", "all"]
KernelName = Literal["fl", "qfl", "bcfl", "wbce", "wmse"]
LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

# Config files may use the short names from the command line.
_CONFIG_KEY_ALIASES = {
    "lambda": "match_lambda",
    "mu": "match_mu",
    "gt": "gt_kind",
    "threshold": "prob_threshold",
}


def _default_threads() -> int:
    return os.cpu_count() or 1


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        populate_by_name=True,
    )

    stride: float = Field(default=4.0, gt=0, alias="CENTERKIT_STRIDE")
    eta: float = Field(default=0.5, ge=0, allow_inf_nan=False, alias="CENTERKIT_ETA")
    phi: float = Field(default=0.5, ge=0, allow_inf_nan=False, alias="CENTERKIT_PHI")
    gt_kind: GtKind = Field(default="gc", alias="CENTERKIT_GT_KIND")
    sigma: float = Field(default=2.0, gt=0, alias="CENTERKIT_SIGMA")

    prob_threshold: float = Field(default=0.5, ge=0, alias="CENTERKIT_PROB_THRESHOLD")
    min_distance: float = Field(default=3.0, ge=0, alias="CENTERKIT_MIN_DISTANCE")
    window_radius: int = Field(default=1, ge=1, alias="CENTERKIT_WINDOW_RADIUS")

    match_lambda: float = Field(default=1.0, ge=0, alias="CENTERKIT_LAMBDA")
    match_mu: float = Field(default=1.0, ge=0, alias="CENTERKIT_MU")

    alpha: float = Field(default=0.984, ge=0, le=1, alias="CENTERKIT_ALPHA")
    gamma: float = Field(default=2.0, ge=0, allow_inf_nan=False, alias="CENTERKIT_GAMMA")
    kernel: KernelName = Field(default="bcfl", alias="CENTERKIT_KERNEL")
    pos_weight: float = Field(default=1.0, ge=0, alias="CENTERKIT_POS_WEIGHT")
    fl_positive_threshold: float = Field(default=0.6, ge=0, le=1, alias="CENTERKIT_FL_POSITIVE_THRESHOLD")
    alpha_threshold: float = Field(default=0.6, ge=0, le=1, alias="CENTERKIT_ALPHA_THRESHOLD")

    aggregation: Aggregation = Field(default="pooled", alias="CENTERKIT_AGGREGATION")
    band: BandFilter = Field(default="all", alias="CENTERKIT_BAND")
    threads: int = Field(default_factory=_default_threads, ge=1, alias="CENTERKIT_THREADS")

    log_level: LogLevel = Field(default="WARNING", alias="CENTERKIT_LOG_LEVEL")

    @field_validator("log_level", mode="before")
    @classmethod
    def _upper_level(cls, value: object) -> object:
        return value.upper() if isinstance(value, str) else value

    @model_validator(mode="after")
    def _check_match_weights(self) -> "Settings":
        if self.match_lambda == 0 and self.match_mu == 0:
            raise ValueError("lambda and mu must not both be 0")
        return self

    @property
    def gc_params(self) -> GcParams:
        return GcParams(eta=self.eta, phi=self.phi)

    @property
    def peak_params(self) -> PeakParams:
        return PeakParams(
            prob_threshold=self.prob_threshold,
            min_distance=self.min_distance,
            window_radius=self.window_radius,
        )

    @property
    def match_params(self) -> MatchCostParams:
        return MatchCostParams(lam=self.match_lambda, mu=self.match_mu)

    @property
    def bcfl_params(self) -> BcflParams:
        return BcflParams(alpha=self.alpha, gamma=self.gamma)


def load_config_file(path: Path) -> dict[str, Any]:
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc.msg} at char {exc.pos}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")

    return normalize_config(data, source=str(path))


def normalize_config(data: dict[str, Any], *, source: str = "config") -> dict[str, Any]:
    known = set(Settings.model_fields)
    values: dict[str, Any] = {}
    for key, value in data.items():
        name = _CONFIG_KEY_ALIASES.get(key, key).replace("-", "_")
        if name not in known:
            raise ConfigError(f"unknown config key {key!r} in {source}")
        values[name] = value
    return values


def build_settings(config_path: Path | None = None, overrides: dict[str, Any] | None = None) -> Settings:
    # defaults < environment < config file < flags
    values: dict[str, Any] = {}
    if config_path is not None:
        values.update(load_config_file(config_path))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return settings_from(values)


def settings_from(values: dict[str, Any]) -> Settings:
    # keyed by alias so explicit values outrank the CENTERKIT_* environment
    fields = Settings.model_fields
    by_alias = {(fields[name].alias or name) if name in fields else name: value for name, value in values.items()}
    try:
        return Settings(**by_alias)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        format="%(asctime)s %(levelname)s %(name)s - %(message)s",
    )


@lru_cache
def get_settings() -> Settings:
    settings = Settings()
    configure_logging(settings.log_level)
    return settings
