import math
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from cda_abm.core.errors import ConfigError
from cda_abm.core.types import AgentKind
from cda_abm.utils.config import config

_MAX_SEED = 2**64

# Symbol-style spellings accepted in config files and overrides.
ALIASES = {
    "delta_p": "tick_size",
    "p_f": "fundamental",
    "p_d": "price_spread",
    "na": "n_a",
    "kind": "aa_kind",
    "te": "t_e",
}


def canonical_keys(data: Dict[str, Any]) -> Dict[str, Any]:
    return {ALIASES.get(k, k): v for k, v in data.items()}


class SimConfig(BaseModel):
    """
    Parameters of one simulation. Field names spell out the model symbols;
    `parse` also accepts the symbol-style spellings in ALIASES (delta_p, p_f, ...).
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    tick_size: float = Field(0.01, gt=0)
    fundamental: float = Field(10000.0, gt=0)
    n: int = Field(1000, ge=1)
    w1_max: float = Field(1.0, gt=0)
    w2_max: float = Field(100.0, gt=0)
    w3_max: float = Field(1.0, gt=0)
    tau_max: int = Field(10000, ge=1)
    sigma_eps: float = Field(0.03, gt=0)
    sigma_is_variance: bool = False
    price_spread: float = Field(1000.0, gt=0)
    t_c: int = Field(10000, ge=1)
    n_a: int = Field(0, ge=0)
    aa_kind: AgentKind = Field(AgentKind.NONE)
    ta: int = Field(100000, ge=1)
    t_e: int = Field(2_000_000, ge=1)
    seed: int = 1
    activation: str = "staggered"
    series_stride: int = Field(0, ge=0)
    record_trades: bool = False

    @field_validator("aa_kind", mode="before")
    @classmethod
    def _lower_kind(cls, v: Any) -> Any:
        return v.lower() if isinstance(v, str) else v

    @field_validator("seed")
    @classmethod
    def _seed_range(cls, v: int) -> int:
        if not 0 <= v < _MAX_SEED:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {v}")
        return v

    @field_validator("activation")
    @classmethod
    def _activation_mode(cls, v: str) -> str:
        if v not in ("staggered", "all"):
            raise ValueError(f"activation must be 'staggered' or 'all', got {v!r}")
        return v

    @model_validator(mode="after")
    def _cross_field(self) -> "SimConfig":
        if self.t_e < self.n:
            raise ValueError(f"t_e ({self.t_e}) must be >= n ({self.n})")
        if self.aa_kind is AgentKind.NONE and self.n_a > 0:
            raise ValueError(f"aa_kind 'none' requires n_a = 0, got n_a={self.n_a}")
        ticks = self.fundamental / self.tick_size
        if abs(ticks - round(ticks)) > 1e-9 * max(1.0, ticks):
            raise ValueError(f"fundamental {self.fundamental} is not a multiple of tick_size {self.tick_size}")
        return self

    @property
    def fundamental_ticks(self) -> int:
        return int(round(self.fundamental / self.tick_size))

    @property
    def noise_std(self) -> float:
        return math.sqrt(self.sigma_eps) if self.sigma_is_variance else self.sigma_eps

    @property
    def has_additional_agents(self) -> bool:
        return self.aa_kind is not AgentKind.NONE and self.n_a > 0

    @property
    def history_capacity(self) -> int:
        return max(self.tau_max, self.ta) + 2

    @classmethod
    def parse(cls, data: Dict[str, Any]) -> "SimConfig":
        """Builds a config, turning validation failures into ConfigError."""
        try:
            return cls.model_validate(canonical_keys(data))
        except ValidationError as e:
            raise ConfigError(_summarize(e)) from e

    @classmethod
    def from_profile(cls, name: str = "scaled", **overrides: Any) -> "SimConfig":
        try:
            data = config.profile(name)
        except KeyError as e:
            raise ConfigError(str(e.args[0])) from e
        data.update({k: v for k, v in canonical_keys(overrides).items() if v is not None})
        return cls.parse(data)

    def with_updates(self, **updates: Any) -> "SimConfig":
        data = self.model_dump()
        data.update(updates)
        return SimConfig.parse(data)


class SweepSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    base: SimConfig
    na_values: List[int]
    aa_kinds: List[AgentKind]
    seeds: List[int]
    outputs: Path
    paired: bool = False
    write_run_files: bool = True
    workers: Optional[int] = None

    @field_validator("na_values")
    @classmethod
    def _ascending(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("na_values must not be empty")
        if any(x < 0 for x in v):
            raise ValueError("na_values must be >= 0")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError(f"na_values must be strictly ascending, got {v}")
        return v

    @field_validator("aa_kinds", mode="before")
    @classmethod
    def _lower_kinds(cls, v: Any) -> Any:
        if isinstance(v, (list, tuple)):
            return [x.lower() if isinstance(x, str) else x for x in v]
        return v

    @field_validator("aa_kinds")
    @classmethod
    def _kinds(cls, v: List[AgentKind]) -> List[AgentKind]:
        if not v:
            raise ValueError("aa_kinds must not be empty")
        if AgentKind.NONE in v:
            raise ValueError("aa_kinds may only contain 'afa' and 'ata'")
        return list(dict.fromkeys(v))

    @field_validator("seeds")
    @classmethod
    def _distinct_seeds(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("seeds must not be empty")
        if len(set(v)) != len(v):
            raise ValueError("seeds must be distinct")
        if any(not 0 <= s < _MAX_SEED for s in v):
            raise ValueError("seeds must be unsigned 64-bit integers")
        return v

    @classmethod
    def parse(cls, data: Dict[str, Any]) -> "SweepSpec":
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(_summarize(e)) from e


def _summarize(e: ValidationError) -> str:
    parts = []
    for err in e.errors():
        loc = ".".join(str(x) for x in err.get("loc", ())) or "config"
        parts.append(f"{loc}: {err.get('msg')}")
    return "; ".join(parts)
