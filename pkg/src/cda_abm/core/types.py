import time
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional
from pydantic import BaseModel, Field, ConfigDict, field_validator

class Side(str, Enum):
    BUY = "buy"
    SELL = "sell"

class AgentKind(str, Enum):
    AFA = "afa"    # additional fundamental agent
    ATA = "ata"    # additional technical agent
    NONE = "none"  # no additional agents

# Hot-path records are slotted dataclasses; millions are created per run.

@dataclass(slots=True)
class Order:
    """A resting or incoming order. Prices are integer tick counts."""
    id: int
    side: Side
    price: int
    size: int
    owner: int
    placed_at: int
    expires_at: Optional[int] = None  # None = never (marketable AA orders)
    remaining: int = 0

    def __post_init__(self):
        if self.remaining == 0:
            self.remaining = self.size

@dataclass(slots=True, frozen=True)
class Trade:
    buyer: int
    seller: int
    price: int   # maker's price, in ticks
    size: int
    time: int

@dataclass(slots=True, frozen=True)
class OrderIntent:
    """An NA's decision before tick rounding; price is in currency units."""
    side: Side
    price: float
    size: int = 1

@dataclass(slots=True, frozen=True)
class AAAction:
    side: Optional[Side] = None
    shares: int = 0

    @classmethod
    def buy(cls, shares: int) -> "AAAction":
        return cls(Side.BUY, shares)

    @classmethod
    def sell(cls, shares: int) -> "AAAction":
        return cls(Side.SELL, shares)

    @property
    def is_noop(self) -> bool:
        return self.side is None

NO_ACTION = AAAction()

class NormalAgentParams(BaseModel):
    """Per-NA weights of the fundamental, technical and noise terms plus the lookback."""
    model_config = ConfigDict(frozen=True)

    w1: float = Field(gt=0)
    w2: float = Field(gt=0)
    w3: float = Field(gt=0)
    tau: int = Field(ge=1)

    @property
    def weight_sum(self) -> float:
        return self.w1 + self.w2 + self.w3

class AdditionalAgentState(BaseModel):
    """Position and cash of one additional agent. Cash is in ticks."""
    index: int
    kind: AgentKind
    agent_id: int
    slot: int
    activation_loop: int
    position: int = 0
    cash: int = 0
    trades: int = 0

    @field_validator("position")
    @classmethod
    def _bounded_position(cls, v: int) -> int:
        if v not in (-1, 0, 1):
            raise ValueError(f"position {v} outside {{-1, 0, +1}}")
        return v

class TraceEvent(BaseModel):
    """Log entry for run debugging."""
    timestamp: float = Field(default_factory=time.time)
    component: str
    action: str      # e.g. "run_start", "aa_activated", "aa_skipped"
    time: Optional[int] = None
    details: Dict[str, Any] = Field(default_factory=dict)

class SimulationTrace(BaseModel):
    """Coarse event history of one run."""
    events: List[TraceEvent] = Field(default_factory=list)

    def add(self, component: str, action: str, time: Optional[int] = None, **kwargs):
        self.events.append(TraceEvent(component=component, action=action, time=time, details=kwargs))

    def count(self, action: str) -> int:
        return sum(1 for e in self.events if e.action == action)

class PriceStats(BaseModel):
    """Mid-price series statistics, in currency units."""
    count: int
    mean: float
    std: float
    min: float
    max: float
    mean_abs_deviation_from_fundamental: float

def encode_ints(*values: int) -> bytes:
    """Signed big-endian encoding of arbitrary-width integers, each prefixed by its byte length."""
    out = bytearray()
    for v in values:
        width = max(1, (v.bit_length() + 8) // 8)
        out += width.to_bytes(2, "big")
        out += v.to_bytes(width, "big", signed=True)
    return bytes(out)

class TradeLogDigest(BaseModel):
    count: int
    checksum: str

class AgentLedgerEntry(BaseModel):
    aa_index: int
    kind: AgentKind
    slot: int
    activation_loop: int
    position: int
    cash: float
    profit: float
    trades: int

class RunResult(BaseModel):
    """Immutable summary of one simulation."""
    model_config = ConfigDict(frozen=True)

    seed: int
    kind: AgentKind
    n_a: int
    t_e: int
    tick_size: float
    price_stats: PriceStats
    price_checksum: str
    trade_digest: TradeLogDigest
    aa_ledger: List[AgentLedgerEntry] = Field(default_factory=list)
    na_orders: int = 0
    na_no_orders: int = 0
    expired_orders: int = 0
    series_stride: int = 0
    price_series: Optional[List[int]] = None  # ticks, every series_stride-th P^t
    trades: Optional[List[Dict[str, int]]] = None
    trace: SimulationTrace = Field(default_factory=SimulationTrace)

    @property
    def profits(self) -> List[float]:
        return [e.profit for e in self.aa_ledger]

    @property
    def trade_counts(self) -> List[int]:
        return [e.trades for e in self.aa_ledger]

    @property
    def total_profit(self) -> float:
        return sum(self.profits)

    @property
    def mean_profit_per_aa(self) -> Optional[float]:
        return self.total_profit / len(self.aa_ledger) if self.aa_ledger else None

    @property
    def mean_trades_per_aa(self) -> Optional[float]:
        return sum(self.trade_counts) / len(self.aa_ledger) if self.aa_ledger else None

class SweepRow(BaseModel):
    """Aggregate over all seeds of one (kind, n_a) cell. Per-AA fields are None when n_a = 0."""
    aa_kind: AgentKind
    n_a: int
    n_seeds: int
    mean_profit_per_aa: Optional[float] = None
    std_err_profit: Optional[float] = None
    mean_total_profit: Optional[float] = None
    mean_trades_per_aa: Optional[float] = None
    std_err_trades: Optional[float] = None
    price_mean: float
    price_std: float
    price_mad_from_fundamental: float
