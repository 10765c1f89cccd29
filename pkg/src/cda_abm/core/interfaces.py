from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, List, Optional

from cda_abm.core.book import OrderBook
from cda_abm.core.history import PriceHistory
from cda_abm.core.types import AAAction, AdditionalAgentState, Trade

if TYPE_CHECKING:
    from cda_abm.config.models import SimConfig


class BaseAdditionalAgentStrategy(ABC):
    """Decision rule shared by every additional agent of one kind."""

    @abstractmethod
    def decide(
        self,
        best_bid: Optional[int],
        best_ask: Optional[int],
        position: int,
        history: PriceHistory,
        t: int,
    ) -> AAAction:
        pass


class SimulationObserver(ABC):
    """Optional hooks into the run loop. Implementations must not mutate engine state."""

    @classmethod
    def from_config(cls, config: "SimConfig") -> "SimulationObserver":
        return cls()

    def problems(self) -> List[str]:
        """Anything the observer wants reported once the run is over."""
        return []

    def on_trades(self, trades: List[Trade], t: int):
        pass

    def on_aa_action(self, state: AdditionalAgentState, action: AAAction, trades: List[Trade], t: int):
        pass

    @abstractmethod
    def on_step_end(self, book: OrderBook, t: int, mid_price: int):
        pass
