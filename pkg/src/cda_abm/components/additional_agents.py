from typing import Optional

from cda_abm.core.history import PriceHistory
from cda_abm.core.interfaces import BaseAdditionalAgentStrategy
from cda_abm.core.types import AAAction, NO_ACTION
from cda_abm.registry import registry


def _buy_to_long(position: int) -> AAAction:
    # flat -> buy 1, short -> buy 2, already long -> nothing
    return NO_ACTION if position >= 1 else AAAction.buy(1 - position)


def _sell_to_short(position: int) -> AAAction:
    return NO_ACTION if position <= -1 else AAAction.sell(position + 1)


def afa_decide(best_ask: Optional[int], best_bid: Optional[int], fundamental: int, position: int) -> AAAction:
    """Buy when the best ask is below the fundamental, sell when the best bid is above it."""
    if best_ask is not None and best_ask < fundamental:
        return _buy_to_long(position)
    if best_bid is not None and best_bid > fundamental:
        return _sell_to_short(position)
    return NO_ACTION


def ata_decide(best_ask: Optional[int], best_bid: Optional[int], lagged: int, position: int, history_ready: bool) -> AAAction:
    """Buy when the best ask is above the lagged mid-price, sell when the best bid is below it."""
    if not history_ready:
        return NO_ACTION
    if best_ask is not None and best_ask > lagged:
        return _buy_to_long(position)
    if best_bid is not None and best_bid < lagged:
        return _sell_to_short(position)
    return NO_ACTION


@registry.strategy("afa")
class FundamentalAdditionalAgent(BaseAdditionalAgentStrategy):
    """Trades the gap between the best quote and the fundamental value."""

    def __init__(self, fundamental: int, **_):
        self.fundamental = fundamental

    def decide(self, best_bid, best_ask, position, history: PriceHistory, t: int) -> AAAction:
        return afa_decide(best_ask, best_bid, self.fundamental, position)


@registry.strategy("ata")
class TechnicalAdditionalAgent(BaseAdditionalAgentStrategy):
    """Follows the move of the best quote against the mid-price `lag` steps ago."""

    def __init__(self, lag: int, **_):
        self.lag = lag

    def decide(self, best_bid, best_ask, position, history: PriceHistory, t: int) -> AAAction:
        ready = t >= self.lag
        lagged = history.lookup(t - self.lag) if ready else 0
        return ata_decide(best_ask, best_bid, lagged, position, ready)
