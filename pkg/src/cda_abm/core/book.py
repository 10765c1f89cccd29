"""
Continuous double auction order book.

Prices are integer tick counts. Resting orders are kept per price level in
insertion order, so iterating a level yields time priority; levels are kept
in a SortedDict so the best price is an O(log n) lookup.
"""

import heapq
import logging
import math
from collections import OrderedDict
from typing import Dict, Iterator, List, Optional, Tuple

from sortedcontainers import SortedDict

from cda_abm.core.errors import ContractViolationError, MarketDivergedError
from cda_abm.core.types import Order, Side, Trade

logger = logging.getLogger(__name__)

# Absolute slack, in ticks, when deciding whether raw_price / tick_size is
# already integral. Widened to a few ulps for very large prices.
_TICK_EPS = 1e-9


def round_to_tick(raw_price: float, side: Side, tick_size: float) -> int:
    """
    Rounds a raw currency price onto the tick grid.

    Buy prices are rounded down and sell prices up. The result is clamped to
    one tick so a degenerate low price never becomes zero or negative.
    """
    q = raw_price / tick_size
    if not math.isfinite(q):
        raise MarketDivergedError(f"Order price {raw_price!r} is not finite")
    nearest = round(q)
    if abs(q - nearest) <= max(_TICK_EPS, 4 * math.ulp(q)):
        ticks = int(nearest)
    elif side is Side.BUY:
        ticks = math.floor(q)
    else:
        ticks = math.ceil(q)
    return max(1, ticks)


class OrderBook:
    """Price-time priority book for a single instrument."""

    def __init__(self):
        self._bids: SortedDict = SortedDict()  # price -> OrderedDict[id, Order]
        self._asks: SortedDict = SortedDict()
        self._orders: Dict[int, Order] = {}
        self._expiry: List[Tuple[int, int]] = []  # (expires_at, order id)

    # ----- quotes -------------------------------------------------------

    def best_bid(self) -> Optional[int]:
        return self._bids.peekitem(-1)[0] if self._bids else None

    def best_ask(self) -> Optional[int]:
        return self._asks.peekitem(0)[0] if self._asks else None

    def mid_price(self, fallback: int) -> int:
        """Mean of best bid and ask, rounded half up to a tick; `fallback` if a side is empty."""
        if not self._bids or not self._asks:
            return fallback
        return (self.best_bid() + self.best_ask() + 1) // 2

    # ----- order entry --------------------------------------------------

    def submit_limit(self, order: Order) -> List[Trade]:
        """Crosses `order` against the opposite side, then rests any remainder."""
        if order.price < 1 or order.size < 1:
            raise ContractViolationError(f"Malformed limit order {order.id}: price={order.price} size={order.size}")
        if order.id in self._orders:
            raise ContractViolationError(f"Duplicate order id {order.id}")

        trades, filled = self._cross(order.side, order.remaining, order.owner, order.placed_at, limit=order.price)
        order.remaining -= filled
        if order.remaining > 0:
            self._rest(order)
        return trades

    def submit_marketable(self, side: Side, size: int, owner: int, time: int) -> List[Trade]:
        """Takes up to `size` shares at resting prices, best first. Unfilled shares are discarded."""
        if size < 1:
            raise ContractViolationError(f"Marketable order size must be >= 1, got {size}")
        trades, _ = self._cross(side, size, owner, time, limit=None)
        return trades

    def expire_orders(self, now: int) -> int:
        """Removes every resting order with expires_at <= now; returns how many were removed."""
        removed = 0
        while self._expiry and self._expiry[0][0] <= now:
            _, oid = heapq.heappop(self._expiry)
            order = self._orders.get(oid)
            if order is None:
                continue  # already filled
            self._remove(order)
            removed += 1
        return removed

    # ----- introspection ------------------------------------------------

    def resting_orders(self) -> Iterator[Order]:
        for side in (self._bids, self._asks):
            for level in side.values():
                yield from level.values()

    def depth(self, side: Side) -> int:
        book_side = self._bids if side is Side.BUY else self._asks
        return sum(o.remaining for level in book_side.values() for o in level.values())

    def __len__(self):
        return len(self._orders)

    # ----- internals ----------------------------------------------------

    def _cross(self, side: Side, quantity: int, owner: int, time: int, limit: Optional[int]) -> Tuple[List[Trade], int]:
        trades: List[Trade] = []
        filled = 0
        is_buy = side is Side.BUY
        opposite = self._asks if is_buy else self._bids

        while filled < quantity and opposite:
            price, level = opposite.peekitem(0 if is_buy else -1)
            if limit is not None and (price > limit if is_buy else price < limit):
                break
            while filled < quantity and level:
                maker = next(iter(level.values()))
                qty = min(quantity - filled, maker.remaining)
                if is_buy:
                    trades.append(Trade(buyer=owner, seller=maker.owner, price=price, size=qty, time=time))
                else:
                    trades.append(Trade(buyer=maker.owner, seller=owner, price=price, size=qty, time=time))
                maker.remaining -= qty
                filled += qty
                if maker.remaining == 0:
                    level.popitem(last=False)
                    del self._orders[maker.id]
            if not level:
                del opposite[price]
        return trades, filled

    def _rest(self, order: Order):
        book_side = self._bids if order.side is Side.BUY else self._asks
        level = book_side.get(order.price)
        if level is None:
            level = OrderedDict()
            book_side[order.price] = level
        level[order.id] = order
        self._orders[order.id] = order
        if order.expires_at is not None:
            heapq.heappush(self._expiry, (order.expires_at, order.id))

    def _remove(self, order: Order):
        book_side = self._bids if order.side is Side.BUY else self._asks
        level = book_side[order.price]
        del level[order.id]
        if not level:
            del book_side[order.price]
        del self._orders[order.id]
