"""
Brute-force reference matcher.

Keeps resting orders in one flat list and recomputes the best counterparty
by linear scan on every fill. Slow by construction; used as the oracle for
the order book.
"""

from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from cda_abm.core.types import Order, Side, Trade


@dataclass
class _Resting:
    seq: int
    side: Side
    price: int
    remaining: int
    owner: int
    placed_at: int
    expires_at: Optional[int]


class ReferenceMatcher:
    def __init__(self):
        self._resting: List[_Resting] = []
        self._seq = 0

    def expire(self, now: int) -> int:
        before = len(self._resting)
        self._resting = [r for r in self._resting if r.expires_at is None or r.expires_at > now]
        return before - len(self._resting)

    def best_bid(self) -> Optional[int]:
        bids = [r.price for r in self._resting if r.side is Side.BUY]
        return max(bids) if bids else None

    def best_ask(self) -> Optional[int]:
        asks = [r.price for r in self._resting if r.side is Side.SELL]
        return min(asks) if asks else None

    def submit_limit(self, order: Order) -> List[Trade]:
        trades, remaining = self._take(order.side, order.size, order.owner, order.placed_at, order.price)
        if remaining:
            self._seq += 1
            self._resting.append(_Resting(self._seq, order.side, order.price, remaining, order.owner, order.placed_at, order.expires_at))
        return trades

    def submit_marketable(self, side: Side, size: int, owner: int, time: int) -> List[Trade]:
        trades, _ = self._take(side, size, owner, time, None)
        return trades

    def _best_counterparty(self, side: Side, limit: Optional[int]) -> Optional[_Resting]:
        best = None
        for r in self._resting:
            if r.side is side:
                continue
            if limit is not None and (r.price > limit if side is Side.BUY else r.price < limit):
                continue
            if best is None:
                best = r
                continue
            better_price = r.price < best.price if side is Side.BUY else r.price > best.price
            same_price = r.price == best.price
            if better_price or (same_price and (r.placed_at, r.seq) < (best.placed_at, best.seq)):
                best = r
        return best

    def _take(self, side: Side, quantity: int, owner: int, time: int, limit: Optional[int]) -> Tuple[List[Trade], int]:
        trades = []
        while quantity:
            maker = self._best_counterparty(side, limit)
            if maker is None:
                break
            qty = min(quantity, maker.remaining)
            if side is Side.BUY:
                trades.append(Trade(buyer=owner, seller=maker.owner, price=maker.price, size=qty, time=time))
            else:
                trades.append(Trade(buyer=maker.owner, seller=owner, price=maker.price, size=qty, time=time))
            maker.remaining -= qty
            quantity -= qty
            if maker.remaining == 0:
                self._resting.remove(maker)
        return trades, quantity

    def __len__(self):
        return len(self._resting)


def random_order_stream(
    seed: int,
    count: int,
    center: int = 1_000_000,
    band: float = 0.05,
    n_owners: int = 50,
    max_life: int = 500,
) -> Iterator[Order]:
    """
    Random limit orders: prices within +/- `band` of `center` ticks, sizes 1 or 2,
    one order per time step, random lifetimes in [1, max_life].
    """
    rng = np.random.default_rng(seed)
    lo, hi = int(center * (1 - band)), int(center * (1 + band))
    sides = rng.integers(0, 2, size=count)
    prices = rng.integers(lo, hi, size=count, endpoint=True)
    sizes = rng.integers(1, 2, size=count, endpoint=True)
    owners = rng.integers(0, n_owners, size=count)
    lives = rng.integers(1, max_life, size=count, endpoint=True)
    for t in range(count):
        yield Order(
            id=t + 1,
            side=Side.BUY if sides[t] == 0 else Side.SELL,
            price=int(prices[t]),
            size=int(sizes[t]),
            owner=int(owners[t]),
            placed_at=t,
            expires_at=t + int(lives[t]),
        )
