import hashlib
import math
from typing import List, Optional, Sequence

from cda_abm.core.book import OrderBook
from cda_abm.core.errors import ContractViolationError
from cda_abm.core.types import PriceStats, encode_ints


def _ratio(num: int, den: int) -> float:
    # exact-integer sums can outgrow a float once prices run away
    try:
        return num / den
    except OverflowError:
        return math.copysign(math.inf, -1 if num < 0 else 1)


class PriceHistory:
    """
    Ring buffer of mid-prices P^t, in ticks.

    Time starts at -1: P^{-1} is the anchor price seeded at construction, and
    step t records P^t. Running sums are exact integers so the summary
    statistics are platform independent.
    """

    def __init__(self, initial: int, capacity: int, fundamental: int, series_stride: int = 0):
        if capacity < 2:
            raise ContractViolationError(f"PriceHistory capacity must be >= 2, got {capacity}")
        self.capacity = capacity
        self.fundamental = fundamental
        self.series_stride = series_stride
        self._buf: List[int] = [initial] * capacity
        self.t = -1
        self._buf[self._slot(-1)] = initial

        self.series: List[int] = []
        self._digest = hashlib.sha256()
        self._n = 0
        self._sum = 0
        self._sumsq = 0
        self._abs_dev = 0
        self._min: Optional[int] = None
        self._max: Optional[int] = None

    def _slot(self, t: int) -> int:
        return (t + 1) % self.capacity

    def record(self, t: int, price: int):
        if t != self.t + 1:
            raise ContractViolationError(f"P^{t} recorded out of order (last recorded t={self.t})")
        self._buf[self._slot(t)] = price
        self.t = t

        self._digest.update(encode_ints(price))
        self._n += 1
        self._sum += price
        self._sumsq += price * price
        self._abs_dev += abs(price - self.fundamental)
        if self._min is None or price < self._min:
            self._min = price
        if self._max is None or price > self._max:
            self._max = price
        if self.series_stride and t % self.series_stride == 0:
            self.series.append(price)

    def lookup(self, t: int) -> int:
        """P^t for -1 <= t <= current time, within the buffer window."""
        if t < -1 or t > self.t or self.t - t >= self.capacity:
            raise IndexError(f"P^{t} not available (current t={self.t}, capacity={self.capacity})")
        return self._buf[self._slot(t)]

    @property
    def latest(self) -> int:
        return self._buf[self._slot(self.t)]

    def checksum(self) -> str:
        return self._digest.hexdigest()

    def stats(self, tick_size: float) -> PriceStats:
        n = self._n
        if n == 0:
            anchor = self.latest * tick_size
            return PriceStats(count=0, mean=anchor, std=0.0, min=anchor, max=anchor,
                              mean_abs_deviation_from_fundamental=abs(self.latest - self.fundamental) * tick_size)
        var_ticks = _ratio(n * self._sumsq - self._sum * self._sum, n * (n - 1)) if n > 1 else 0.0
        return PriceStats(
            count=n,
            mean=_ratio(self._sum, n) * tick_size,
            std=math.sqrt(max(var_ticks, 0.0)) * tick_size,
            min=self._min * tick_size,
            max=self._max * tick_size,
            mean_abs_deviation_from_fundamental=_ratio(self._abs_dev, n) * tick_size,
        )


def record_step(history: PriceHistory, book: OrderBook, t: int, fallback_chain: Sequence[Optional[int]]) -> int:
    """Records the mid-price at step t, falling back to the first available price in `fallback_chain`."""
    fallback = next((p for p in fallback_chain if p is not None), history.latest)
    price = book.mid_price(fallback)
    history.record(t, price)
    return price
