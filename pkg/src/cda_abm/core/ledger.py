import hashlib
from typing import Dict, List, Optional

from cda_abm.core.types import Trade, TradeLogDigest, encode_ints


class Ledger:
    """
    Cash and share positions of every agent, in ticks and shares.

    Every trade is applied symmetrically to buyer and seller, so the totals
    over all agents stay at zero.
    """

    def __init__(self, n_agents: int, record_trades: bool = False):
        self.cash: List[int] = [0] * n_agents
        self.position: List[int] = [0] * n_agents
        self.trade_count = 0
        self.shares_traded = 0
        self.last_price: Optional[int] = None
        self.record_trades = record_trades
        self.trades: List[Trade] = []
        self._digest = hashlib.sha256()

    def apply(self, trade: Trade):
        notional = trade.price * trade.size
        self.cash[trade.buyer] -= notional
        self.cash[trade.seller] += notional
        self.position[trade.buyer] += trade.size
        self.position[trade.seller] -= trade.size

        self.trade_count += 1
        self.shares_traded += trade.size
        self.last_price = trade.price
        self._digest.update(encode_ints(trade.time, trade.price, trade.size, trade.buyer, trade.seller))
        if self.record_trades:
            self.trades.append(trade)

    def apply_all(self, trades: List[Trade]):
        for trade in trades:
            self.apply(trade)

    def totals(self) -> Dict[str, int]:
        return {"cash": sum(self.cash), "shares": sum(self.position)}

    def digest(self) -> TradeLogDigest:
        return TradeLogDigest(count=self.trade_count, checksum=self._digest.hexdigest())
