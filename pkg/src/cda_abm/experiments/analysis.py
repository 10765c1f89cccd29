"""Trend statistics over sweep rows: profit-vs-population and trade-count shape."""

import math
from typing import Dict, List, Optional

from pydantic import BaseModel
from scipy import stats

from cda_abm.core.types import AgentKind, SweepRow


class TradeShape(BaseModel):
    """How fast per-AA trade counts fall at small n_a versus later."""
    at_first: float
    at_knee: float
    early_drop: float           # relative drop from the first n_a to the knee
    late_relative_change: float  # relative change from late_start to the last n_a

    @property
    def rapid_then_stable(self) -> bool:
        return self.at_knee < 0.8 * self.at_first and self.late_relative_change < self.early_drop


class TrendReport(BaseModel):
    kind: AgentKind
    na_values: List[int]
    profits: List[float]
    spearman_rho: Optional[float] = None
    spearman_p: Optional[float] = None
    first_profit: Optional[float] = None
    last_profit: Optional[float] = None
    trade_shape: Optional[TradeShape] = None

    @property
    def profit_increases(self) -> bool:
        return self.spearman_rho is not None and self.spearman_rho > 0.8 and (self.last_profit or 0.0) > 0

    @property
    def profit_decreases(self) -> bool:
        return (
            self.spearman_rho is not None
            and self.spearman_rho < 0
            and self.first_profit is not None
            and self.last_profit is not None
            and self.last_profit < self.first_profit
        )


def trade_count_shape(rows: List[SweepRow], knee: int = 20, late_start: int = 40) -> Optional[TradeShape]:
    by_na: Dict[int, float] = {r.n_a: r.mean_trades_per_aa for r in rows if r.n_a > 0 and r.mean_trades_per_aa is not None}
    if not by_na or knee not in by_na or late_start not in by_na:
        return None
    first_na, last_na = min(by_na), max(by_na)
    first, at_knee = by_na[first_na], by_na[knee]
    late, last = by_na[late_start], by_na[last_na]
    if first <= 0 or late <= 0:
        return None
    return TradeShape(
        at_first=first,
        at_knee=at_knee,
        early_drop=(first - at_knee) / first,
        late_relative_change=abs(last - late) / late,
    )


def evaluate_sweep(rows: List[SweepRow]) -> List[TrendReport]:
    reports = []
    for kind in sorted({r.aa_kind for r in rows}, key=lambda k: k.value):
        kind_rows = sorted((r for r in rows if r.aa_kind is kind and r.mean_profit_per_aa is not None), key=lambda r: r.n_a)
        na_values = [r.n_a for r in kind_rows]
        profits = [r.mean_profit_per_aa for r in kind_rows]
        report = TrendReport(kind=kind, na_values=na_values, profits=profits)
        if len(kind_rows) >= 2:
            rho, p = stats.spearmanr(na_values, profits)
            if not math.isnan(rho):  # constant input
                report.spearman_rho = float(rho)
                report.spearman_p = float(p)
        if kind_rows:
            report.first_profit = profits[0]
            report.last_profit = profits[-1]
        report.trade_shape = trade_count_shape(kind_rows)
        reports.append(report)
    return reports
