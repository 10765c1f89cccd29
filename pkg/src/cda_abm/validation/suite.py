"""
Invariant suite behind `cda-abm validate`.

Each check runs a small instance and returns a CheckResult instead of
raising, so the CLI can report every failure at once.
"""

import dataclasses
import logging
from typing import List, Optional

from pydantic import BaseModel

from cda_abm.config.models import SimConfig
from cda_abm.core.book import OrderBook
from cda_abm.core.engine import MarketSimulator, run_simulation
from cda_abm.core.interfaces import SimulationObserver
from cda_abm.core.types import AAAction, AdditionalAgentState, AgentKind, Trade
from cda_abm.registry import registry
from cda_abm.utils.config import config
from cda_abm.validation.reference import ReferenceMatcher, random_order_stream

logger = logging.getLogger(__name__)


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


@registry.observer("invariants")
class InvariantObserver(SimulationObserver):
    """
    Records violations of the book and accounting invariants during a run.

    The uncrossed-book check runs every step; the resting-age scan runs every
    `scan_every` steps because it walks the whole book.
    """

    def __init__(self, t_c: int, scan_every: int = 1000, max_violations: int = 20):
        self.t_c = t_c
        self.scan_every = scan_every
        self.max_violations = max_violations
        self.violations: List[str] = []
        self.trades_seen = 0
        self.aa_actions = 0

    @classmethod
    def from_config(cls, config: SimConfig) -> "InvariantObserver":
        return cls(t_c=config.t_c)

    def problems(self) -> List[str]:
        return list(self.violations)

    def _flag(self, message: str):
        if len(self.violations) < self.max_violations:
            self.violations.append(message)

    def on_trades(self, trades: List[Trade], t: int):
        for tr in trades:
            self.trades_seen += 1
            if tr.size < 1 or tr.price < 1:
                self._flag(f"t={t}: malformed trade {tr}")
            if tr.time != t:
                self._flag(f"t={t}: trade stamped at {tr.time}")

    def on_aa_action(self, state: AdditionalAgentState, action: AAAction, trades: List[Trade], t: int):
        self.aa_actions += 1
        if state.position not in (-1, 0, 1):
            self._flag(f"t={t}: AA {state.index} position {state.position}")

    def on_step_end(self, book: OrderBook, t: int, mid_price: int):
        bid, ask = book.best_bid(), book.best_ask()
        if bid is not None and ask is not None and bid >= ask:
            self._flag(f"t={t}: crossed book bid={bid} ask={ask}")
        if self.scan_every and t % self.scan_every == 0:
            self.scan_ages(book, t)

    def scan_ages(self, book: OrderBook, t: int):
        for order in book.resting_orders():
            if t - order.placed_at >= self.t_c:
                self._flag(f"t={t}: order {order.id} placed at {order.placed_at} still resting")
                break


def small_config(kind: AgentKind = AgentKind.NONE, n_a: Optional[int] = None, seed: int = 42) -> SimConfig:
    """A scaled-down config for fast checks."""
    v = config.get("validation", {})
    if n_a is None:
        n_a = 0 if kind is AgentKind.NONE else v.get("run_n_a", 10)
    return SimConfig.from_profile(
        "scaled",
        n=v.get("run_n", 50),
        t_e=v.get("run_t_e", 20000),
        t_c=v.get("run_t_c", 500),
        tau_max=v.get("run_tau_max", 500),
        ta=v.get("run_ta", 1000),
        aa_kind=kind,
        n_a=n_a,
        seed=seed,
    )


def check_oracle_equivalence(count: int, seed: int) -> CheckResult:
    book, oracle = OrderBook(), ReferenceMatcher()
    for i, order in enumerate(random_order_stream(seed, count)):
        book.expire_orders(order.placed_at)
        oracle.expire(order.placed_at)
        got = book.submit_limit(dataclasses.replace(order))
        want = oracle.submit_limit(dataclasses.replace(order))
        if got != want:
            return CheckResult(name="oracle_equivalence", passed=False, detail=f"order #{i}: {got} != {want}")
        if (book.best_bid(), book.best_ask()) != (oracle.best_bid(), oracle.best_ask()):
            return CheckResult(name="oracle_equivalence", passed=False, detail=f"order #{i}: quotes diverged")
    return CheckResult(name="oracle_equivalence", passed=True, detail=f"{count} orders, identical trade logs")


def check_run_invariants(sim_config: SimConfig) -> CheckResult:
    name = f"invariants[{sim_config.aa_kind.value}x{sim_config.n_a}]"
    observer = InvariantObserver(t_c=sim_config.t_c)
    sim = MarketSimulator(sim_config, observer=observer)
    sim.run()
    observer.scan_ages(sim.book, sim_config.t_e - 1)
    totals = sim.ledger.totals()
    if totals["cash"] != 0 or totals["shares"] != 0:
        observer.violations.append(f"ledger totals not zero: {totals}")
    for state in sim.aa_states:
        if state.position not in (-1, 0, 1):
            observer.violations.append(f"AA {state.index} final position {state.position}")
    if observer.violations:
        return CheckResult(name=name, passed=False, detail="; ".join(observer.violations[:3]))
    return CheckResult(name=name, passed=True, detail=f"{observer.trades_seen} trades, {observer.aa_actions} AA actions")


def check_determinism(sim_config: SimConfig) -> CheckResult:
    a, b = run_simulation(sim_config), run_simulation(sim_config)
    same = (
        a.price_checksum == b.price_checksum
        and a.trade_digest == b.trade_digest
        and a.aa_ledger == b.aa_ledger
    )
    detail = f"trade checksum {a.trade_digest.checksum[:16]}"
    return CheckResult(name="determinism", passed=same, detail=detail if same else "runs diverged")


def check_reduction(sim_config: SimConfig) -> CheckResult:
    """An AA kind with n_a = 0 must reproduce the run with no AA kind at all."""
    baseline = run_simulation(sim_config.with_updates(aa_kind=AgentKind.NONE, n_a=0))
    reduced = run_simulation(sim_config.with_updates(aa_kind=AgentKind.ATA, n_a=0))
    same = (
        baseline.price_checksum == reduced.price_checksum
        and baseline.trade_digest == reduced.trade_digest
        and baseline.price_stats == reduced.price_stats
    )
    return CheckResult(name="reduction", passed=same, detail="n_a=0 matches no-AA build" if same else "n_a=0 diverged")


def run_validation_suite(seed: int = 42, oracle_orders: Optional[int] = None) -> List[CheckResult]:
    v = config.get("validation", {})
    results = [check_oracle_equivalence(oracle_orders or v.get("oracle_orders", 10000), v.get("oracle_seed", 7))]
    for kind in (AgentKind.NONE, AgentKind.AFA, AgentKind.ATA):
        results.append(check_run_invariants(small_config(kind, seed=seed)))
    results.append(check_determinism(small_config(AgentKind.ATA, seed=seed)))
    results.append(check_reduction(small_config(AgentKind.NONE, seed=seed)))
    for r in results:
        logger.info(f"[Validate] {r.name}: {'ok' if r.passed else 'FAILED'} {r.detail}")
    return results
