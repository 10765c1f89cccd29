"""
The run loop.

Normal agents act in fixed cyclic order and each NA order advances the clock
by one. Additional agents act right after the NA at their slot, inside the
same step, with marketable orders. P^t is recorded once all activity at t is
done.
"""

import itertools
import logging
from typing import Dict, List, Optional

from cda_abm.components.normal_agents import decide_order, expected_return, sample_normal_agent
from cda_abm.config.models import SimConfig
from cda_abm.core.book import OrderBook, round_to_tick
from cda_abm.core.errors import ConfigError, MarketDivergedError
from cda_abm.core.history import PriceHistory, record_step
from cda_abm.core.interfaces import BaseAdditionalAgentStrategy, SimulationObserver
from cda_abm.core.ledger import Ledger
from cda_abm.core.rng import STREAM_NA_PARAMS, STREAM_NA_STEPS, STREAM_SCHEDULE, BufferedDraws, substream
from cda_abm.core.schedule import Schedule, build_schedule
from cda_abm.core.types import (
    AdditionalAgentState,
    AgentLedgerEntry,
    NormalAgentParams,
    Order,
    RunResult,
    SimulationTrace,
)
from cda_abm.registry import registry

logger = logging.getLogger(__name__)


def mark_to_fundamental(state: AdditionalAgentState, fundamental: int) -> int:
    """Terminal profit: cash plus holdings valued at the fundamental price."""
    return state.cash + state.position * fundamental


def create_strategy(config: SimConfig) -> BaseAdditionalAgentStrategy:
    # Force load registered strategies
    import cda_abm.components  # noqa

    strategy_cls = registry.get_strategy(config.aa_kind.value)
    if strategy_cls is None:
        available = list(registry.list_all()["strategy"].keys())
        raise ConfigError(f"No strategy registered for '{config.aa_kind.value}'. Available: {available}")
    return strategy_cls(fundamental=config.fundamental_ticks, lag=config.ta)


def create_observer(name: str, config: SimConfig) -> SimulationObserver:
    # Force load registered observers
    import cda_abm.validation.suite  # noqa

    observer_cls = registry.get_observer(name)
    if observer_cls is None:
        available = list(registry.list_all()["observer"].keys())
        raise ConfigError(f"No observer registered for '{name}'. Available: {available}")
    return observer_cls.from_config(config)


class MarketSimulator:
    def __init__(self, config: SimConfig, observer: Optional[SimulationObserver] = None):
        self.config = config
        self.observer = observer
        self.trace = SimulationTrace()

        seed = config.seed
        self.agents: List[NormalAgentParams] = [
            sample_normal_agent(substream(seed, STREAM_NA_PARAMS, j), config.w1_max, config.w2_max, config.w3_max, config.tau_max)
            for j in range(config.n)
        ]
        self.draws = [BufferedDraws(substream(seed, STREAM_NA_STEPS, j)) for j in range(config.n)]

        if config.has_additional_agents:
            self.schedule = build_schedule(substream(seed, STREAM_SCHEDULE), config.n, config.n_a, config.activation)
            self.strategy: Optional[BaseAdditionalAgentStrategy] = create_strategy(config)
        else:
            self.schedule = Schedule(n=config.n)
            self.strategy = None

        self.aa_states: List[AdditionalAgentState] = [
            AdditionalAgentState(
                index=e.aa_index,
                kind=config.aa_kind,
                agent_id=config.n + e.aa_index - 1,
                slot=e.slot,
                activation_loop=e.activation_loop,
            )
            for e in self.schedule.entries
        ]
        # keyed by the 0-based NA index that acts at the slot
        states = {s.index: s for s in self.aa_states}
        self._by_slot: Dict[int, List[AdditionalAgentState]] = {
            slot - 1: [states[e.aa_index] for e in entries] for slot, entries in self.schedule.by_slot().items()
        }

        fundamental = config.fundamental_ticks
        self.book = OrderBook()
        self.ledger = Ledger(config.n + len(self.aa_states), record_trades=config.record_trades)
        self.history = PriceHistory(fundamental, config.history_capacity, fundamental, config.series_stride)
        self._order_ids = itertools.count(1)
        self.na_no_orders = 0
        self.expired = 0
        self.aa_skipped = 0

    def run(self) -> RunResult:
        cfg = self.config
        tick = cfg.tick_size
        p_f = cfg.fundamental
        f_ticks = cfg.fundamental_ticks
        n, t_c, spread, noise_std = cfg.n, cfg.t_c, cfg.price_spread, cfg.noise_std
        book, ledger, history = self.book, self.ledger, self.history
        agents, draws, by_slot, observer = self.agents, self.draws, self._by_slot, self.observer
        activated = set()

        logger.info(f"[Engine] Starting run seed={cfg.seed} kind={cfg.aa_kind.value} n_a={len(self.aa_states)} t_e={cfg.t_e}")
        self.trace.add("engine", "run_start", time=0, seed=cfg.seed, kind=cfg.aa_kind.value, n_a=len(self.aa_states), t_e=cfg.t_e)

        for t in range(cfg.t_e):
            self.expired += book.expire_orders(t)

            j = t % n
            params = agents[j]
            epsilon = draws[j].normal() * noise_std
            rho = draws[j].uniform()
            try:
                p_prev = history.latest * tick
                p_lagged = history.lookup(t - params.tau - 1) * tick if t >= params.tau else p_prev
                r = expected_return(params, p_f, p_prev, p_lagged, epsilon, t)
                intent = decide_order(params, p_prev, r, rho, spread, t, t_c, p_f)
            except OverflowError as e:
                logger.warning(f"[Engine] Prices diverged at t={t} seed={cfg.seed}")
                raise MarketDivergedError(f"Prices diverged at t={t} (last mid-price {history.latest} ticks)") from e
            if intent is None:
                self.na_no_orders += 1
            else:
                order = Order(
                    id=next(self._order_ids),
                    side=intent.side,
                    price=round_to_tick(intent.price, intent.side, tick),
                    size=intent.size,
                    owner=j,
                    placed_at=t,
                    expires_at=t + t_c,
                )
                trades = book.submit_limit(order)
                if trades:
                    ledger.apply_all(trades)
                    if observer:
                        observer.on_trades(trades, t)

            if by_slot:
                group = by_slot.get(j)
                if group:
                    loop = t // n + 1
                    for state in group:
                        if loop < state.activation_loop:
                            continue
                        if state.index not in activated:
                            activated.add(state.index)
                            self.trace.add("engine", "aa_activated", time=t, aa_index=state.index, slot=state.slot, loop=loop)
                        self._act(state, t)

            mid = record_step(history, book, t, (ledger.last_price, f_ticks))
            if observer:
                observer.on_step_end(book, t, mid)

        if self.aa_skipped:
            self.trace.add("engine", "aa_skipped", time=cfg.t_e - 1, count=self.aa_skipped, reason="empty_opposite_side")
        result = self._result()
        self.trace.add("engine", "run_end", time=cfg.t_e - 1, trades=ledger.trade_count, expired=self.expired)
        logger.info(
            f"[Engine] Finished seed={cfg.seed}: {ledger.trade_count} trades, "
            f"price std={result.price_stats.std:.4f}, trade checksum={result.trade_digest.checksum[:12]}"
        )
        return result.model_copy(update={"trace": self.trace})

    def _act(self, state: AdditionalAgentState, t: int):
        action = self.strategy.decide(self.book.best_bid(), self.book.best_ask(), state.position, self.history, t)
        if action.is_noop:
            return
        trades = self.book.submit_marketable(action.side, action.shares, state.agent_id, t)
        if not trades:
            self.aa_skipped += 1
        else:
            self.ledger.apply_all(trades)
            state.trades += 1
            state.position = self.ledger.position[state.agent_id]
            state.cash = self.ledger.cash[state.agent_id]
            if self.observer:
                self.observer.on_trades(trades, t)
        if self.observer:
            self.observer.on_aa_action(state, action, trades, t)

    def _result(self) -> RunResult:
        cfg = self.config
        tick = cfg.tick_size
        entries = [
            AgentLedgerEntry(
                aa_index=s.index,
                kind=s.kind,
                slot=s.slot,
                activation_loop=s.activation_loop,
                position=s.position,
                cash=s.cash * tick,
                profit=mark_to_fundamental(s, cfg.fundamental_ticks) * tick,
                trades=s.trades,
            )
            for s in self.aa_states
        ]
        trades = None
        if cfg.record_trades:
            trades = [
                {"time": tr.time, "price": tr.price, "size": tr.size, "buyer": tr.buyer, "seller": tr.seller}
                for tr in self.ledger.trades
            ]
        return RunResult(
            seed=cfg.seed,
            kind=cfg.aa_kind,
            n_a=len(self.aa_states),
            t_e=cfg.t_e,
            tick_size=tick,
            price_stats=self.history.stats(tick),
            price_checksum=self.history.checksum(),
            trade_digest=self.ledger.digest(),
            aa_ledger=entries,
            na_orders=cfg.t_e,
            na_no_orders=self.na_no_orders,
            expired_orders=self.expired,
            series_stride=cfg.series_stride,
            price_series=list(self.history.series) if cfg.series_stride else None,
            trades=trades,
        )


def run_simulation(config: SimConfig, observer: Optional[SimulationObserver] = None) -> RunResult:
    return MarketSimulator(config, observer=observer).run()
