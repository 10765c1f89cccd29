import pytest

from cda_abm.components.additional_agents import FundamentalAdditionalAgent, TechnicalAdditionalAgent
from cda_abm.core.engine import MarketSimulator, create_observer, create_strategy, mark_to_fundamental, run_simulation
from cda_abm.core.errors import ConfigError, MarketDivergedError
from cda_abm.core.interfaces import SimulationObserver
from cda_abm.core.types import AdditionalAgentState, AgentKind


class CountingObserver(SimulationObserver):
    def __init__(self):
        self.steps = []
        self.trades = 0
        self.aa_actions = 0

    def on_trades(self, trades, t):
        self.trades += len(trades)

    def on_aa_action(self, state, action, trades, t):
        self.aa_actions += 1

    def on_step_end(self, book, t, mid_price):
        self.steps.append(t)


class TestMarkToFundamental:
    def _state(self, position, cash):
        return AdditionalAgentState(index=1, kind=AgentKind.AFA, agent_id=0, slot=1, activation_loop=1, position=position, cash=cash)

    def test_long(self):
        assert mark_to_fundamental(self._state(1, -9990), 10000) == 10

    def test_short(self):
        assert mark_to_fundamental(self._state(-1, 10010), 10000) == 10

    def test_flat(self):
        assert mark_to_fundamental(self._state(0, 123), 10000) == 123


def test_create_strategy_uses_registry(make_config):
    assert isinstance(create_strategy(make_config(aa_kind="afa", n_a=1)), FundamentalAdditionalAgent)
    ata = create_strategy(make_config(aa_kind="ata", n_a=1, ta=250))
    assert isinstance(ata, TechnicalAdditionalAgent)
    assert ata.lag == 250


def test_one_loop_without_additional_agents(make_config):
    cfg = make_config(t_e=20)
    result = run_simulation(cfg)

    assert result.na_orders == cfg.n
    assert result.price_stats.count == cfg.n
    assert result.aa_ledger == []
    assert result.mean_profit_per_aa is None


def test_clock_advances_once_per_na_order(tiny_config):
    observer = CountingObserver()
    sim = MarketSimulator(tiny_config, observer=observer)
    sim.run()
    assert observer.steps == list(range(tiny_config.t_e))
    assert sim.history.t == tiny_config.t_e - 1


def test_same_seed_same_result(make_config):
    cfg = make_config(aa_kind="ata", n_a=4)
    a, b = run_simulation(cfg), run_simulation(cfg)
    assert a.price_checksum == b.price_checksum
    assert a.trade_digest == b.trade_digest
    assert a.aa_ledger == b.aa_ledger
    assert a.price_stats == b.price_stats


def test_different_seed_different_prices(make_config):
    assert run_simulation(make_config(seed=1)).price_checksum != run_simulation(make_config(seed=2)).price_checksum


def test_zero_additional_agents_reproduces_baseline(make_config):
    baseline = run_simulation(make_config())
    reduced = run_simulation(make_config(aa_kind="ata", n_a=0))
    assert baseline.price_checksum == reduced.price_checksum
    assert baseline.trade_digest == reduced.trade_digest


def test_normal_agents_unchanged_by_additional_agents(make_config):
    plain = MarketSimulator(make_config())
    with_aas = MarketSimulator(make_config(aa_kind="afa", n_a=5))
    assert plain.agents == with_aas.agents


def test_trading_happens_after_warm_up(tiny_config):
    result = run_simulation(tiny_config)
    assert result.trade_digest.count > 0


@pytest.mark.parametrize("kind", ["afa", "ata"])
def test_accounting_invariants_with_additional_agents(make_config, kind):
    observer = CountingObserver()
    sim = MarketSimulator(make_config(aa_kind=kind, n_a=5, ta=50), observer=observer)
    result = sim.run()

    assert sim.ledger.totals() == {"cash": 0, "shares": 0}
    assert all(s.position in (-1, 0, 1) for s in sim.aa_states)
    assert observer.aa_actions > 0
    assert observer.trades == result.trade_digest.count
    for entry, state in zip(result.aa_ledger, sim.aa_states):
        assert entry.position == sim.ledger.position[state.agent_id]
        assert entry.profit == pytest.approx((state.cash + state.position * sim.config.fundamental_ticks) * sim.config.tick_size)


def test_staggered_activation_times(make_config):
    cfg = make_config(aa_kind="afa", n_a=3)
    sim = MarketSimulator(cfg)
    result = sim.run()

    events = [e for e in result.trace.events if e.action == "aa_activated"]
    assert [e.details["aa_index"] for e in events] == [1, 2, 3]
    for event, state in zip(events, sim.aa_states):
        assert event.time == (state.activation_loop - 1) * cfg.n + state.slot - 1


def test_no_resting_order_outlives_cancellation_time(tiny_config):
    sim = MarketSimulator(tiny_config)
    sim.run()
    last = tiny_config.t_e - 1
    assert all(last - o.placed_at < tiny_config.t_c for o in sim.book.resting_orders())
    assert sim.expired > 0


def test_optional_outputs(make_config):
    result = run_simulation(make_config(series_stride=10, record_trades=True))
    assert len(result.price_series) == 200
    assert len(result.trades) == result.trade_digest.count

    plain = run_simulation(make_config())
    assert plain.price_series is None
    assert plain.trades is None


def test_step_reads_previous_recorded_price(make_config, monkeypatch):
    import cda_abm.core.engine as engine

    seen_prev = []
    real = engine.expected_return

    def spy(params, fundamental, p_prev, p_lagged, epsilon, t):
        seen_prev.append(p_prev)
        return real(params, fundamental, p_prev, p_lagged, epsilon, t)

    monkeypatch.setattr(engine, "expected_return", spy)
    cfg = make_config(t_e=600, series_stride=1)
    result = run_simulation(cfg)

    assert len(seen_prev) == cfg.t_e
    assert seen_prev[0] == cfg.fundamental_ticks * cfg.tick_size
    # P^{t-1} recorded at the end of step t-1 is the previous price used at step t
    assert seen_prev[1:] == [p * cfg.tick_size for p in result.price_series[:-1]]


def test_slot_groups_follow_schedule(make_config):
    sim = MarketSimulator(make_config(aa_kind="ata", n_a=60))
    grouped = sim.schedule.by_slot()
    assert {slot - 1 for slot in grouped} == set(sim._by_slot)
    for slot, entries in grouped.items():
        assert [s.index for s in sim._by_slot[slot - 1]] == [e.aa_index for e in entries]


def test_runaway_prices_raise_divergence(make_config, monkeypatch):
    monkeypatch.setattr("cda_abm.core.engine.expected_return", lambda *args: 1e6)
    with pytest.raises(MarketDivergedError):
        run_simulation(make_config(t_e=50))


def test_create_observer_by_name(make_config):
    cfg = make_config()
    observer = create_observer("invariants", cfg)
    assert observer.t_c == cfg.t_c
    assert observer.problems() == []
    with pytest.raises(ConfigError):
        create_observer("missing", cfg)
