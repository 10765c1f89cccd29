from hypothesis import HealthCheck, assume, given, settings, strategies as st

from cda_abm.components.additional_agents import (
    FundamentalAdditionalAgent,
    TechnicalAdditionalAgent,
    afa_decide,
    ata_decide,
)
from cda_abm.core.history import PriceHistory
from cda_abm.core.types import AAAction, NO_ACTION
from cda_abm.registry import registry


class TestFundamentalAgent:
    def test_buys_one_when_flat(self):
        assert afa_decide(best_ask=9990, best_bid=None, fundamental=10000, position=0) == AAAction.buy(1)

    def test_buys_two_when_short(self):
        assert afa_decide(best_ask=9990, best_bid=None, fundamental=10000, position=-1) == AAAction.buy(2)

    def test_holds_when_already_long(self):
        assert afa_decide(best_ask=9990, best_bid=None, fundamental=10000, position=1) == NO_ACTION

    def test_sells_when_bid_above_fundamental(self):
        assert afa_decide(best_ask=None, best_bid=10010, fundamental=10000, position=0) == AAAction.sell(1)
        assert afa_decide(best_ask=None, best_bid=10010, fundamental=10000, position=1) == AAAction.sell(2)
        assert afa_decide(best_ask=None, best_bid=10010, fundamental=10000, position=-1) == NO_ACTION

    def test_spread_straddles_fundamental(self):
        assert afa_decide(best_ask=10005, best_bid=9995, fundamental=10000, position=0).is_noop

    def test_empty_book(self):
        assert afa_decide(None, None, 10000, 0).is_noop


class TestTechnicalAgent:
    def test_buys_when_ask_above_lagged(self):
        assert ata_decide(best_ask=10010, best_bid=None, lagged=10000, position=0, history_ready=True) == AAAction.buy(1)

    def test_short_sells_two_when_long(self):
        assert ata_decide(best_ask=None, best_bid=9990, lagged=10000, position=1, history_ready=True) == AAAction.sell(2)

    def test_no_action_before_lag_is_defined(self):
        assert ata_decide(best_ask=10010, best_bid=9990, lagged=10000, position=0, history_ready=False).is_noop

    def test_strategy_reads_lagged_price_from_history(self):
        history = PriceHistory(initial=10000, capacity=10, fundamental=10000)
        for t, p in enumerate([10000, 10000, 9000, 10000, 10000]):
            history.record(t, p)
        agent = TechnicalAdditionalAgent(lag=3)

        # at t=5 the lagged price is P^2 = 9000
        assert agent.decide(best_bid=9400, best_ask=9500, position=0, history=history, t=5) == AAAction.buy(1)
        assert agent.decide(best_bid=9400, best_ask=9500, position=0, history=history, t=2).is_noop


def test_strategies_are_registered():
    assert registry.get_strategy("afa") is FundamentalAdditionalAgent
    assert registry.get_strategy("ata") is TechnicalAdditionalAgent
    assert FundamentalAdditionalAgent(fundamental=10000, lag=5).fundamental == 10000


_price = st.integers(1, 20000)


@given(bid=_price, ask=_price, position=st.sampled_from([-1, 0, 1]))
@settings(suppress_health_check=[HealthCheck.filter_too_much])
def test_fundamental_agent_idle_inside_the_spread(bid, ask, position):
    fundamental = 10000
    assume(bid < fundamental < ask)
    assert afa_decide(best_ask=ask, best_bid=bid, fundamental=fundamental, position=position) == NO_ACTION


@given(bid=st.one_of(st.none(), _price), ask=st.one_of(st.none(), _price), lagged=_price)
def test_technical_agent_trades_with_the_move(bid, ask, lagged):
    action = ata_decide(best_ask=ask, best_bid=bid, lagged=lagged, position=0, history_ready=True)
    if ask is not None and ask > lagged:
        assert action == AAAction.buy(1)
    elif bid is not None and bid < lagged:
        assert action == AAAction.sell(1)
    else:
        assert action == NO_ACTION
