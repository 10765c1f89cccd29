import pytest

from cda_abm.core.engine import MarketSimulator, run_simulation
from cda_abm.core.errors import MarketDivergedError
from cda_abm.validation.suite import InvariantObserver, run_validation_suite


@pytest.mark.parametrize("kind,n_a", [("none", 0), ("afa", 1), ("afa", 8), ("ata", 1), ("ata", 8)])
@pytest.mark.parametrize("seed", [1, 7, 2024])
def test_invariants_hold_throughout_run(make_config, kind, n_a, seed):
    cfg = make_config(aa_kind=kind, n_a=n_a, seed=seed, ta=50, activation="all")
    observer = InvariantObserver(t_c=cfg.t_c, scan_every=100)
    sim = MarketSimulator(cfg, observer=observer)
    result = sim.run()
    observer.scan_ages(sim.book, cfg.t_e - 1)

    assert observer.violations == []
    assert sim.ledger.totals() == {"cash": 0, "shares": 0}
    assert result.na_orders == cfg.t_e
    assert result.price_stats.count == cfg.t_e
    assert sum(e.trades for e in result.aa_ledger) <= observer.trades_seen


def test_validation_suite_passes():
    results = run_validation_suite(seed=5, oracle_orders=3000)
    assert [r.name for r in results if not r.passed] == []
    assert len(results) == 6


def test_first_additional_agent_cannot_move_earlier_prices(make_config):
    base = make_config(series_stride=1)
    treated_sim = MarketSimulator(base.with_updates(aa_kind="afa", n_a=1))
    plain = run_simulation(base)
    treated = treated_sim.run()

    first_slot = treated_sim.aa_states[0].slot
    # the AA first acts at t = slot - 1; every P^t before that is NA-only
    assert plain.price_series[: first_slot - 1] == treated.price_series[: first_slot - 1]


def test_thin_book_run_ends_cleanly(make_config):
    # short-lived orders thin the book and let the technical term run prices away
    try:
        result = run_simulation(make_config(t_c=20))
    except MarketDivergedError:
        return
    assert result.price_stats.count == 2000
    assert len(result.price_checksum) == 64
