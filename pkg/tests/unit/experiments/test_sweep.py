import os
from pathlib import Path

import pytest

from cda_abm.config.models import SweepSpec
from cda_abm.core.engine import run_simulation
from cda_abm.core.types import AgentKind
from cda_abm.experiments.io import read_sweep_summary
from cda_abm.experiments.stability import run_paired_stability
from cda_abm.experiments.sweep import THREADS_ENV, aggregate_cell, available_cores, cell_config, plan_cells, resolve_workers, run_sweep


@pytest.fixture
def spec(make_config, tmp_path):
    def _spec(**overrides):
        data = dict(
            base=make_config(t_e=600, t_c=100, tau_max=50, ta=100),
            na_values=[0, 2],
            aa_kinds=["ata"],
            seeds=[1, 2],
            outputs=tmp_path / "out",
            workers=1,
        )
        data.update(overrides)
        return SweepSpec.parse(data)
    return _spec


class TestWorkers:
    def test_env_caps_request(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "2")
        assert resolve_workers(8) == 2
        assert resolve_workers(1) == 1

    def test_bad_env_ignored(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "many")
        assert resolve_workers(3) == 3

    def test_default_is_at_least_one(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV, raising=False)
        assert resolve_workers() >= 1

    def test_default_follows_cpu_affinity(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV, raising=False)
        monkeypatch.setattr(os, "sched_getaffinity", lambda pid: {0, 3, 5}, raising=False)
        monkeypatch.setattr(os, "cpu_count", lambda: 64)
        assert available_cores() == 3
        assert resolve_workers() == 3


class TestPlan:
    def test_one_cell_per_kind_population_and_seed(self, spec):
        cells = plan_cells(spec(aa_kinds=["afa", "ata"], na_values=[0, 1, 5], seeds=[1, 2, 3]))
        assert len(cells) == 18
        assert len({c.cell_seed for c in cells}) == 18

    def test_paired_cells_share_seed_across_populations(self, spec):
        cells = plan_cells(spec(paired=True))
        by_index = {}
        for c in cells:
            by_index.setdefault(c.index, set()).add(c.cell_seed)
        assert all(len(seeds) == 1 for seeds in by_index.values())

    def test_cell_config(self, spec):
        s = spec()
        cell = plan_cells(s)[-1]
        cfg = cell_config(s.base, cell)
        assert (cfg.aa_kind, cfg.n_a, cfg.seed) == (AgentKind.ATA, 2, cell.cell_seed)
        assert cfg.t_e == s.base.t_e


def test_aggregate_without_agents(make_config):
    runs = [run_simulation(make_config(seed=s, t_e=200)) for s in (1, 2)]
    row = aggregate_cell(AgentKind.ATA, 0, runs)
    assert row.n_seeds == 2
    assert row.mean_profit_per_aa is None
    assert row.std_err_profit is None
    assert row.mean_trades_per_aa is None
    assert row.price_std == pytest.approx((runs[0].price_stats.std + runs[1].price_stats.std) / 2)


def test_aggregate_with_agents(make_config):
    runs = [run_simulation(make_config(seed=s, aa_kind="ata", n_a=2, ta=50)) for s in (1, 2, 3)]
    row = aggregate_cell(AgentKind.ATA, 2, runs)
    profits = [r.mean_profit_per_aa for r in runs]
    assert row.mean_profit_per_aa == pytest.approx(sum(profits) / 3)
    assert row.mean_total_profit == pytest.approx(sum(r.total_profit for r in runs) / 3)
    assert row.std_err_profit is not None and row.std_err_profit >= 0


def test_run_sweep_writes_summary_and_run_files(spec):
    s = spec()
    seen = []
    rows = run_sweep(s, on_result=lambda cell, result: seen.append((cell.n_a, cell.seed)))

    assert sorted(seen) == [(0, 1), (0, 2), (2, 1), (2, 2)]
    assert [(r.aa_kind, r.n_a) for r in rows] == [(AgentKind.ATA, 0), (AgentKind.ATA, 2)]
    assert rows[0].mean_profit_per_aa is None
    assert rows[1].mean_trades_per_aa is not None

    out = Path(s.outputs)
    back = read_sweep_summary(out / "sweep_summary.csv")
    assert [r.n_a for r in back] == [0, 2]
    assert back[1].price_std == pytest.approx(rows[1].price_std, abs=1e-6)
    assert (out / "ledger_ata_2_1.csv").exists()
    assert not (out / "prices_ata_2_1.csv").exists()


def test_summary_independent_of_worker_count(spec, tmp_path):
    serial = run_sweep(spec(outputs=tmp_path / "serial", workers=1, write_run_files=False))
    pooled = run_sweep(spec(outputs=tmp_path / "pooled", workers=2, write_run_files=False))
    assert serial == pooled
    assert (tmp_path / "serial" / "sweep_summary.csv").read_text() == (tmp_path / "pooled" / "sweep_summary.csv").read_text()


def test_paired_stability(make_config):
    base = make_config(t_e=600, t_c=100, tau_max=50, ta=100)
    report = run_paired_stability(base, AgentKind.AFA, 3, [1, 2, 3], workers=1)

    assert [o.seed for o in report.outcomes] == [1, 2, 3]
    assert 0.0 <= report.fraction_lower + report.fraction_higher <= 1.0
    baseline = run_simulation(base.with_updates(seed=2))
    assert report.outcomes[1].baseline_std == baseline.price_stats.std
