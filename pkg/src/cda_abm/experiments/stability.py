"""
Paired-seed stability comparison.

Each pair runs the same seed without additional agents and with `n_a` agents
of one kind. The RNG substream contract keeps normal-agent draws identical
within a pair, so the difference in price std is attributable to the AAs.
"""

import logging
from typing import List, Optional

from pydantic import BaseModel

from cda_abm.config.models import SimConfig
from cda_abm.core.types import AgentKind
from cda_abm.experiments.sweep import resolve_workers, run_configs

logger = logging.getLogger(__name__)


class PairedOutcome(BaseModel):
    seed: int
    baseline_std: float
    treated_std: float
    baseline_mad: float
    treated_mad: float

    @property
    def delta(self) -> float:
        return self.treated_std - self.baseline_std


class StabilityReport(BaseModel):
    kind: AgentKind
    n_a: int
    outcomes: List[PairedOutcome]

    @property
    def fraction_lower(self) -> float:
        return sum(o.treated_std < o.baseline_std for o in self.outcomes) / len(self.outcomes)

    @property
    def fraction_higher(self) -> float:
        return sum(o.treated_std > o.baseline_std for o in self.outcomes) / len(self.outcomes)


def run_paired_stability(base: SimConfig, kind: AgentKind, n_a: int, seeds: List[int], workers: Optional[int] = None) -> StabilityReport:
    configs = []
    for seed in seeds:
        configs.append(base.with_updates(aa_kind=AgentKind.NONE, n_a=0, seed=seed))
        configs.append(base.with_updates(aa_kind=kind, n_a=n_a, seed=seed))
    results = run_configs(configs, resolve_workers(workers))

    outcomes = []
    for seed, baseline, treated in zip(seeds, results[0::2], results[1::2]):
        outcomes.append(PairedOutcome(
            seed=seed,
            baseline_std=baseline.price_stats.std,
            treated_std=treated.price_stats.std,
            baseline_mad=baseline.price_stats.mean_abs_deviation_from_fundamental,
            treated_mad=treated.price_stats.mean_abs_deviation_from_fundamental,
        ))
    report = StabilityReport(kind=kind, n_a=n_a, outcomes=outcomes)
    logger.info(
        f"[Stability] {kind.value}x{n_a}: lower std in {report.fraction_lower:.0%}, "
        f"higher in {report.fraction_higher:.0%} of {len(seeds)} pairs"
    )
    return report
