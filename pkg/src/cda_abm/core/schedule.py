from typing import Dict, List

import numpy as np
from pydantic import BaseModel, Field

from cda_abm.core.errors import ConfigError


class ScheduleEntry(BaseModel):
    aa_index: int          # 1-based, in order of addition
    activation_loop: int   # loop in which the AA acts for the first time
    slot: int              # position within each loop, in [1, n]


class Schedule(BaseModel):
    """When each additional agent acts within the NA loop."""
    n: int
    entries: List[ScheduleEntry] = Field(default_factory=list)

    def by_slot(self) -> Dict[int, List[ScheduleEntry]]:
        """Entries grouped by slot; agents sharing a slot act in ascending index order."""
        grouped: Dict[int, List[ScheduleEntry]] = {}
        for entry in sorted(self.entries, key=lambda e: e.aa_index):
            grouped.setdefault(entry.slot, []).append(entry)
        return grouped

    def __len__(self):
        return len(self.entries)


def build_schedule(rng: np.random.Generator, n: int, n_a: int, activation: str = "staggered") -> Schedule:
    """
    Draws a fixed slot for each AA.

    With "staggered" activation AA k joins in loop k, so AAs are added one by
    one; "all" activates every AA from the first loop.
    """
    if n_a < 0:
        raise ConfigError(f"n_a must be >= 0, got {n_a}")
    if activation not in ("staggered", "all"):
        raise ConfigError(f"Unknown activation mode {activation!r}")
    slots = rng.integers(1, n, size=n_a, endpoint=True).tolist() if n_a else []
    entries = [
        ScheduleEntry(aa_index=k, activation_loop=k if activation == "staggered" else 1, slot=slot)
        for k, slot in enumerate(slots, start=1)
    ]
    return Schedule(n=n, entries=entries)
