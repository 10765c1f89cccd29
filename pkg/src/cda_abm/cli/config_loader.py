"""
Loads simulation/sweep settings from a flat key=value file or YAML.

Flat files hold one `key=value` per line; `#` starts a comment. Keys mirror
SimConfig and SweepSpec fields; lists are comma separated.
"""

import yaml
from pathlib import Path
from typing import Any, Dict, List, Optional

from cda_abm.config.models import SimConfig, SweepSpec
from cda_abm.core.errors import ConfigError
from cda_abm.utils.config import config

SWEEP_KEYS = {"na_values", "aa_kinds", "seeds", "n_seeds", "base_seed", "outputs", "paired", "write_run_files", "workers", "profile", "paper_scale"}
LIST_KEYS = {"na_values", "aa_kinds", "seeds"}


def _coerce(raw: str) -> Any:
    value = raw.strip()
    if value.lower() in ("true", "false"):
        return value.lower() == "true"
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def parse_assignments(lines: List[str], source: str = "<args>") -> Dict[str, Any]:
    data: Dict[str, Any] = {}
    for lineno, line in enumerate(lines, 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {line.strip()!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in LIST_KEYS:
            data[key] = [_coerce(v) for v in value.split(",") if v.strip()]
        else:
            data[key] = _coerce(value)
    return data


class ConfigLoader:
    """
    Loads cda-abm configuration files and turns them into validated models.
    """

    @staticmethod
    def load_config(path: Path) -> Dict[str, Any]:
        if not path.exists():
            raise ConfigError(f"Config file {path} not found")
        text = path.read_text()
        if path.suffix in (".yaml", ".yml"):
            data = yaml.safe_load(text) or {}
            if not isinstance(data, dict):
                raise ConfigError(f"{path}: expected a mapping at top level")
            return data
        return parse_assignments(text.splitlines(), source=str(path))

    @staticmethod
    def split(data: Dict[str, Any]):
        """Separates simulation fields from sweep fields."""
        sim = {k: v for k, v in data.items() if k not in SWEEP_KEYS}
        sweep = {k: v for k, v in data.items() if k in SWEEP_KEYS}
        return sim, sweep

    @classmethod
    def create_sim_config(cls, data: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None, paper_scale: bool = False) -> SimConfig:
        sim, sweep = cls.split(data)
        profile = "paper" if paper_scale or sweep.get("paper_scale") else sweep.get("profile", "scaled")
        merged = dict(sim)
        merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return SimConfig.from_profile(profile, **merged)

    @classmethod
    def create_sweep_spec(
        cls,
        data: Dict[str, Any],
        overrides: Optional[Dict[str, Any]] = None,
        sweep_overrides: Optional[Dict[str, Any]] = None,
        paper_scale: bool = False,
    ) -> SweepSpec:
        base = cls.create_sim_config(data, overrides, paper_scale)
        _, sweep = cls.split(data)
        sweep.update({k: v for k, v in (sweep_overrides or {}).items() if v is not None})

        seeds = sweep.get("seeds")
        if not seeds:
            n_seeds = int(sweep.get("n_seeds", config.get("sweep.n_seeds", 30)))
            base_seed = int(sweep.get("base_seed", config.get("sweep.base_seed", 1)))
            seeds = list(range(base_seed, base_seed + n_seeds))
        return SweepSpec.parse({
            "base": base,
            "na_values": sweep.get("na_values", config.get("sweep.na_values")),
            "aa_kinds": sweep.get("aa_kinds", config.get("sweep.aa_kinds")),
            "seeds": seeds,
            "outputs": sweep.get("outputs", "sweep_out"),
            "paired": sweep.get("paired", config.get("sweep.paired", False)),
            "write_run_files": sweep.get("write_run_files", config.get("sweep.write_run_files", True)),
            "workers": sweep.get("workers"),
        })
