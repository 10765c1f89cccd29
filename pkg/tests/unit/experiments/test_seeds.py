import hashlib

from cda_abm.core.types import AgentKind
from cda_abm.experiments.seeds import derive_cell_seed


def test_matches_blake2b_prefix():
    want = int.from_bytes(hashlib.blake2b(b"1:ata:20:0", digest_size=8).digest(), "big")
    assert derive_cell_seed(1, AgentKind.ATA, 20, 0) == want


def test_cells_get_distinct_seeds():
    seeds = {derive_cell_seed(s, k, n_a, i) for s in (1, 2) for k in (AgentKind.AFA, AgentKind.ATA) for n_a in (0, 1, 20) for i in range(3)}
    assert len(seeds) == 2 * 2 * 3 * 3
    assert all(0 <= s < 2**64 for s in seeds)


def test_paired_mode_ignores_kind_and_population():
    a = derive_cell_seed(5, AgentKind.AFA, 1, 2, paired=True)
    b = derive_cell_seed(5, AgentKind.ATA, 99, 2, paired=True)
    assert a == b
    assert a != derive_cell_seed(5, AgentKind.AFA, 1, 3, paired=True)
