import hashlib

from cda_abm.core.types import AgentKind


def derive_cell_seed(seed: int, kind: AgentKind, n_a: int, index: int, paired: bool = False) -> int:
    """
    Stable 64-bit seed for one sweep cell: the first 8 bytes (big-endian) of
    BLAKE2b over "seed:kind:n_a:index". In paired mode kind and n_a are left
    out so every cell of a seed shares the same normal-agent randomness.
    """
    text = f"{seed}:{index}" if paired else f"{seed}:{kind.value}:{n_a}:{index}"
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")
