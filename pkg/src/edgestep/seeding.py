"""Deterministic random streams.

Every stream is a PCG64 generator keyed by a SeedSequence. Replica ``r`` of a
campaign with master seed ``m`` always receives the stream keyed ``(m, r)``,
so results never depend on worker count or scheduling order.
"""

from __future__ import annotations

import numpy as np

MAX_SEED = 2**64 - 1


def stream(seed: int) -> np.random.Generator:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def replica_stream(master_seed: int, replica: int) -> np.random.Generator:
    if not 0 <= master_seed <= MAX_SEED:
        raise ValueError("seed must be an unsigned 64-bit integer")
    ss = np.random.SeedSequence(master_seed, spawn_key=(replica,))
    return np.random.Generator(np.random.PCG64(ss))
