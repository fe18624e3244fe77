"""Deterministic substream derivation for every randomized component.

All randomness in the package flows through PCG64 generators derived from a
user-facing master seed plus a short integer key naming the purpose (and,
where relevant, a trial or round index).  Distinct keys give statistically
independent streams, and the derivation depends only on the key, never on
execution order or worker count, so parallel fan-outs reproduce sequential
results bit for bit.
"""

from __future__ import annotations

import numpy as np

# Purpose tags: first component of every spawn key.
GNP_EDGES = 0
AUDIT_SINGLES = 1
AUDIT_PAIRS = 2
CANDIDATE = 3
FAILURE_TRIAL = 4
CENSUS_SET = 5
CAMPAIGN_TRIAL = 6


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for (master_seed, key), independent across keys."""
    if master_seed < 0:
        raise ValueError("master seed must be non-negative")
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))


def derive_seed(master_seed: int, *key: int) -> int:
    """A 63-bit integer seed for (master_seed, key); stable across runs."""
    return int(substream(master_seed, *key).integers(0, 2**63 - 1))
