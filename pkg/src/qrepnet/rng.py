"""Deterministic random-number streams.

Every stochastic routine in the package draws from a generator created
here. A (master seed, stream index) pair maps to one PCG64 generator via
SeedSequence spawn keys, so a run is reproducible bit for bit no matter
how trials are batched or which worker executes a batch: batch ``k`` of a
sweep always uses stream ``k``, and results are combined as integer counts,
which is order independent.
"""
from __future__ import annotations

import os

import numpy as np

BATCH_SIZE = 4096
_WORKERS_ENV = "QREPNET_WORKERS"


def stream_generator(master_seed: int, stream: int = 0) -> np.random.Generator:
    """Return the PCG64 generator for one logical stream of a run."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


def batch_sizes(total: int, batch: int = BATCH_SIZE) -> list[int]:
    """Split a trial count into fixed-size batches (last one may be short)."""
    if total < 0:
        raise ValueError("total must be non-negative")
    full, rem = divmod(total, batch)
    return [batch] * full + ([rem] if rem else [])


def worker_count(default: int = 1) -> int:
    """Worker processes to use; the QREPNET_WORKERS variable overrides."""
    raw = os.environ.get(_WORKERS_ENV)
    if raw is None:
        return default
    value = int(raw)
    if value < 1:
        raise ValueError(f"{_WORKERS_ENV} must be >= 1, got {raw!r}")
    return value
