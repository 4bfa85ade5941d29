import os

import numpy as np

WORKERS_ENV = "COLLAPSIM_WORKERS"


def trial_seed(seed: int, stream: int, trial: int) -> int:
    """Derive an integer seed for one trial of one stream

    Args:
        seed (int): Top-level run seed
        stream (int): Stream identifier (one per experiment stage)
        trial (int): Trial index within the stream

    Returns:
        int: 64-bit seed that depends only on (seed, stream, trial)
    """
    if seed < 0 or stream < 0 or trial < 0:
        raise ValueError(
            f"Seed components must be non-negative, got {(seed, stream, trial)}"
        )
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(stream, trial))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def trial_rng(seed: int, stream: int, trial: int) -> np.random.Generator:
    """Independent generator for one trial; adding trials never shifts earlier ones"""
    return np.random.default_rng(trial_seed(seed, stream, trial))


def worker_count() -> int:
    """Number of trial workers, from COLLAPSIM_WORKERS or the CPU count"""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return max(1, min(8, os.cpu_count() or 1))
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}")
    if value < 1:
        raise ValueError(f"{WORKERS_ENV} must be at least 1, got {value}")
    return value


def next_power_of_two(n: int) -> int:
    if n < 1:
        return 1
    return 1 << (int(n) - 1).bit_length()
