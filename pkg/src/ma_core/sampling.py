"""Deterministic sample points in the positive orthant."""

import math

import numpy as np
from scipy.stats import qmc

DEFAULT_SEED = 42
DEFAULT_SAMPLES = 64
DEFAULT_LOW = 0.5
DEFAULT_HIGH = 2.0
PROBE_COUNT = 8
PROBE_SEED = 20240101


def sobol_points(
    n: int,
    count: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    low: float = DEFAULT_LOW,
    high: float = DEFAULT_HIGH,
) -> np.ndarray:
    """
    ``count`` scrambled Sobol points in [low, high]^n, shape (count, n).

    A power-of-two block is drawn and truncated, which keeps the sequence
    prefix-stable and avoids scipy's balance warning.
    """
    if n < 1 or count < 1:
        raise ValueError(f"Need n >= 1 and count >= 1, got n={n}, count={count}")
    sampler = qmc.Sobol(d=n, scramble=True, seed=seed)
    unit = sampler.random_base2(m=max(0, math.ceil(math.log2(count))))[:count]
    return qmc.scale(unit, [low] * n, [high] * n)


def probe_points(n: int) -> np.ndarray:
    """Fixed quasi-random base points used for intercept-variation checks."""
    return sobol_points(n, PROBE_COUNT, seed=PROBE_SEED)


def random_points(
    n: int,
    count: int,
    rng: np.random.Generator,
    low: float = DEFAULT_LOW,
    high: float = DEFAULT_HIGH,
) -> np.ndarray:
    """Uniform random points in [low, high]^n drawn from ``rng``."""
    return rng.uniform(low, high, size=(count, n))
