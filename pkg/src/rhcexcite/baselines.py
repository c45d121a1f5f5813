"""Comparison excitation signals: i.i.d. uniform noise and APRBS."""

import numpy as np

from .core import ConfigError, ExcitationSignal

KINDS = ("uniform-random", "aprbs")


def uniform_random(constraints, N, rng):
    return ExcitationSignal(constraints, rng.uniform(constraints.u_min, constraints.u_max, N))


def aprbs(constraints, N, rng, hold=(5, 10)):
    """Amplitude-modulated PRBS: random hold lengths with uniform levels on the input box."""
    lo, hi = int(hold[0]), int(hold[1])
    if not 1 <= lo <= hi:
        raise ConfigError(f"APRBS hold range must satisfy 1 <= min <= max, got {hold}")
    u = np.empty(N)
    i = 0
    while i < N:
        n = int(rng.integers(lo, hi + 1))
        u[i : i + n] = rng.uniform(constraints.u_min, constraints.u_max)
        i += n
    return ExcitationSignal(constraints, u)


def generate_baseline(kind, constraints, N, rng, hold=(5, 10)):
    if kind == "uniform-random":
        return uniform_random(constraints, N, rng)
    if kind == "aprbs":
        return aprbs(constraints, N, rng, hold)
    raise ConfigError(f"unknown baseline {kind!r}; choose from {KINDS}")
