"""Simulated test processes: first-order Hammerstein and pure LTI plants."""

import copy
import math

import numpy as np

from .core import ConfigError, seeded_rng


class PlantDivergenceError(FloatingPointError):
    pass


def _atan(gain):
    norm = math.atan(gain)
    return lambda u: math.atan(gain * u) / norm


def _tanh(gain):
    norm = math.tanh(gain)
    return lambda u: math.tanh(gain * u) / norm


def _cubic(gain):
    # u + g*u^3, scaled so f(1) = 1
    return lambda u: (u + gain * u**3) / (1.0 + gain)


NONLINEARITIES = {"atan": _atan, "tanh": _tanh, "cubic": _cubic}


class PlantModel:
    """``y(k) = a_p*y(k-1) + b_p*f(u(k-1))`` with static map ``f``.

    ``kind="lti"`` uses ``f(u) = u``. Output noise, when ``noise_std > 0``,
    is added to the returned measurement only; the internal state stays
    noise-free.
    """

    def __init__(self, kind="hammerstein", a_p=0.8, b_p=0.2, nonlinearity="atan",
                 gain=3.0, y0=0.0, noise_std=0.0, seed=0, input_box=None):
        if kind not in ("hammerstein", "lti"):
            raise ConfigError(f"unknown plant kind {kind!r}")
        if not abs(a_p) < 1.0:
            raise ConfigError(f"plant pole must satisfy |a_p| < 1, got {a_p}")
        if noise_std < 0:
            raise ConfigError("noise_std must be >= 0")
        if kind == "hammerstein":
            if nonlinearity not in NONLINEARITIES:
                raise ConfigError(
                    f"unknown nonlinearity {nonlinearity!r}; "
                    f"choose from {sorted(NONLINEARITIES)}"
                )
            if not gain > 0:
                raise ConfigError("nonlinearity gain must be positive")
            self.f = NONLINEARITIES[nonlinearity](float(gain))
        else:
            self.f = lambda u: u
        self.kind = kind
        self.a_p = float(a_p)
        self.b_p = float(b_p)
        self.nonlinearity = nonlinearity if kind == "hammerstein" else "identity"
        self.gain = float(gain)
        self.y0 = float(y0)
        self.y = float(y0)
        self.noise_std = float(noise_std)
        self.seed = int(seed)
        self.input_box = None if input_box is None else tuple(map(float, input_box))
        self._rng = seeded_rng(self.seed, 0x9E1A) if noise_std > 0 else None

    def reset(self, y0=None):
        self.y = self.y0 if y0 is None else float(y0)
        if self._rng is not None:
            self._rng = seeded_rng(self.seed, 0x9E1A)

    def clone(self):
        return copy.deepcopy(self)

    def steady_state(self, u):
        return self.b_p * self.f(float(u)) / (1.0 - self.a_p)

    def step(self, u):
        """Apply ``u`` and return the next (measured) output."""
        u = float(u)
        if self.input_box is not None and not (self.input_box[0] <= u <= self.input_box[1]):
            raise ValueError(f"plant input {u} outside {self.input_box}")
        y = self.a_p * self.y + self.b_p * self.f(u)
        if not math.isfinite(y):
            raise PlantDivergenceError(f"plant output became non-finite at input {u}")
        self.y = y
        if self._rng is not None:
            return y + self.noise_std * float(self._rng.standard_normal())
        return y

    def __repr__(self):
        return (f"PlantModel(kind={self.kind!r}, a_p={self.a_p}, b_p={self.b_p}, "
                f"nonlinearity={self.nonlinearity!r}, gain={self.gain})")


def process_distribution(plant, U, y0=None, u0=0.0):
    """True input-space points ``z(j) = [u(j), y(j)]`` for ``j = 0..N``.

    ``U`` holds ``u(1..N)``; ``u0`` is the input at time 0. The plant is
    reset to ``y0`` (default: its configured initial output) first.
    """
    u = np.concatenate(([float(u0)], np.asarray(getattr(U, "samples", U), dtype=float).ravel()))
    plant.reset(y0)
    y = np.empty_like(u)
    y[0] = plant.y
    for j in range(1, len(u)):
        y[j] = plant.step(u[j - 1])
    return np.column_stack((u, y))
