"""First-order ARX surrogate: simulation into regressor space and OLS refit."""

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import kernels
from .core import ConfigError, SimulationDivergenceError

STABILITY_LIMIT = 0.999


@dataclass(frozen=True)
class SurrogateModel:
    """``y(j) = a*y(j-1) + b*u(j-1)``, started from ``initial_state = [u(0), y(0)]``."""

    a: float = 0.8
    b: float = 0.2
    initial_state: tuple = (0.0, 0.0)

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise ConfigError("surrogate parameters must be finite")
        if abs(a) >= 1.0:
            raise ConfigError(f"surrogate pole must satisfy |a| < 1, got {a}")
        x0 = tuple(float(v) for v in self.initial_state)
        if len(x0) != 2 or not np.all(np.isfinite(x0)):
            raise ConfigError("initial_state must be two finite numbers [u0, y0]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "initial_state", x0)

    @property
    def theta(self):
        return (self.a, self.b)


@dataclass
class IoRecord:
    """Applied inputs and measured outputs; row ``i`` holds ``(u(i), y(i))``."""

    u: list = field(default_factory=list)
    y: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.u) != len(self.y):
            raise ValueError("u and y streams must have equal length")
        self.u = [float(v) for v in self.u]
        self.y = [float(v) for v in self.y]

    def append(self, u, y):
        self.u.append(float(u))
        self.y.append(float(y))

    def __len__(self):
        return len(self.u)


class RefitResult(NamedTuple):
    model: SurrogateModel
    status: str  # "ok", "clipped" or "skipped"


def simulate_outputs(model, inputs):
    """Surrogate outputs ``y(0..n)`` for inputs ``u(0..n-1)``."""
    u = np.ascontiguousarray(inputs, dtype=float)
    y = kernels.ACTIVE.arx_simulate(model.a, model.b, model.initial_state[1], u)
    if not np.all(np.isfinite(y)):
        raise SimulationDivergenceError("surrogate trajectory became non-finite")
    return y


def simulate(model, past, candidate=()):
    """Regressor-space distribution for the past signal plus a horizon candidate.

    Returns the ``(k + L, 2)`` array ``z(0..k+L-1)`` where ``past`` holds
    ``u(1..k-1)`` and ``candidate`` holds ``u(k..k+L-1)``.
    """
    u_past = np.asarray(getattr(past, "samples", past), dtype=float).ravel()
    cand = np.asarray(candidate, dtype=float).ravel()
    if not (np.all(np.isfinite(u_past)) and np.all(np.isfinite(cand))):
        raise ValueError("inputs must be finite")
    u = np.concatenate(([model.initial_state[0]], u_past, cand))
    y = simulate_outputs(model, u[:-1])
    return np.column_stack((u, y))


def one_step_rss(theta, data):
    """Residual sum of squares of one-step predictions on ``data``."""
    u = np.asarray(data.u, dtype=float)
    y = np.asarray(data.y, dtype=float)
    pred = theta[0] * y[:-1] + theta[1] * u[:-1]
    r = y[1:] - pred
    return float(r @ r)


def refit(model, data):
    """Least-squares ARX-1 fit of ``y(j)`` on ``[y(j-1), u(j-1)]``.

    Keeps the previous parameters (status ``"skipped"``) when fewer than two
    regression rows exist or the regressor matrix is rank deficient. A pole
    with ``|a| >= 1`` is clipped to ``sign(a) * 0.999`` (status ``"clipped"``).
    """
    u = np.asarray(data.u, dtype=float)
    y = np.asarray(data.y, dtype=float)
    if len(u) < 3:
        return RefitResult(model, "skipped")
    Phi = np.column_stack((y[:-1], u[:-1]))
    theta, _, rank, _ = np.linalg.lstsq(Phi, y[1:], rcond=None)
    if rank < 2 or not np.all(np.isfinite(theta)):
        return RefitResult(model, "skipped")
    a, b = float(theta[0]), float(theta[1])
    status = "ok"
    if abs(a) >= 1.0:
        a = float(np.sign(a)) * STABILITY_LIMIT
        status = "clipped"
    return RefitResult(replace(model, a=a, b=b), status)
