"""Shared domain types, constraint sets, normalization and seeded RNG streams.

Regressor points are plain float arrays of shape ``(p,)`` and a distribution
is an ``(n, p)`` array whose row order is generation order. The point
generated at time ``j`` is ``z(j) = [u(j), y(j)]``; coordinate 0 is always the
input coordinate.
"""

from dataclasses import dataclass

import numpy as np


class ConfigError(ValueError):
    """Invalid configuration or construction arguments."""


class SimulationDivergenceError(FloatingPointError):
    """A simulated trajectory produced non-finite values."""


INPUT_AXIS = 0


def as_points(X, p=None):
    """Return ``X`` as a finite float ``(n, p)`` array."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of points, got shape {X.shape}")
    if p is not None and X.shape[1] != p:
        raise ValueError(f"expected points of dimension {p}, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("points must be finite")
    return X


@dataclass(frozen=True)
class Constraints:
    """Input box ``U`` = [u_min, u_max] and state box ``X`` (one row per axis).

    ``state_box`` has shape ``(p, 2)`` with columns ``lo, hi``.
    """

    input_box: tuple
    state_box: np.ndarray

    def __post_init__(self):
        lo, hi = (float(v) for v in self.input_box)
        box = np.array(self.state_box, dtype=float)
        if box.ndim != 2 or box.shape[1] != 2:
            raise ConfigError(f"state_box must have shape (p, 2), got {box.shape}")
        if not (np.all(np.isfinite(box)) and np.isfinite(lo) and np.isfinite(hi)):
            raise ConfigError("constraint bounds must be finite")
        if not lo < hi:
            raise ConfigError(f"input box needs u_min < u_max, got [{lo}, {hi}]")
        bad = np.flatnonzero(box[:, 0] >= box[:, 1])
        if bad.size:
            raise ConfigError(f"state box axis {int(bad[0])} is degenerate or inverted")
        if lo < box[INPUT_AXIS, 0] or hi > box[INPUT_AXIS, 1]:
            raise ConfigError("input box must lie inside the state box input axis")
        box.flags.writeable = False
        object.__setattr__(self, "input_box", (lo, hi))
        object.__setattr__(self, "state_box", box)

    @property
    def dim(self):
        return self.state_box.shape[0]

    @property
    def u_min(self):
        return self.input_box[0]

    @property
    def u_max(self):
        return self.input_box[1]

    def input_ok(self, u):
        u = np.asarray(u, dtype=float)
        return bool(np.all((u >= self.u_min) & (u <= self.u_max)))

    def state_ok(self, X):
        """Boolean mask of rows of ``X`` inside the (closed) state box."""
        X = np.asarray(X, dtype=float)
        lo, hi = self.state_box[:, 0], self.state_box[:, 1]
        return np.all(np.isfinite(X) & (X >= lo) & (X <= hi), axis=-1)


@dataclass(frozen=True)
class RunConfig:
    N: int
    L: int
    seed: int = 0
    normalization: bool = True

    def __post_init__(self):
        for name in ("N", "L", "seed"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ConfigError(f"{name} must be an integer, got {v!r}")
        if not 1 <= self.L <= self.N:
            raise ConfigError(f"need 1 <= L <= N, got L={self.L}, N={self.N}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")


def _box_scale(box):
    box = np.asarray(box, dtype=float)
    width = box[:, 1] - box[:, 0]
    if np.any(~(width > 0)):
        raise ConfigError("cannot normalize against a degenerate box (lo == hi)")
    return box[:, 0], width


def normalize_point(x, constraints):
    """Map coordinates affinely so the state box becomes the unit cube.

    Works on a single point or an ``(n, p)`` array; points outside the box
    map outside ``[0, 1]``.
    """
    box = getattr(constraints, "state_box", constraints)
    lo, width = _box_scale(box)
    return (np.asarray(x, dtype=float) - lo) / width


def denormalize_point(x, constraints):
    box = getattr(constraints, "state_box", constraints)
    lo, width = _box_scale(box)
    return np.asarray(x, dtype=float) * width + lo


def seeded_rng(seed, *key):
    """Return a PCG64 ``Generator`` for ``seed`` and an optional sub-stream key.

    The sub-stream key is folded in via ``SeedSequence.spawn_key`` so stream
    ``(seed, k)`` does not depend on how many other streams were drawn.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


class ExcitationSignal:
    """Append-only scalar input sequence constrained to the input box."""

    def __init__(self, constraints, samples=()):
        self.constraints = constraints
        self._u = []
        for u in samples:
            self.append(u)

    def append(self, u):
        u = float(u)
        if not self.constraints.input_ok(u):
            raise ValueError(
                f"input {u!r} outside input box {self.constraints.input_box}"
            )
        self._u.append(u)

    @property
    def samples(self):
        a = np.array(self._u, dtype=float)
        a.flags.writeable = False
        return a

    def __len__(self):
        return len(self._u)

    def __iter__(self):
        return iter(self._u)

    def __repr__(self):
        return f"ExcitationSignal(length={len(self)})"
