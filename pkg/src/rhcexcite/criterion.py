"""Reference grid, region weights and the weighted nearest-neighbor criterion.

The criterion is

    J = sum_j q(j) * min_o |x(o) - psi(j)|

over the reference points ``psi`` and the distribution ``x``. Smaller J means
the distribution covers the weighted reference points more tightly.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import ConfigError, as_points, normalize_point

DEFAULT_CAP = 100_000


@dataclass(frozen=True)
class DistanceDataset:
    """Reference points ``psi`` of shape ``(M, p)`` with weights ``q >= 0``."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = as_points(self.points)
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.shape[0] != pts.shape[0]:
            raise ConfigError("weights and points must have equal length")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ConfigError("weights must be finite and non-negative")
        if not np.any(w > 0):
            raise ConfigError("at least one weight must be positive")
        if np.unique(pts, axis=0).shape[0] != pts.shape[0]:
            raise ConfigError("reference points must be pairwise distinct")
        pts.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.points.shape[0]

    def check_inside(self, constraints):
        if not np.all(constraints.state_ok(self.points)):
            raise ConfigError("reference points must lie inside the state box")


@dataclass(frozen=True)
class Boost:
    """Closed axis-aligned rectangle ``[lo, hi]`` whose points get ``rho`` x weight."""

    lo: tuple
    hi: tuple
    rho: float

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi):
            raise ConfigError("boost lo/hi must have the same dimension")
        if any(a > b for a, b in zip(lo, hi)):
            raise ConfigError(f"boost rectangle has lo > hi: {lo} {hi}")
        rho = float(self.rho)
        if not np.isfinite(rho) or rho < 1.0:
            raise ConfigError(f"boost multiplier must be finite and >= 1, got {rho}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "rho", rho)

    def contains(self, points):
        P = np.asarray(points, dtype=float)
        return np.all((P >= self.lo) & (P <= self.hi), axis=-1)


@dataclass(frozen=True)
class WeightingScheme:
    base: float = 1.0
    boosts: tuple = field(default_factory=tuple)

    def __post_init__(self):
        base = float(self.base)
        if not np.isfinite(base) or base <= 0:
            raise ConfigError("base weight must be finite and positive")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "boosts", tuple(self.boosts))

    def check_inside(self, constraints):
        box = constraints.state_box
        for bst in self.boosts:
            if len(bst.lo) != box.shape[0]:
                raise ConfigError("boost rectangle dimension does not match state box")
            if np.any(np.array(bst.lo) < box[:, 0]) or np.any(np.array(bst.hi) > box[:, 1]):
                raise ConfigError(f"boost rectangle {bst.lo}..{bst.hi} leaves the state box")

    def with_rho(self, rho):
        return WeightingScheme(
            self.base, tuple(Boost(b.lo, b.hi, rho) for b in self.boosts)
        )

    def uniform(self):
        return WeightingScheme(self.base)


def build_psi(constraints, resolution, cap=DEFAULT_CAP):
    """Regular grid over the state box, corners included.

    Row-major order: the last axis varies fastest, so for a 2-D grid point
    ``i * n2 + j`` has coordinates ``(g1[i], g2[j])``.
    """
    box = getattr(constraints, "state_box", constraints)
    box = np.asarray(box, dtype=float)
    res = [int(r) for r in resolution]
    if len(res) != box.shape[0]:
        raise ConfigError(f"resolution needs {box.shape[0]} entries, got {len(res)}")
    if any(r < 2 for r in res):
        raise ConfigError("every grid resolution must be >= 2")
    total = int(np.prod(res))
    if total > cap:
        raise ConfigError(f"reference grid has {total} points, above the cap of {cap}")
    axes = [np.linspace(lo, hi, r) for (lo, hi), r in zip(box, res)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def assign_weights(points, scheme):
    """``q(j) = base * prod(rho)`` over every boost rectangle containing ``psi(j)``."""
    P = as_points(points)
    q = np.full(P.shape[0], scheme.base)
    for bst in scheme.boosts:
        q[bst.contains(P)] *= bst.rho
    return q


def _metric_code(metric):
    try:
        return kernels.METRICS[metric]
    except KeyError:
        raise ConfigError(
            f"unknown metric {metric!r}; choose from {sorted(kernels.METRICS)}"
        ) from None


def nn_distances(psi_points, X, metric="euclidean"):
    """Distance from every reference point to its nearest point of ``X``."""
    P = np.ascontiguousarray(as_points(psi_points))
    X = np.ascontiguousarray(as_points(X, P.shape[1]))
    if X.shape[0] == 0:
        raise ValueError("distribution is empty")
    return kernels.ACTIVE.nn_min_dist(P, X, _metric_code(metric))


def nn_distance(psi, X, metric="euclidean"):
    return float(nn_distances(np.atleast_2d(psi), X, metric)[0])


def criterion_j(X, psi, box=None, metric="euclidean"):
    """Weighted nearest-neighbor criterion of ``X`` against ``psi``.

    When ``box`` (a ``Constraints`` or ``(p, 2)`` array) is given both sets
    are mapped into the unit cube first.
    """
    P, X = psi.points, as_points(X, psi.points.shape[1])
    if box is not None:
        P, X = normalize_point(P, box), normalize_point(X, box)
    d = nn_distances(P, X, metric)
    return float(kernels.ACTIVE.weighted_sum(psi.weights, d))


def fill_distance(X, psi_points, box=None, metric="euclidean"):
    """Largest nearest-neighbor gap from the reference points to ``X``."""
    P, X = as_points(psi_points), as_points(X)
    if box is not None:
        P, X = normalize_point(P, box), normalize_point(X, box)
    return float(nn_distances(P, X, metric).max())
