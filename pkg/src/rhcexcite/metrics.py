"""Coverage metrics of a realized input-space distribution."""

from dataclasses import dataclass

import numpy as np

from .criterion import DistanceDataset, criterion_j, fill_distance


@dataclass
class CoverageReport:
    variant: str
    J_true: float
    fill_distance: float
    region_fraction: float
    runtime_s: float
    seed: int


def region_fraction(X, boosts):
    """Fraction of rows of ``X`` inside the union of the boost rectangles (nan if none)."""
    if not boosts:
        return float("nan")
    X = np.asarray(X, dtype=float)
    inside = np.zeros(len(X), dtype=bool)
    for b in boosts:
        inside |= b.contains(X)
    return float(inside.mean())


def coverage(X, psi_points, constraints, boosts=(), normalize=True,
             metric="euclidean", variant="", runtime_s=float("nan"), seed=0):
    """Uniform-weight criterion, fill distance and boost-region fraction of ``X``."""
    box = constraints if normalize else None
    uniform = DistanceDataset(psi_points, np.ones(len(psi_points)))
    return CoverageReport(
        variant=variant,
        J_true=criterion_j(X, uniform, box, metric),
        fill_distance=fill_distance(X, psi_points, box, metric),
        region_fraction=region_fraction(X, boosts),
        runtime_s=runtime_s,
        seed=int(seed),
    )
