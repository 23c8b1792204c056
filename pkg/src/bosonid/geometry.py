"""Packings of Euclidean balls in R^d and the metric-entropy bound calculators.

Signatures live in the ball of radius sqrt(k E) in R^{2k} ~ C^k; a pairwise
separation of 2 rho controls the false-accept exponent.  Maximality of a
packing is approximated by a rejection-budget stopping rule; the volumetric
cardinality bounds themselves are exact and computed in log domain.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "PackingSpec",
    "PointSet",
    "packing_lower_bound_log",
    "covering_upper_bound_log",
    "sample_uniform_ball",
    "greedy_packing",
    "grid_packing",
    "min_pairwise_distance",
    "save_pointset",
    "load_pointset",
]

DEFAULT_REJECTION_BUDGET = 100_000


@dataclass(frozen=True)
class PackingSpec:
    dim: int
    radius: float
    separation: float
    rejection_budget: int = DEFAULT_REJECTION_BUDGET

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.radius <= 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")
        if self.separation <= 0:
            raise ValueError(f"separation must be > 0, got {self.separation}")
        if self.rejection_budget < 1:
            raise ValueError("rejection_budget must be >= 1")


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray  # shape (M, dim)
    achieved_min_distance: float = field(default=math.inf)

    def __len__(self) -> int:
        return self.points.shape[0]


def packing_lower_bound_log(dim: int, radius: float, rho: float) -> float:
    """log of the volumetric packing guarantee (radius / (2 rho))^dim."""
    if dim < 1 or radius <= 0 or rho <= 0:
        raise ValueError("dim >= 1, radius > 0, rho > 0 required")
    return dim * math.log(radius / (2 * rho))


def covering_upper_bound_log(dim: int, radius: float, eps: float) -> float:
    """log of the classical covering estimate (1 + 2 radius / eps)^dim."""
    if dim < 1 or radius <= 0 or eps <= 0:
        raise ValueError("dim >= 1, radius > 0, eps > 0 required")
    return dim * math.log1p(2 * radius / eps)


def sample_uniform_ball(
    dim: int, radius: float, rng: np.random.Generator, size: int = 1
) -> np.ndarray:
    """Uniform samples from the closed ball: Gaussian direction, radial u^{1/d}."""
    g = rng.normal(size=(size, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(size) ** (1.0 / dim)
    return g * r[:, None]


def greedy_packing(spec: PackingSpec, rng: np.random.Generator) -> PointSet:
    """Sequential rejection sampling of a separated point set in the ball.

    Uniform candidates are accepted when at distance >= separation from every
    accepted point (exact comparison, no slack); stops after
    ``rejection_budget`` consecutive rejections.
    """
    accepted: list[np.ndarray] = []
    consecutive = 0
    batch = 4096
    while consecutive < spec.rejection_budget:
        cands = sample_uniform_ball(spec.dim, spec.radius, rng, batch)
        # min distance of each candidate to the current accepted set
        if accepted:
            mind = cdist(cands, np.array(accepted)).min(axis=1)
        else:
            mind = np.full(batch, math.inf)
        start = 0
        while start < batch:
            ok = np.nonzero(mind[start:] >= spec.separation)[0]
            if ok.size == 0:
                consecutive += batch - start
                break
            j = int(ok[0])
            if consecutive + j >= spec.rejection_budget:
                consecutive = spec.rejection_budget
                break
            new = cands[start + j]
            accepted.append(new)
            consecutive = 0
            start += j + 1
            if start < batch:
                d_new = np.sqrt(((cands[start:] - new) ** 2).sum(axis=1))
                mind[start:] = np.minimum(mind[start:], d_new)
    pts = np.array(accepted) if accepted else np.zeros((0, spec.dim))
    return PointSet(points=pts, achieved_min_distance=min_pairwise_distance(pts))


def grid_packing(spec: PackingSpec) -> PointSet:
    """Deterministic fallback: axis-aligned lattice of spacing ``separation``
    intersected with the ball.  Cardinality is reported, not bound-asserted.
    Intended for small dim only (lattice size grows as (2R/sep)^dim).
    """
    n_side = int(math.floor(spec.radius / spec.separation))
    axis = spec.separation * np.arange(-n_side, n_side + 1)
    pts = [
        np.array(p)
        for p in itertools.product(axis, repeat=spec.dim)
        if np.linalg.norm(p) <= spec.radius
    ]
    arr = np.array(pts) if pts else np.zeros((1, spec.dim))
    return PointSet(points=arr, achieved_min_distance=min_pairwise_distance(arr))


def min_pairwise_distance(points) -> float:
    """Exact minimum pairwise Euclidean distance; +inf for fewer than 2 points."""
    arr = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=float)
    m = arr.shape[0]
    if m < 2:
        return math.inf
    best = math.inf
    for i in range(m - 1):
        d2 = np.sum((arr[i + 1 :] - arr[i]) ** 2, axis=1)
        best = min(best, float(d2.min()))
    return math.sqrt(best)


def save_pointset(path, pointset: PointSet, spec: PackingSpec) -> None:
    """Columnar text: comment header with dim/radius/separation, one point per row."""
    with open(path, "w") as fh:
        fh.write(
            f"# dim={spec.dim} radius={spec.radius:.12g} separation={spec.separation:.12g}\n"
        )
        for row in pointset.points:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def load_pointset(path) -> tuple[PointSet, PackingSpec]:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# dim="):
            raise ValueError(f"{path}: missing point-set header")
        fields = dict(tok.split("=") for tok in header[2:].split())
        spec = PackingSpec(
            dim=int(fields["dim"]),
            radius=float(fields["radius"]),
            separation=float(fields["separation"]),
        )
        rows = [
            [float(x) for x in line.split()] for line in fh if line.strip()
        ]
    arr = np.array(rows) if rows else np.zeros((0, spec.dim))
    if arr.size and arr.shape[1] != spec.dim:
        raise ValueError(f"{path}: row width {arr.shape[1]} != dim {spec.dim}")
    return PointSet(points=arr, achieved_min_distance=min_pairwise_distance(arr)), spec
