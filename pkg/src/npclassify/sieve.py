"""Epsilon-net over a Lipschitz regression class and ERM over the net.

The net is a product construction: partition the unit cube into equal
cells and quantize per-cell values on a uniform grid.  Because empirical
risk depends on a net element only through the induced cell labels, the
ERM over the (huge) product net decomposes into independent per-cell
majority votes and never needs to be enumerated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mathcore import HolderSpec
from .sample import Sample

__all__ = [
    "UnsupportedSmoothnessError",
    "NetSpec",
    "EpsilonNet",
    "SieveClassifier",
    "epsilon_schedule",
    "build_net",
    "empirical_risk",
    "sieve_fit",
]


class UnsupportedSmoothnessError(ValueError):
    """Raised for smoothness exponents the piecewise-constant net cannot cover."""


def epsilon_schedule(n: int, alpha: float, rho: float, p: float) -> float:
    """Net resolution for sample size n under margin exponent alpha.

    For p = inf the exponent is 1/(2 + alpha + rho); for finite p >= 1 it is
    (p + alpha) / ((2 + alpha) p + rho (p + alpha)).
    """
    if n < 1:
        raise ValueError("sample size must be >= 1")
    if alpha < 0 or rho <= 0:
        raise ValueError("need alpha >= 0 and rho > 0")
    if math.isinf(p):
        exponent = 1.0 / (2.0 + alpha + rho)
    elif p >= 1:
        exponent = (p + alpha) / ((2.0 + alpha) * p + rho * (p + alpha))
    else:
        raise ValueError("norm index p must be >= 1")
    return float(n) ** (-exponent)


@dataclass(frozen=True)
class NetSpec:
    """Parameters of the epsilon-net on the unit cube [0,1]^d.

    The derived cell side is (epsilon / 2L)^(1/beta) clamped to <= 1, and
    the value grid is {epsilon (k + 1/2)} intersected with [0, 1].  Only
    beta <= 1 is supported: piecewise-constant quantization is a sup-norm
    net for Lipschitz-type classes only.
    """

    holder: HolderSpec
    epsilon: float

    def __post_init__(self):
        if self.holder.beta > 1.0:
            raise UnsupportedSmoothnessError(
                "piecewise-constant nets require beta <= 1"
            )
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    @property
    def cell_side(self) -> float:
        side = (self.epsilon / (2.0 * self.holder.L)) ** (1.0 / self.holder.beta)
        return min(side, 1.0)


@dataclass(frozen=True)
class EpsilonNet:
    """Implicit description of the net: cell partition plus value grid.

    The net itself is the product set of per-cell grid values and is never
    materialized; its log-cardinality is cells * log(#values).
    """

    d: int
    cells_per_axis: int
    cell_side: float
    value_grid: np.ndarray
    epsilon: float

    @property
    def n_cells(self) -> int:
        return self.cells_per_axis ** self.d

    @property
    def log_cardinality(self) -> float:
        return self.n_cells * math.log(len(self.value_grid))

    def cell_index(self, points) -> np.ndarray:
        """Flat (row-major) cell index of each point of the unit cube."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.d:
            raise ValueError("point dimension does not match the net")
        k = np.clip(
            np.floor(pts * self.cells_per_axis).astype(np.int64),
            0,
            self.cells_per_axis - 1,
        )
        flat = np.zeros(pts.shape[0], dtype=np.int64)
        for j in range(self.d):
            flat = flat * self.cells_per_axis + k[:, j]
        return flat


def build_net(spec: NetSpec) -> EpsilonNet:
    """Materialize the partition and value grid described by a NetSpec.

    epsilon >= 1 degenerates to a single cell.  The actual cell side is
    1/ceil(1/side), i.e. never larger than the derived side, so the net
    property is preserved when the side does not divide the cube evenly.
    """
    side = spec.cell_side
    cells = max(1, math.ceil(round(1.0 / side, 12)))
    eps = spec.epsilon
    grid = []
    k = 0
    while eps * (k + 0.5) <= 1.0 + 1e-15:
        grid.append(eps * (k + 0.5))
        k += 1
    if not grid:
        grid = [0.5]  # eps > 2: any single value is within eps of [0,1]
    return EpsilonNet(
        d=spec.holder.d,
        cells_per_axis=cells,
        cell_side=1.0 / cells,
        value_grid=np.asarray(grid, dtype=float),
        epsilon=eps,
    )


@dataclass(frozen=True)
class SieveClassifier:
    """A selected net element: per-cell values with the induced 0/1 labels."""

    net: EpsilonNet
    cell_values: np.ndarray

    @property
    def cell_labels(self) -> np.ndarray:
        return (self.cell_values >= 0.5).astype(np.int64)

    def eta(self, points) -> np.ndarray:
        return self.cell_values[self.net.cell_index(points)]

    def predict(self, points) -> np.ndarray:
        return self.cell_labels[self.net.cell_index(points)]


def empirical_risk(classifier, sample: Sample) -> float:
    """Fraction of sample points the classifier labels incorrectly."""
    pred = np.asarray(classifier.predict(sample.x))
    return float(np.mean(pred != sample.y))


def _side_values(grid: np.ndarray):
    below = grid[grid < 0.5]
    above = grid[grid >= 0.5]
    return below, above


def sieve_fit(sample: Sample, net) -> SieveClassifier:
    """Exact empirical risk minimization over the net.

    Each cell independently takes the majority label of the sample points
    it contains; ties and empty cells go to label 0.  The stored per-cell
    value is the smallest grid entry on the chosen side of 1/2 (when the
    grid has no entry on that side, the only representable label wins).
    The result is invariant under permutations of the sample.
    """
    if isinstance(net, NetSpec):
        net = build_net(net)
    pts = sample.x
    if np.any(pts < -1e-12) or np.any(pts > 1.0 + 1e-12):
        raise ValueError("sieve fit requires sample points inside the unit cube")
    cells = net.cell_index(pts)
    ones = np.bincount(cells[sample.y >= 0.5], minlength=net.n_cells)
    totals = np.bincount(cells, minlength=net.n_cells)
    zeros = totals - ones
    majority_one = ones > zeros  # ties resolve to label 0

    below, above = _side_values(net.value_grid)
    if below.size == 0:
        value_zero = float(above[0])  # label 0 unrepresentable
    else:
        value_zero = float(below[0])
    if above.size == 0:
        value_one = float(below[0])
    else:
        value_one = float(above[0])
    values = np.where(majority_one, value_one, value_zero)
    return SieveClassifier(net=net, cell_values=values)
