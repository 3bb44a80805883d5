"""Locally polynomial regression with an eigenvalue guard, and the plug-in rule.

The estimator fits a degree-l polynomial by kernel-weighted least squares
around each query point.  The constant coefficient of the fit estimates the
regression function there.  A guard on the smallest eigenvalue of the
normalized design matrix zeroes the estimate wherever the local design is
too thin to solve reliably.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from scipy.spatial import cKDTree

from .mathcore import (
    HolderSpec,
    KernelSpec,
    enumerate_multiindices,
    indices_matrix,
    kernel_eval,
    uniform_ball_kernel,
)
from .sample import Sample

__all__ = [
    "LPConfig",
    "LocalDesign",
    "default_guard_threshold",
    "build_design",
    "lp_solve",
    "guarded_lp_estimate",
    "rate_optimal_bandwidth",
    "plugin_classify",
    "PluginClassifier",
]

# relative eigenvalue cutoff below which the local system counts as singular
_SINGULAR_RTOL = 1e-12


def default_guard_threshold(n: int) -> float:
    """1/log(n), floored at 1e-12 where the formula degenerates (n <= 2)."""
    if n <= 2:
        return 1e-12
    return 1.0 / math.log(n)


@dataclass(frozen=True)
class LPConfig:
    """Order, bandwidth, kernel and guard of the local polynomial fit."""

    order: int
    bandwidth: float
    kernel: KernelSpec
    guard_threshold: callable = default_guard_threshold

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("polynomial order must be >= 0")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")


@dataclass(frozen=True)
class LocalDesign:
    """Moment matrices of one local fit.

    ``q`` and ``v`` hold the raw kernel-weighted moments; ``omega_bar`` is
    the same quadratic form on bandwidth-rescaled offsets, divided by
    n h^d, so its spectrum is comparable across n and h.  Rows/columns
    follow :func:`~npclassify.mathcore.enumerate_multiindices`.
    """

    q: np.ndarray
    v: np.ndarray
    omega_bar: np.ndarray
    indices: tuple
    n: int
    bandwidth: float


def _design_arrays(xs, ys, x, cfg: LPConfig, n_total: int):
    x = np.asarray(x, dtype=float)
    d = xs.shape[1]
    indices = enumerate_multiindices(d, cfg.order)
    exps = indices_matrix(indices)
    m = len(indices)
    h = cfg.bandwidth
    if xs.shape[0] == 0:
        zero = np.zeros((m, m))
        return zero, np.zeros(m), zero.copy(), indices
    diffs = xs - x[None, :]
    scaled = diffs / h
    weights = np.atleast_1d(kernel_eval(cfg.kernel, scaled))
    # (n, M) monomial matrices; Q = Z^T diag(w) Z reproduces the moment sums
    mono = np.prod(diffs[:, None, :] ** exps[None, :, :], axis=2)
    mono_scaled = np.prod(scaled[:, None, :] ** exps[None, :, :], axis=2)
    wm = weights[:, None] * mono
    q = mono.T @ wm
    v = mono.T @ (weights * ys)
    omega = (mono_scaled.T @ (weights[:, None] * mono_scaled)) / (n_total * h ** d)
    q = 0.5 * (q + q.T)
    omega = 0.5 * (omega + omega.T)
    return q, v, omega, indices


def build_design(sample: Sample, x, cfg: LPConfig) -> LocalDesign:
    """Assemble Q, V and the normalized moment matrix at a query point.

    Points outside the kernel support receive weight zero, so the result
    only depends on the sample inside the bandwidth window.
    """
    q, v, omega, indices = _design_arrays(sample.x, sample.y, x, cfg, sample.n)
    return LocalDesign(
        q=q, v=v, omega_bar=omega, indices=tuple(indices),
        n=sample.n, bandwidth=cfg.bandwidth,
    )


def _solve_first_coefficient(q: np.ndarray, v: np.ndarray):
    evals = np.linalg.eigvalsh(q)
    if evals[-1] <= 0 or evals[0] <= _SINGULAR_RTOL * evals[-1]:
        return None
    try:
        coeffs = sla.cho_solve(sla.cho_factor(q, lower=True), v)
    except (np.linalg.LinAlgError, sla.LinAlgError):
        # near-degenerate Cholesky: fall back to the eigendecomposition
        w, e = np.linalg.eigh(q)
        coeffs = e @ ((e.T @ v) / w)
    return float(coeffs[0])


def lp_solve(design: LocalDesign):
    """First coefficient of the local least-squares fit, or None if singular.

    The constant-monomial coefficient is the estimate of the regression
    function at the query point.  The system counts as singular when the
    smallest eigenvalue of Q is at most 1e-12 times the largest.
    """
    return _solve_first_coefficient(design.q, design.v)


def guarded_lp_estimate(sample: Sample, x, cfg: LPConfig) -> float:
    """Eigenvalue-guarded, clipped local polynomial regression estimate.

    If the smallest eigenvalue of the normalized moment matrix exceeds the
    guard threshold, returns the local fit projected onto [0, 1]; otherwise
    returns 0.  Ties at the threshold take the guard branch.
    """
    if sample.n < 2:
        raise ValueError("guarded estimate needs a sample of size >= 2")
    design = build_design(sample, x, cfg)
    lam_min = float(np.linalg.eigvalsh(design.omega_bar)[0])
    if lam_min <= cfg.guard_threshold(sample.n):
        return 0.0
    value = lp_solve(design)
    if value is None:
        return 0.0
    return float(min(1.0, max(0.0, value)))


def rate_optimal_bandwidth(n: int, spec: HolderSpec) -> float:
    """The bias/variance balancing bandwidth n^(-1/(2 beta + d))."""
    if n < 1:
        raise ValueError("sample size must be >= 1")
    return float(n) ** (-1.0 / (2.0 * spec.beta + spec.d))


def plugin_classify(eta_hat, x) -> int:
    """Threshold a regression estimate at 1/2; the boundary goes to class 1."""
    return int(eta_hat(x) >= 0.5)


class PluginClassifier:
    """Plug-in classifier built on the guarded local polynomial estimate.

    Wraps a fixed sample and config behind a KD-tree so batches of query
    points only touch the observations inside the kernel support.  Matches
    :func:`guarded_lp_estimate` pointwise; evaluation at distinct points is
    pure and may be fanned out across workers.
    """

    def __init__(self, sample: Sample, cfg: LPConfig):
        if sample.n < 2:
            raise ValueError("plug-in fit needs a sample of size >= 2")
        self.sample = sample
        self.cfg = cfg
        self._tree = cKDTree(sample.x)
        self._radius = cfg.bandwidth * cfg.kernel.radius
        self._threshold = cfg.guard_threshold(sample.n)

    def eta(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        neighbor_lists = self._tree.query_ball_point(pts, self._radius)
        out = np.empty(pts.shape[0])
        xs, ys, n = self.sample.x, self.sample.y, self.sample.n
        for i, idx in enumerate(neighbor_lists):
            if len(idx) == 0:
                out[i] = 0.0
                continue
            q, v, omega, _ = _design_arrays(xs[idx], ys[idx], pts[i], self.cfg, n)
            lam_min = float(np.linalg.eigvalsh(omega)[0])
            if lam_min <= self._threshold:
                out[i] = 0.0
                continue
            value = _solve_first_coefficient(q, v)
            out[i] = 0.0 if value is None else min(1.0, max(0.0, value))
        return out

    def predict(self, points) -> np.ndarray:
        return (self.eta(points) >= 0.5).astype(np.int64)
