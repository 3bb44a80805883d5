"""Synthetic generative laws with exact regression functions and margins.

Three families, each exposing an exact eta, marginal density, sampler,
Bayes rule and closed-form margin mass:

* ``QuadraticBallDistribution`` — uniform marginal on the unit ball with a
  concave quadratic regression function touching 1/2 at the origin.
* ``CorridorDistribution`` — a one-dimensional law whose support leaves a
  zero-mass gap around the decision boundary, so the mass within any
  margin below a fixed t0 is exactly zero.
* ``HypercubeDistribution`` — a grid of small balls carrying sign-flipped
  bumps of common height, the standard construction for minimax lower
  bounds; its margin mass is an exact step function.

Distributions are immutable; samplers take an explicit numpy Generator.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .mathcore import (
    HolderSpec,
    bump_normalizer,
    bump_profile,
    bump_profile_deriv,
    unit_ball_volume,
)
from .sample import Sample

__all__ = [
    "ValidationError",
    "SyntheticDistribution",
    "QuadraticBallDistribution",
    "CorridorDistribution",
    "HypercubeDistribution",
    "quadratic_ball",
    "corridor",
    "hypercube_build",
    "hypercube_strong_density_regime",
    "hypercube_mild_density_regime",
    "HolderReport",
    "validate_holder",
]

# rejection sampling refuses to run below this acceptance probability
_MIN_ACCEPTANCE = 0.01


class ValidationError(ValueError):
    """Constructor constraint violations, listing each violated inequality."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def _check(violations, ok: bool, message: str):
    if not ok:
        violations.append(message)


def _as_points(x, d: int):
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = np.atleast_2d(arr)
    if pts.shape[1] != d:
        raise ValueError(f"points must have dimension {d}")
    return pts, single


def _maybe_scalar(values: np.ndarray, single: bool):
    return float(values[0]) if single else values


class SyntheticDistribution(abc.ABC):
    """Behavioral contract shared by all synthetic laws."""

    d: int
    alpha: float
    c0: float
    beta: float
    holder_l: float

    @abc.abstractmethod
    def sample_x(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n i.i.d. feature vectors, shape (n, d)."""

    def sample(self, n: int, rng: np.random.Generator) -> Sample:
        """Draw n labeled pairs; labels are Bernoulli(eta(X))."""
        if n < 1:
            raise ValueError("sample size must be >= 1")
        x = self.sample_x(n, rng)
        y = (rng.random(n) < self.eta(x)).astype(float)
        return Sample(x=x, y=y)

    @abc.abstractmethod
    def eta(self, x):
        """P(Y=1 | X=x), vectorized over rows; values in [0, 1]."""

    @abc.abstractmethod
    def density(self, x):
        """Marginal Lebesgue density of X, vectorized over rows."""

    def bayes_label(self, x):
        """The optimal rule 1{eta >= 1/2}; boundary points go to class 1."""
        arr = np.asarray(self.eta(x))
        out = (arr >= 0.5).astype(np.int64)
        return int(out) if np.ndim(arr) == 0 else out

    @abc.abstractmethod
    def margin_mass(self, t: float) -> float:
        """P_X(0 < |eta(X) - 1/2| <= t), exact."""

    @abc.abstractmethod
    def bayes_risk(self) -> float:
        """E[min(eta, 1 - eta)], exact."""

    @abc.abstractmethod
    def eta_taylor(self, x, xq):
        """Taylor polynomial of eta of degree floor(beta), based at x, at xq."""

    @abc.abstractmethod
    def holder_pairs(self, trials: int, rng: np.random.Generator):
        """Point pairs in/near the support for smoothness validation."""

    @abc.abstractmethod
    def support_box(self):
        """Axis-aligned bounding box (lo, hi) of the support."""

    def predict(self, x):
        # lets a distribution double as its own Bayes classifier
        return self.bayes_label(x)

    def describe(self) -> dict:
        """JSON-serializable descriptor (kind + parameters)."""
        raise NotImplementedError


# ---------------------------------------------------------------------------
# uniform ball with concave quadratic regression
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticBallDistribution(SyntheticDistribution):
    """Uniform X on the unit ball; eta(x) = 1/2 - curvature * ||x||^2.

    eta stays in [1/2 - curvature, 1/2]; the Bayes rule is 0 away from the
    origin.  Margin mass is min(t/curvature, 1)^(d/2), so the margin
    exponent is d/2 with constant curvature^(-d/2).
    """

    d: int
    curvature: float

    def __post_init__(self):
        violations = []
        _check(violations, self.d >= 1, "dimension d >= 1")
        _check(violations, 0.0 < self.curvature <= 0.5, "curvature in (0, 1/2]")
        if violations:
            raise ValidationError(violations)

    @property
    def alpha(self) -> float:
        return self.d / 2.0

    @property
    def c0(self) -> float:
        return self.curvature ** (-self.d / 2.0)

    @property
    def beta(self) -> float:
        return 2.0

    @property
    def holder_l(self) -> float:
        return 2.0 * self.curvature

    def sample_x(self, n, rng):
        direction = rng.standard_normal((n, self.d))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radius = rng.random(n) ** (1.0 / self.d)
        return direction * radius[:, None]

    def eta(self, x):
        pts, single = _as_points(x, self.d)
        vals = np.clip(0.5 - self.curvature * np.sum(pts ** 2, axis=1), 0.0, 1.0)
        return _maybe_scalar(vals, single)

    def density(self, x):
        pts, single = _as_points(x, self.d)
        inside = np.linalg.norm(pts, axis=1) <= 1.0
        vals = np.where(inside, 1.0 / unit_ball_volume(self.d), 0.0)
        return _maybe_scalar(vals, single)

    def margin_mass(self, t: float) -> float:
        if t <= 0:
            raise ValueError("margin level t must be positive")
        return min(t / self.curvature, 1.0) ** (self.d / 2.0)

    def bayes_risk(self) -> float:
        # E||X||^2 = d/(d+2) under the uniform ball law
        return 0.5 - self.curvature * self.d / (self.d + 2.0)

    def eta_taylor(self, x, xq):
        pts, _ = _as_points(x, self.d)
        pts_q, single = _as_points(xq, self.d)
        base = 0.5 - self.curvature * np.sum(pts ** 2, axis=1)
        grad_term = -2.0 * self.curvature * np.sum(pts * (pts_q - pts), axis=1)
        return _maybe_scalar(base + grad_term, single)

    def holder_pairs(self, trials, rng):
        x = self.sample_x(trials, rng)
        local = x + rng.standard_normal((trials, self.d)) * rng.random(
            (trials, 1)
        ) * 0.5
        norms = np.linalg.norm(local, axis=1, keepdims=True)
        local = np.where(norms > 1.0, local / norms * (1.0 - 1e-9), local)
        far = self.sample_x(trials, rng)
        xq = np.where(rng.random((trials, 1)) < 0.5, local, far)
        return x, xq

    def support_box(self):
        return -np.ones(self.d), np.ones(self.d)

    def describe(self):
        return {"kind": "quadratic-ball", "dim": self.d, "curvature": self.curvature}

    # 1-d quadrature hooks -------------------------------------------------
    def density_components_1d(self):
        if self.d != 1:
            raise ValueError("1-d quadrature components need d = 1")
        return [(-1.0, 1.0, 1.0)]

    def eta_critical_points_1d(self):
        return [0.0]


def quadratic_ball(d: int, curvature: float = 0.25) -> QuadraticBallDistribution:
    """Uniform-ball law with eta = 1/2 - curvature ||x||^2 (curvature <= 1/2)."""
    return QuadraticBallDistribution(d=d, curvature=float(curvature))


# ---------------------------------------------------------------------------
# corridor: zero-mass band around the decision boundary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorridorDistribution(SyntheticDistribution):
    """Uniform X on [-1, -gap] u [gap, 1]; eta(x) = 1/2 + slope * clamp(x).

    No mass lands within slope*gap of the level 1/2, so
    margin_mass(t) = 0 for every t <= t0 = slope * gap.
    """

    gap: float
    slope: float

    def __post_init__(self):
        violations = []
        _check(violations, 0.0 < self.gap < 1.0, "gap in (0, 1)")
        _check(violations, 0.0 < self.slope <= 0.5, "slope in (0, 1/2]")
        if violations:
            raise ValidationError(violations)

    d = 1

    @property
    def t0(self) -> float:
        return self.slope * self.gap

    @property
    def alpha(self) -> float:
        return math.inf

    @property
    def c0(self) -> float:
        return 1.0

    @property
    def beta(self) -> float:
        return 1.0

    @property
    def holder_l(self) -> float:
        return self.slope

    def finite_margin_envelope(self):
        """A valid finite (alpha, C0) pair: mass(t) <= t / (slope (1-gap))."""
        return 1.0, 1.0 / (self.slope * (1.0 - self.gap))

    def sample_x(self, n, rng):
        u = rng.random(n)
        side = rng.random(n) < 0.5
        length = 1.0 - self.gap
        x = np.where(side, self.gap + u * length, -1.0 + u * length)
        return x[:, None]

    def eta(self, x):
        pts, single = _as_points(x, 1)
        vals = 0.5 + self.slope * np.clip(pts[:, 0], -1.0, 1.0)
        return _maybe_scalar(vals, single)

    def density(self, x):
        pts, single = _as_points(x, 1)
        xs = pts[:, 0]
        inside = (np.abs(xs) >= self.gap) & (np.abs(xs) <= 1.0)
        vals = np.where(inside, 0.5 / (1.0 - self.gap), 0.0)
        return _maybe_scalar(vals, single)

    def margin_mass(self, t: float) -> float:
        if t <= 0:
            raise ValueError("margin level t must be positive")
        frac = (t / self.slope - self.gap) / (1.0 - self.gap)
        return float(np.clip(frac, 0.0, 1.0))

    def bayes_risk(self) -> float:
        # E|X| = (1 + gap)/2 on the support
        return 0.5 - self.slope * (1.0 + self.gap) / 2.0

    def eta_taylor(self, x, xq):
        pts, _ = _as_points(x, 1)
        _, single = _as_points(xq, 1)
        vals = 0.5 + self.slope * np.clip(pts[:, 0], -1.0, 1.0)
        return _maybe_scalar(vals, single)

    def holder_pairs(self, trials, rng):
        x = rng.uniform(-1.2, 1.2, size=(trials, 1))
        step = rng.standard_normal((trials, 1)) * rng.random((trials, 1))
        xq = np.where(rng.random((trials, 1)) < 0.5, x + step,
                      rng.uniform(-1.2, 1.2, size=(trials, 1)))
        return x, xq

    def support_box(self):
        return -np.ones(1), np.ones(1)

    def describe(self):
        return {"kind": "corridor", "gap": self.gap, "slope": self.slope}

    def density_components_1d(self):
        return [(-1.0, -self.gap, 0.5), (self.gap, 1.0, 0.5)]

    def eta_critical_points_1d(self):
        return [0.0]


def corridor(gap: float = 0.25, slope: float = 0.25) -> CorridorDistribution:
    """One-dimensional law with a zero-mass corridor of half-width ``gap``."""
    return CorridorDistribution(gap=float(gap), slope=float(slope))


# ---------------------------------------------------------------------------
# hypercube of sign-flipped bumps
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bump_holder_constant(beta: float) -> float:
    """Numeric Holder-beta constant of the radial bump profile.

    For beta <= 1 this is the supremum of |u(a) - u(b)| / |a - b|^beta over
    a dense grid of pairs.  For beta in (1, 2] it is a bound built from the
    first two derivatives (the profile is constant outside [1/4, 1/2], so
    the radial composition only costs a factor of 4 on the gradient term).
    """
    ts = np.linspace(0.0, 0.75, 1501)
    us = np.atleast_1d(bump_profile(ts))
    if beta <= 1.0:
        diff_u = np.abs(us[:, None] - us[None, :])
        diff_t = np.abs(ts[:, None] - ts[None, :])
        mask = diff_t > 1e-9
        return float(np.max(diff_u[mask] / diff_t[mask] ** beta))
    if beta <= 2.0:
        fine = np.linspace(0.25, 0.5, 20001)
        d1 = float(np.max(np.abs(bump_profile_deriv(fine))))
        # |u''| from the derivative of the seed density
        g = (0.5 - fine[1:-1]) * (fine[1:-1] - 0.25)
        seed = np.exp(-1.0 / g)
        d2 = float(np.max(np.abs(seed * (0.75 - 2.0 * fine[1:-1]) / g ** 2)))
        d2 /= bump_normalizer()
        hess_bound = d2 + 4.0 * d1
        return max(hess_bound / 2.0, 2.0 + d1)
    raise ValidationError(["smoothness validation supports beta <= 2 only"])


@dataclass(frozen=True)
class HypercubeDistribution(SyntheticDistribution):
    """Grid of q^d cells; the first m carry balls of mass w with +-1 bumps.

    The marginal density is w / vol(ball) on each ball of radius 1/(4q)
    centered at the first m grid cell centers (row-major order), and
    (1 - mw)/vol(A0) on the residual region A0.  On cell j the regression
    function is (1 + sigma_j * phi)/2 where phi has exact height
    c_phi * q^(-beta) on the ball, so |2 eta - 1| is constant there and the
    margin mass is the step m w 1{t >= c_phi / (2 q^beta)}.

    ``a0_mode`` selects the residual region: "cube-complement" puts it on
    the unit cube minus the active cells; "outside-ball" on a Euclidean
    ball of radius 1/4 centered at (-1/2, ..., -1/2), disjoint from the cube.
    """

    q: int
    m: int
    w: float
    beta: float
    c_phi: float
    sigma: np.ndarray
    a0_mode: str
    alpha: float = 0.0
    holder_l_override: float | None = None
    d: int = 1

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=np.int64)
        object.__setattr__(self, "sigma", sigma)
        violations = []
        _check(violations, self.d >= 1, "dimension d >= 1")
        _check(violations, self.q >= 1, "grid resolution q >= 1")
        _check(violations, 1 <= self.m <= self.q ** self.d,
               "1 <= m <= q^d")
        _check(violations, 0.0 < self.w <= 1.0 / self.m, "0 < w <= 1/m")
        _check(violations, 0.0 < self.c_phi <= 1.0, "0 < c_phi <= 1")
        _check(violations, self.beta > 0, "beta > 0")
        _check(violations, self.alpha >= 0, "alpha >= 0")
        _check(violations, sigma.shape == (self.m,), "len(sigma) == m")
        _check(violations, bool(np.all(np.abs(sigma) == 1)),
               "sigma entries in {-1, +1}")
        _check(violations, self.a0_mode in ("cube-complement", "outside-ball"),
               "a0_mode in {cube-complement, outside-ball}")
        if not violations and self.residual_mass > 1e-12:
            if self.a0_mode == "cube-complement":
                accept = 1.0 - self.m / self.q ** self.d
                _check(violations, accept > 0.0,
                       "residual mass needs m < q^d in cube-complement mode")
                _check(violations, accept >= _MIN_ACCEPTANCE,
                       f"rejection acceptance rate 1 - m/q^d >= {_MIN_ACCEPTANCE}")
        if violations:
            raise ValidationError(violations)

    # -- geometry ----------------------------------------------------------

    @property
    def ball_radius(self) -> float:
        return 1.0 / (4.0 * self.q)

    @property
    def bump_height(self) -> float:
        """|2 eta - 1| on every support ball: c_phi * q^(-beta)."""
        return self.c_phi * float(self.q) ** (-self.beta)

    @property
    def margin_step(self) -> float:
        """The margin mass jumps from 0 to m w exactly here."""
        return self.bump_height / 2.0

    @property
    def residual_mass(self) -> float:
        return 1.0 - self.m * self.w

    @property
    def a0_center(self) -> np.ndarray:
        return np.full(self.d, -0.5)

    @property
    def a0_radius(self) -> float:
        return 0.25

    @property
    def a0_volume(self) -> float:
        if self.a0_mode == "outside-ball":
            return unit_ball_volume(self.d) * self.a0_radius ** self.d
        return 1.0 - self.m / self.q ** self.d

    @property
    def centers(self) -> np.ndarray:
        """Centers of the active cells, row-major over the grid, shape (m, d)."""
        ks = np.stack(
            np.unravel_index(np.arange(self.m), (self.q,) * self.d), axis=1
        )
        return (2.0 * ks + 1.0) / (2.0 * self.q)

    @property
    def holder_l(self) -> float:
        if self.holder_l_override is not None:
            return self.holder_l_override
        return 0.5 * self.c_phi * _bump_holder_constant(self.beta) * 1.05

    @property
    def c0(self) -> float:
        mw = self.m * self.w
        if self.alpha == 0:
            return 1.0
        return mw * self.margin_step ** (-self.alpha)

    # -- cell bookkeeping ----------------------------------------------------

    def _cell_flat(self, pts: np.ndarray) -> np.ndarray:
        k = np.clip(np.floor(pts * self.q).astype(np.int64), 0, self.q - 1)
        flat = np.zeros(pts.shape[0], dtype=np.int64)
        for j in range(self.d):
            flat = flat * self.q + k[:, j]
        return flat

    def _nearest_center(self, pts: np.ndarray) -> np.ndarray:
        k = np.clip(np.floor(pts * self.q).astype(np.int64), 0, self.q - 1)
        return (2.0 * k + 1.0) / (2.0 * self.q)

    # -- contract methods ----------------------------------------------------

    def eta(self, x):
        pts, single = _as_points(x, self.d)
        flat = self._cell_flat(pts)
        centers = self._nearest_center(pts)
        scaled = float(self.q) * np.linalg.norm(pts - centers, axis=1)
        profile = np.atleast_1d(bump_profile(scaled))
        vals = np.full(pts.shape[0], 0.5)
        active = flat < self.m
        # points outside the unit cube belong to X_0 regardless of cell math
        inside = np.all((pts >= 0.0) & (pts <= 1.0), axis=1)
        active &= inside
        if np.any(active):
            signs = self.sigma[flat[active]]
            vals[active] = 0.5 * (
                1.0 + signs * self.bump_height * profile[active]
            )
        return _maybe_scalar(vals, single)

    def density(self, x):
        pts, single = _as_points(x, self.d)
        vals = np.zeros(pts.shape[0])
        flat = self._cell_flat(pts)
        centers = self._nearest_center(pts)
        inside = np.all((pts >= 0.0) & (pts <= 1.0), axis=1)
        in_ball = (
            inside
            & (flat < self.m)
            & (np.linalg.norm(pts - centers, axis=1) <= self.ball_radius)
        )
        ball_volume = unit_ball_volume(self.d) * self.ball_radius ** self.d
        vals[in_ball] = self.w / ball_volume
        if self.residual_mass > 1e-12:
            if self.a0_mode == "cube-complement":
                in_a0 = inside & (flat >= self.m) & ~in_ball
            else:
                dist0 = np.linalg.norm(pts - self.a0_center[None, :], axis=1)
                in_a0 = dist0 <= self.a0_radius
            vals[in_a0] = self.residual_mass / self.a0_volume
        return _maybe_scalar(vals, single)

    def margin_mass(self, t: float) -> float:
        if t <= 0:
            raise ValueError("margin level t must be positive")
        return self.m * self.w if t >= self.margin_step else 0.0

    def bayes_risk(self) -> float:
        return 0.5 - 0.5 * self.m * self.w * self.bump_height

    def sample_x(self, n, rng):
        masses = np.full(self.m + 1, self.w)
        masses[-1] = self.residual_mass
        cum = np.cumsum(masses)
        cum[-1] = 1.0
        comp = np.searchsorted(cum, rng.random(n), side="right")
        out = np.empty((n, self.d))
        in_ball = comp < self.m
        k = int(np.sum(in_ball))
        if k:
            direction = rng.standard_normal((k, self.d))
            direction /= np.linalg.norm(direction, axis=1, keepdims=True)
            radius = self.ball_radius * rng.random(k) ** (1.0 / self.d)
            out[in_ball] = self.centers[comp[in_ball]] + direction * radius[:, None]
        rest = int(n - k)
        if rest:
            if self.residual_mass <= 1e-12:
                raise ValidationError(
                    ["residual component drawn although 1 - m w = 0"]
                )
            if self.a0_mode == "outside-ball":
                direction = rng.standard_normal((rest, self.d))
                direction /= np.linalg.norm(direction, axis=1, keepdims=True)
                radius = self.a0_radius * rng.random(rest) ** (1.0 / self.d)
                out[~in_ball] = self.a0_center[None, :] + direction * radius[:, None]
            else:
                out[~in_ball] = self._sample_cube_complement(rest, rng)
        return out

    def _sample_cube_complement(self, n, rng):
        # rejection against the active cells; acceptance >= _MIN_ACCEPTANCE
        # is enforced at construction
        collected = []
        remaining = n
        while remaining > 0:
            batch = max(int(remaining / max(1e-9, 1.0 - self.m / self.q ** self.d)), 16)
            cand = rng.random((batch, self.d))
            keep = cand[self._cell_flat(cand) >= self.m]
            collected.append(keep[:remaining])
            remaining -= min(remaining, keep.shape[0])
        return np.concatenate(collected, axis=0)

    def eta_taylor(self, x, xq):
        fb = math.ceil(self.beta) - 1
        pts, _ = _as_points(x, self.d)
        pts_q, single = _as_points(xq, self.d)
        base = np.atleast_1d(self.eta(pts))
        if fb == 0:
            return _maybe_scalar(base, single)
        if fb > 1:
            raise ValidationError(
                ["analytic Taylor data available for floor(beta) <= 1 only"]
            )
        grad = self._eta_gradient(pts)
        vals = base + np.sum(grad * (pts_q - pts), axis=1)
        return _maybe_scalar(vals, single)

    def _eta_gradient(self, pts: np.ndarray) -> np.ndarray:
        flat = self._cell_flat(pts)
        centers = self._nearest_center(pts)
        offset = pts - centers
        r = np.linalg.norm(offset, axis=1)
        scaled = float(self.q) * r
        inside = np.all((pts >= 0.0) & (pts <= 1.0), axis=1)
        active = (flat < self.m) & inside & (scaled > 0.25) & (scaled < 0.5)
        grad = np.zeros_like(pts)
        if np.any(active):
            du = np.atleast_1d(bump_profile_deriv(scaled[active]))
            signs = self.sigma[flat[active]].astype(float)
            scale = (
                0.5
                * signs
                * self.c_phi
                * float(self.q) ** (1.0 - self.beta)
                * du
                / r[active]
            )
            grad[active] = scale[:, None] * offset[active]
        return grad

    def holder_pairs(self, trials, rng):
        lo, hi = self.support_box()
        span = hi - lo
        x_global = lo + rng.random((trials, self.d)) * span
        cell = rng.integers(0, self.m, size=trials)
        local_center = self.centers[cell]
        x_local = local_center + (rng.random((trials, self.d)) - 0.5) / self.q
        pick = rng.random((trials, 1)) < 0.5
        x = np.where(pick, x_local, x_global)
        step = rng.standard_normal((trials, self.d)) * rng.random((trials, 1)) / self.q
        xq = np.where(
            rng.random((trials, 1)) < 0.7,
            x + step,
            lo + rng.random((trials, self.d)) * span,
        )
        return x, xq

    def support_box(self):
        lo = np.zeros(self.d)
        hi = np.ones(self.d)
        if self.a0_mode == "outside-ball" and self.residual_mass > 1e-12:
            lo = np.minimum(lo, self.a0_center - self.a0_radius)
            hi = np.maximum(hi, self.a0_center + self.a0_radius)
        return lo, hi

    def realized_density_bounds(self):
        """The (min, max) density values actually realized on the support."""
        ball_volume = unit_ball_volume(self.d) * self.ball_radius ** self.d
        values = [self.w / ball_volume]
        if self.residual_mass > 1e-12:
            values.append(self.residual_mass / self.a0_volume)
        return min(values), max(values)

    def describe(self):
        return {
            "kind": "hypercube",
            "dim": self.d,
            "q": self.q,
            "m": self.m,
            "w": self.w,
            "beta": self.beta,
            "c_phi": self.c_phi,
            "sigma": [int(s) for s in self.sigma],
            "a0_mode": self.a0_mode,
            "alpha": self.alpha,
        }

    def density_components_1d(self):
        if self.d != 1:
            raise ValueError("1-d quadrature components need d = 1")
        comps = []
        for center in self.centers[:, 0]:
            comps.append(
                (center - self.ball_radius, center + self.ball_radius, self.w)
            )
        if self.residual_mass > 1e-12:
            if self.a0_mode == "cube-complement":
                comps.append((self.m / self.q, 1.0, self.residual_mass))
            else:
                comps.append(
                    (
                        float(self.a0_center[0] - self.a0_radius),
                        float(self.a0_center[0] + self.a0_radius),
                        self.residual_mass,
                    )
                )
        return comps

    def eta_critical_points_1d(self):
        return []


def hypercube_build(
    q: int,
    m: int,
    w: float,
    beta: float,
    c_phi: float,
    sigma,
    a0_mode: str = "cube-complement",
    d: int | None = None,
    alpha: float = 0.0,
    holder_l: float | None = None,
) -> HypercubeDistribution:
    """Assemble a hypercube law, validating every constructor inequality."""
    sigma = np.asarray(sigma, dtype=np.int64)
    if d is None:
        d = 1
    return HypercubeDistribution(
        q=int(q),
        m=int(m),
        w=float(w),
        beta=float(beta),
        c_phi=float(c_phi),
        sigma=sigma,
        a0_mode=a0_mode,
        alpha=float(alpha),
        holder_l_override=holder_l,
        d=int(d),
    )


def hypercube_strong_density_regime(
    n: int,
    alpha: float,
    beta: float,
    d: int,
    cbar: float = 1.0,
    cprime: float = 0.5,
    csecond: float = 1.0,
    c_phi: float = 0.5,
    sigma=None,
) -> HypercubeDistribution:
    """Parameter regime whose laws keep a density bounded away from zero.

    q = floor(cbar n^{1/(2 beta + d)}), w = cprime q^{-d},
    m = floor(csecond q^{d - alpha beta}); requires alpha * beta <= d.
    The residual region is the unit cube minus the active cells.
    """
    violations = []
    _check(violations, alpha * beta <= d, "alpha * beta <= d")
    q = int(cbar * float(n) ** (1.0 / (2.0 * beta + d)))
    _check(violations, q >= 1, "floor(cbar n^(1/(2 beta + d))) >= 1")
    if violations:
        raise ValidationError(violations)
    w = cprime * float(q) ** (-d)
    m = max(1, int(csecond * float(q) ** (d - alpha * beta)))
    if sigma is None:
        sigma = np.ones(m, dtype=np.int64)
    return hypercube_build(
        q=q, m=m, w=w, beta=beta, c_phi=c_phi, sigma=sigma,
        a0_mode="cube-complement", d=d, alpha=alpha,
    )


def hypercube_mild_density_regime(
    n: int,
    alpha: float,
    beta: float,
    d: int,
    c: float = 1.0,
    cprime: float = 0.5,
    c_phi: float = 0.5,
    sigma=None,
) -> HypercubeDistribution:
    """Parameter regime with every cell active and a vanishing ball mass.

    q = floor(c n^{1/((2 + alpha) beta + d)}), w = cprime q^{2 beta} / n,
    m = q^d; the residual region is a Euclidean ball outside the cube.
    """
    q = int(c * float(n) ** (1.0 / ((2.0 + alpha) * beta + d)))
    violations = []
    _check(violations, q >= 1, "floor(c n^(1/((2 + alpha) beta + d))) >= 1")
    if violations:
        raise ValidationError(violations)
    w = cprime * float(q) ** (2.0 * beta) / float(n)
    m = q ** d
    if sigma is None:
        sigma = np.ones(m, dtype=np.int64)
    return hypercube_build(
        q=q, m=m, w=w, beta=beta, c_phi=c_phi, sigma=sigma,
        a0_mode="outside-ball", d=d, alpha=alpha,
    )


# ---------------------------------------------------------------------------
# numeric smoothness validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HolderReport:
    """Result of the sampled Taylor-remainder check."""

    passed: bool
    worst_ratio: float
    pairs_checked: int
    spec: HolderSpec


def validate_holder(
    dist: SyntheticDistribution,
    spec: HolderSpec | None = None,
    trials: int = 2000,
    rng: np.random.Generator | None = None,
) -> HolderReport:
    """Check |eta(x') - Taylor_x(x')| <= L ||x - x'||^beta on sampled pairs.

    Pairs are drawn in and near the support; the report carries the worst
    observed ratio (> 1 means the declared class does not hold).
    """
    if spec is None:
        spec = HolderSpec(beta=dist.beta, L=dist.holder_l, d=dist.d)
    if rng is None:
        rng = np.random.default_rng(0)
    x, xq = dist.holder_pairs(trials, rng)
    gap = np.linalg.norm(xq - x, axis=1)
    keep = gap > 1e-12
    x, xq, gap = x[keep], xq[keep], gap[keep]
    taylor = np.atleast_1d(dist.eta_taylor(x, xq))
    actual = np.atleast_1d(dist.eta(xq))
    ratios = np.abs(actual - taylor) / (spec.L * gap ** spec.beta)
    worst = float(np.max(ratios)) if ratios.size else 0.0
    return HolderReport(
        passed=worst <= 1.0 + 1e-9,
        worst_ratio=worst,
        pairs_checked=int(ratios.size),
        spec=spec,
    )
