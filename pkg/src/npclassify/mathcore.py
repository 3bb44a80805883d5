"""Multi-index algebra, compactly supported kernels, and smooth bump functions.

Everything here is pure and immutable: safe to call from any number of
workers.  The multi-index enumeration order is a *contract* — design
matrices elsewhere index their rows and columns by it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "MultiIndex",
    "KernelSpec",
    "HolderSpec",
    "MissingDerivativeError",
    "enumerate_multiindices",
    "monomial_eval",
    "taylor_eval",
    "kernel_eval",
    "uniform_ball_kernel",
    "smooth_bump_kernel",
    "bump_profile",
    "bump_profile_deriv",
    "bump_normalizer",
    "radial_bump",
    "unit_ball_volume",
]


class MissingDerivativeError(KeyError):
    """A Taylor evaluation was asked for with an incomplete derivative map."""


@dataclass(frozen=True)
class MultiIndex:
    """Exponent vector s in N^d for monomials, derivatives and Taylor terms."""

    exponents: tuple

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if len(exps) == 0:
            raise ValueError("multi-index needs at least one exponent")
        if any(e < 0 for e in exps):
            raise ValueError(f"multi-index entries must be >= 0, got {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def dim(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        """|s| = sum of the exponents."""
        return sum(self.exponents)

    @property
    def factorial(self) -> int:
        """s! = product of per-coordinate factorials (exact integer)."""
        out = 1
        for e in self.exponents:
            out *= math.factorial(e)
        return out


def enumerate_multiindices(d: int, l: int) -> list[MultiIndex]:
    """All multi-indices s with |s| <= l, in graded order.

    Indices are sorted by total degree; within a degree block the exponent
    weight moves from the first axis towards the last, e.g. for d=2, l=1
    the order is (0,0), (1,0), (0,1).  The list has C(d+l, l) entries and
    fixes the row/column layout of every local design matrix, so the order
    must never change.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if l < 0:
        raise ValueError("maximal degree must be >= 0")
    raw = [
        s
        for s in itertools.product(range(l + 1), repeat=d)
        if sum(s) <= l
    ]
    raw.sort(key=lambda s: (sum(s), tuple(-e for e in s)))
    return [MultiIndex(s) for s in raw]


def indices_matrix(indices: list[MultiIndex]) -> np.ndarray:
    """Stack multi-indices into an (M, d) integer array."""
    return np.array([mi.exponents for mi in indices], dtype=np.int64)


def monomial_eval(u, s: MultiIndex) -> float:
    """u^s = u_1^{s_1} ... u_d^{s_d}; the zero index gives 1."""
    u = np.asarray(u, dtype=float)
    e = np.asarray(s.exponents if isinstance(s, MultiIndex) else s, dtype=np.int64)
    if u.shape[-1] != e.shape[0]:
        raise ValueError("point and multi-index dimensions differ")
    return float(np.prod(u ** e))


def taylor_eval(derivs, x, xq, max_degree: int | None = None) -> float:
    """Evaluate the Taylor polynomial sum_{|s|<=k} (xq-x)^s / s! * D^s.

    ``derivs`` maps multi-indices (``MultiIndex`` or plain tuples) to the
    derivative values at the base point ``x``.  ``max_degree`` defaults to
    the largest degree present in the map; every index up to that degree
    must be present.
    """
    table = {}
    for key, val in derivs.items():
        mi = key if isinstance(key, MultiIndex) else MultiIndex(tuple(np.atleast_1d(key)))
        table[mi] = float(val)
    if not table:
        raise MissingDerivativeError("empty derivative map")
    if max_degree is None:
        max_degree = max(mi.degree for mi in table)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xq = np.atleast_1d(np.asarray(xq, dtype=float))
    d = x.shape[0]
    diff = xq - x
    total = 0.0
    for mi in enumerate_multiindices(d, max_degree):
        if mi not in table:
            raise MissingDerivativeError(
                f"derivative for multi-index {mi.exponents} is missing"
            )
        total += monomial_eval(diff, mi) / mi.factorial * table[mi]
    return total


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def unit_ball_volume(d: int) -> float:
    """Lebesgue volume of the Euclidean unit ball in R^d."""
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


@dataclass(frozen=True)
class KernelSpec:
    """A compactly supported kernel K >= 0 with unit integral.

    ``norm_const`` is precomputed so that the kernel integrates to one;
    ``lower_c`` is a constant c > 0 with K(x) >= c whenever ||x|| <= c,
    which keeps local design matrices well conditioned on regular supports.
    """

    kind: str  # "uniform-ball" | "smooth-bump"
    dim: int
    radius: float
    norm_const: float
    lower_c: float

    def __post_init__(self):
        if self.kind not in ("uniform-ball", "smooth-bump"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.radius <= 0 or self.norm_const <= 0 or self.lower_c <= 0:
            raise ValueError("kernel constants must be positive")


def uniform_ball_kernel(d: int, radius: float = 1.0) -> KernelSpec:
    """Indicator of the ball ||u|| <= radius, normalized to unit mass."""
    value = 1.0 / (unit_ball_volume(d) * radius ** d)
    return KernelSpec(
        kind="uniform-ball",
        dim=d,
        radius=float(radius),
        norm_const=value,
        lower_c=min(radius, value),
    )


@lru_cache(maxsize=None)
def _bump_radial_integral(d: int) -> float:
    # int_0^1 t^{d-1} exp(-1/(1-t^2)) dt via a fixed Gauss-Legendre rule
    t = 0.5 * (_GL_X + 1.0)
    vals = t ** (d - 1) * np.exp(-1.0 / (1.0 - t ** 2))
    return float(0.5 * np.sum(_GL_W * vals))


def smooth_bump_kernel(d: int, radius: float = 1.0) -> KernelSpec:
    """Infinitely differentiable kernel A exp(-1/(1 - ||u/r||^2)) on ||u|| < r."""
    surface = d * unit_ball_volume(d)
    norm = 1.0 / (radius ** d * surface * _bump_radial_integral(d))
    half_value = norm * math.exp(-1.0 / (1.0 - 0.25))
    return KernelSpec(
        kind="smooth-bump",
        dim=d,
        radius=float(radius),
        norm_const=norm,
        lower_c=min(radius / 2.0, half_value),
    )


def kernel_eval(spec: KernelSpec, u) -> np.ndarray | float:
    """Evaluate the kernel at one point (d,) or a batch (m, d)."""
    arr = np.asarray(u, dtype=float)
    single = arr.ndim == 1
    pts = np.atleast_2d(arr)
    if pts.shape[1] != spec.dim:
        raise ValueError("point dimension does not match kernel dimension")
    r = np.linalg.norm(pts, axis=1)
    if spec.kind == "uniform-ball":
        out = np.where(r <= spec.radius, spec.norm_const, 0.0)
    else:
        out = np.zeros_like(r)
        inside = r < spec.radius
        s = (r[inside] / spec.radius) ** 2
        out[inside] = spec.norm_const * np.exp(-1.0 / (1.0 - s))
    return float(out[0]) if single else out


# ---------------------------------------------------------------------------
# smooth bump profile: infinitely differentiable, 1 on [0, 1/4], 0 on [1/2, inf)
# ---------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(128)


def _seed_density(t: np.ndarray) -> np.ndarray:
    # exp(-1/((1/2 - t)(t - 1/4))) on (1/4, 1/2), zero elsewhere
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0.25) & (t < 0.5)
    g = (0.5 - t[inside]) * (t[inside] - 0.25)
    out[inside] = np.exp(-1.0 / g)
    return out


@lru_cache(maxsize=1)
def bump_normalizer() -> float:
    """The integral of the seed density over (1/4, 1/2), cached at first use."""
    nodes = 0.25 + 0.125 * (_GL_X + 1.0)
    return float(0.125 * np.sum(_GL_W * _seed_density(nodes)))


def bump_profile(t) -> np.ndarray | float:
    """Nonincreasing C-infinity profile: 1 for t <= 1/4, 0 for t >= 1/2.

    Interior values are tail integrals of the seed density evaluated with a
    fixed 128-node Gauss-Legendre rule (the nodes are cached at module
    import); the relative accuracy is far below the 1e-10 target.
    """
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("bump profile is only defined for t >= 0")
    single = arr.ndim == 0
    vals = np.atleast_1d(arr)
    out = np.empty_like(vals)
    out[vals <= 0.25] = 1.0
    out[vals >= 0.5] = 0.0
    interior = (vals > 0.25) & (vals < 0.5)
    if np.any(interior):
        a = vals[interior][:, None]
        half = 0.5 * (0.5 - a)
        nodes = a + half * (_GL_X[None, :] + 1.0)
        tails = np.sum(_GL_W[None, :] * _seed_density(nodes), axis=1) * half[:, 0]
        out[interior] = tails / bump_normalizer()
    return float(out[0]) if single else out


def bump_profile_deriv(t) -> np.ndarray | float:
    """First derivative of :func:`bump_profile` (zero outside (1/4, 1/2))."""
    arr = np.asarray(t, dtype=float)
    single = arr.ndim == 0
    vals = np.atleast_1d(arr)
    out = -_seed_density(vals) / bump_normalizer()
    return float(out[0]) if single else out


def radial_bump(x, amplitude: float) -> np.ndarray | float:
    """amplitude * bump_profile(||x||): a radial plateau of the given height.

    Equals ``amplitude`` on ||x|| <= 1/4 and vanishes on ||x|| >= 1/2.
    """
    if not 0.0 < amplitude <= 1.0:
        raise ValueError("amplitude must lie in (0, 1]")
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = np.atleast_2d(arr)
    out = amplitude * bump_profile(np.linalg.norm(pts, axis=1))
    return float(out[0]) if single else out


# ---------------------------------------------------------------------------
# smoothness classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HolderSpec:
    """Smoothness class parameters (exponent beta, constant L, dimension d)."""

    beta: float
    L: float
    d: int

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def floor_beta(self) -> int:
        """Maximal integer strictly less than beta (beta=2 gives 1)."""
        return math.ceil(self.beta) - 1
