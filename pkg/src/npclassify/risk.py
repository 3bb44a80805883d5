"""Excess-risk oracles, rate fitting, concentration probes and risk bounds.

Excess risk is always computed from the known regression function (the
disagreement integral), never from held-out labels: the quantity of
interest is E[|2 eta(X) - 1| 1{f(X) != f*(X)}], and using the exact eta
removes label noise from every rate experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .distributions import HypercubeDistribution, SyntheticDistribution
from .lp import LPConfig, guarded_lp_estimate
from .mathcore import uniform_ball_kernel

__all__ = [
    "RiskEstimate",
    "RateFitResult",
    "ConcentrationProbe",
    "ExponentSummary",
    "RateUndefinedError",
    "excess_risk",
    "rate_fit",
    "concentration_probe",
    "spearman_concentration",
    "excess_bound_from_sup_error",
    "excess_bound_from_lp_error",
    "assouad_lower_bound",
    "theoretical_exponents",
    "margin_gap_excess_bound",
    "hypercube_sign_sweep",
    "StepFunction",
    "random_step_function",
    "excess_and_norms_1d",
]

_GL32_X, _GL32_W = np.polynomial.legendre.leggauss(32)


class RateUndefinedError(ValueError):
    """Raised when a log-log fit is impossible because the excess vanished."""


@dataclass(frozen=True)
class RiskEstimate:
    """An excess-risk value with its standard error and provenance."""

    value: float
    se: float
    method: str

    def __post_init__(self):
        if self.value < 0 or self.se < 0:
            raise ValueError("risk estimates and standard errors are >= 0")
        if self.method == "closed-form" and self.se != 0.0:
            raise ValueError("closed-form estimates carry no standard error")


@dataclass(frozen=True)
class RateFitResult:
    """Log-log slope of an (n, excess) series next to its theoretical exponent."""

    ns: np.ndarray
    excesses: np.ndarray
    ses: np.ndarray
    slope: float
    intercept: float
    slope_se: float
    theoretical: float


@dataclass(frozen=True)
class ConcentrationProbe:
    """Empirical exceedance probabilities over an (n, h, delta) grid."""

    grid: tuple
    probabilities: np.ndarray
    scaling: np.ndarray  # n h^d delta^2 per grid point
    replicates: int


@dataclass(frozen=True)
class ExponentSummary:
    """Named theoretical rate exponents for a parameter combination."""

    plugin_strong: float
    lower_mild: float
    sieve_sup: float | None
    sieve_lp: float | None
    fast: bool
    superfast: bool


# ---------------------------------------------------------------------------
# excess risk
# ---------------------------------------------------------------------------

def _ball_grid(center: np.ndarray, radius: float, points: int) -> np.ndarray:
    # deterministic stratified grid: mesh over the bounding cube, keep the
    # points inside the ball (exact for per-ball-constant classifiers)
    d = center.shape[0]
    per_axis = max(2, math.ceil(points ** (1.0 / d)))
    ticks = (np.arange(per_axis) + 0.5) / per_axis * 2.0 - 1.0
    mesh = np.stack(
        np.meshgrid(*([ticks] * d), indexing="ij"), axis=-1
    ).reshape(-1, d)
    mesh = mesh[np.linalg.norm(mesh, axis=1) <= 1.0]
    if mesh.shape[0] == 0:
        mesh = np.zeros((1, d))
    return center[None, :] + radius * mesh


def _excess_hypercube_closed_form(
    dist: HypercubeDistribution, classifier, points_per_ball: int
) -> RiskEstimate:
    # |2 eta - 1| is the constant bump height on each ball and zero on A0,
    # so the excess is the bump height times the disagreement mass per ball
    total = 0.0
    for j in range(dist.m):
        pts = _ball_grid(dist.centers[j], dist.ball_radius, points_per_ball)
        bayes = 1 if dist.sigma[j] > 0 else 0
        frac = float(np.mean(np.asarray(classifier.predict(pts)) != bayes))
        total += dist.w * dist.bump_height * frac
    return RiskEstimate(value=total, se=0.0, method="closed-form")


def excess_risk(
    dist: SyntheticDistribution,
    classifier,
    method: str = "monte-carlo",
    budget: int = 10000,
    rng: np.random.Generator | None = None,
    points_per_ball: int = 512,
) -> RiskEstimate:
    """E[|2 eta(X) - 1| 1{f(X) != f*(X)}] for a fitted classifier.

    ``monte-carlo`` draws feature vectors only (labels are not needed) and
    reports the sample mean with its standard error.  ``closed-form`` is
    available for hypercube laws: the per-ball constant |2 eta - 1| times a
    stratified-quadrature estimate of the disagreement mass (exact whenever
    the classifier is constant on each ball, zero standard error).
    """
    if method == "closed-form":
        if not isinstance(dist, HypercubeDistribution):
            raise ValueError("closed-form excess risk requires a hypercube law")
        return _excess_hypercube_closed_form(dist, classifier, points_per_ball)
    if method != "monte-carlo":
        raise ValueError(f"unknown excess risk method {method!r}")
    if rng is None:
        raise ValueError("monte-carlo excess risk needs an explicit rng")
    if budget < 2:
        raise ValueError("monte-carlo budget must be >= 2")
    x = dist.sample_x(budget, rng)
    disagree = np.asarray(classifier.predict(x)) != np.asarray(dist.bayes_label(x))
    vals = np.abs(2.0 * np.asarray(dist.eta(x)) - 1.0) * disagree
    return RiskEstimate(
        value=float(np.mean(vals)),
        se=float(np.std(vals, ddof=1) / math.sqrt(budget)),
        method=f"monte-carlo({budget})",
    )


def hypercube_sign_sweep(
    dist: HypercubeDistribution, classifier, points_per_ball: int = 512
):
    """Excess of one fixed classifier under every sign assignment, exactly.

    Returns (sign_matrix, excesses) over all 2^m laws sharing the geometry
    of ``dist``; feasible for m <= 12 or so, intended for m <= 4.
    """
    m = dist.m
    fracs_plus = np.empty(m)
    for j in range(m):
        pts = _ball_grid(dist.centers[j], dist.ball_radius, points_per_ball)
        fracs_plus[j] = float(np.mean(np.asarray(classifier.predict(pts)) != 1))
    signs = np.array(
        [[1 if (i >> j) & 1 else -1 for j in range(m)] for i in range(2 ** m)],
        dtype=np.int64,
    )
    frac = np.where(signs > 0, fracs_plus[None, :], 1.0 - fracs_plus[None, :])
    excesses = dist.w * dist.bump_height * frac.sum(axis=1)
    return signs, excesses


# ---------------------------------------------------------------------------
# rate fitting
# ---------------------------------------------------------------------------

def rate_fit(series, theoretical: float) -> RateFitResult:
    """Ordinary least squares of log(excess) on log(n).

    Only strictly positive excess values enter the fit; at least three are
    required.  A series whose excess vanished everywhere raises
    :class:`RateUndefinedError` — the signature of the exponential regime.
    """
    rows = []
    for entry in series:
        n, est = entry[0], entry[1]
        if isinstance(est, RiskEstimate):
            rows.append((int(n), est.value, est.se))
        else:
            se = entry[2] if len(entry) > 2 else 0.0
            rows.append((int(n), float(est), float(se)))
    rows.sort(key=lambda r: r[0])
    ns = np.array([r[0] for r in rows], dtype=float)
    excesses = np.array([r[1] for r in rows])
    ses = np.array([r[2] for r in rows])
    positive = excesses > 0
    if not np.any(positive):
        raise RateUndefinedError("rate undefined; excess vanished")
    if np.sum(positive) < 3:
        raise ValueError("rate fit needs at least 3 positive excess values")
    x = np.log(ns[positive])
    y = np.log(excesses[positive])
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * xbar)
    resid = y - (intercept + slope * x)
    k = x.size
    sigma2 = float(np.sum(resid ** 2) / (k - 2)) if k > 2 else 0.0
    slope_se = math.sqrt(sigma2 / sxx)
    return RateFitResult(
        ns=ns,
        excesses=excesses,
        ses=ses,
        slope=slope,
        intercept=intercept,
        slope_se=slope_se,
        theoretical=float(theoretical),
    )


# ---------------------------------------------------------------------------
# concentration
# ---------------------------------------------------------------------------

def concentration_probe(
    dist: SyntheticDistribution,
    x,
    grid,
    replicates: int,
    rng: np.random.Generator,
    order: int | None = None,
    kernel=None,
    guard=None,
) -> ConcentrationProbe:
    """Exceedance frequencies of the guarded estimate over an (n, h, delta) grid.

    For every grid point the estimator is refit on ``replicates`` fresh
    samples and the fraction of runs with |estimate - eta(x)| >= delta is
    recorded, together with the scaling variable n h^d delta^2.
    """
    if replicates < 100:
        raise ValueError("concentration probes need at least 100 replicates")
    x = np.asarray(x, dtype=float)
    if order is None:
        order = math.ceil(dist.beta) - 1
    if kernel is None:
        kernel = uniform_ball_kernel(dist.d)
    truth = float(dist.eta(x[None, :])[0])
    probs = []
    scaling = []
    for n, h, delta in grid:
        kwargs = {"order": order, "bandwidth": float(h), "kernel": kernel}
        if guard is not None:
            kwargs["guard_threshold"] = guard
        cfg = LPConfig(**kwargs)
        exceed = 0
        for _ in range(replicates):
            sample = dist.sample(int(n), rng)
            est = guarded_lp_estimate(sample, x, cfg)
            if abs(est - truth) >= delta:
                exceed += 1
        probs.append(exceed / replicates)
        scaling.append(float(n) * float(h) ** dist.d * float(delta) ** 2)
    return ConcentrationProbe(
        grid=tuple((int(n), float(h), float(d)) for n, h, d in grid),
        probabilities=np.asarray(probs),
        scaling=np.asarray(scaling),
        replicates=replicates,
    )


def spearman_concentration(probe: ConcentrationProbe) -> float:
    """Spearman correlation of log exceedance vs the scaling variable.

    Zero-count cells are ignored (their log is undefined).
    """
    mask = probe.probabilities > 0
    if np.sum(mask) < 3:
        raise ValueError("too few nonzero exceedance cells for a rank statistic")
    rho, _ = stats.spearmanr(
        np.log(probe.probabilities[mask]), probe.scaling[mask]
    )
    return float(rho)


# ---------------------------------------------------------------------------
# comparison bounds
# ---------------------------------------------------------------------------

def excess_bound_from_sup_error(alpha: float, c0: float, sup_err: float) -> float:
    """Excess-risk bound 2 C0 e^(1+alpha) for a sup-norm regression error e."""
    if sup_err < 0:
        raise ValueError("sup error must be >= 0")
    return 2.0 * c0 * sup_err ** (1.0 + alpha)


def excess_bound_from_lp_error(
    alpha: float, c0: float, p: float, lp_err: float
) -> float:
    """Excess-risk bound C1(alpha, p) e^(p(1+alpha)/(p+alpha)) for an L_p error e.

    C1(alpha, p) = 2 (alpha + p)/p * (p/alpha)^(alpha/(alpha+p))
    * C0^((p-1)/(alpha+p)); requires alpha > 0 (use the sup-norm bound at
    alpha = 0).
    """
    if alpha <= 0:
        raise ValueError("the L_p comparison bound requires alpha > 0")
    if p < 1 or math.isinf(p):
        raise ValueError("norm index p must be finite and >= 1")
    if lp_err < 0:
        raise ValueError("L_p error must be >= 0")
    c1 = (
        2.0
        * (alpha + p)
        / p
        * (p / alpha) ** (alpha / (alpha + p))
        * c0 ** ((p - 1.0) / (alpha + p))
    )
    return c1 * lp_err ** (p * (1.0 + alpha) / (p + alpha))


def assouad_lower_bound(
    m: int, w: float, n: int, b: float, b_prime: float
) -> float:
    """m w b' (1 - b sqrt(n w)) / 2, floored at zero where it is vacuous."""
    if m <= 0 or w <= 0 or n <= 0 or b <= 0 or b_prime <= 0:
        raise ValueError("all lower-bound inputs must be positive")
    return max(0.0, m * w * b_prime * (1.0 - b * math.sqrt(n * w)) / 2.0)


def theoretical_exponents(
    alpha: float,
    beta: float,
    d: int,
    rho: float | None = None,
    p: float = math.inf,
) -> ExponentSummary:
    """Rate exponents (positive numbers r for excess ~ n^-r) and regime flags."""
    if alpha < 0 or beta <= 0 or d < 1:
        raise ValueError("need alpha >= 0, beta > 0, d >= 1")
    plugin_strong = beta * (1.0 + alpha) / (2.0 * beta + d)
    lower_mild = (1.0 + alpha) * beta / ((2.0 + alpha) * beta + d)
    sieve_sup = None
    sieve_lp = None
    if rho is not None:
        if rho <= 0:
            raise ValueError("entropy exponent rho must be positive")
        sieve_sup = (1.0 + alpha) / (2.0 + alpha + rho)
        if not math.isinf(p):
            if p < 1:
                raise ValueError("norm index p must be >= 1")
            sieve_lp = (1.0 + alpha) * p / ((2.0 + alpha) * p + rho * (p + alpha))
    return ExponentSummary(
        plugin_strong=plugin_strong,
        lower_mild=lower_mild,
        sieve_sup=sieve_sup,
        sieve_lp=sieve_lp,
        fast=alpha * beta > d / 2.0,
        superfast=alpha * beta > d,
    )


def margin_gap_excess_bound(
    dist, eta_hat, budget: int, rng: np.random.Generator
):
    """Exceedance bound P(|eta_hat(X) - eta(X)| > t0) next to the direct excess.

    Valid for laws with a positive margin gap t0 (no mass within t0 of the
    boundary).  Both quantities are estimated on the same feature draws, so
    the bound dominates the direct estimate up to shared noise.
    """
    t0 = dist.t0
    x = dist.sample_x(budget, rng)
    eta_true = np.asarray(dist.eta(x))
    eta_est = np.asarray(eta_hat(x))
    exceed = (np.abs(eta_est - eta_true) > t0).astype(float)
    pred = (eta_est >= 0.5).astype(np.int64)
    disagree = pred != np.asarray(dist.bayes_label(x))
    direct_vals = np.abs(2.0 * eta_true - 1.0) * disagree
    bound = RiskEstimate(
        value=float(np.mean(exceed)),
        se=float(np.std(exceed, ddof=1) / math.sqrt(budget)),
        method=f"monte-carlo({budget})",
    )
    direct = RiskEstimate(
        value=float(np.mean(direct_vals)),
        se=float(np.std(direct_vals, ddof=1) / math.sqrt(budget)),
        method=f"monte-carlo({budget})",
    )
    return bound, direct


# ---------------------------------------------------------------------------
# exact one-dimensional quadrature for piecewise-constant regression proxies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on a strictly increasing edge grid."""

    edges: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if edges.ndim != 1 or values.shape != (edges.size - 1,):
            raise ValueError("need k+1 edges for k values")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", values)

    def eval(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1)
        idx = np.clip(
            np.searchsorted(self.edges, xs, side="right") - 1,
            0,
            self.values.size - 1,
        )
        return self.values[idx]

    def predict(self, x):
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        return (self.eval(pts[:, 0]) >= 0.5).astype(np.int64)


def random_step_function(
    lo: float, hi: float, cells: int, rng: np.random.Generator
) -> StepFunction:
    """A random piecewise-constant regression proxy with values in [0, 1]."""
    edges = np.linspace(lo, hi, cells + 1)
    return StepFunction(edges=edges, values=rng.random(cells))


def _segment_breaks(lo, hi, extra):
    pts = [lo, hi]
    for e in extra:
        if lo < e < hi:
            pts.append(float(e))
    return np.array(sorted(set(pts)))


def _gl_integral(fn, a, b):
    nodes = 0.5 * (b - a) * _GL32_X + 0.5 * (a + b)
    return 0.5 * (b - a) * float(np.sum(_GL32_W * fn(nodes)))


def excess_and_norms_1d(dist, step: StepFunction, ps=(1, 2)):
    """Exact excess risk and regression-error norms of a step proxy (d = 1).

    Integrates against the piecewise-constant marginal density, splitting
    at component edges, step edges, the critical points of eta, and the
    roots of eta - value (located by bracketing), so each Gauss segment is
    smooth.  Returns (excess, sup_error, {p: lp_error}).
    """
    components = dist.density_components_1d()
    crit = dist.eta_critical_points_1d()

    def eta1(xs):
        return np.asarray(dist.eta(np.asarray(xs, dtype=float).reshape(-1, 1)))

    excess = 0.0
    sup_err = 0.0
    lp_acc = {p: 0.0 for p in ps}
    for lo, hi, mass in components:
        dens = mass / (hi - lo)
        breaks = _segment_breaks(lo, hi, list(step.edges) + list(crit))
        for a, b in zip(breaks[:-1], breaks[1:]):
            mid = 0.5 * (a + b)
            v = float(step.eval(mid)[0])
            fbar = 1 if v >= 0.5 else 0
            fstar = int(eta1([mid])[0] >= 0.5)
            if fbar != fstar:
                excess += dens * _gl_integral(
                    lambda xs: np.abs(2.0 * eta1(xs) - 1.0), a, b
                )
            # eta is monotone between consecutive breaks, so the sup of
            # |eta - v| sits at an endpoint
            cand = np.array([a, b])
            sup_err = max(sup_err, float(np.max(np.abs(eta1(cand) - v))))
            # split at roots of eta - v so |eta - v|^p is smooth per piece
            ga, gb = float(eta1([a])[0] - v), float(eta1([b])[0] - v)
            inner = [a, b]
            if ga * gb < 0:
                root = optimize.brentq(
                    lambda t: float(eta1([t])[0]) - v, a, b, xtol=1e-14
                )
                inner = [a, root, b]
            for aa, bb in zip(inner[:-1], inner[1:]):
                if bb <= aa:
                    continue
                for p in ps:
                    lp_acc[p] += dens * _gl_integral(
                        lambda xs: np.abs(eta1(xs) - v) ** p, aa, bb
                    )
    norms = {p: lp_acc[p] ** (1.0 / p) for p in ps}
    return excess, sup_err, norms
