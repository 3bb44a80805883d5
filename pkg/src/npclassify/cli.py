"""Command-line experiment harness with reproducible CSV/JSON artifacts.

Usage::

    npclassify <subcommand> --config cfg.json [--out DIR] [--svg name.svg] [--seed N]

Subcommands: ``rates``, ``lower-bound``, ``margin-check``, ``concentration``,
``sieve-vs-plugin``, ``corridor``, ``compare-bounds``.

Exit codes: 0 = checks passed, 2 = invalid config, 3 = checks failed.

Config JSON schema (fields not used by a subcommand may be omitted)::

    {
      "experiment":   "rates",
      "distribution": {"kind": "quadratic-ball", "dim": 2, "curvature": 0.25},
      "estimator":    {"kind": "plugin-lp", "order": 1,
                       "bandwidth": {"rule": "rate-optimal"},
                       "kernel": {"kind": "uniform-ball", "radius": 1.0},
                       "guard": {"rule": "fixed", "value": 1e-3}},
      "n_grid":       [256, 512, 1024, 2048, 4096, 8192],
      "replicates":   50,
      "mc_budget":    2000,
      "seed":         7,
      "workers":      1,
      "tolerance":    {"slope": 0.2}
    }

Distribution kinds: ``quadratic-ball`` (dim, curvature), ``corridor``
(gap, slope), ``hypercube`` (q, m, w, beta, c_phi, sigma, a0_mode, dim,
alpha), ``hypercube-strong-regime`` / ``hypercube-mild-regime`` (n, alpha,
beta, dim plus the regime constants).

Every run is seeded from the config (never from the clock) and replicate
streams are spawned per task, so CSV output is byte-identical across
reruns and worker counts.  The ``wall_ms`` CSV column is fixed at 0 to
keep files reproducible; real timings go to the summary JSON.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from functools import partial
from pathlib import Path

import numpy as np

from .distributions import (
    CorridorDistribution,
    HypercubeDistribution,
    ValidationError,
    corridor,
    hypercube_build,
    hypercube_mild_density_regime,
    hypercube_strong_density_regime,
    quadratic_ball,
    validate_holder,
)
from .lp import (
    LPConfig,
    PluginClassifier,
    default_guard_threshold,
    rate_optimal_bandwidth,
)
from .mathcore import HolderSpec, smooth_bump_kernel, uniform_ball_kernel
from .risk import (
    RateUndefinedError,
    assouad_lower_bound,
    concentration_probe,
    excess_bound_from_lp_error,
    excess_bound_from_sup_error,
    excess_risk,
    excess_and_norms_1d,
    hypercube_sign_sweep,
    random_step_function,
    rate_fit,
    spearman_concentration,
    theoretical_exponents,
)
from .sieve import NetSpec, UnsupportedSmoothnessError, build_net, epsilon_schedule, sieve_fit

CSV_COLUMNS = ["experiment", "n", "replicate", "seed", "excess", "se", "wall_ms"]

EXPERIMENTS = (
    "rates",
    "lower-bound",
    "margin-check",
    "concentration",
    "sieve-vs-plugin",
    "corridor",
    "compare-bounds",
)


class ConfigError(ValueError):
    """Configuration that violates the experiment contract."""


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing required field {key!r}")
    return cfg[key]


def load_config(path: str, experiment: str, seed_override=None) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    if seed_override is not None:
        cfg["seed"] = int(seed_override)
    declared = cfg.get("experiment", experiment)
    if declared != experiment:
        raise ConfigError(
            f"config declares experiment {declared!r} but {experiment!r} was requested"
        )
    cfg["experiment"] = experiment
    if "seed" not in cfg:
        raise ConfigError("config must declare an integer seed (no clock fallback)")
    cfg.setdefault("workers", 1)
    cfg.setdefault("replicates", 50)
    cfg.setdefault("mc_budget", 2000)
    cfg.setdefault("tolerance", {})
    if not isinstance(cfg["seed"], int):
        raise ConfigError("seed must be an integer")
    if int(cfg["workers"]) < 1:
        raise ConfigError("workers must be >= 1")
    if int(cfg["replicates"]) < 1:
        raise ConfigError("replicates must be >= 1")
    if int(cfg["mc_budget"]) < 2:
        raise ConfigError("mc_budget must be >= 2")
    if "n_grid" in cfg:
        grid = cfg["n_grid"]
        if (
            not isinstance(grid, list)
            or not grid
            or any(int(a) >= int(b) for a, b in zip(grid, grid[1:]))
        ):
            raise ConfigError("n_grid must be a non-empty strictly increasing list")
        cfg["n_grid"] = [int(v) for v in grid]
    return cfg


def build_distribution(desc: dict):
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("distribution descriptor must be an object with a 'kind'")
    kind = desc["kind"]
    try:
        if kind == "quadratic-ball":
            return quadratic_ball(int(desc.get("dim", 1)), float(desc.get("curvature", 0.25)))
        if kind == "corridor":
            return corridor(float(desc.get("gap", 0.25)), float(desc.get("slope", 0.25)))
        if kind == "hypercube":
            return hypercube_build(
                q=int(_require(desc, "q")),
                m=int(_require(desc, "m")),
                w=float(_require(desc, "w")),
                beta=float(desc.get("beta", 1.0)),
                c_phi=float(desc.get("c_phi", 0.5)),
                sigma=desc.get("sigma", [1] * int(desc["m"])),
                a0_mode=desc.get("a0_mode", "cube-complement"),
                d=int(desc.get("dim", 1)),
                alpha=float(desc.get("alpha", 0.0)),
                holder_l=desc.get("holder_l"),
            )
        if kind == "hypercube-strong-regime":
            return hypercube_strong_density_regime(
                n=int(_require(desc, "n")),
                alpha=float(_require(desc, "alpha")),
                beta=float(_require(desc, "beta")),
                d=int(desc.get("dim", 1)),
                cbar=float(desc.get("cbar", 1.0)),
                cprime=float(desc.get("cprime", 0.5)),
                csecond=float(desc.get("csecond", 1.0)),
                c_phi=float(desc.get("c_phi", 0.5)),
            )
        if kind == "hypercube-mild-regime":
            return hypercube_mild_density_regime(
                n=int(_require(desc, "n")),
                alpha=float(_require(desc, "alpha")),
                beta=float(_require(desc, "beta")),
                d=int(desc.get("dim", 1)),
                c=float(desc.get("c", 1.0)),
                cprime=float(desc.get("cprime", 0.5)),
                c_phi=float(desc.get("c_phi", 0.5)),
            )
    except ValidationError as exc:
        raise ConfigError(f"invalid distribution parameters: {exc}") from exc
    raise ConfigError(f"unknown distribution kind {kind!r}")


def _fixed_guard(value: float, n: int) -> float:
    return value


def _scaled_log_guard(scale: float, n: int) -> float:
    return scale * default_guard_threshold(n)


def _build_guard(desc):
    if desc is None or desc == {"rule": "log"} or desc == "log":
        return default_guard_threshold
    if not isinstance(desc, dict) or "rule" not in desc:
        raise ConfigError("estimator guard must be {'rule': ...}")
    if desc["rule"] == "log":
        return default_guard_threshold
    if desc["rule"] == "fixed":
        value = float(_require(desc, "value"))
        if value <= 0:
            raise ConfigError("fixed guard threshold must be positive")
        return partial(_fixed_guard, value)
    if desc["rule"] == "scaled-log":
        scale = float(_require(desc, "scale"))
        if scale <= 0:
            raise ConfigError("guard scale must be positive")
        return partial(_scaled_log_guard, scale)
    raise ConfigError(f"unknown guard rule {desc['rule']!r}")


def _build_kernel(desc, d: int):
    if desc is None:
        return uniform_ball_kernel(d)
    kind = desc.get("kind", "uniform-ball")
    radius = float(desc.get("radius", 1.0))
    if kind == "uniform-ball":
        return uniform_ball_kernel(d, radius)
    if kind == "smooth-bump":
        return smooth_bump_kernel(d, radius)
    raise ConfigError(f"unknown kernel kind {kind!r}")


def build_lp_config(est: dict, dist, n: int) -> LPConfig:
    order = est.get("order")
    if order is None:
        order = max(0, math.ceil(dist.beta) - 1)
    bw = est.get("bandwidth", {"rule": "rate-optimal"})
    rule = bw.get("rule", "rate-optimal")
    if rule == "rate-optimal":
        beta = float(bw.get("beta", dist.beta))
        h = rate_optimal_bandwidth(n, HolderSpec(beta=beta, L=1.0, d=dist.d))
    elif rule == "fixed":
        h = float(_require(bw, "value"))
        if h <= 0:
            raise ConfigError("fixed bandwidth must be positive")
    else:
        raise ConfigError(f"unknown bandwidth rule {rule!r}")
    return LPConfig(
        order=int(order),
        bandwidth=h,
        kernel=_build_kernel(est.get("kernel"), dist.d),
        guard_threshold=_build_guard(est.get("guard")),
    )


def _margin_alpha(cfg: dict, dist) -> float:
    alpha = cfg.get("margin_alpha", dist.alpha)
    if math.isinf(alpha):
        raise ConfigError(
            "distribution declares an infinite margin exponent; "
            "set 'margin_alpha' explicitly for rate comparisons"
        )
    return float(alpha)


# ---------------------------------------------------------------------------
# sieve arm: affine map of the support box onto the unit cube
# ---------------------------------------------------------------------------

class MappedSieve:
    """Sieve classifier trained on the support box mapped to [0,1]^d."""

    def __init__(self, dist, sample, epsilon: float):
        beta = dist.beta
        if beta > 1.0:
            raise UnsupportedSmoothnessError(
                "sieve classification requires beta <= 1"
            )
        lo, hi = dist.support_box()
        self.lo = lo
        self.span = hi - lo
        scale = float(np.max(self.span))
        holder = HolderSpec(beta=beta, L=dist.holder_l * scale ** beta, d=dist.d)
        net = build_net(NetSpec(holder=holder, epsilon=epsilon))
        mapped = sample.__class__(x=self._map(sample.x), y=sample.y)
        self._clf = sieve_fit(mapped, net)

    def _map(self, x):
        return np.clip((np.atleast_2d(x) - self.lo[None, :]) / self.span[None, :], 0.0, 1.0)

    def eta(self, x):
        return self._clf.eta(self._map(x))

    def predict(self, x):
        return self._clf.predict(self._map(x))


def _fit_classifier(est: dict, dist, sample, n: int, cfg: dict):
    kind = est.get("kind", "plugin-lp")
    if kind == "plugin-lp":
        return PluginClassifier(sample, build_lp_config(est, dist, n))
    if kind == "sieve":
        alpha = est.get("alpha")
        alpha = _margin_alpha(cfg, dist) if alpha is None else float(alpha)
        rho = float(est.get("rho", dist.d / min(dist.beta, 1.0)))
        p = est.get("p", "inf")
        p_val = math.inf if p in ("inf", None) else float(p)
        eps = float(est.get("epsilon_scale", 1.0)) * epsilon_schedule(
            n, alpha, rho, p_val
        )
        return MappedSieve(dist, sample, eps)
    raise ConfigError(f"unknown estimator kind {kind!r}")


# ---------------------------------------------------------------------------
# replicate tasks (module-level so they survive pickling into worker pools)
# ---------------------------------------------------------------------------

def _task_rngs(task):
    ss = np.random.SeedSequence(
        entropy=task["seed_entropy"], spawn_key=tuple(task["spawn_key"])
    )
    train, evaluate = ss.spawn(2)
    return np.random.default_rng(train), np.random.default_rng(evaluate)


def _run_task(task: dict) -> dict:
    start = time.perf_counter()
    dist = build_distribution(task["distribution"])
    rng_train, rng_eval = _task_rngs(task)
    n = task["n"]
    sample = dist.sample(n, rng_train)
    out = {
        "n": n,
        "replicate": task["replicate"],
        "seed": task["seed_id"],
    }
    results = {}
    for label, est in task["estimators"].items():
        clf = _fit_classifier(est, dist, sample, n, task.get("cfg", {}))
        estimate = excess_risk(
            dist, clf, method="monte-carlo", budget=task["mc_budget"], rng=rng_eval
        )
        results[label] = (estimate.value, estimate.se)
    out["results"] = results
    if task.get("hash_sample") and task["replicate"] == 0:
        digest = hashlib.sha256()
        digest.update(sample.x.tobytes())
        digest.update(sample.y.tobytes())
        out["sample_hash"] = digest.hexdigest()
    out["wall_ms"] = (time.perf_counter() - start) * 1000.0
    return out


def _dispatch(tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    import multiprocessing as mp

    try:
        ctx = mp.get_context("fork")
        with ctx.Pool(processes=workers) as pool:
            chunk = max(1, len(tasks) // (4 * workers))
            return pool.map(_run_task, tasks, chunksize=chunk)
    except (OSError, ValueError):  # pool unavailable: fall back to inline
        return [_run_task(t) for t in tasks]


def _make_tasks(cfg: dict, estimators: dict, hash_sample=False):
    master = np.random.SeedSequence(cfg["seed"])
    tasks = []
    pairs = [(n, rep) for n in cfg["n_grid"] for rep in range(cfg["replicates"])]
    children = master.spawn(len(pairs))
    for (n, rep), child in zip(pairs, children):
        tasks.append(
            {
                "distribution": cfg["distribution"],
                "estimators": estimators,
                "n": int(n),
                "replicate": int(rep),
                "mc_budget": int(cfg["mc_budget"]),
                "seed_entropy": child.entropy,
                "spawn_key": list(child.spawn_key),
                "seed_id": int(child.generate_state(1, np.uint64)[0]),
                "cfg": {k: cfg[k] for k in ("margin_alpha",) if k in cfg},
                "hash_sample": hash_sample,
            }
        )
    return tasks


def _aggregate(results, label: str):
    by_n = {}
    for res in results:
        by_n.setdefault(res["n"], []).append(res["results"][label][0])
    series = []
    for n in sorted(by_n):
        vals = np.asarray(by_n[n])
        se = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        series.append((n, float(np.mean(vals)), se))
    return series


# ---------------------------------------------------------------------------
# artifact writers
# ---------------------------------------------------------------------------

def _format_number(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: Path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_format_number(row[c]) for c in CSV_COLUMNS])


def write_summary(path: Path, summary: dict):
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def write_svg(path: Path, series: dict, title: str, seed: int):
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = str(seed)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, pts in series.items():
        ns = [p[0] for p in pts if p[1] > 0]
        ys = [p[1] for p in pts if p[1] > 0]
        if ns:
            ax.loglog(ns, ys, marker="o", label=label)
    ax.set_xlabel("n")
    ax.set_ylabel("excess risk")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _rows_from_results(results, experiment: str, label: str):
    rows = []
    for res in sorted(results, key=lambda r: (r["n"], r["replicate"])):
        value, se = res["results"][label]
        rows.append(
            {
                "experiment": experiment,
                "n": res["n"],
                "replicate": res["replicate"],
                "seed": res["seed"],
                "excess": float(value),
                "se": float(se),
                "wall_ms": 0,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# experiment gates
# ---------------------------------------------------------------------------

def _gate_distribution(dist, cfg):
    report = validate_holder(dist, trials=2000, rng=np.random.default_rng(cfg["seed"]))
    if not report.passed:
        raise ConfigError(
            f"distribution fails its declared smoothness class "
            f"(worst ratio {report.worst_ratio:.3f})"
        )
    if math.isinf(dist.alpha):
        if dist.margin_mass(dist.t0 * 0.999) != 0.0:
            raise ConfigError("margin gap law has mass below its declared t0")
    else:
        for t in np.logspace(-4, 0, 9):
            if dist.margin_mass(float(t)) > dist.c0 * t ** dist.alpha + 1e-12:
                raise ConfigError(
                    f"margin mass exceeds its declared envelope at t = {t:.2e}"
                )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def run_rates(cfg: dict):
    if "n_grid" not in cfg:
        raise ConfigError("rates needs an n_grid")
    dist = build_distribution(cfg["distribution"])
    est = cfg.get("estimator", {"kind": "plugin-lp"})
    kind = est.get("kind", "plugin-lp")
    alpha = _margin_alpha(cfg, dist)
    if kind == "sieve" and dist.beta > 1.0:
        raise ConfigError("sieve estimation requires beta <= 1")
    _gate_distribution(dist, cfg)
    if kind == "plugin-lp":
        theoretical = theoretical_exponents(alpha, dist.beta, dist.d).plugin_strong
    else:
        rho = float(est.get("rho", dist.d / min(dist.beta, 1.0)))
        p = est.get("p", "inf")
        p_val = math.inf if p in ("inf", None) else float(p)
        exps = theoretical_exponents(alpha, dist.beta, dist.d, rho=rho, p=p_val)
        theoretical = exps.sieve_sup if math.isinf(p_val) else exps.sieve_lp

    tasks = _make_tasks(cfg, {"main": est})
    results = _dispatch(tasks, cfg["workers"])
    rows = _rows_from_results(results, "rates", "main")
    series = _aggregate(results, "main")
    tolerance = float(cfg["tolerance"].get("slope", 0.15))
    summary = {
        "experiment": "rates",
        "theoretical": theoretical,
        "tolerance": tolerance,
        "series": [{"n": n, "excess": e, "se": s} for n, e, s in series],
    }
    try:
        fit = rate_fit(series, theoretical)
        summary["measured"] = fit.slope
        summary["slope_se"] = fit.slope_se
        summary["pass"] = abs(fit.slope - (-theoretical)) <= tolerance
    except (RateUndefinedError, ValueError) as exc:
        summary["measured"] = None
        summary["note"] = str(exc)
        summary["pass"] = False
    return rows, summary, {"main": series}


def run_sieve_vs_plugin(cfg: dict):
    if "n_grid" not in cfg:
        raise ConfigError("sieve-vs-plugin needs an n_grid")
    dist = build_distribution(cfg["distribution"])
    if dist.beta > 1.0:
        raise ConfigError("sieve estimation requires beta <= 1")
    est = cfg.get("estimator", {})
    plugin_est = est.get("plugin", {"kind": "plugin-lp"})
    sieve_est = dict(est.get("sieve", {}))
    sieve_est["kind"] = "sieve"
    if plugin_est.get("kind", "plugin-lp") != "plugin-lp":
        raise ConfigError("the plugin arm must use the plugin-lp estimator")
    alpha = _margin_alpha(cfg, dist)
    _gate_distribution(dist, cfg)
    rho = float(sieve_est.get("rho", dist.d / dist.beta))
    p = sieve_est.get("p", "inf")
    p_val = math.inf if p in ("inf", None) else float(p)
    exps = theoretical_exponents(alpha, dist.beta, dist.d, rho=rho, p=p_val)
    theo_plugin = exps.plugin_strong
    theo_sieve = exps.sieve_sup if math.isinf(p_val) else exps.sieve_lp

    tasks = _make_tasks(
        cfg, {"plugin": plugin_est, "sieve": sieve_est}, hash_sample=True
    )
    results = _dispatch(tasks, cfg["workers"])
    rows = _rows_from_results(results, "sieve-vs-plugin:plugin", "plugin")
    rows += _rows_from_results(results, "sieve-vs-plugin:sieve", "sieve")
    series_p = _aggregate(results, "plugin")
    series_s = _aggregate(results, "sieve")
    gap_tol = float(cfg["tolerance"].get("slope_gap", 0.1))
    hashes = sorted(
        res.get("sample_hash") for res in results if "sample_hash" in res
    )
    summary = {
        "experiment": "sieve-vs-plugin",
        "theoretical": {"plugin": theo_plugin, "sieve": theo_sieve},
        "tolerance": {"slope_gap": gap_tol},
        "shared_sample_hashes": hashes,
        "series": {
            "plugin": [{"n": n, "excess": e, "se": s} for n, e, s in series_p],
            "sieve": [{"n": n, "excess": e, "se": s} for n, e, s in series_s],
        },
    }
    try:
        fit_p = rate_fit(series_p, theo_plugin)
        fit_s = rate_fit(series_s, theo_sieve)
        summary["measured"] = {"plugin": fit_p.slope, "sieve": fit_s.slope}
        summary["slope_se"] = {"plugin": fit_p.slope_se, "sieve": fit_s.slope_se}
        summary["pass"] = (
            fit_p.slope < 0
            and fit_s.slope < 0
            and fit_p.slope <= fit_s.slope + gap_tol
        )
    except (RateUndefinedError, ValueError) as exc:
        summary["measured"] = None
        summary["note"] = str(exc)
        summary["pass"] = False
    return rows, summary, {"plugin": series_p, "sieve": series_s}


def _default_margin_grid(dist):
    if isinstance(dist, HypercubeDistribution):
        step = dist.margin_step
        return [step / 4, step / 2, step * 0.999, step * 1.5, step * 4]
    if isinstance(dist, CorridorDistribution):
        t0 = dist.t0
        top = dist.slope
        return [t0 / 4, t0 / 2, t0 * 0.999, (t0 + top) / 2, top * 0.999]
    c = dist.curvature
    return [c / 64, c / 16, c / 4, c / 2, c * 0.999]


def run_margin_check(cfg: dict):
    dist = build_distribution(cfg["distribution"])
    budget = int(cfg["mc_budget"])
    t_grid = [float(t) for t in cfg.get("t_grid", _default_margin_grid(dist))]
    if any(t <= 0 for t in t_grid):
        raise ConfigError("margin grid values must be positive")
    z_tol = float(cfg["tolerance"].get("z", 3.0))
    rng = np.random.default_rng(np.random.SeedSequence(cfg["seed"]))
    x = dist.sample_x(budget, rng)
    gap = np.abs(2.0 * np.asarray(dist.eta(x)) - 1.0) / 2.0
    rows = []
    checks = []
    worst_z = 0.0
    all_ok = True
    for i, t in enumerate(sorted(t_grid)):
        closed = dist.margin_mass(t)
        emp = float(np.mean((gap > 0) & (gap <= t)))
        se = math.sqrt(closed * (1.0 - closed) / budget)
        if closed == 0.0 or se == 0.0:
            ok = emp == closed
            z = 0.0 if ok else math.inf
        else:
            z = abs(emp - closed) / se
            ok = z <= z_tol
        envelope_ok = True
        if math.isinf(dist.alpha):
            if t <= dist.t0:
                envelope_ok = closed == 0.0
        else:
            envelope_ok = closed <= dist.c0 * t ** dist.alpha + 1e-12
        all_ok = all_ok and ok and envelope_ok
        worst_z = max(worst_z, z if not math.isinf(z) else 1e9)
        checks.append(
            {"t": t, "closed_form": closed, "empirical": emp, "se": se,
             "z": z, "within": ok, "under_envelope": envelope_ok}
        )
        rows.append(
            {
                "experiment": "margin-check",
                "n": budget,
                "replicate": i,
                "seed": cfg["seed"],
                "excess": abs(emp - closed),
                "se": se,
                "wall_ms": 0,
            }
        )
    summary = {
        "experiment": "margin-check",
        "theoretical": {"alpha": "inf" if math.isinf(dist.alpha) else dist.alpha,
                        "c0": dist.c0},
        "measured": {"worst_z": worst_z},
        "tolerance": {"z": z_tol},
        "checks": checks,
        "pass": all_ok,
    }
    if isinstance(dist, HypercubeDistribution):
        summary["margin_step"] = dist.margin_step
        summary["step_verified"] = (
            dist.margin_mass(dist.margin_step * (1 - 1e-9)) == 0.0
            and dist.margin_mass(dist.margin_step) == dist.m * dist.w
        )
        summary["pass"] = summary["pass"] and summary["step_verified"]
    return rows, summary, None


class _ConstantClassifier:
    def __init__(self, label: int):
        self.label = int(label)

    def predict(self, x):
        return np.full(np.atleast_2d(x).shape[0], self.label, dtype=np.int64)


class _BayesOfSigns:
    def __init__(self, dist):
        self._dist = dist

    def predict(self, x):
        return self._dist.bayes_label(x)


def run_lower_bound(cfg: dict):
    dist = build_distribution(cfg["distribution"])
    if not isinstance(dist, HypercubeDistribution):
        raise ConfigError("lower-bound runs need a hypercube distribution")
    if dist.m > 4:
        raise ConfigError("lower-bound enumeration requires m <= 4")
    if "n_grid" not in cfg:
        raise ConfigError("lower-bound needs an n_grid (bound sample sizes)")
    clf_desc = cfg.get("classifier", {"kind": "bayes-plus"})
    if clf_desc.get("kind", "bayes-plus") == "bayes-plus":
        reference = hypercube_build(
            q=dist.q, m=dist.m, w=dist.w, beta=dist.beta, c_phi=dist.c_phi,
            sigma=np.ones(dist.m, dtype=np.int64), a0_mode=dist.a0_mode,
            d=dist.d, alpha=dist.alpha,
        )
        classifier = _BayesOfSigns(reference)
    elif clf_desc["kind"] == "constant":
        classifier = _ConstantClassifier(clf_desc.get("label", 0))
    else:
        raise ConfigError(f"unknown classifier kind {clf_desc['kind']!r}")

    signs, excesses = hypercube_sign_sweep(dist, classifier)
    average = float(np.mean(excesses))
    b = dist.bump_height
    rows = []
    bounds = {}
    vacuous = {}
    all_ok = True
    for n in cfg["n_grid"]:
        bound = assouad_lower_bound(dist.m, dist.w, n, b, b)
        bounds[str(n)] = bound
        vacuous[str(n)] = bound == 0.0
        all_ok = all_ok and (average >= bound - 1e-12)
        for idx in range(signs.shape[0]):
            rows.append(
                {
                    "experiment": "lower-bound",
                    "n": int(n),
                    "replicate": idx,
                    "seed": cfg["seed"],
                    "excess": float(excesses[idx]),
                    "se": 0.0,
                    "wall_ms": 0,
                }
            )
    summary = {
        "experiment": "lower-bound",
        "theoretical": bounds,
        "measured": average,
        "tolerance": {"sigma": 3.0, "se": 0.0},
        "vacuous": vacuous,
        "laws": signs.shape[0],
        "pass": all_ok,
    }
    return rows, summary, None


def run_concentration(cfg: dict):
    dist = build_distribution(cfg["distribution"])
    replicates = int(cfg["replicates"])
    if replicates < 100:
        raise ConfigError("concentration needs at least 100 replicates")
    if "grid" in cfg:
        grid = [(int(n), float(h), float(d)) for n, h, d in cfg["grid"]]
    else:
        if "n_grid" not in cfg:
            raise ConfigError("concentration needs a grid or an n_grid")
        h = float(cfg.get("h", 0.3))
        delta = float(cfg.get("delta", 0.06))
        grid = [(int(n), h, delta) for n in cfg["n_grid"]]
    x = np.asarray(cfg.get("x", [0.5] + [0.0] * (dist.d - 1)), dtype=float)
    if x.shape != (dist.d,):
        raise ConfigError("query point x must have the distribution dimension")
    est = cfg.get("estimator", {})
    order = est.get("order")
    kernel = _build_kernel(est.get("kernel"), dist.d)
    guard = _build_guard(est.get("guard")) if "guard" in est else None
    rng = np.random.default_rng(np.random.SeedSequence(cfg["seed"]))
    probe = concentration_probe(
        dist, x, grid, replicates, rng,
        order=order, kernel=kernel, guard=guard,
    )
    rows = []
    for i, ((n, h, delta), p) in enumerate(zip(probe.grid, probe.probabilities)):
        rows.append(
            {
                "experiment": "concentration",
                "n": int(n),
                "replicate": i,
                "seed": cfg["seed"],
                "excess": float(p),
                "se": math.sqrt(p * (1 - p) / replicates),
                "wall_ms": 0,
            }
        )
    tol = float(cfg["tolerance"].get("spearman", -0.9))
    summary = {
        "experiment": "concentration",
        "tolerance": {"spearman": tol},
        "grid": [list(g) for g in probe.grid],
        "probabilities": [float(p) for p in probe.probabilities],
        "scaling": [float(s) for s in probe.scaling],
        "replicates": replicates,
    }
    try:
        rho = spearman_concentration(probe)
        summary["measured"] = rho
        summary["theoretical"] = -1.0
        summary["pass"] = rho <= tol
    except ValueError as exc:
        summary["measured"] = None
        summary["theoretical"] = -1.0
        summary["note"] = str(exc)
        summary["pass"] = False
    return rows, summary, None


def run_corridor(cfg: dict):
    dist = build_distribution(cfg["distribution"])
    if not isinstance(dist, CorridorDistribution):
        raise ConfigError("the corridor experiment needs a corridor distribution")
    if "n_grid" not in cfg:
        raise ConfigError("corridor needs an n_grid")
    est = cfg.get("estimator", {"kind": "plugin-lp"})
    if est.get("kind", "plugin-lp") != "plugin-lp":
        raise ConfigError("the corridor experiment uses the plugin-lp estimator")
    bw = est.get("bandwidth", {})
    if bw.get("rule") != "fixed":
        raise ConfigError(
            "the corridor experiment requires a fixed (n-independent) bandwidth"
        )
    _gate_distribution(dist, cfg)
    tasks = _make_tasks(cfg, {"main": est})
    results = _dispatch(tasks, cfg["workers"])
    rows = _rows_from_results(results, "corridor", "main")
    series = _aggregate(results, "main")
    threshold = float(cfg["tolerance"].get("final_excess", 1e-3))
    final_n, final_excess, final_se = series[-1]
    monotone = True
    for (n1, e1, s1), (n2, e2, s2) in zip(series, series[1:]):
        if e2 > e1 + 3.0 * math.sqrt(s1 ** 2 + s2 ** 2):
            monotone = False
    summary = {
        "experiment": "corridor",
        "theoretical": 0.0,
        "tolerance": {"final_excess": threshold},
        "series": [{"n": n, "excess": e, "se": s} for n, e, s in series],
        "measured": final_excess,
        "final_n": final_n,
        "nonincreasing": monotone,
        "pass": final_excess <= threshold and monotone,
    }
    try:
        fit = rate_fit(series, 0.0)
        summary["fitted_slope"] = fit.slope
    except RateUndefinedError as exc:
        summary["note"] = str(exc)
    except ValueError as exc:
        summary["note"] = str(exc)
    return rows, summary, {"main": series}


def run_compare_bounds(cfg: dict):
    dist = build_distribution(cfg["distribution"])
    if dist.d != 1:
        raise ConfigError("compare-bounds runs on one-dimensional laws")
    if math.isinf(dist.alpha):
        if hasattr(dist, "finite_margin_envelope") and "alpha" not in cfg:
            alpha, c0 = dist.finite_margin_envelope()
        else:
            alpha = float(_require(cfg, "alpha"))
            c0 = float(_require(cfg, "c0"))
    else:
        alpha = float(cfg.get("alpha", dist.alpha))
        c0 = float(cfg.get("c0", dist.c0))
    proxies = int(cfg["replicates"])
    ps = [float(p) for p in cfg.get("ps", [1, 2])]
    lo, hi = dist.support_box()
    rng = np.random.default_rng(np.random.SeedSequence(cfg["seed"]))
    rows = []
    violations = 0
    min_slack = math.inf
    for i in range(proxies):
        cells = int(rng.integers(3, 26))
        step = random_step_function(float(lo[0]), float(hi[0]), cells, rng)
        excess, sup_err, norms = excess_and_norms_1d(dist, step, ps=ps)
        bound_inf = excess_bound_from_sup_error(alpha, c0, sup_err)
        all_bounds = {"linf": bound_inf}
        for p in ps:
            all_bounds[f"l{p:g}"] = excess_bound_from_lp_error(alpha, c0, p, norms[p])
        for bound in all_bounds.values():
            min_slack = min(min_slack, bound - excess)
            if excess > bound + 1e-9:
                violations += 1
        rows.append(
            {
                "experiment": "compare-bounds",
                "n": cells,
                "replicate": i,
                "seed": cfg["seed"],
                "excess": excess,
                "se": 0.0,
                "wall_ms": 0,
            }
        )
    summary = {
        "experiment": "compare-bounds",
        "theoretical": 0,
        "measured": violations,
        "tolerance": {"violations": 0},
        "proxies": proxies,
        "alpha": alpha,
        "c0": c0,
        "min_slack": min_slack,
        "pass": violations == 0,
    }
    return rows, summary, None


RUNNERS = {
    "rates": run_rates,
    "lower-bound": run_lower_bound,
    "margin-check": run_margin_check,
    "concentration": run_concentration,
    "sieve-vs-plugin": run_sieve_vs_plugin,
    "corridor": run_corridor,
    "compare-bounds": run_compare_bounds,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="npclassify",
        description="Reproducible classification-rate experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=".")
        p.add_argument("--svg", default=None)
        p.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)

    start = time.perf_counter()
    try:
        cfg = load_config(args.config, args.experiment, args.seed)
        rows, summary, series = RUNNERS[args.experiment](cfg)
    except (ConfigError, UnsupportedSmoothnessError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = args.experiment.replace("-", "_")
    write_csv(out_dir / f"{stem}.csv", rows)
    summary["wall_ms_total"] = (time.perf_counter() - start) * 1000.0
    write_summary(out_dir / f"{stem}_summary.json", summary)
    if args.svg and series:
        write_svg(out_dir / args.svg, series, args.experiment, cfg["seed"])
    print(
        f"{args.experiment}: pass={summary['pass']} "
        f"measured={summary.get('measured')} "
        f"theoretical={summary.get('theoretical')}"
    )
    return 0 if summary["pass"] else 3


if __name__ == "__main__":
    sys.exit(main())
