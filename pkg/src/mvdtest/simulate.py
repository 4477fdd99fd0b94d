"""Monte Carlo harness: samplers, variance tables, slope calibration, power tables.

Every experiment is deterministic given its seed: replication r of cell c in
scenario s derives its RNG streams from the integer key (seed, c, s, r, ...),
so results do not depend on evaluation order and rerunning a configuration
reproduces it exactly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .discrepancy import _check_kind, statistic
from .kernels import KernelSpec, build_gram_set
from .null import SubsamplingPlan, run_test, subsample_variance

# Named bandwidth presets: sigma = d ** -exponent.
SIGMA_RULES = {"d^-3/4": 0.75, "d^-7/8": 0.875, "d^-1": 1.0, "d^-2": 2.0}

_FAMILIES = ("std_normal", "uniform_unit", "centered_exponential", "gaussian", "local_mixture")


def sigma_from_rule(rule, d):
    """Resolve a bandwidth rule name (or literal value) to a number.

    "auto" means d^-3/4; the other presets are listed in SIGMA_RULES; any
    numeric string (or number) is taken at face value.
    """
    if isinstance(rule, (int, float)) and not isinstance(rule, bool):
        value = float(rule)
    else:
        name = "d^-3/4" if rule == "auto" else rule
        if name in SIGMA_RULES:
            if d < 1:
                raise ValueError(f"dimension must be >= 1 to apply rule {rule!r}")
            return float(d) ** -SIGMA_RULES[name]
        try:
            value = float(name)
        except (TypeError, ValueError):
            raise ValueError(f"unknown sigma rule {rule!r}; presets: auto, {', '.join(SIGMA_RULES)}") from None
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"sigma must be a positive finite real, got {rule!r}")
    return value


@dataclass(frozen=True, eq=False)
class DistributionSpec:
    """A sampling distribution for the harness.

    The three scalar families draw each coordinate i.i.d.: standard normal,
    U(-sqrt(3), sqrt(3)), or Exp(1) - 1 (the latter two have mean 0 and
    variance 1 per coordinate).  "gaussian" is a general N(mean, cov);
    "local_mixture" draws each row from `base` with probability
    1 - 1/sqrt(n_plus_m) and from `bump` otherwise.
    """

    family: str
    dim: int
    mean: np.ndarray = None
    cov: np.ndarray = None
    base: "DistributionSpec" = None
    bump: "DistributionSpec" = None
    n_plus_m: int = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {_FAMILIES}")
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")

    @classmethod
    def std_normal(cls, d):
        return cls(family="std_normal", dim=d)

    @classmethod
    def uniform_unit(cls, d):
        return cls(family="uniform_unit", dim=d)

    @classmethod
    def centered_exponential(cls, d):
        return cls(family="centered_exponential", dim=d)

    @classmethod
    def gaussian(cls, mean, cov):
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = np.asarray(cov, dtype=float)
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov shape {cov.shape} does not match mean length {mean.size}")
        return cls(family="gaussian", dim=mean.size, mean=mean, cov=cov)

    @classmethod
    def local_mixture(cls, base, bump, n_plus_m):
        if base.dim != bump.dim:
            raise ValueError(f"mixture components differ in dimension: {base.dim} vs {bump.dim}")
        if n_plus_m < 1:
            raise ValueError(f"n_plus_m must be >= 1, got {n_plus_m}")
        return cls(family="local_mixture", dim=base.dim, base=base, bump=bump, n_plus_m=int(n_plus_m))


def sample(dist, n, seed=0):
    """Draw n i.i.d. rows from a DistributionSpec.  Deterministic given seed."""
    n = int(n)
    if n < 1:
        raise ValueError(f"need n >= 1 rows, got {n}")
    rng = np.random.default_rng(seed)
    return _draw(dist, n, rng)


def _draw(dist, n, rng):
    d = dist.dim
    if dist.family == "std_normal":
        return rng.standard_normal((n, d))
    if dist.family == "uniform_unit":
        half = math.sqrt(3.0)
        return rng.uniform(-half, half, size=(n, d))
    if dist.family == "centered_exponential":
        return rng.exponential(1.0, size=(n, d)) - 1.0
    if dist.family == "gaussian":
        chol = np.linalg.cholesky(dist.cov)
        return dist.mean + rng.standard_normal((n, d)) @ chol.T
    # local_mixture: both component blocks are drawn in full so the stream
    # layout does not depend on the (random) mixture counts.
    base = _draw(dist.base, n, rng)
    bump = _draw(dist.bump, n, rng)
    take_bump = rng.random(n) < 1.0 / math.sqrt(dist.n_plus_m)
    return np.where(take_bump[:, None], bump, base)


@dataclass(frozen=True)
class ExperimentResult:
    """A table of Monte Carlo estimates plus the configuration that made it.

    rows is a tuple of flat dicts (one estimate per row, with its standard
    error where one is defined); config echoes every effective parameter so
    the result can be reproduced from the result alone.
    """

    config: dict
    rows: tuple


def _variance_se(values):
    """Standard error of the unbiased sample variance of i.i.d. values."""
    r = values.size
    v = values.var(ddof=1)
    m4 = np.mean((values - values.mean()) ** 4)
    return math.sqrt(max(m4 - v**2 * (r - 3) / (r - 1), 0.0) / r)


def _derived_seed(*key):
    """Collapse an integer key tuple into one int seed (for plan seeds)."""
    return int(np.random.SeedSequence(list(key)).generate_state(1)[0])


def variance_table(cells, kinds=("mvd", "mmd"), reps=2000, divisors=(4, 6, 8), iterations=1000, seed=0):
    """Simulated exact vs subsampled variance of the scaled statistic under P = Q.

    cells is a list of (sigma_rule, d, n, m).  For each cell the exact column
    is the unbiased variance of (n+m) * statistic over `reps` fresh draws of
    X, Y ~ N(0, I_d); each divisor contributes one subsampling estimate with
    k = l = n // divisor on a fresh X.  Through-origin slopes of exact
    against subsampled values across cells are appended per (kind, divisor) —
    slope minus one is the tau calibration the test's defaults use.
    """
    cells = list(cells)
    if not cells:
        raise ValueError("need at least one cell")
    for kind in kinds:
        _check_kind(kind)
    reps = int(reps)
    if reps < 2:
        raise ValueError(f"need reps >= 2 for a variance, got {reps}")
    rows = []
    exact = {}
    sub = {}
    for ci, (rule, d, n, m) in enumerate(cells):
        sigma = sigma_from_rule(rule, d)
        spec = KernelSpec(sigma=sigma)
        scaled = {kind: np.empty(reps) for kind in kinds}
        for rep in range(reps):
            rng = np.random.default_rng([seed, ci, 0, rep])
            g = build_gram_set(rng.standard_normal((n, d)), rng.standard_normal((m, d)), spec)
            for kind in kinds:
                scaled[kind][rep] = (n + m) * statistic(g, kind)
        for kind in kinds:
            exact[ci, kind] = float(scaled[kind].var(ddof=1))
            rows.append({
                "table": "variance", "sigma_rule": rule, "sigma": sigma, "d": d, "n": n, "m": m,
                "kind": kind, "estimate": "exact_variance", "scenario": None, "divisor": None,
                "k": None, "l": None, "reps": reps,
                "value": exact[ci, kind], "se": _variance_se(scaled[kind]),
            })
        for div in divisors:
            plan = SubsamplingPlan(
                n1=n // 2, k=max(2, n // div), l=max(2, n // div),
                iterations=iterations, seed=_derived_seed(seed, ci, 1, div),
            )
            x = np.random.default_rng([seed, ci, 2, div]).standard_normal((n, d))
            for kind in kinds:
                sub[ci, div, kind] = subsample_variance(x, spec, kind, plan, m)
                rows.append({
                    "table": "variance", "sigma_rule": rule, "sigma": sigma, "d": d, "n": n, "m": m,
                    "kind": kind, "estimate": "subsample_variance", "scenario": None, "divisor": div,
                    "k": plan.k, "l": plan.l, "reps": iterations,
                    "value": sub[ci, div, kind], "se": None,
                })
    for kind in kinds:
        for div in divisors:
            pairs = [(sub[ci, div, kind], exact[ci, kind]) for ci in range(len(cells))]
            if not any(p[0] > 0 for p in pairs):
                continue
            rows.append({
                "table": "variance", "sigma_rule": None, "sigma": None, "d": None, "n": None, "m": None,
                "kind": kind, "estimate": "slope", "scenario": None, "divisor": div,
                "k": None, "l": None, "reps": len(pairs),
                "value": slope_regression(pairs), "se": None,
            })
    config = {
        "table": "variance", "cells": [list(c) for c in cells], "kinds": list(kinds),
        "reps": reps, "divisors": list(divisors), "iterations": int(iterations), "seed": int(seed),
    }
    return ExperimentResult(config=config, rows=tuple(rows))


def slope_regression(pairs):
    """Least-squares slope of y on x through the origin: sum(xy) / sum(x^2)."""
    arr = np.asarray(list(pairs), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
        raise ValueError("pairs must be a non-empty sequence of (x, y)")
    x, y = arr[:, 0], arr[:, 1]
    sxx = float(x @ x)
    if sxx == 0.0:
        raise ValueError("all predictor values are zero; slope is undefined")
    return float(x @ y) / sxx


def _alternative_spec(name, d):
    if name == "uniform":
        return DistributionSpec.uniform_unit(d)
    if name == "exponential":
        return DistributionSpec.centered_exponential(d)
    raise ValueError(f"unknown alternative {name!r}; choose from ('uniform', 'exponential')")


def type1_power_table(cells, alternatives=("uniform", "exponential"), kinds=("mvd", "mmd"),
                      alpha=0.05, reps=500, divisor=8, iterations=1000, draws=10000,
                      tau=None, seed=0):
    """Rejection rates under the null and under alternatives, per cell and kind.

    cells is a list of (sigma_rule, d, n, m).  X is always N(0, I_d); the
    null scenario draws Y from the same law, each alternative from the named
    family.  Every replication runs the full test (subsampling plan with
    k = l = n // divisor, tau defaulting per kind unless given).  Rates come
    with the binomial standard error sqrt(p(1-p)/reps).

    tau may be None (per-kind defaults), a number (applied to every kind), or
    a dict {kind: tau}.
    """
    cells = list(cells)
    if not cells:
        raise ValueError("need at least one cell")
    for kind in kinds:
        _check_kind(kind)
    reps = int(reps)
    if reps < 1:
        raise ValueError(f"need reps >= 1, got {reps}")
    scenarios = ["null"] + list(alternatives)
    rows = []
    for ci, (rule, d, n, m) in enumerate(cells):
        sigma = sigma_from_rule(rule, d)
        spec = KernelSpec(sigma=sigma)
        x_spec = DistributionSpec.std_normal(d)
        for si, scenario in enumerate(scenarios):
            y_spec = x_spec if scenario == "null" else _alternative_spec(scenario, d)
            rejected = {kind: 0 for kind in kinds}
            for rep in range(reps):
                x = sample(x_spec, n, seed=[seed, ci, si, rep, 0])
                y = sample(y_spec, m, seed=[seed, ci, si, rep, 1])
                test_seed = _derived_seed(seed, ci, si, rep, 2)
                plan = SubsamplingPlan.for_sample(n, divisor=divisor, iterations=iterations, seed=test_seed)
                for kind in kinds:
                    kind_tau = tau.get(kind) if isinstance(tau, dict) else tau
                    report = run_test(x, y, spec, kind=kind, plan=plan, tau=kind_tau,
                                      alpha=alpha, draws=draws, seed=test_seed)
                    rejected[kind] += report.reject
            for kind in kinds:
                rate = rejected[kind] / reps
                rows.append({
                    "table": "power", "sigma_rule": rule, "sigma": sigma, "d": d, "n": n, "m": m,
                    "kind": kind, "estimate": "rejection_rate", "scenario": scenario,
                    "divisor": divisor, "k": max(2, n // divisor), "l": max(2, n // divisor),
                    "reps": reps, "value": rate, "se": math.sqrt(rate * (1.0 - rate) / reps),
                })
    config = {
        "table": "power", "cells": [list(c) for c in cells], "alternatives": list(alternatives),
        "kinds": list(kinds), "alpha": float(alpha), "reps": reps, "divisor": int(divisor),
        "iterations": int(iterations), "draws": int(draws),
        "tau": tau if tau is None or isinstance(tau, (int, float)) else dict(tau), "seed": int(seed),
    }
    return ExperimentResult(config=config, rows=tuple(rows))
