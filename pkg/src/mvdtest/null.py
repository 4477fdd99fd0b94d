"""Null-distribution approximation, subsampling variance, and the test itself.

Under the null the scaled statistic (n+m) * stat converges to a weighted sum
of independent chi-square(1) variables scaled by 1/(rho(1-rho)).  The weights
are estimated from the spectrum of H/n (covariance statistic) or of the
centered Gram matrix K~_X/n (mean statistic).  Because the estimated spectrum
systematically misses the true variance at finite n, the law is rescaled: a
subsampling estimate v_sub of Var[(n+m) * stat], inflated by (1 + tau),
fixes the second moment through the affine correction W' = xi * S + c while
the first moment is kept at the spectrum's own mean.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .discrepancy import _check_kind, _mmd_raw, _mvd_raw, h_matrix, statistic
from .kernels import as_sample, build_gram_set, gram, gram_set_from_blocks

# Variance-inflation defaults keyed by the subsample fraction k/n.  These are
# through-origin regression slopes of exact against subsampled variances,
# minus one; see simulate.variance_table for how such slopes are produced.
TAU_TABLE = {
    "mvd": {1 / 4: 0.69348, 1 / 6: 0.34798, 1 / 8: 0.30928},
    "mmd": {1 / 4: 0.21990, 1 / 6: 0.10951, 1 / 8: 0.11643},
}

# Cap on scalars drawn per block when sampling the null law, so large draw
# counts stay in bounded memory.  Blocking does not change the values: the
# underlying normal stream is consumed in the same order either way.
_BLOCK_SCALARS = 1 << 22


def default_tau(kind, fraction):
    """Default variance inflation tau for a subsample fraction k/n.

    The table has entries at k/n = 1/4, 1/6, 1/8; the nearest one is used.
    """
    _check_kind(kind)
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"subsample fraction must be in (0, 1), got {fraction!r}")
    table = TAU_TABLE[kind]
    nearest = min(table, key=lambda r: abs(r - fraction))
    return table[nearest]


@dataclass(frozen=True)
class SubsamplingPlan:
    """How to subsample the first sample when estimating the null variance.

    Rows [0, n1) and [n1, n) form two disjoint pools.  Every iteration draws
    k rows from the first pool and l from the second, both without
    replacement, and treats them as a fresh two-sample problem.  Iteration i
    uses the RNG stream seeded by (seed, 0, i), so results are independent
    of evaluation order.
    """

    n1: int
    k: int
    l: int
    iterations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.k < 2 or self.l < 2:
            raise ValueError(f"subsample sizes must be >= 2, got k={self.k}, l={self.l}")
        if self.k > self.n1:
            raise ValueError(f"k={self.k} exceeds the first pool (n1={self.n1})")
        if self.iterations < 2:
            raise ValueError(f"need at least 2 iterations, got {self.iterations}")

    def validate(self, n):
        """Check the plan is feasible for a sample with n rows."""
        if self.n1 >= n:
            raise ValueError(f"split point n1={self.n1} leaves no second pool for n={n}")
        if self.l > n - self.n1:
            raise ValueError(f"l={self.l} exceeds the second pool (n - n1 = {n - self.n1})")

    @classmethod
    def for_sample(cls, n, divisor=8, iterations=1000, seed=0):
        """Default plan for n rows: split at n//2, subsample sizes n//divisor."""
        size = max(2, n // divisor)
        return cls(n1=n // 2, k=size, l=size, iterations=iterations, seed=seed)


@dataclass(frozen=True)
class SpectralWeights:
    """Estimated weights of the limiting weighted chi-square null law.

    lambdas holds the eigenvalues of source/n sorted descending, with the one
    structurally forced zero removed (length n-1) and any numerically negative
    leftovers clamped to zero.  trace is the retained sum; clipped_count and
    clipped_mass record what the clamp removed.
    """

    lambdas: np.ndarray = field(repr=False)
    trace: float
    clipped_count: int
    clipped_mass: float


def spectral_weights(source, n):
    """Estimate null-law weights from the spectrum of source / n.

    source is the n x n matrix whose spectrum carries the null law: H for the
    covariance statistic, the centered Gram matrix K~_X for the mean
    statistic.  Both annihilate the all-ones vector, so exactly one zero
    eigenvalue is structural and is dropped; remaining negatives can only be
    round-off from the eigensolver and are clamped to zero.
    """
    a = np.asarray(source, dtype=float)
    if a.ndim != 2 or a.shape != (n, n):
        raise ValueError(f"source must be {n} x {n}, got shape {a.shape}")
    scale = float(np.abs(a).max()) if a.size else 0.0
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-8 * max(scale, 1e-300)):
        raise ValueError("source matrix is not symmetric")
    eigs = np.linalg.eigvalsh(a / n)  # ascending
    eigs = eigs[1:]  # drop the structural zero (the smallest eigenvalue)
    negative = eigs < 0.0
    lambdas = np.where(negative, 0.0, eigs)[::-1]
    return SpectralWeights(
        lambdas=np.ascontiguousarray(lambdas),
        trace=float(lambdas.sum()),
        clipped_count=int(negative.sum()),
        clipped_mass=float(-eigs[negative].sum()),
    )


def sample_weighted_chisq(w, rho, j, seed=0):
    """Draw j variates of S = (1/(rho(1-rho))) * sum_l lambda_l Z_l^2.

    Z are i.i.d. standard normal; draws are deterministic given the seed and
    independent of the internal block size.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1), got {rho!r}")
    j = int(j)
    if j < 1:
        raise ValueError(f"need at least one draw, got j={j}")
    lam = np.asarray(w.lambdas, dtype=float)
    out = np.empty(j)
    if lam.size == 0 or not lam.any():
        out[:] = 0.0
        return out
    rng = np.random.default_rng(seed)
    denom = rho * (1.0 - rho)
    rows = max(1, _BLOCK_SCALARS // lam.size)
    start = 0
    while start < j:
        stop = min(j, start + rows)
        z = rng.standard_normal((stop - start, lam.size))
        out[start:stop] = (z * z) @ lam / denom
        start = stop
    return out


def subsample_variance(x, spec, kind, plan, m):
    """Subsampling estimate of Var[(n + m) * statistic] under the null.

    Each iteration treats k rows from the first pool and l from the second as
    a two-sample problem and records (k + l) * statistic.  The unbiased
    variance of those values is rescaled to the full sizes (n, m) of the
    actual test by (n+m)^4/(n^2 m^2) * k^2 l^2/(k+l)^4; m is the size of the
    companion sample the test will be run against.

    The full Gram matrix of x is computed once and subsample Gram blocks are
    taken as submatrices, which gives identical values to rebuilding them
    from the raw rows.
    """
    _check_kind(kind)
    x = as_sample(x, "x")
    n = x.shape[0]
    m = int(m)
    if m < 2:
        raise ValueError(f"companion sample size must be >= 2, got m={m}")
    plan.validate(n)
    k_full = gram(x, x, spec)
    k, l = plan.k, plan.l
    vals = np.empty(plan.iterations)
    for i in range(plan.iterations):
        rng = np.random.default_rng([plan.seed, 0, i])
        one = rng.choice(plan.n1, size=k, replace=False)
        two = plan.n1 + rng.choice(n - plan.n1, size=l, replace=False)
        g = gram_set_from_blocks(
            k_full[np.ix_(one, one)],
            k_full[np.ix_(two, two)],
            k_full[np.ix_(one, two)],
        )
        vals[i] = (k + l) * statistic(g, kind)
    scale = ((n + m) ** 4 / (n**2 * m**2)) * ((k * l) ** 2 / (k + l) ** 4)
    return float(vals.var(ddof=1) * scale)


@dataclass(frozen=True)
class NullApprox:
    """Moment-corrected null law W' = xi * S + c.

    S is the weighted chi-square law defined by weights and rho; xi and c are
    chosen so W' keeps the spectrum's mean while its variance becomes
    (1 + tau) * v_sub.  draws_j is the Monte Carlo sample count used when a
    critical value is requested.
    """

    weights: SpectralWeights
    rho: float
    tau: float
    v_sub: float
    xi: float
    c: float
    draws_j: int = 10000

    @property
    def uncorrected_mean(self):
        """Mean of the raw spectrum law S (and of W', by construction)."""
        return self.weights.trace / (self.rho * (1.0 - self.rho))

    @property
    def uncorrected_variance(self):
        """Variance of the raw spectrum law S."""
        lam = self.weights.lambdas
        return 2.0 * float(lam @ lam) / (self.rho * (1.0 - self.rho)) ** 2

    @property
    def mean(self):
        """Mean of W'."""
        return self.xi * self.uncorrected_mean + self.c

    @property
    def variance(self):
        """Variance of W'."""
        return self.xi**2 * self.uncorrected_variance


def fit_wprime(w, rho, v_sub, tau, draws_j=10000):
    """Fit the affine correction W' = xi * S + c by moment matching.

    With mu_S and V_S the mean and variance of the spectrum law S, the two
    conditions  E[W'] = mu_S  and  Var[W'] = (1 + tau) * v_sub  solve in
    closed form to xi = sqrt((1 + tau) v_sub / V_S) and c = (1 - xi) mu_S.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1), got {rho!r}")
    if v_sub < 0.0:
        raise ValueError(f"v_sub must be >= 0, got {v_sub!r}")
    if tau < 0.0:
        raise ValueError(f"tau must be >= 0, got {tau!r}")
    lam = w.lambdas
    denom = rho * (1.0 - rho)
    mu_s = w.trace / denom
    v_s = 2.0 * float(lam @ lam) / denom**2
    if v_s == 0.0:
        if v_sub > 0.0:
            raise ValueError("degenerate spectrum: all weights are zero but v_sub > 0")
        xi, c = 1.0, 0.0
    else:
        xi = math.sqrt((1.0 + tau) * v_sub / v_s)
        c = (1.0 - xi) * mu_s
    return NullApprox(weights=w, rho=rho, tau=float(tau), v_sub=float(v_sub), xi=xi, c=c, draws_j=int(draws_j))


def _quantile_rank(j, alpha):
    """1-based rank of the empirical (1 - alpha)-quantile among j draws."""
    return min(max(math.ceil(j * (1.0 - alpha)), 1), j)


def critical_value(na, alpha, seed=0):
    """Empirical (1 - alpha)-quantile of the corrected null law W'.

    Draws na.draws_j samples of W' = xi * S + c and returns the value at
    ascending rank ceil(J (1 - alpha)).  Deterministic given the seed.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    if na.draws_j < math.ceil(1.0 / alpha):
        raise ValueError(f"draws_j={na.draws_j} is too small for alpha={alpha}")
    s = sample_weighted_chisq(na.weights, na.rho, na.draws_j, seed)
    wprime = na.xi * s + na.c
    r = _quantile_rank(na.draws_j, alpha)
    return float(np.partition(wprime, r - 1)[r - 1])


@dataclass(frozen=True)
class TestReport:
    """Everything one two-sample test run produced.

    statistic is the scaled value (n + m) * stat, the quantity the null law
    describes.  critical_value comes from the corrected law W'; the
    uncorrected one from the raw spectrum law is reported alongside for
    comparison.  reject is statistic > critical_value.
    """

    kind: str
    n: int
    m: int
    statistic: float
    critical_value: float
    critical_value_uncorrected: float
    p_value: float
    reject: bool
    alpha: float
    tau: float
    v_sub: float
    xi: float
    c: float
    draws: int
    seed: int
    plan: SubsamplingPlan
    weights_trace: float
    clipped_count: int
    clipped_mass: float
    statistic_clamped: bool


def run_test(x, y, spec, kind="mvd", plan=None, tau=None, alpha=0.05, draws=10000, seed=0):
    """Run one two-sample test end to end and return a TestReport.

    Steps: compute the scaled statistic; estimate the null spectrum from the
    first sample; estimate the null variance by subsampling; fit the
    corrected law W'; compare the statistic with the empirical
    (1 - alpha)-quantile of W'.  The p-value is the fraction of the same J
    draws that reach the statistic, and the uncorrected critical value is the
    same quantile of the raw spectrum law (identical draws, xi = 1, c = 0).

    tau defaults to the built-in table keyed by (kind, k/n); plan defaults to
    SubsamplingPlan.for_sample(n, seed=seed).  The chi-square draws use the
    RNG stream (seed, 1), disjoint from the subsampling streams (seed, 0, i).
    """
    _check_kind(kind)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    draws = int(draws)
    if draws < math.ceil(1.0 / alpha):
        raise ValueError(f"draws={draws} is too small for alpha={alpha}")
    seed = int(seed)
    x = as_sample(x, "x")
    y = as_sample(y, "y")
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"samples have different dimensions: {x.shape[1]} vs {y.shape[1]}")
    n, m = x.shape[0], y.shape[0]
    if plan is None:
        plan = SubsamplingPlan.for_sample(n, seed=seed)
    plan.validate(n)

    g = build_gram_set(x, y, spec)
    raw = _mvd_raw(g) if kind == "mvd" else _mmd_raw(g)
    stat = (n + m) * max(float(raw), 0.0)

    source = h_matrix(g) if kind == "mvd" else g.kc_x
    w = spectral_weights(source, n)
    rho = n / (n + m)
    v_sub = subsample_variance(x, spec, kind, plan, m)
    if tau is None:
        tau = default_tau(kind, plan.k / n)
    na = fit_wprime(w, rho, v_sub, float(tau), draws_j=draws)

    s = sample_weighted_chisq(w, rho, draws, [seed, 1])
    wprime = na.xi * s + na.c
    r = _quantile_rank(draws, alpha)
    crit = float(np.partition(wprime, r - 1)[r - 1])
    crit_uncorrected = float(np.partition(s, r - 1)[r - 1])
    p_value = float(np.mean(wprime >= stat))

    return TestReport(
        kind=kind,
        n=n,
        m=m,
        statistic=stat,
        critical_value=crit,
        critical_value_uncorrected=crit_uncorrected,
        p_value=p_value,
        reject=bool(stat > crit),
        alpha=float(alpha),
        tau=float(tau),
        v_sub=v_sub,
        xi=na.xi,
        c=na.c,
        draws=draws,
        seed=seed,
        plan=plan,
        weights_trace=w.trace,
        clipped_count=w.clipped_count,
        clipped_mass=w.clipped_mass,
        statistic_clamped=bool(raw < 0.0),
    )
