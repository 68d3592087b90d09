"""Site summands, trace Monte Carlo, limiting variances and normality checks.

The trace of the k-th power differs from the sum of per-site summands
``X_{k,i}`` only by a right-boundary correction that stays O(1) in the
dimension, so centered traces fluctuate like sums of finite-range-dependent
variables.  This module evaluates the summands, runs reproducible Monte
Carlo over scaled centered traces, estimates the limiting variance and
covariance targets, and reports moment / Kolmogorov-Smirnov diagnostics
against the Gaussian limit.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .accumulate import MomentAccumulator, compensated_sum, fold_pairwise
from .circuits import enumerate_types, trace_power_expansion, traces_for_k_list
from .ensembles import (
    EnsembleSpec,
    EntryWindow,
    sample_matrix,
    sample_window,
    sample_window_arrays,
    trial_seed_sequence,
    window_to_matrix,
)
from .errors import DegenerateTargetError, InvalidArgumentError

TRIAL_BLOCK = 1024

COVARIANCE_SOURCES = ("mc_estimate", "iid_window_formula",
                      "symmetric_degenerate_formula", "beta_hermite_formula")


@dataclass(frozen=True)
class DependenceRange:
    """Index gap beyond which site summands for power ``k`` are independent."""

    k: int
    symmetric: bool
    m_k: int = field(init=False)

    def __post_init__(self):
        if self.k < 1:
            raise InvalidArgumentError("k must be >= 1")
        object.__setattr__(self, "m_k", self.k // 2 + (1 if self.symmetric else 0))


def dependence_range(k: int, symmetric: bool) -> DependenceRange:
    return DependenceRange(k=k, symmetric=symmetric)


# ---------------------------------------------------------------------------
# Site summands


def _summand_block(a: np.ndarray, d: np.ndarray, b: np.ndarray, first_index: int,
                   sites, k: int, types) -> np.ndarray:
    """Per-site summands over batched windows: (replicas, len(sites))."""
    f = first_index
    ab = a[:, 1:] * b[:, :-1] if a.shape[1] > 1 else np.empty((a.shape[0], 0))
    # ab[:, t] = a_{f+t} * b_{f+t}: the a-slot of site s holds a_{s-1}
    out = np.zeros((a.shape[0], len(sites)))
    ab_pows: dict = {1: ab}
    d_pows: dict = {1: d}

    def powered(cache, base, e):
        arr = cache.get(e)
        if arr is None:
            arr = powered(cache, base, e - 1) * base
            cache[e] = arr
        return arr

    L = d.shape[1]
    for pos, i in enumerate(sites):
        base = i - f
        if base < 0 or base + k // 2 > L - 1:
            raise InvalidArgumentError("window too short for requested site")
        vals = np.zeros(a.shape[0])
        for t in types:
            term = None
            for j, m in enumerate(t.half_edges):
                fcol = powered(ab_pows, ab, m)[:, base + j]
                term = fcol if term is None else term * fcol
            for j, e in enumerate(t.loops):
                if e:
                    fcol = powered(d_pows, d, e)[:, base + j]
                    term = fcol if term is None else term * fcol
            vals = vals + t.count * term
        out[:, pos] = vals
    return out


def site_summand(window: EntryWindow, i: int, k: int, types) -> float:
    """Evaluate the per-site summand ``X_{k,i}`` on one realized window."""
    if not types or any(t.k != k for t in types):
        raise InvalidArgumentError("type table does not match the requested power")
    a = window.a[None, :]
    d = window.d[None, :]
    b = window.b[None, :]
    return float(_summand_block(a, d, b, window.first_index, [i], k, types)[0, 0])


def summand_sites(window_arrays, first_index: int, sites, k: int) -> np.ndarray:
    """Batched ``X_{k,i}`` over windows; thin public wrapper for estimators."""
    a, d, b = window_arrays
    return _summand_block(a, d, b, first_index, sites, k, enumerate_types(k))


# ---------------------------------------------------------------------------
# Monte Carlo over traces


def exact_trace_mean(spec: EnsembleSpec, n: int, k: int) -> float | None:
    """Closed-form E trace(Q^k) where available, else None.

    Fixed off-diagonals with independent symmetric zero-mean diagonal entries
    make every odd-power summand mean vanish.
    """
    if spec.model == "anderson" and k % 2 == 1 and spec.d_law.symmetric_zero_mean:
        return 0.0
    return None


def _trace_block(spec: EnsembleSpec, n: int, k_list, master_seed: int,
                 lo: int, hi: int) -> np.ndarray:
    out = np.empty((hi - lo, len(k_list)))
    for t in range(lo, hi):
        matrix = sample_matrix(spec, n, trial_seed_sequence(master_seed, t))
        out[t - lo] = traces_for_k_list(matrix, k_list)
    return out


def _block_ranges(trials: int):
    return [(lo, min(lo + TRIAL_BLOCK, trials)) for lo in range(0, trials, TRIAL_BLOCK)]


def _raw_traces(spec, n, k_list, trials, master_seed, workers) -> np.ndarray:
    ranges = _block_ranges(trials)
    raw = np.empty((trials, len(k_list)))
    if workers <= 1 or len(ranges) == 1:
        for lo, hi in ranges:
            raw[lo:hi] = _trace_block(spec, n, k_list, master_seed, lo, hi)
        return raw
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(_trace_block, spec, n, k_list, master_seed, lo, hi): lo
                   for lo, hi in ranges}
        for fut, lo in futures.items():
            block = fut.result()
            raw[lo:lo + block.shape[0]] = block
    return raw


def _scaling(n: int, k_list, alpha: float, epsilon: float) -> tuple[np.ndarray, np.ndarray]:
    exponents = np.array([alpha * k + 0.5 - epsilon for k in k_list])
    return exponents, np.power(float(n), -exponents)


def mc_traces(spec: EnsembleSpec, n: int, k_list, trials: int, master_seed: int,
              alpha: float | None = None, epsilon: float | None = None, *,
              workers: int = 1) -> np.ndarray:
    """Scaled, centered traces over independent trials: (trials, len(k_list)).

    Trial ``t`` samples its matrix from the stream keyed by
    ``(master_seed, t)``; the output is ordered by trial index regardless of
    how blocks were scheduled, so worker counts never change the result.
    Traces are centered at the exact mean when one is available in closed
    form, otherwise at the across-trial empirical mean, then multiplied by
    ``n ** -(alpha*k + 1/2 - epsilon)``.
    """
    k_list = tuple(int(k) for k in k_list)
    if trials < 2:
        raise InvalidArgumentError("trials must be >= 2")
    if not k_list:
        raise InvalidArgumentError("k_list must be non-empty")
    if n < max(k_list) // 2 + 1:
        raise InvalidArgumentError("n too small for the largest requested power")
    if alpha is None or epsilon is None:
        da, de = spec.default_growth
        alpha = da if alpha is None else alpha
        epsilon = de if epsilon is None else epsilon
    raw = _raw_traces(spec, n, k_list, trials, master_seed, workers)
    centers = np.empty(len(k_list))
    for j, k in enumerate(k_list):
        exact = exact_trace_mean(spec, n, k)
        centers[j] = raw[:, j].mean() if exact is None else exact
    _, scale = _scaling(n, k_list, alpha, epsilon)
    return (raw - centers) * scale


@dataclass(frozen=True)
class TraceMoments:
    """Streaming reduction of scaled centered traces to moment accumulators."""

    k_list: tuple[int, ...]
    trials: int
    n: int
    scaling_exponents: tuple[float, ...]
    mean: np.ndarray
    covariance: np.ndarray


def mc_trace_moments(spec: EnsembleSpec, n: int, k_list, trials: int, master_seed: int,
                     alpha: float | None = None, epsilon: float | None = None, *,
                     workers: int = 1) -> TraceMoments:
    """Like :func:`mc_traces` but retains only moment accumulators.

    Blocks of :data:`TRIAL_BLOCK` trials are reduced to (count, mean, M2)
    accumulators and merged along a fixed pairwise tree, so the reduction is
    associative and the result does not depend on the worker count.
    """
    k_list = tuple(int(k) for k in k_list)
    if alpha is None or epsilon is None:
        da, de = spec.default_growth
        alpha = da if alpha is None else alpha
        epsilon = de if epsilon is None else epsilon
    ranges = _block_ranges(trials)
    if workers <= 1 or len(ranges) == 1:
        accs = [MomentAccumulator.from_samples(_trace_block(spec, n, k_list, master_seed, lo, hi))
                for lo, hi in ranges]
    else:
        accs = [None] * len(ranges)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_moment_block, spec, n, k_list, master_seed, lo, hi): idx
                       for idx, (lo, hi) in enumerate(ranges)}
            for fut, idx in futures.items():
                accs[idx] = fut.result()
    acc = fold_pairwise(accs)
    exponents, scale = _scaling(n, k_list, alpha, epsilon)
    mean = np.empty(len(k_list))
    for j, k in enumerate(k_list):
        exact = exact_trace_mean(spec, n, k)
        mean[j] = 0.0 if exact is None else (acc.mean[j] - exact) * scale[j]
    cov = acc.covariance() * np.outer(scale, scale)
    return TraceMoments(k_list=k_list, trials=acc.count, n=n,
                        scaling_exponents=tuple(exponents), mean=mean, covariance=cov)


def _moment_block(spec, n, k_list, master_seed, lo, hi) -> MomentAccumulator:
    return MomentAccumulator.from_samples(_trace_block(spec, n, k_list, master_seed, lo, hi))


# ---------------------------------------------------------------------------
# Limiting variance and covariance targets


@dataclass(frozen=True)
class DkEstimate:
    """Windowed Monte Carlo estimate of the limiting per-power variance."""

    value: float
    standard_error: float
    replicas: int
    dependence: DependenceRange


def _require_iid(spec: EnsembleSpec) -> None:
    if not spec.is_iid_type:
        raise InvalidArgumentError(
            "estimator requires i.i.d.-type site triples "
            "(growth ensembles and the conductance kernel are excluded)")


def dk_iid(spec: EnsembleSpec, k: int, replicas: int, seed) -> DkEstimate:
    """Estimate the limiting variance of the standardized trace for power k.

    Draws ``replicas`` independent windows starting at site 2 (the site-1
    triple has a boundary law) covering summand sites ``2 .. 2 + m_k``, and
    returns the sample variance of the first summand plus twice the summed
    lag covariances, with a standard error.
    """
    if replicas < 2:
        raise InvalidArgumentError("replicas must be >= 2")
    _require_iid(spec)
    dep = dependence_range(k, spec.symmetric)
    length = dep.m_k + k // 2 + 1
    arrays = sample_window_arrays(spec, 2, length, replicas, seed)
    sites = range(2, 2 + dep.m_k + 1)
    x = _summand_block(*arrays, 2, sites, k, enumerate_types(k))
    y = x[:, 0]
    w = x[:, 0] + 2.0 * x[:, 1:].sum(axis=1)
    yc = y - y.mean()
    wc = w - w.mean()
    terms = yc * wc
    value = float(terms.sum() / (replicas - 1))
    se = float(terms.std(ddof=1) / math.sqrt(replicas))
    return DkEstimate(value=value, standard_error=se, replicas=replicas, dependence=dep)


@dataclass(frozen=True)
class CovarianceTarget:
    """A covariance matrix for standardized traces plus its provenance."""

    source: str
    value: np.ndarray
    detail: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if self.source not in COVARIANCE_SOURCES:
            raise InvalidArgumentError(f"unknown covariance source {self.source!r}")
        value = np.asarray(self.value, dtype=float)
        if value.ndim != 2 or value.shape[0] != value.shape[1]:
            raise InvalidArgumentError("covariance target must be square")
        if not np.allclose(value, value.T, rtol=0.0, atol=1e-12):
            raise InvalidArgumentError("covariance target must be symmetric")
        object.__setattr__(self, "value", 0.5 * (value + value.T))


def _beta_hermite_entry(k_i: int, k_j: int, beta: float) -> float:
    if k_i % 2 == 0 and k_j % 2 == 0:
        return (1.0 / beta) * k_i * k_j / (k_i + k_j) \
            * math.comb(k_i, k_i // 2) * math.comb(k_j, k_j // 2)
    if k_i % 2 == 1 and k_j % 2 == 1:
        return (4.0 / beta) * k_i * k_j / (k_i + k_j) \
            * math.comb(k_i - 1, (k_i - 1) // 2) * math.comb(k_j - 1, (k_j - 1) // 2)
    return 0.0


def _symmetric_degenerate_entry(k_i, k_j, a, var_eta, var_zeta, alpha, epsilon) -> float:
    if not 0.0 < epsilon <= alpha:
        raise InvalidArgumentError("symmetric degenerate regime needs 0 < epsilon <= alpha")
    if k_i % 2 == 0 and k_j % 2 == 0:
        return a ** (k_i + k_j - 2) * var_eta / (alpha * (k_i + k_j) + 1 - 2 * epsilon) \
            * k_i * k_j * math.comb(k_i, k_i // 2) * math.comb(k_j, k_j // 2)
    if k_i % 2 == 1 and k_j % 2 == 1:
        if epsilon < alpha:
            return 0.0  # the diagonal fluctuation degenerates below the leading order
        return a ** (k_i + k_j - 2) * var_zeta / (alpha * (k_i + k_j) + 1 - 2 * alpha) \
            * k_i * k_j * math.comb(k_i - 1, (k_i - 1) // 2) * math.comb(k_j - 1, (k_j - 1) // 2)
    return 0.0


def _iid_mc_matrix(k_list, spec: EnsembleSpec, replicas: int, seed) -> np.ndarray:
    _require_iid(spec)
    if replicas < 2:
        raise InvalidArgumentError("replicas must be >= 2")
    deps = {k: dependence_range(k, spec.symmetric).m_k for k in k_list}
    m_star = max(deps.values())
    length = m_star + max(k_list) // 2 + 1
    arrays = sample_window_arrays(spec, 2, length, replicas, seed)
    sites = range(2, 2 + m_star + 1)
    summands = {k: _summand_block(*arrays, 2, sites, k, enumerate_types(k)) for k in k_list}
    centered = {k: x - x.mean(axis=0) for k, x in summands.items()}
    r = replicas
    out = np.empty((len(k_list), len(k_list)))
    for i, k_i in enumerate(k_list):
        for j, k_j in enumerate(k_list):
            if j < i:
                continue
            m_ij = max(deps[k_i], deps[k_j])
            xi = centered[k_i]
            xj = centered[k_j]
            total = float((xi[:, 0] * xj[:, 0]).sum() / (r - 1))
            for h in range(1, m_ij + 1):
                total += float((xi[:, 0] * xj[:, h]).sum() / (r - 1))
                total += float((xi[:, h] * xj[:, 0]).sum() / (r - 1))
            out[i, j] = out[j, i] = total
    return out


def lambda_target(k_i: int, k_j: int, regime: str, *, beta: float | None = None,
                  a: float | None = None, var_eta: float | None = None,
                  var_zeta: float | None = None, alpha: float | None = None,
                  epsilon: float | None = None, spec: EnsembleSpec | None = None,
                  replicas: int | None = None, seed=None) -> float:
    """Limiting covariance of standardized traces for powers (k_i, k_j).

    ``regime`` selects the evaluation route: the closed β-ensemble form, the
    symmetric degenerate-limit closed form, or a windowed Monte Carlo for
    i.i.d.-type entries.
    """
    if k_i < 1 or k_j < 1:
        raise InvalidArgumentError("powers must be >= 1")
    if regime == "beta_hermite":
        if beta is None or beta <= 0:
            raise InvalidArgumentError("beta_hermite regime requires beta > 0")
        return _beta_hermite_entry(k_i, k_j, beta)
    if regime == "symmetric_degenerate":
        if None in (a, var_eta, var_zeta, alpha, epsilon):
            raise InvalidArgumentError("symmetric_degenerate regime parameters incomplete")
        return _symmetric_degenerate_entry(k_i, k_j, a, var_eta, var_zeta, alpha, epsilon)
    if regime == "iid_mc":
        if spec is None or replicas is None:
            raise InvalidArgumentError("iid_mc regime requires spec and replicas")
        mat = _iid_mc_matrix((k_i,) if k_i == k_j else (k_i, k_j), spec, replicas, seed)
        return float(mat[0, 0]) if k_i == k_j else float(mat[0, 1])
    raise InvalidArgumentError(f"unknown regime {regime!r}")


def covariance_target(k_list, regime: str, **params) -> CovarianceTarget:
    """Assemble the full covariance-target matrix over ``k_list``."""
    k_list = tuple(int(k) for k in k_list)
    if regime == "beta_hermite":
        beta = params["beta"]
        value = np.array([[_beta_hermite_entry(ki, kj, beta) for kj in k_list] for ki in k_list])
        detail = tuple(tuple(
            "zero by parity" if (ki % 2) != (kj % 2) else "beta ensemble closed form"
            for kj in k_list) for ki in k_list)
        return CovarianceTarget(source="beta_hermite_formula", value=value, detail=detail)
    if regime == "symmetric_degenerate":
        value = np.array([[_symmetric_degenerate_entry(
            ki, kj, params["a"], params["var_eta"], params["var_zeta"],
            params["alpha"], params["epsilon"]) for kj in k_list] for ki in k_list])
        detail = tuple(tuple(
            "zero by parity" if (ki % 2) != (kj % 2) else "degenerate-limit closed form"
            for kj in k_list) for ki in k_list)
        return CovarianceTarget(source="symmetric_degenerate_formula", value=value, detail=detail)
    if regime == "iid_mc":
        value = _iid_mc_matrix(k_list, params["spec"], params["replicas"], params.get("seed"))
        detail = tuple(tuple(f"windowed MC, {params['replicas']} replicas" for _ in k_list)
                       for _ in k_list)
        return CovarianceTarget(source="iid_window_formula", value=value, detail=detail)
    raise InvalidArgumentError(f"unknown regime {regime!r}")


# ---------------------------------------------------------------------------
# Normality diagnostics


@dataclass(frozen=True)
class MomentReport:
    """Empirical moments of scaled centered traces with MC standard errors."""

    k_list: tuple[int, ...]
    trials: int
    n: int
    scaling_exponents: tuple[float, ...]
    mean: tuple[float, ...]
    variance: tuple[float, ...]
    covariance: np.ndarray
    skewness: tuple[float, ...]
    excess_kurtosis: tuple[float, ...]
    ks_distance: tuple[float, ...]
    ks_critical_1pct: float
    mc_standard_errors: dict

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=float)
        if not np.allclose(cov, cov.T, rtol=0.0, atol=0.0):
            raise InvalidArgumentError("covariance must be exactly symmetric")
        if not np.allclose(np.diag(cov), np.asarray(self.variance), rtol=1e-12, atol=0.0):
            raise InvalidArgumentError("covariance diagonal must equal the variances")
        if any(not 0.0 <= d <= 1.0 for d in self.ks_distance):
            raise InvalidArgumentError("KS distances must lie in [0, 1]")

    def to_json_dict(self) -> dict:
        se = {key: (val.tolist() if isinstance(val, np.ndarray) else list(val))
              for key, val in self.mc_standard_errors.items()}
        return {
            "k_list": list(self.k_list),
            "trials": self.trials,
            "n": self.n,
            "scaling_exponents": list(self.scaling_exponents),
            "mean": list(self.mean),
            "variance": list(self.variance),
            "covariance": self.covariance.tolist(),
            "skewness": list(self.skewness),
            "excess_kurtosis": list(self.excess_kurtosis),
            "ks_distance": list(self.ks_distance),
            "ks_critical_1pct": self.ks_critical_1pct,
            "mc_standard_errors": se,
        }


def ks_distance_to_normal(standardized: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance of a sample against the standard normal."""
    z = np.sort(np.asarray(standardized, dtype=float))
    n = z.size
    cdf = ndtr(z)
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    return float(max(upper, lower, 0.0))


def _jackknife_moment_ses(x: np.ndarray) -> tuple[float, float, float]:
    """Leave-one-out standard errors for (variance, skewness, excess kurtosis)."""
    n = x.size
    s1, s2, s3, s4 = (np.sum(x ** p) for p in (1, 2, 3, 4))
    m = n - 1
    l1 = (s1 - x) / m
    l2 = (s2 - x ** 2) / m
    l3 = (s3 - x ** 3) / m
    l4 = (s4 - x ** 4) / m
    c2 = l2 - l1 ** 2
    c3 = l3 - 3 * l1 * l2 + 2 * l1 ** 3
    c4 = l4 - 4 * l1 * l3 + 6 * l1 ** 2 * l2 - 3 * l1 ** 4
    with np.errstate(divide="ignore", invalid="ignore"):
        var_i = c2 * m / (m - 1)
        skew_i = np.where(c2 > 0, c3 / np.maximum(c2, 1e-300) ** 1.5, 0.0)
        kurt_i = np.where(c2 > 0, c4 / np.maximum(c2, 1e-300) ** 2 - 3.0, 0.0)

    def jk_se(theta: np.ndarray) -> float:
        return float(math.sqrt(max((n - 1) / n * np.sum((theta - theta.mean()) ** 2), 0.0)))

    return jk_se(var_i), jk_se(skew_i), jk_se(kurt_i)


def normality_report(samples: np.ndarray, targets: CovarianceTarget, *, k_list,
                     n: int, scaling_exponents) -> MomentReport:
    """Moment and KS diagnostics of trace samples against Gaussian targets.

    Samples are standardized by the *target* variance (not the empirical
    one) before the KS comparison; a non-positive target raises
    :class:`DegenerateTargetError` so that exactly-degenerate cases surface
    instead of producing meaningless distances.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] < 100:
        raise InvalidArgumentError("distributional statistics need at least 100 trials")
    k_list = tuple(int(k) for k in k_list)
    trials, r = samples.shape
    if r != len(k_list) or targets.value.shape != (r, r):
        raise InvalidArgumentError("samples, k_list and targets have inconsistent shapes")

    centered = samples - samples.mean(axis=0)
    cov = (centered.T @ centered) / (trials - 1)
    cov = 0.5 * (cov + cov.T)
    variance = tuple(float(v) for v in np.diag(cov))

    means, skews, kurts, ks = [], [], [], []
    mean_se, var_se, skew_se, kurt_se = [], [], [], []
    for j, k in enumerate(k_list):
        x = samples[:, j]
        tv = float(targets.value[j, j])
        if tv <= 1e-12:
            raise DegenerateTargetError(
                f"target variance for power {k} is {tv:g}; cannot standardize")
        mu = float(x.mean())
        means.append(mu)
        c = x - mu
        m2 = float((c ** 2).mean())
        m3 = float((c ** 3).mean())
        m4 = float((c ** 4).mean())
        skews.append(m3 / m2 ** 1.5 if m2 > 0 else 0.0)
        kurts.append(m4 / m2 ** 2 - 3.0 if m2 > 0 else 0.0)
        ks.append(ks_distance_to_normal(x / math.sqrt(tv)))
        mean_se.append(float(x.std(ddof=1) / math.sqrt(trials)))
        vse, sse, kse = _jackknife_moment_ses(x)
        var_se.append(vse)
        skew_se.append(sse)
        kurt_se.append(kse)

    z = centered
    prod_var = np.einsum("ti,tj->ij", z ** 2, z ** 2) / trials - cov ** 2
    cov_se = np.sqrt(np.maximum(prod_var, 0.0) / trials)

    return MomentReport(
        k_list=k_list, trials=trials, n=n,
        scaling_exponents=tuple(float(e) for e in scaling_exponents),
        mean=tuple(means), variance=variance, covariance=cov,
        skewness=tuple(skews), excess_kurtosis=tuple(kurts),
        ks_distance=tuple(ks), ks_critical_1pct=1.63 / math.sqrt(trials),
        mc_standard_errors={
            "mean": tuple(mean_se), "variance": tuple(var_se),
            "skewness": tuple(skew_se), "excess_kurtosis": tuple(kurt_se),
            "covariance": cov_se,
        })


# ---------------------------------------------------------------------------
# Boundary terms


def boundary_bound(spec: EnsembleSpec, k: int) -> float:
    """Deterministic bound on |sum of site summands - trace|, uniform in n."""
    ab_max, d_max = spec.entry_bounds()
    total = 0.0
    for t in enumerate_types(k):
        if t.span == 0:
            continue
        total += t.count * t.span * ab_max ** sum(t.half_edges) * d_max ** sum(t.loops)
    return total


def boundary_gap_samples(spec: EnsembleSpec, n: int, k: int, trials: int,
                         master_seed: int) -> np.ndarray:
    """Signed gaps ``sum_i X_{k,i} - trace(Q^k)`` over seeded realizations.

    Each trial samples one window long enough to cover every summand site
    ``1 .. n`` and truncates its head to the matrix, so both sides use the
    same realization of the entry sequences.
    """
    if not spec.window_matrix_consistent:
        raise InvalidArgumentError(
            "model has right-boundary cells; window truncation does not reproduce it")
    types = enumerate_types(k)
    length = n + k // 2
    gaps = np.empty(trials)
    for t in range(trials):
        window = sample_window(spec, 1, length, trial_seed_sequence(master_seed, t))
        matrix = window_to_matrix(window, n)
        x = _summand_block(window.a[None, :], window.d[None, :], window.b[None, :],
                           1, range(1, n + 1), k, types)[0]
        gaps[t] = compensated_sum(x) - trace_power_expansion(matrix, k, types)
    return gaps
