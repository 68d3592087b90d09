"""Moderate-deviation rate checks and the k=1 Cramér rate function.

For bounded i.i.d.-type entries the scaled centered trace satisfies a
quadratic deviation rate ``x^2 / (2 D_k)`` at speed ``n^nu``; this module
estimates tail probabilities by direct Monte Carlo and compares the implied
empirical rate with the prediction.  Direct tail counting is only feasible
while ``n^nu * rate`` stays below roughly ``log(trials)``, so estimates with
too few expected tail events are flagged rather than silently reported.

For k=1 the trace is a plain i.i.d. sum and the exact rate function is the
Legendre transform of the log moment generating function; it is computed
numerically (golden-section on the concave objective) with closed-form
log-MGFs where the law provides one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .ensembles import EnsembleSpec, EntryLaw
from .errors import DegenerateRateError, InvalidArgumentError
from .stats import dk_iid, mc_traces

MIN_EXPECTED_TAIL_COUNT = 50.0
DEFAULT_RATE_TARGETS = (0.3, 0.5, 0.8, 1.2)
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RateEstimate:
    """Empirical vs predicted deviation rate at one (n, delta)."""

    n: int
    nu: float
    delta: float
    tail_prob: float
    empirical_rate: float
    predicted_rate: float
    trials: int
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.tail_prob <= 1.0:
            raise InvalidArgumentError("tail probability outside [0, 1]")
        if self.tail_prob > 0 and self.empirical_rate < -1e-12:
            raise InvalidArgumentError("empirical rate must be nonnegative")


@dataclass(frozen=True)
class CramerRate:
    """Numerical rate function for the k=1 trace (an i.i.d. sum)."""

    grid: np.ndarray
    rate: np.ndarray
    mgf_grid: np.ndarray
    support_bounds: tuple[float, float]
    warnings: tuple[str, ...] = ()


def derive_delta_list(dk: float, nu: float, n: int,
                      rate_targets=DEFAULT_RATE_TARGETS) -> tuple[float, ...]:
    """Thresholds whose predicted rates land on ``rate_targets``."""
    if dk <= 0:
        raise DegenerateRateError("cannot derive thresholds from a vanishing variance")
    return tuple(math.sqrt(2.0 * dk * r) for r in rate_targets)


def mdp_check(spec: EnsembleSpec, k: int, nu: float, n_list, delta_list,
              trials: int, master_seed: int, *, workers: int = 1,
              dk_replicas: int = 200_000) -> list[RateEstimate]:
    """Estimate deviation rates of ``sqrt(lambda_n / n) * (trace - mean)``.

    ``lambda_n = n ** -nu``.  For every (n, delta) pair the empirical rate
    ``-lambda_n * log P(|S| >= delta)`` is returned next to the predicted
    ``delta^2 / (2 D_k)``.  Estimates whose predicted tail mass would put
    fewer than ~50 events in ``trials`` draws carry a ``low-count`` flag;
    when no tail event occurs at all the empirical rate is infinite and the
    estimate is flagged ``empty-tail``.
    """
    if not spec.bounded:
        raise InvalidArgumentError("deviation checks require a bounded spec")
    if not 0.0 < nu < 1.0:
        raise InvalidArgumentError("nu must lie in (0, 1)")
    if trials < 2:
        raise InvalidArgumentError("trials must be >= 2")
    dk = dk_iid(spec, k, dk_replicas, master_seed)
    if dk.value < 1e-12:
        raise DegenerateRateError(
            f"limiting variance for power {k} is {dk.value:g}; rate is degenerate")
    if delta_list is None:
        delta_list = {n: derive_delta_list(dk.value, nu, n) for n in n_list}
    else:
        delta_list = {n: tuple(float(d) for d in delta_list) for n in n_list}

    out: list[RateEstimate] = []
    for n in n_list:
        lam = float(n) ** (-nu)
        # raw trace samples, centered; exponent 0 keeps them unscaled
        raw = mc_traces(spec, n, (k,), trials, master_seed,
                        alpha=0.0, epsilon=0.5, workers=workers)[:, 0]
        s = math.sqrt(lam / n) * raw
        sd = math.sqrt(lam * dk.value)
        for delta in delta_list[n]:
            tail = float(np.mean(np.abs(s) >= delta)) if delta > 0 else 1.0
            predicted = delta ** 2 / (2.0 * dk.value)
            flags = []
            predicted_tail = 2.0 * (1.0 - ndtr(delta / sd)) if delta > 0 else 1.0
            if predicted_tail * trials < MIN_EXPECTED_TAIL_COUNT:
                flags.append("low-count")
            if tail == 0.0:
                empirical = math.inf
                flags.append("empty-tail")
            else:
                empirical = -lam * math.log(tail)
            out.append(RateEstimate(n=int(n), nu=float(nu), delta=float(delta),
                                    tail_prob=tail, empirical_rate=empirical,
                                    predicted_rate=predicted, trials=int(trials),
                                    flags=tuple(flags)))
    return out


def _log_mgf_quadrature(law: EntryLaw, t: float, nodes: int = 96) -> float:
    atoms = law.atoms
    if atoms is not None:
        shift = max(t * v for v, _ in atoms)
        return shift + math.log(sum(p * math.exp(t * v - shift) for v, p in atoms))
    lo, hi = law.support
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * w
    if law.kind != "uniform":  # pragma: no cover - only continuous compact law today
        raise InvalidArgumentError(f"no density known for law {law.kind!r}")
    dens = 1.0 / (hi - lo)
    vals = t * x
    shift = float(np.max(vals))
    return shift + math.log(float(np.sum(w * dens * np.exp(vals - shift))))


def _golden_max(fun, lo: float, hi: float, tol: float = 1e-12) -> tuple[float, float]:
    """Maximize a concave function on [lo, hi]; returns (argmax, max)."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol * (1.0 + abs(a) + abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
    t = 0.5 * (a + b)
    return t, fun(t)


def cramer_rate_k1(entry_law: EntryLaw, x_grid, t_max: float = 50.0, *,
                   mgf_mode: str = "auto") -> CramerRate:
    """Rate function ``I(x) = sup_t (t x - log E exp(t d))`` for an i.i.d. sum.

    ``entry_law`` must have compact support.  Outside the closed support
    hull the rate is infinite (flagged, not an error).  If the supremum
    pushes against ``t_max`` while the objective still climbs, a precision
    warning is recorded.
    """
    if not entry_law.is_bounded:
        raise InvalidArgumentError("Cramér rate needs a compactly supported law")
    if t_max <= 0:
        raise InvalidArgumentError("t_max must be positive")
    if mgf_mode not in ("auto", "quadrature"):
        raise InvalidArgumentError("mgf_mode must be 'auto' or 'quadrature'")
    lo, hi = entry_law.support
    if mgf_mode == "auto":
        log_mgf = entry_law.log_mgf
    else:
        def log_mgf(t: float) -> float:
            return _log_mgf_quadrature(entry_law, t)

    grid = np.asarray(x_grid, dtype=float)
    rate = np.empty_like(grid)
    t_star = np.empty_like(grid)
    warnings: list[str] = []
    slope_tol = 1e-7
    for idx, x in enumerate(grid):
        if x < lo or x > hi:
            rate[idx] = math.inf
            t_star[idx] = math.copysign(t_max, x - 0.5 * (lo + hi))
            continue

        def objective(t: float, x=x) -> float:
            return t * x - log_mgf(t)

        t_opt, val = _golden_max(objective, -t_max, t_max)
        rate[idx] = max(val, 0.0)
        t_star[idx] = t_opt
        if t_max - abs(t_opt) < 1e-6 * t_max:
            eps = 1e-6 * t_max
            edge = math.copysign(t_max, t_opt)
            slope = (objective(edge) - objective(edge - math.copysign(eps, t_opt))) \
                / math.copysign(eps, t_opt)
            if slope > slope_tol:
                warnings.append(
                    f"x={x:g}: supremum hit |t|={t_max:g} with positive slope; "
                    "rate is a lower bound")
    return CramerRate(grid=grid, rate=rate, mgf_grid=t_star,
                      support_bounds=(lo, hi), warnings=tuple(warnings))
