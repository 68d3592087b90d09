"""Entry-law descriptors and samplers for tridiagonal random matrix models.

A model is described declaratively by an :class:`EnsembleSpec`; realizations
are pure functions of ``(spec, shape, seed)`` built on the counter-based
Philox generator, so per-trial streams never share state and a Monte Carlo
run is reproducible regardless of scheduling.

Index conventions follow the matrix layout: site ``i`` (1-based) owns the
triple ``(a_{i-1}, d_i, b_i)`` of sub-, main- and super-diagonal entries,
with ``a_0 = 0``.  For coupled models the diagonal entry of the last site is
built from the untruncated entry sequence (``d_n`` uses the sequence value
``b_n``, even though the matrix itself stores no ``b_n``), so windowed and
matrix-based evaluations of site products agree exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .circuits import TridiagonalMatrix
from .errors import InvalidArgumentError

MODELS = ("anderson", "hatano_nelson", "birth_death_kernel", "birth_death_q",
          "beta_hermite", "generic_iid")
COUPLINGS = ("independent_streams", "independent_triples", "d_from_f")
KERNEL_VARIANTS = ("v", "conductance")

_LAW_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


@dataclass(frozen=True)
class EntryLaw:
    """A scalar distribution used for one entry stream."""

    kind: str
    params: tuple[float, ...] = ()

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, c: float) -> "EntryLaw":
        return cls("constant", (float(c),))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "EntryLaw":
        if not hi > lo:
            raise InvalidArgumentError("uniform law needs hi > lo")
        return cls("uniform", (float(lo), float(hi)))

    @classmethod
    def bernoulli(cls, p: float, v0: float, v1: float) -> "EntryLaw":
        if not 0.0 <= p <= 1.0:
            raise InvalidArgumentError("bernoulli p outside [0, 1]")
        return cls("bernoulli", (float(p), float(v0), float(v1)))

    @classmethod
    def gaussian(cls, mu: float, sigma: float) -> "EntryLaw":
        if sigma < 0:
            raise InvalidArgumentError("gaussian sigma must be >= 0")
        return cls("gaussian", (float(mu), float(sigma)))

    @classmethod
    def rademacher(cls) -> "EntryLaw":
        return cls("rademacher", ())

    @classmethod
    def parse(cls, text: str) -> "EntryLaw":
        m = _LAW_RE.match(text.lower())
        if not m:
            raise InvalidArgumentError(f"unparseable law: {text!r}")
        kind, args = m.group(1), m.group(2)
        params = tuple(float(x) for x in args.split(",")) if args else ()
        ctors = {"constant": cls.constant, "uniform": cls.uniform,
                 "bernoulli": cls.bernoulli, "gaussian": cls.gaussian}
        if kind == "rademacher":
            if params:
                raise InvalidArgumentError("rademacher takes no parameters")
            return cls.rademacher()
        if kind not in ctors:
            raise InvalidArgumentError(f"unknown law kind: {kind!r}")
        try:
            return ctors[kind](*params)
        except TypeError as exc:
            raise InvalidArgumentError(f"wrong arity for {kind!r}: {text!r}") from exc

    def __str__(self) -> str:
        if not self.params:
            return self.kind
        return f"{self.kind}({','.join(repr(p) for p in self.params)})"

    # -- sampling and moments ------------------------------------------
    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "constant":
            return np.full(size, self.params[0])
        if self.kind == "uniform":
            return rng.uniform(self.params[0], self.params[1], size)
        if self.kind == "bernoulli":
            p, v0, v1 = self.params
            return np.where(rng.random(size) < p, v1, v0)
        if self.kind == "gaussian":
            return rng.normal(self.params[0], self.params[1], size)
        if self.kind == "rademacher":
            return rng.integers(0, 2, size).astype(float) * 2.0 - 1.0
        raise InvalidArgumentError(f"unknown law kind: {self.kind!r}")  # pragma: no cover

    @property
    def mean(self) -> float:
        if self.kind == "constant":
            return self.params[0]
        if self.kind == "uniform":
            return 0.5 * (self.params[0] + self.params[1])
        if self.kind == "bernoulli":
            p, v0, v1 = self.params
            return (1 - p) * v0 + p * v1
        if self.kind == "gaussian":
            return self.params[0]
        return 0.0  # rademacher

    @property
    def variance(self) -> float:
        if self.kind == "constant":
            return 0.0
        if self.kind == "uniform":
            return (self.params[1] - self.params[0]) ** 2 / 12.0
        if self.kind == "bernoulli":
            p, v0, v1 = self.params
            return p * (1 - p) * (v1 - v0) ** 2
        if self.kind == "gaussian":
            return self.params[1] ** 2
        return 1.0  # rademacher

    @property
    def support(self) -> tuple[float, float] | None:
        """Closed support interval, or None for unbounded laws."""
        if self.kind == "constant":
            c = self.params[0]
            return (c, c)
        if self.kind == "uniform":
            return (self.params[0], self.params[1])
        if self.kind == "bernoulli":
            _, v0, v1 = self.params
            return (min(v0, v1), max(v0, v1))
        if self.kind == "rademacher":
            return (-1.0, 1.0)
        return None  # gaussian

    @property
    def is_bounded(self) -> bool:
        return self.support is not None

    @property
    def atoms(self) -> tuple[tuple[float, float], ...] | None:
        """(value, probability) pairs for purely discrete laws."""
        if self.kind == "constant":
            return ((self.params[0], 1.0),)
        if self.kind == "bernoulli":
            p, v0, v1 = self.params
            return ((v0, 1.0 - p), (v1, p))
        if self.kind == "rademacher":
            return ((-1.0, 0.5), (1.0, 0.5))
        return None

    @property
    def symmetric_zero_mean(self) -> bool:
        if self.kind == "rademacher":
            return True
        if self.kind == "constant":
            return self.params[0] == 0.0
        if self.kind == "uniform":
            return self.params[0] == -self.params[1]
        if self.kind == "gaussian":
            return self.params[0] == 0.0
        if self.kind == "bernoulli":
            p, v0, v1 = self.params
            return p == 0.5 and v0 == -v1
        return False

    def log_mgf(self, t: float) -> float:
        """log E exp(t X) in closed form."""
        if self.kind == "constant":
            return t * self.params[0]
        if self.kind == "rademacher":
            # log cosh(t), stable for large |t|
            a = abs(t)
            return a + math.log1p(math.exp(-2.0 * a)) - math.log(2.0)
        if self.kind == "gaussian":
            mu, sigma = self.params
            return t * mu + 0.5 * (t * sigma) ** 2
        if self.kind == "uniform":
            lo, hi = self.params
            w = t * (hi - lo)
            if abs(w) < 1e-8:
                return t * self.mean + 0.5 * t * t * self.variance
            if w > 0:
                return t * lo + math.log(math.expm1(w) / w)
            return t * hi + math.log(math.expm1(-w) / (-w))
        if self.kind == "bernoulli":
            p, v0, v1 = self.params
            x0, x1 = t * v0, t * v1
            m = max(x0, x1)
            return m + math.log((1 - p) * math.exp(x0 - m) + p * math.exp(x1 - m))
        raise InvalidArgumentError(f"unknown law kind: {self.kind!r}")  # pragma: no cover


@dataclass(frozen=True)
class EntryWindow:
    """A realized slice of the entry sequences covering a contiguous site range.

    For ``t = 0 .. len-1`` and ``f = first_index``:
    ``d[t] = d_{f+t}``, ``b[t] = b_{f+t}``, ``a[t] = a_{f+t-1}``
    (site ``f+t`` owns the sub-diagonal entry ``a_{f+t-1}``).  When
    ``first_index == 1`` the slot ``a[0]`` is exactly 0.
    """

    first_index: int
    a: np.ndarray
    d: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if self.first_index < 1:
            raise InvalidArgumentError("first_index must be >= 1")
        if not (len(self.a) == len(self.d) == len(self.b)):
            raise InvalidArgumentError("window arrays must have equal length")
        if self.first_index == 1 and len(self.a) and self.a[0] != 0.0:
            raise InvalidArgumentError("a-slot for index 0 must be exactly 0")
        for name in ("a", "d", "b"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class EnsembleSpec:
    """Declarative description of the joint law of the entry triples."""

    model: str
    symmetric: bool
    beta: float | None = None
    a_law: EntryLaw | None = None
    d_law: EntryLaw | None = None
    b_law: EntryLaw | None = None
    kernel_law: EntryLaw | None = None
    kernel_variant: str = "v"
    coupling: str = "independent_streams"
    bounded: bool = True

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidArgumentError(f"unknown model {self.model!r}")
        if self.coupling not in COUPLINGS:
            raise InvalidArgumentError(f"unknown coupling {self.coupling!r}")
        if self.model == "beta_hermite":
            if self.beta is None or not self.beta > 0:
                raise InvalidArgumentError("beta_hermite requires beta > 0")
            if not self.symmetric:
                raise InvalidArgumentError("beta_hermite is symmetric by definition")
            if self.bounded:
                raise InvalidArgumentError("beta_hermite entries are unbounded")
        if self.model == "anderson":
            if self.d_law is None:
                raise InvalidArgumentError("anderson requires a diagonal law")
            if not self.symmetric:
                raise InvalidArgumentError("anderson off-diagonals are equal; symmetric must be true")
        if self.model == "hatano_nelson":
            for law, name in ((self.a_law, "a"), (self.d_law, "d"), (self.b_law, "b")):
                if law is None:
                    raise InvalidArgumentError(f"hatano_nelson requires a {name} law")
            for law in (self.a_law, self.b_law):
                sup = law.support
                if sup is None or sup[0] <= 0:
                    raise InvalidArgumentError("hatano_nelson off-diagonal laws must be strictly positive")
        if self.model == "birth_death_kernel":
            if self.kernel_variant not in KERNEL_VARIANTS:
                raise InvalidArgumentError(f"unknown kernel variant {self.kernel_variant!r}")
            if self.kernel_law is None:
                raise InvalidArgumentError("birth_death_kernel requires an environment law")
            sup = self.kernel_law.support
            if self.kernel_variant == "v":
                if sup is None or sup[0] < 0 or sup[1] > 1:
                    raise InvalidArgumentError("kernel environment law must live on [0, 1]")
            else:
                if sup is None or sup[0] <= 0:
                    raise InvalidArgumentError("conductance law must be strictly positive")
        if self.model == "birth_death_q":
            if self.a_law is None or (not self.symmetric and self.b_law is None):
                raise InvalidArgumentError("birth_death_q requires off-diagonal laws")
            for law in (self.a_law, self.b_law):
                if law is None:
                    continue
                sup = law.support
                if sup is None or sup[0] <= 0:
                    raise InvalidArgumentError("birth_death_q off-diagonal laws must be strictly positive")
        if self.model == "generic_iid":
            if self.coupling == "d_from_f":
                # The two supported diagonal couplings are exposed as the
                # named birth-death models; there is no free-form f here.
                raise InvalidArgumentError(
                    "generic_iid does not support d_from_f; use a birth_death model")
            if self.a_law is None or self.d_law is None or (not self.symmetric and self.b_law is None):
                raise InvalidArgumentError("generic_iid requires laws for every stream")
        if self.bounded and not all(law.is_bounded for law in self._laws()):
            raise InvalidArgumentError("bounded=True but some entry law has unbounded support")

    def _laws(self) -> tuple[EntryLaw, ...]:
        return tuple(law for law in (self.a_law, self.d_law, self.b_law, self.kernel_law)
                     if law is not None)

    # -- constructors ----------------------------------------------------
    @classmethod
    def anderson(cls, d_law: EntryLaw | None = None) -> "EnsembleSpec":
        d_law = d_law or EntryLaw.rademacher()
        return cls(model="anderson", symmetric=True, d_law=d_law,
                   coupling="independent_streams", bounded=d_law.is_bounded)

    @classmethod
    def hatano_nelson(cls, a_law=None, d_law=None, b_law=None) -> "EnsembleSpec":
        a_law = a_law or EntryLaw.uniform(0.5, 1.5)
        d_law = d_law or EntryLaw.uniform(-1.0, 1.0)
        b_law = b_law or EntryLaw.uniform(0.5, 1.5)
        bounded = all(l.is_bounded for l in (a_law, d_law, b_law))
        return cls(model="hatano_nelson", symmetric=False, a_law=a_law, d_law=d_law,
                   b_law=b_law, coupling="independent_triples", bounded=bounded)

    @classmethod
    def birth_death_kernel(cls, law: EntryLaw | None = None,
                           variant: str = "v") -> "EnsembleSpec":
        if law is None:
            law = EntryLaw.uniform(0.0, 1.0) if variant == "v" else EntryLaw.uniform(0.5, 1.5)
        return cls(model="birth_death_kernel", symmetric=False, kernel_law=law,
                   kernel_variant=variant, coupling="d_from_f", bounded=True)

    @classmethod
    def birth_death_q(cls, a_law=None, b_law=None, symmetric: bool = False) -> "EnsembleSpec":
        a_law = a_law or EntryLaw.uniform(0.5, 1.5)
        if symmetric:
            b_law = None
        else:
            b_law = b_law or EntryLaw.uniform(0.5, 1.5)
        bounded = all(l.is_bounded for l in (a_law,) + ((b_law,) if b_law else ()))
        return cls(model="birth_death_q", symmetric=symmetric, a_law=a_law, b_law=b_law,
                   coupling="d_from_f", bounded=bounded)

    @classmethod
    def beta_hermite(cls, beta: float) -> "EnsembleSpec":
        return cls(model="beta_hermite", symmetric=True, beta=float(beta), bounded=False)

    @classmethod
    def generic_iid(cls, a_law, d_law, b_law=None, symmetric: bool = False,
                    coupling: str = "independent_streams") -> "EnsembleSpec":
        if symmetric:
            b_law = None
        bounded = all(l.is_bounded for l in (a_law, d_law) + ((b_law,) if b_law else ()))
        return cls(model="generic_iid", symmetric=symmetric, a_law=a_law, d_law=d_law,
                   b_law=b_law, coupling=coupling, bounded=bounded)

    # -- derived structure -------------------------------------------------
    @property
    def is_iid_type(self) -> bool:
        """True when the site triples away from the boundary are i.i.d."""
        if self.model == "beta_hermite":
            return False
        if self.model == "birth_death_kernel":
            return self.kernel_variant == "v"
        return True

    @property
    def window_matrix_consistent(self) -> bool:
        """True when a length-n matrix is exactly the first n sites of a window."""
        return self.model != "birth_death_kernel"

    @property
    def default_growth(self) -> tuple[float, float]:
        """Default (alpha, epsilon) polynomial-growth exponents for scaling."""
        return (0.5, 0.5) if self.model == "beta_hermite" else (0.0, 0.0)

    def entry_bounds(self) -> tuple[float, float]:
        """(max |a_i b_i|, max |d_i|) over the support; requires a bounded spec."""
        if not self.bounded:
            raise InvalidArgumentError("entry bounds require a bounded spec")

        def absmax(law: EntryLaw) -> float:
            lo, hi = law.support
            return max(abs(lo), abs(hi))

        if self.model == "anderson":
            return 1.0, absmax(self.d_law)
        if self.model == "birth_death_kernel":
            return 1.0, 1.0
        if self.model == "birth_death_q":
            am = absmax(self.a_law)
            bm = absmax(self.b_law) if self.b_law is not None else am
            return am * bm, am + bm
        if self.model == "hatano_nelson":
            return absmax(self.a_law) * absmax(self.b_law), absmax(self.d_law)
        am = absmax(self.a_law)
        bm = absmax(self.b_law) if self.b_law is not None else am
        return am * bm, absmax(self.d_law)

    def describe(self) -> dict:
        """Flat, deterministic key/value form for provenance headers."""
        out = {"model": self.model, "symmetric": self.symmetric, "coupling": self.coupling,
               "bounded": self.bounded}
        if self.beta is not None:
            out["beta"] = self.beta
        for name, law in (("a_law", self.a_law), ("d_law", self.d_law),
                          ("b_law", self.b_law), ("kernel_law", self.kernel_law)):
            if law is not None:
                out[name] = str(law)
        if self.model == "birth_death_kernel":
            out["kernel_variant"] = self.kernel_variant
        return out


# ---------------------------------------------------------------------------
# Seeding


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF)


def trial_seed_sequence(master_seed: int, trial_index: int) -> np.random.SeedSequence:
    """Keyed hash of (master_seed, trial_index); distinct trials never share a stream."""
    return np.random.SeedSequence(int(master_seed) & 0xFFFFFFFFFFFFFFFF,
                                  spawn_key=(int(trial_index),))


def _streams(seed, count: int) -> list[np.random.Generator]:
    children = as_seed_sequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


# ---------------------------------------------------------------------------
# Matrix sampling


def sample_matrix(spec: EnsembleSpec, n: int, seed) -> TridiagonalMatrix:
    """Draw one n-by-n realization; a deterministic function of (spec, n, seed)."""
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    model = spec.model
    if model == "anderson":
        (rng,) = _streams(seed, 1)
        d = spec.d_law.sample(rng, n)
        off = np.full(n - 1, -1.0)
        return TridiagonalMatrix(sub=off, diag=d, sup=off.copy())

    if model == "beta_hermite":
        rng_a, rng_d = _streams(seed, 2)
        idx = np.arange(1, n, dtype=float)
        gam = rng_a.gamma(shape=idx * spec.beta / 2.0, scale=2.0)
        a = np.sqrt(gam / spec.beta)
        d = rng_d.normal(0.0, math.sqrt(2.0 / spec.beta), n)
        return TridiagonalMatrix(sub=a, diag=d, sup=a.copy())

    if model in ("hatano_nelson", "generic_iid"):
        if spec.symmetric:
            rng_s, rng_d = _streams(seed, 2)
            s = spec.a_law.sample(rng_s, n - 1)
            d = spec.d_law.sample(rng_d, n)
            return TridiagonalMatrix(sub=s, diag=d, sup=s.copy())
        rng_a, rng_d, rng_b = _streams(seed, 3)
        a = spec.a_law.sample(rng_a, n - 1)
        d = spec.d_law.sample(rng_d, n)
        b = spec.b_law.sample(rng_b, n - 1)
        return TridiagonalMatrix(sub=a, diag=d, sup=b)

    if model == "birth_death_q":
        if spec.symmetric:
            (rng_s,) = _streams(seed, 1)
            s = spec.a_law.sample(rng_s, n)       # s[i] = a_{i+1} = b_{i+1}
            a_prev = np.concatenate(([0.0], s[:n - 1]))
            d = -(a_prev + s)
            return TridiagonalMatrix(sub=s[:n - 1], diag=d, sup=s[:n - 1].copy())
        rng_a, rng_b = _streams(seed, 2)
        a = spec.a_law.sample(rng_a, n - 1)
        b = spec.b_law.sample(rng_b, n)           # b_n enters d_n through the sequence rule
        a_prev = np.concatenate(([0.0], a))
        d = -(a_prev + b)
        return TridiagonalMatrix(sub=a, diag=d, sup=b[:n - 1])

    if model == "birth_death_kernel":
        (rng,) = _streams(seed, 1)
        if spec.kernel_variant == "v":
            v = spec.kernel_law.sample(rng, max(n - 2, 0))   # V_2 .. V_{n-1}
            sup = np.concatenate(([1.0], v))                  # b_1 = 1
            sub = np.concatenate((1.0 - v, [1.0]))            # a_j = 1 - V_{j+1}; a_{n-1} = 1
        else:
            u = spec.kernel_law.sample(rng, n - 1)            # conductances U_1 .. U_{n-1}
            ratio = u[1:] / (u[1:] + u[:-1])                  # b_i for i = 2 .. n-1
            sup = np.concatenate(([1.0], ratio))
            sub = np.concatenate((1.0 - ratio, [1.0]))
        a_prev = np.concatenate(([0.0], sub))
        b_full = np.concatenate((sup, [0.0]))                 # kernel boundary: b_n = 0
        d = 1.0 - a_prev - b_full
        return TridiagonalMatrix(sub=sub, diag=d, sup=sup)

    raise InvalidArgumentError(f"unknown model {model!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Window sampling


def sample_window_arrays(spec: EnsembleSpec, first_index: int, length: int,
                         count: int, seed) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``count`` independent windows as (count, length) slot arrays (a, d, b)."""
    if length < 1:
        raise InvalidArgumentError("length must be >= 1")
    if first_index < 1:
        raise InvalidArgumentError("first_index must be >= 1")
    if count < 1:
        raise InvalidArgumentError("count must be >= 1")
    f, L, R = first_index, length, count
    model = spec.model
    shape = (R, L)

    if model == "anderson":
        (rng,) = _streams(seed, 1)
        d = spec.d_law.sample(rng, shape)
        a = np.full(shape, -1.0)
        b = np.full(shape, -1.0)
        if f == 1:
            a[:, 0] = 0.0
        return a, d, b

    if model == "beta_hermite":
        rng_a, rng_d = _streams(seed, 2)
        # one draw of a_i for i in [max(1, f-1), f+L-1] serves both slots
        lo = max(1, f - 1)
        idx = np.arange(lo, f + L, dtype=float)
        gam = rng_a.gamma(shape=np.broadcast_to(idx * spec.beta / 2.0, (R, idx.size)),
                          scale=2.0)
        avals = np.sqrt(gam / spec.beta)           # column t -> a_{lo+t}
        d = rng_d.normal(0.0, math.sqrt(2.0 / spec.beta), shape)

        def a_at(i: int) -> np.ndarray:
            if i == 0:
                return np.zeros(R)
            return avals[:, i - lo]

        a = np.stack([a_at(f - 1 + t) for t in range(L)], axis=1)
        b = np.stack([a_at(f + t) for t in range(L)], axis=1)
        return a, d, b

    if model in ("hatano_nelson", "generic_iid"):
        if spec.symmetric:
            rng_s, rng_d = _streams(seed, 2)
            s = spec.a_law.sample(rng_s, (R, L + 1))   # column t -> entry index f-1+t
            d = spec.d_law.sample(rng_d, shape)
            a = s[:, :L].copy()
            b = s[:, 1:].copy()
            if f == 1:
                a[:, 0] = 0.0
            return a, d, b
        rng_a, rng_d, rng_b = _streams(seed, 3)
        a = spec.a_law.sample(rng_a, shape)
        d = spec.d_law.sample(rng_d, shape)
        b = spec.b_law.sample(rng_b, shape)
        if f == 1:
            a[:, 0] = 0.0
        return a, d, b

    if model == "birth_death_q":
        if spec.symmetric:
            (rng_s,) = _streams(seed, 1)
            s = spec.a_law.sample(rng_s, (R, L + 1))
            a = s[:, :L].copy()
            b = s[:, 1:].copy()
        else:
            rng_a, rng_b = _streams(seed, 2)
            a = spec.a_law.sample(rng_a, shape)
            b = spec.b_law.sample(rng_b, shape)
        if f == 1:
            a[:, 0] = 0.0
        d = -(a + b)
        return a, d, b

    if model == "birth_death_kernel":
        (rng,) = _streams(seed, 1)
        if spec.kernel_variant == "v":
            v = spec.kernel_law.sample(rng, shape)     # column t -> V_{f+t}
            b = v.copy()
            a = 1.0 - v
        else:
            u = spec.kernel_law.sample(rng, (R, L + 1))  # column t -> U_{f-1+t}
            b = u[:, 1:] / (u[:, 1:] + u[:, :-1])        # b_{f+t}
            a = 1.0 - b                                   # a_{f+t-1}
        sites = f + np.arange(L)
        left = sites == 1
        if np.any(left):
            b[:, left] = 1.0
            a[:, left] = 0.0
        d = 1.0 - a - b
        return a, d, b

    raise InvalidArgumentError(f"unknown model {model!r}")  # pragma: no cover


def sample_window(spec: EnsembleSpec, first_index: int, length: int, seed) -> EntryWindow:
    """Draw one window; marginal law matches the same slice of ``sample_matrix``
    for i.i.d.-type specs (away from the right boundary)."""
    a, d, b = sample_window_arrays(spec, first_index, length, 1, seed)
    return EntryWindow(first_index=first_index, a=a[0], d=d[0], b=b[0])


def window_to_matrix(window: EntryWindow, n: int) -> TridiagonalMatrix:
    """Truncate a window starting at site 1 to the n-by-n matrix it induces."""
    if window.first_index != 1:
        raise InvalidArgumentError("window must start at site 1")
    if len(window) < n:
        raise InvalidArgumentError("window shorter than requested dimension")
    return TridiagonalMatrix(sub=window.a[1:n], diag=window.d[:n], sup=window.b[:n - 1])
