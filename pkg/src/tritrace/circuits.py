"""Closed-walk type tables and trace kernels for tridiagonal matrices.

The trace of the k-th power of a tridiagonal matrix is a sum over closed
walks of length k on the index path.  Walks fall into translation classes:
a class records the span of the walk, half the number of traversals of each
edge inside the span, and the number of stay-steps at each vertex.  Every
class has a position-independent multiplicity, so the trace collapses to a
short sum of windowed entry products:

    trace(M^k) = sum over classes of
                 count * sum_i prod_j (sub_{i+j} sup_{i+j})^{edge_j}
                               * prod_j diag_{i+j}^{loop_j}

This module builds the class tables exactly, provides a brute-force walk
oracle for them, and evaluates traces both through the expansion and
through direct banded matrix powering.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass

import numpy as np

from .accumulate import compensated_sum
from .errors import InvalidArgumentError, NumericOverflowError, TriTraceError

DEFAULT_K_MAX = 16
BRUTEFORCE_K_MAX = 12
DENSE_CHECK_MAX = 128


@dataclass(frozen=True)
class CircuitType:
    """One translation class of closed walks of length ``k``.

    ``half_edges[j]`` is half the number of traversals of the edge between
    offsets ``j`` and ``j+1`` from the leftmost vertex; ``loops[h]`` is the
    number of stay-steps at offset ``h``.  ``count`` is the number of walks
    in the class once the leftmost vertex is fixed.
    """

    k: int
    span: int
    half_edges: tuple[int, ...]
    loops: tuple[int, ...]
    count: int

    def __post_init__(self):
        if self.k < 1:
            raise InvalidArgumentError("k must be >= 1")
        if not 0 <= self.span <= self.k // 2:
            raise InvalidArgumentError("span outside [0, k//2]")
        if len(self.half_edges) != self.span or len(self.loops) != self.span + 1:
            raise InvalidArgumentError("vector lengths inconsistent with span")
        if any(m < 1 for m in self.half_edges):
            # A zero inside the edge vector would describe a walk that never
            # reaches the far end of its claimed span; such profiles belong
            # to a smaller span and are never stored.
            raise InvalidArgumentError("edge multiplicities must be >= 1 inside the span")
        if any(h < 0 for h in self.loops):
            raise InvalidArgumentError("loop counts must be >= 0")
        if 2 * sum(self.half_edges) + sum(self.loops) != self.k:
            raise InvalidArgumentError("step budget mismatch: 2*sum(edges) + sum(loops) != k")
        if self.count < 1:
            raise InvalidArgumentError("count must be >= 1")

    @property
    def key(self) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
        return (self.span, self.half_edges, self.loops)


@dataclass(frozen=True, eq=False)
class TridiagonalMatrix:
    """Entries of a real tridiagonal matrix, stored as its three diagonals.

    ``sub[i]`` sits one below the diagonal in row ``i+1``, ``sup[i]`` one
    above in row ``i``.  Arrays are frozen after construction; exact
    (object-dtype integer) entries are accepted for integer-arithmetic
    cross-checks and skip the finiteness validation.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        sub = np.asarray(self.sub)
        diag = np.asarray(self.diag)
        sup = np.asarray(self.sup)
        if diag.ndim != 1 or sub.ndim != 1 or sup.ndim != 1:
            raise InvalidArgumentError("diagonals must be 1-d arrays")
        n = diag.shape[0]
        if n < 1:
            raise InvalidArgumentError("dimension must be >= 1")
        if sub.shape[0] != n - 1 or sup.shape[0] != n - 1:
            raise InvalidArgumentError("off-diagonals must have length n-1")
        if diag.dtype != object:
            sub = np.asarray(sub, dtype=float)
            sup = np.asarray(sup, dtype=float)
            diag = np.asarray(diag, dtype=float)
            if not (np.all(np.isfinite(sub)) and np.all(np.isfinite(diag)) and np.all(np.isfinite(sup))):
                raise InvalidArgumentError("matrix entries must be finite")
        for name, arr in (("sub", sub), ("diag", diag), ("sup", sup)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    @property
    def is_exact(self) -> bool:
        return self.diag.dtype == object

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sup, 1) + np.diag(self.sub, -1)


_TYPE_TABLE: dict[int, tuple[CircuitType, ...]] = {}
_TYPE_LOCK = threading.Lock()


def _bump(items: tuple, key: int) -> tuple:
    d = dict(items)
    d[key] = d.get(key, 0) + 1
    return tuple(sorted(d.items()))


def _classify_profile(edges: tuple, loops: tuple) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    """Shift an edge/loop profile so its leftmost visited vertex is 0."""
    verts = {0}
    for e, _ in edges:
        verts.add(e)
        verts.add(e - 1)
    for v, _ in loops:
        verts.add(v)
    lo, hi = min(verts), max(verts)
    span = hi - lo
    cross = dict(edges)
    half = []
    for j in range(span):
        c = cross.get(lo + 1 + j, 0)
        if c == 0 or c % 2:
            raise TriTraceError("inconsistent walk profile")  # pragma: no cover
        half.append(c // 2)
    lp = dict(loops)
    return span, tuple(half), tuple(lp.get(lo + h, 0) for h in range(span + 1))


def _walk_class_counts(k: int) -> dict[tuple, int]:
    """Count closed walks of length k from a fixed start, per translation class.

    Walk prefixes that share (position, edge-traversal profile, loop profile)
    are interchangeable for every possible continuation, so they are merged
    and counted together; the result is an exact enumeration of all 3^k step
    sequences without visiting them one by one.
    """
    states: dict[tuple, int] = {(0, (), ()): 1}
    for step in range(k):
        budget = k - step - 1  # steps left after taking the next one
        nxt: dict[tuple, int] = {}
        for (pos, edges, loops), ways in states.items():
            if abs(pos) <= budget:
                key = (pos, edges, _bump(loops, pos))
                nxt[key] = nxt.get(key, 0) + ways
            if abs(pos + 1) <= budget:
                key = (pos + 1, _bump(edges, pos + 1), loops)
                nxt[key] = nxt.get(key, 0) + ways
            if abs(pos - 1) <= budget:
                key = (pos - 1, _bump(edges, pos), loops)
                nxt[key] = nxt.get(key, 0) + ways
        states = nxt
    out: dict[tuple, int] = {}
    for (pos, edges, loops), ways in states.items():
        if pos != 0:  # pragma: no cover - pruned already
            continue
        key = _classify_profile(edges, loops)
        out[key] = out.get(key, 0) + ways
    return out


def enumerate_types(k: int, k_max: int = DEFAULT_K_MAX) -> tuple[CircuitType, ...]:
    """Return every closed-walk class for power ``k`` with its multiplicity.

    Parameters
    ----------
    k : int
        Matrix power, ``1 <= k <= k_max``.
    k_max : int, optional
        Safety cap; class tables and the walk state space grow quickly, so
        going past the default 16 must be an explicit caller decision.

    Returns
    -------
    tuple of CircuitType
        Sorted lexicographically by (span, half_edges, loops); two calls
        return identical sequences.
    """
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise InvalidArgumentError("k must be an integer")
    if k < 1 or k > k_max:
        raise InvalidArgumentError(f"k={k} outside [1, {k_max}]")
    k = int(k)
    with _TYPE_LOCK:
        cached = _TYPE_TABLE.get(k)
    if cached is not None:
        return cached
    counts = _walk_class_counts(k)
    types = tuple(
        CircuitType(k=k, span=span, half_edges=m, loops=lp, count=c)
        for (span, m, lp), c in sorted(counts.items())
    )
    with _TYPE_LOCK:
        _TYPE_TABLE.setdefault(k, types)
    return types


def count_circuits_bruteforce(k: int) -> dict[tuple, int]:
    """Classify every closed step sequence of length k, one walk at a time.

    Independent oracle for :func:`enumerate_types`: depth-first enumeration
    of all step sequences in {-1, 0, +1}^k that return to the start, each
    shifted so its minimum vertex is 0 and binned by
    (span, half_edges, loops).
    """
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise InvalidArgumentError("k must be an integer")
    if k < 1 or k > BRUTEFORCE_K_MAX:
        raise InvalidArgumentError(f"k={k} outside [1, {BRUTEFORCE_K_MAX}]")
    k = int(k)
    out: dict[tuple, int] = {}
    path = [0] * (k + 1)

    def descend(t: int) -> None:
        pos = path[t]
        left = k - t
        if left == 0:
            if pos == 0:
                key = _classify_path(path)
                out[key] = out.get(key, 0) + 1
            return
        for step in (-1, 0, 1):
            if abs(pos + step) <= left - 1:
                path[t + 1] = pos + step
                descend(t + 1)

    descend(0)
    return out


def _classify_path(path: list[int]) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    lo = min(path)
    span = max(path) - lo
    half = [0] * span
    loops = [0] * (span + 1)
    for t in range(len(path) - 1):
        u = path[t] - lo
        v = path[t + 1] - lo
        if u == v:
            loops[u] += 1
        else:
            half[min(u, v)] += 1
    return span, tuple(c // 2 for c in half), tuple(loops)


def _power(cache: dict, base: np.ndarray, exponent: int) -> np.ndarray:
    # Repeated multiplication: entries may be negative or zero and exponents
    # never exceed k/2, so exp/log tricks buy nothing.
    arr = cache.get(exponent)
    if arr is None:
        arr = _power(cache, base, exponent - 1) * base
        cache[exponent] = arr
    return arr


def _expansion_terms(matrix: TridiagonalMatrix, k: int, types) -> list:
    n = matrix.n
    if n < k // 2 + 1:
        raise InvalidArgumentError(f"dimension {n} too small for power {k}")
    if not types or any(t.k != k for t in types):
        raise InvalidArgumentError("type table does not match the requested power")
    ab = matrix.sub * matrix.sup
    diag = matrix.diag
    ab_pows: dict = {1: ab}
    d_pows: dict = {1: diag}
    totals = []
    for t in types:
        cnt = n - t.span
        acc = None
        for j, m in enumerate(t.half_edges):
            f = _power(ab_pows, ab, m)[j:j + cnt]
            acc = f if acc is None else acc * f
        for j, e in enumerate(t.loops):
            if e:
                f = _power(d_pows, diag, e)[j:j + cnt]
                acc = f if acc is None else acc * f
        totals.append(t.count * compensated_sum(acc))
    return totals


def trace_power_expansion(matrix: TridiagonalMatrix, k: int, types) -> float:
    """Evaluate trace(M^k) through the walk-class expansion.

    ``types`` must be the full table from ``enumerate_types(k)``.  The site
    and class sums use compensated accumulation.  Exact-entry matrices
    (object dtype) are summed in exact integer arithmetic.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        totals = _expansion_terms(matrix, k, types)
    if matrix.is_exact:
        return sum(totals)
    result = math.fsum(totals)
    if not np.isfinite(result):
        raise NumericOverflowError("trace expansion overflowed to a non-finite value")
    return result


def _shifted(vec: np.ndarray, s: int, zero: np.ndarray) -> np.ndarray:
    # w[r] = vec[r+s], zero-padded outside [0, n)
    n = vec.shape[0]
    if s == 0:
        return vec
    w = zero.copy()
    if s > 0:
        if s < n:
            w[:n - s] = vec[s:]
    else:
        if -s < n:
            w[-s:] = vec[:n + s]
    return w


def trace_power_direct(matrix: TridiagonalMatrix, k: int,
                       dense_check_max: int = DENSE_CHECK_MAX) -> float:
    """Evaluate trace(M^k) by repeated banded multiplication.

    The j-th power is kept as its min(j, n-1) nonzero diagonals, so the cost
    is O(n k^2) and no dense n-by-n array is built.  For small matrices
    (n <= dense_check_max, float entries) a dense matrix power is computed
    as a second cross-check.
    """
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    n = matrix.n
    exact = matrix.is_exact
    if k == 1:
        total = compensated_sum(matrix.diag)
        return total if exact else float(total)

    zero = np.full(n, 0, dtype=object) if exact else np.zeros(n)
    # Row-indexed padded diagonals of the tridiagonal factor.
    q_up = zero.copy()
    q_up[:n - 1] = matrix.sup      # q_up[r] = M[r, r+1]
    q_dg = zero.copy()
    q_dg[:] = matrix.diag
    q_dn = zero.copy()
    q_dn[1:] = matrix.sub          # q_dn[r] = M[r, r-1]

    power = {0: q_dg.copy(), 1: q_up.copy(), -1: q_dn.copy()}
    width = 1
    for _ in range(k - 1):
        width = min(width + 1, n - 1)
        nxt = {}
        for off in range(-width, width + 1):
            acc = None
            for src, q in ((off - 1, q_up), (off, q_dg), (off + 1, q_dn)):
                prev = power.get(src)
                if prev is None:
                    continue
                term = prev * _shifted(q, src, zero)
                acc = term if acc is None else acc + term
            nxt[off] = acc
        power = nxt

    total = compensated_sum(power[0])
    if exact:
        return total
    total = float(total)
    if not np.isfinite(total):
        raise NumericOverflowError("banded trace power overflowed to a non-finite value")
    if n <= dense_check_max:
        dense = np.trace(np.linalg.matrix_power(matrix.to_dense(), k))
        if abs(dense - total) > 1e-8 * (1.0 + abs(dense)):
            raise TriTraceError(
                f"banded/dense trace mismatch: {total!r} vs {dense!r}")  # pragma: no cover
    return total


def traces_for_k_list(matrix: TridiagonalMatrix, k_list) -> np.ndarray:
    """Expansion traces for several powers of one matrix, sharing power caches."""
    out = np.empty(len(k_list))
    ab = matrix.sub * matrix.sup
    diag = matrix.diag
    ab_pows: dict = {1: ab}
    d_pows: dict = {1: diag}
    n = matrix.n
    for pos, k in enumerate(k_list):
        totals = []
        for t in enumerate_types(k):
            cnt = n - t.span
            acc = None
            for j, m in enumerate(t.half_edges):
                f = _power(ab_pows, ab, m)[j:j + cnt]
                acc = f if acc is None else acc * f
            for j, e in enumerate(t.loops):
                if e:
                    f = _power(d_pows, diag, e)[j:j + cnt]
                    acc = f if acc is None else acc * f
            totals.append(t.count * compensated_sum(acc))
        out[pos] = math.fsum(totals)
    if not np.all(np.isfinite(out)):
        raise NumericOverflowError("trace expansion overflowed to a non-finite value")
    return out


def types_as_json_lines(types) -> str:
    """Serialize a type table, one JSON record per class."""
    lines = [
        json.dumps({"k": t.k, "l": t.span, "m": list(t.half_edges),
                    "n": list(t.loops), "count": t.count})
        for t in types
    ]
    return "\n".join(lines) + "\n"


def types_from_json_lines(text: str) -> tuple[CircuitType, ...]:
    types = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        types.append(CircuitType(k=rec["k"], span=rec["l"], half_edges=tuple(rec["m"]),
                                 loops=tuple(rec["n"]), count=rec["count"]))
    return tuple(types)
