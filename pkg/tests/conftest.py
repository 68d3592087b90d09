import itertools
import math

import pytest
from hypothesis import HealthCheck, settings

from tritrace.circuits import count_circuits_bruteforce

settings.register_profile(
    "tritrace",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("tritrace")


@pytest.fixture(autouse=True)
def _isolated_type_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("TRITRACE_CACHE_DIR", str(tmp_path / "type-cache"))


# ---------------------------------------------------------------------------
# Independent oracles shared by several test modules.  These deliberately use
# the brute-force walk classifier and plain Python arithmetic so they share no
# evaluation path with the vectorized kernels they check.


def naive_summand(types, a_by_index, d_by_index, b_by_index, i, k):
    """X_{k,i} from entry mappings index -> value, by direct product loops."""
    total = 0.0
    for (span, half_edges, loops), count in types.items():
        term = float(count)
        for j, m in enumerate(half_edges):
            term *= (a_by_index[i + j] * b_by_index[i + j]) ** m
        for j, e in enumerate(loops):
            term *= d_by_index[i + j] ** e
        total += term
    return total


def exhaustive_dk(k, m_k, d_atoms, ab_value=1.0):
    """Exact limiting variance for fixed off-diagonals and atomic diagonal law.

    Enumerates the joint support of the diagonal entries feeding the summands
    at sites 2 .. 2+m_k and accumulates the exact variance plus twice the lag
    covariances.  Only valid when a_i b_i == ab_value deterministically.
    """
    types = count_circuits_bruteforce(k)
    span_max = k // 2
    n_sites = m_k + 1
    d_indices = list(range(2, 2 + m_k + span_max + 1))
    ab = {i: ab_value for i in range(2, 3 + m_k + span_max)}
    one = {i: 1.0 for i in ab}

    mean = [0.0] * n_sites
    cross = [[0.0] * n_sites for _ in range(n_sites)]
    for combo in itertools.product(d_atoms, repeat=len(d_indices)):
        prob = 1.0
        d_map = {}
        for idx, (value, p) in zip(d_indices, combo):
            prob *= p
            d_map[idx] = value
        xs = [naive_summand(types, one, d_map, ab, 2 + j, k) for j in range(n_sites)]
        for u in range(n_sites):
            mean[u] += prob * xs[u]
            for v in range(n_sites):
                cross[u][v] += prob * xs[u] * xs[v]
    cov = [[cross[u][v] - mean[u] * mean[v] for v in range(n_sites)] for u in range(n_sites)]
    return cov[0][0] + 2.0 * sum(cov[0][j] for j in range(1, n_sites))


def central_trinomial(k):
    """Closed walks of length k from a fixed vertex with steps in {-1, 0, 1}."""
    return sum(math.comb(k, 2 * j) * math.comb(2 * j, j) for j in range(k // 2 + 1))
