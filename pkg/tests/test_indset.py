import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chi2_contingency

from postqaoa.graphs import distance, ring_graph, sample_configuration_model, sample_simple_regular
from postqaoa.indset import (
    alpha_star,
    count_2id_sets,
    expected_2id_count,
    greedy_2independent,
    greedy_independent,
    growth_rate,
    neighbour_profile,
    pairs_distance4_set,
    pairs_of,
    profile_pmf,
    profile_table,
    sample_planted_configuration,
    successor_means,
    verify_k_independent,
)


def brute_2id_counts(g):
    counts = [0] * (g.n + 1)
    for mask in range(1 << g.n):
        s = [v for v in range(g.n) if mask >> v & 1]
        if all(distance(g, a, b) > 2 for a, b in itertools.combinations(s, 2)):
            counts[len(s)] += 1
    while counts[-1] == 0:
        counts.pop()
    return counts


def test_verify_k_independent_on_ring():
    g = ring_graph(12)
    assert verify_k_independent(g, [0, 3, 6, 9], 2)
    assert not verify_k_independent(g, [0, 2], 2)
    assert verify_k_independent(g, [0, 2], 1)


@given(st.integers(0, 10**6), st.sampled_from([1, 2]))
@settings(max_examples=40, deadline=None)
def test_greedy_sets_are_valid_and_maximal(seed, k):
    g = sample_configuration_model(60, 3, seed)
    s = greedy_2independent(g, seed) if k == 2 else greedy_independent(g, seed)
    assert verify_k_independent(g, s.vertices, k)
    for v in range(g.n):
        if v not in s.vertices:
            assert not verify_k_independent(g, list(s.vertices) + [v], k)


def test_greedy_2id_ratio():
    ratios = [len(greedy_2independent(sample_simple_regular(2000, 3, s), s)) / 2000 for s in range(5)]
    assert 0.17 < np.mean(ratios) < 0.20


def test_greedy_2id_retries_reach_size_40():
    hits = 0
    for s in range(10):
        g = sample_simple_regular(200, 3, s)
        v0 = greedy_2independent(g, s, size=40, max_tries=2000)
        assert verify_k_independent(g, v0.vertices, 2)
        hits += len(v0) == 40
    assert hits >= 8


def test_min_degree_independent_set_ratio():
    g = sample_simple_regular(2000, 3, 3)
    s = greedy_independent(g, 0, rule="min-degree")
    assert verify_k_independent(g, s.vertices, 1)
    assert len(s) / g.n > 0.42


def test_pairs_distance4_set():
    g = sample_configuration_model(3000, 3, 2)
    s = pairs_distance4_set(g)
    assert len(s) % 2 == 0 and len(s) > 0
    assert verify_k_independent(g, s.vertices, 2)
    assert len(pairs_of(g, s, 4)) == len(s) // 2
    assert pairs_of(g, s, 3) == []


@given(st.integers(0, 10**6))
@settings(max_examples=15, deadline=None)
def test_count_2id_sets_matches_brute_force(seed):
    g = sample_configuration_model(12, 3, seed)
    assert count_2id_sets(g) == brute_2id_counts(g)


@pytest.mark.parametrize("n0", [1, 2, 3])
def test_expected_2id_count_monte_carlo(n0):
    n, d = 12, 3
    rng = np.random.default_rng(n0)
    vals = []
    for _ in range(3000):
        c = count_2id_sets(sample_configuration_model(n, d, rng), max_size=n0, distinct_neighbours=True)
        vals.append(c[n0] if len(c) > n0 else 0)
    mean, se = np.mean(vals), np.std(vals) / math.sqrt(len(vals))
    exact = math.exp(expected_2id_count(n, d, n0))
    assert abs(mean - exact) < 4 * se + 1e-9


def test_expected_2id_count_edge_cases():
    assert expected_2id_count(12, 3, 3) > -math.inf
    assert expected_2id_count(12, 3, 4) == -math.inf
    # single vertex: its three half-edges land on three distinct other vertices
    n, d = 10, 3
    p = (n - 1) * d * (n - 2) * d * (n - 3) * d / ((n * d - 1) * (n * d - 3) * (n * d - 5))
    assert expected_2id_count(n, d, 1) == pytest.approx(math.log(n * p))


def test_alpha_star_frozen():
    a = alpha_star(3)
    assert a == pytest.approx(0.2355513776, abs=1e-9)
    assert abs(growth_rate(a, 3)) < 1e-9
    assert growth_rate(0.2, 3) > 0 > growth_rate(0.24, 3)


def test_growth_rate_matches_exact_count():
    n = 10**6
    for alpha in (0.1, 0.2):
        assert expected_2id_count(n, 3, int(alpha * n)) / n == pytest.approx(growth_rate(alpha, 3), abs=1e-4)


def test_profile_pmf_normalised_and_means():
    n, n0 = 10**6, 200_000
    table = profile_table(3, n, n0)
    total = sum(table.values())
    assert total == pytest.approx(1.0, abs=1e-6)
    means = successor_means(3, n, n0)
    for k in range(3):
        m = sum(p * key[k] for key, p in table.items())
        assert m == pytest.approx(means[k], rel=1e-4)


def test_profile_pmf_out_of_range():
    assert profile_pmf(3, 1000, 100, -1, 0, 0) == 0.0
    assert profile_pmf(3, 1000, 100, 7, 0, 0) == 0.0


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_planted_set_is_2independent(seed):
    n, n0 = 200, 30
    g = sample_planted_configuration(n, 3, n0, seed)
    assert g.d == 3
    assert verify_k_independent(g, range(n0), 2)


def _summary(g):
    loops = sum(a == b for a, b in g.edges)
    multi = sum(m - 1 for m in g.multiplicity.values())
    return tuple(sorted(g.adjacency[0])), loops, multi


def test_planted_sampler_matches_rejection():
    # planted draws vs configuration-model draws conditioned on the set
    n, n0 = 8, 2
    rng = np.random.default_rng(5)
    planted, rejected = {}, {}
    for _ in range(6000):
        g = sample_planted_configuration(n, 3, n0, rng)
        key = _summary(g)
        planted[key] = planted.get(key, 0) + 1
    got = 0
    while got < 6000:
        g = sample_configuration_model(n, 3, rng)
        if verify_k_independent(g, range(n0), 2) and all(
                len(set(g.adjacency[v]) - {v}) == 3 for v in range(n0)):
            key = _summary(g)
            rejected[key] = rejected.get(key, 0) + 1
            got += 1
    keys = sorted(set(planted) | set(rejected))
    table = np.array([[planted.get(k, 0) for k in keys], [rejected.get(k, 0) for k in keys]])
    big = table.sum(axis=0) >= 20
    pooled = np.column_stack([table[:, big], table[:, ~big].sum(axis=1)])
    assert chi2_contingency(pooled).pvalue > 1e-3


def test_neighbour_profile_on_planted_graph():
    g = sample_planted_configuration(2000, 3, 400, 1)
    prof = neighbour_profile(g, range(400), 0)
    assert prof.k3 <= 12 and prof.k4 <= 24
