import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from postqaoa.graphs import Graph, grid_graph, ring_graph, sample_configuration_model, sample_simple_regular
from postqaoa.qaoa import (
    CUBIC_P1,
    RING_P1,
    QaoaError,
    QaoaParams,
    ZString,
    edge_expectations_p1,
    expect_zstring_full,
    expect_zstring_p1,
    expected_cut_full,
    expected_cut_p1,
    p1_marginal,
    prepare_qaoa_state,
    probabilities,
    project_outcomes,
)

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def on(op, q, n):
    # qubit q is bit q of the index, i.e. the rightmost kron factor for q = 0
    return reduce(np.kron, [op if k == q else I2 for k in reversed(range(n))])


def dense_state(g, params):
    n = g.n
    hc = sum(on(Z, u, n) @ on(Z, v, n) for u, v in g.edges)
    hb = sum(on(X, q, n) for q in range(n))
    psi = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    for b, gm in zip(params.betas, params.gammas):
        psi = expm(-0.5j * b * hb) @ (expm(-0.5j * gm * hc) @ psi)
    return psi


graphs_small = st.builds(lambda h, s: sample_configuration_model(2 * h, 3, s), st.integers(2, 5), st.integers(0, 10**6))
angles = st.floats(-math.pi, math.pi, allow_nan=False)


@given(graphs_small, angles, angles)
@settings(max_examples=30, deadline=None)
def test_statevector_matches_dense_exponentials(g, b, gm):
    p = QaoaParams.p1(b, gm)
    assert np.allclose(prepare_qaoa_state(g, p), dense_state(g, p), atol=1e-12)


def test_statevector_depth2_matches_dense():
    g = sample_configuration_model(6, 3, 3)
    p = QaoaParams.from_pairs([(0.3, -0.7), (1.1, 0.4)])
    assert np.allclose(prepare_qaoa_state(g, p), dense_state(g, p), atol=1e-12)


@given(st.integers(0, 10**6), angles, angles, st.integers(1, 4))
@settings(max_examples=80, deadline=None)
def test_lightcone_matches_statevector(seed, b, gm, size):
    rng = np.random.default_rng(seed)
    n = int(rng.choice([4, 6, 8, 10]))
    g = sample_configuration_model(n, 3, seed)
    p = QaoaParams.p1(b, gm)
    support = tuple(sorted(rng.choice(n, size=min(size, n), replace=False).tolist()))
    ref = expect_zstring_full(prepare_qaoa_state(g, p), support)
    assert expect_zstring_p1(g, p, support) == pytest.approx(ref, abs=1e-10)


@given(st.integers(0, 10**6), angles, angles)
@settings(max_examples=40, deadline=None)
def test_marginals_match_statevector(seed, b, gm):
    rng = np.random.default_rng(seed)
    g = sample_configuration_model(8, 3, seed)
    p = QaoaParams.p1(b, gm)
    sites = [int(x) for x in rng.choice(8, size=3, replace=False)]
    probs = probabilities(prepare_qaoa_state(g, p))
    idx = np.arange(256)
    ref = np.zeros((2, 2, 2))
    for k in range(256):
        ref[tuple((idx[k] >> np.array(sites)) & 1)] += probs[k]
    assert np.allclose(p1_marginal(g, p, sites), ref, atol=1e-12)


@given(st.integers(0, 10**6), angles, angles)
@settings(max_examples=30, deadline=None)
def test_odd_zstrings_vanish(seed, b, gm):
    g = sample_configuration_model(10, 3, seed)
    p = QaoaParams.p1(b, gm)
    assert abs(expect_zstring_p1(g, p, (0,))) < 1e-12
    assert abs(expect_zstring_p1(g, p, (1, 4, 7))) < 1e-12


def test_cubic_tree_edge_value_frozen():
    g = sample_simple_regular(2000, 3, 0)
    zz = edge_expectations_p1(g, CUBIC_P1)
    tree_value = 0.5 * (1 - np.median(zz))
    assert tree_value == pytest.approx((0.75 + 1 / (2 * math.sqrt(3))) / 1.5, abs=1e-12)
    assert tree_value == pytest.approx(0.6924500897298753, abs=1e-13)


def test_ring_edge_value():
    g = ring_graph(12)
    assert expected_cut_p1(g, RING_P1) == pytest.approx(9.0, abs=1e-12)
    assert expected_cut_full(g, prepare_qaoa_state(g, RING_P1)) == pytest.approx(9.0, abs=1e-12)


def test_grid_cut_matches_statevector():
    g = grid_graph(3)
    p = QaoaParams.p1(0.4, -0.9)
    assert expected_cut_p1(g, p) == pytest.approx(expected_cut_full(g, prepare_qaoa_state(g, p)), abs=1e-10)


def test_edge_cache_handles_multiedges():
    g = Graph.from_edges(4, [(0, 1), (0, 1), (0, 2), (1, 3), (2, 3), (2, 3)])
    p = QaoaParams.p1(0.7, 0.3)
    state = prepare_qaoa_state(g, p)
    ref = [expect_zstring_full(state, e) for e in g.edges]
    assert np.allclose(edge_expectations_p1(g, p), ref, atol=1e-12)


def test_zstring_product_cancels():
    assert ZString.product([1, 2, 2, 3]).support == (1, 3)
    assert ZString.product([4, 4]) is None
    with pytest.raises(QaoaError):
        ZString.of([1, 1])


def test_projection_norm_matches_width():
    g = sample_configuration_model(10, 3, 5)
    psi = project_outcomes(prepare_qaoa_state(g, CUBIC_P1), {0: 1})
    assert np.vdot(psi, psi).real == pytest.approx(0.5, abs=1e-12)


def test_params_validation():
    with pytest.raises(QaoaError):
        QaoaParams((0.1,), ())
    with pytest.raises(QaoaError):
        QaoaParams.p1(float("nan"), 0.1)
