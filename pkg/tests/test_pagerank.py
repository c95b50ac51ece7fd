import math

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from pydantic import ValidationError

from src.applications.pagerank import PageRankConfig, build_google_matrix, classical_pagerank, quantum_pagerank
from src.errors import NegativeEntryError, NoConvergenceError, NonSquareError
from src.graph.transition import validate_transition_matrix
from src.walk.operators import ReflectionOperator, SwapOperator, build_psi_matrix, make_pipeline
from src.walk.simulator import evolve
from src.walk.state import initial_superposition
from scripts.generate_chain_golden import DAMPING, STEPS, chain_adjacency, golden_ranking


def complete_adjacency(n):
    return np.ones((n, n)) - np.eye(n)


def test_google_matrix_complete_graph():
    g = build_google_matrix(complete_adjacency(4), 0.85)
    off = 0.85 / 3 + 0.0375
    expected = np.full((4, 4), off)
    np.fill_diagonal(expected, 0.0375)
    assert_allclose(g.entries, expected, atol=1e-15)


def test_google_matrix_without_damping():
    adj = np.array([[0, 1, 1], [1, 0, 1], [1, 0, 0]], dtype=float)
    g = build_google_matrix(adj, 1.0)
    assert_allclose(g.entries, adj / adj.sum(axis=0))


def test_google_matrix_patches_dangling_column():
    adj = np.array([[0, 0, 1], [1, 0, 0], [1, 0, 0]], dtype=float)
    g = build_google_matrix(adj, 0.85)
    assert_allclose(g.entries[:, 1], np.full(3, 1 / 3), rtol=0, atol=1e-15)


def test_google_matrix_rejects_bad_adjacency():
    with pytest.raises(NonSquareError):
        build_google_matrix(np.ones((2, 3)))
    with pytest.raises(NegativeEntryError):
        build_google_matrix([[0, -1], [1, 0]])


@pytest.mark.parametrize("n", [4, 8, 16])
def test_uniform_google_matrix_gives_uniform_ranking(n):
    g = validate_transition_matrix(np.full((n, n), 1 / n))
    result = quantum_pagerank(g, PageRankConfig(steps=30))
    assert np.max(np.abs(result.ranking.values - 1 / n)) <= 1e-10


def test_complete_graph_ranking_is_uniform():
    result = quantum_pagerank(build_google_matrix(complete_adjacency(4)), PageRankConfig(steps=40))
    assert_allclose(result.ranking.values, np.full(4, 0.25), atol=1e-10)


def test_single_step_ranking(random_graph):
    g = random_graph(5, seed=3)
    result = quantum_pagerank(g, PageRankConfig(steps=1, keep_trace=True))
    assert_allclose(result.ranking.values, result.per_step[1], atol=1e-15)


def test_default_angles_reproduce_double_step(random_graph):
    g = random_graph(6, seed=4)
    result = quantum_pagerank(g, PageRankConfig(steps=12, keep_trace=True))
    psi = build_psi_matrix(g)
    r = ReflectionOperator(psi=psi)
    w = make_pipeline([SwapOperator(), r, SwapOperator(), r])
    assert_array_equal(result.per_step, evolve(initial_superposition(psi), w, 12, register=2).trace(2))

    explicit = quantum_pagerank(g, PageRankConfig(steps=12, apr_angles=(math.pi, math.pi)))
    assert_array_equal(explicit.ranking.values, result.ranking.values)


def test_include_t0_averages_full_trace(random_graph):
    g = random_graph(5, seed=8)
    result = quantum_pagerank(g, PageRankConfig(steps=6, include_t0=True, keep_trace=True))
    assert_allclose(result.ranking.values, result.per_step.mean(axis=0), atol=1e-15)


def test_ranking_is_equivariant_under_relabeling(random_graph):
    g = random_graph(6, seed=12)
    perm = np.random.default_rng(12).permutation(6)
    p = np.eye(6)[perm]
    relabeled = validate_transition_matrix(p @ g.entries @ p.T)
    cfg = PageRankConfig(steps=25, apr_angles=(math.pi / 2, 0.3 * math.pi))
    base = quantum_pagerank(g, cfg).ranking.values
    moved = quantum_pagerank(relabeled, cfg).ranking.values
    assert_allclose(moved, p @ base, atol=1e-12)


def test_ranking_is_a_distribution(random_graph):
    result = quantum_pagerank(random_graph(9, seed=1), PageRankConfig(steps=20, apr_angles=(1.0, -2.0)))
    assert abs(result.ranking.values.sum() - 1.0) <= 1e-10
    assert np.all(result.ranking.values >= 0)


def test_chain_matches_dense_reference():
    g = build_google_matrix(chain_adjacency(4), DAMPING)
    result = quantum_pagerank(g, PageRankConfig(steps=STEPS, damping=DAMPING))
    assert np.max(np.abs(result.ranking.values - golden_ranking())) <= 1e-10


def test_chain_matches_golden_file(fixtures_dir):
    golden = pd.read_csv(fixtures_dir / "pagerank_chain4_golden.csv")
    g = build_google_matrix(chain_adjacency(4), DAMPING)
    result = quantum_pagerank(g, PageRankConfig(steps=STEPS, damping=DAMPING))
    assert_array_equal(golden["node_index"].to_numpy(), np.arange(4))
    assert np.max(np.abs(result.ranking.values - golden["score"].to_numpy())) <= 1e-10
    # the chain is circulant, so every node ranks the same
    assert np.max(np.abs(golden["score"].to_numpy() - 0.25)) <= 1e-10


@pytest.mark.parametrize(
    "kwargs",
    [{"steps": 0}, {"damping": 0.0}, {"damping": 1.5}, {"apr_angles": (7.0, 0.0)}, {"apr_angles": (0.0, -2 * math.pi)}],
)
def test_config_validation(kwargs):
    with pytest.raises(ValidationError):
        PageRankConfig(**kwargs)


def test_classical_uniform_fixed_point():
    g = validate_transition_matrix(np.full((5, 5), 0.2))
    assert_allclose(classical_pagerank(g).values, np.full(5, 0.2))


def test_classical_damped_two_cycle():
    g = build_google_matrix([[0, 1], [1, 0]], 0.85)
    assert_allclose(classical_pagerank(g).values, [0.5, 0.5], atol=1e-12)


def test_classical_matches_long_power_run(random_graph):
    g = build_google_matrix(random_graph(7, seed=2).entries, 0.85)
    p = np.full(7, 1 / 7)
    for _ in range(400):
        p = g.entries @ p
    assert_allclose(classical_pagerank(g).values, p, atol=1e-11)


def test_classical_no_convergence(random_graph):
    with pytest.raises(NoConvergenceError):
        classical_pagerank(random_graph(6, seed=5), max_iterations=2)
