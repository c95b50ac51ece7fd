import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src import config
from src.errors import CapExceededError, DimensionMismatchError
from src.graph.transition import validate_transition_matrix
from src.oracle.dense import (
    dense_evolve,
    dense_oracle_operator,
    dense_reflection,
    dense_swap,
    dense_unitary,
    psi_vectors,
)
from src.walk.operators import apply_swap
from src.walk.state import matrix_to_vector, vector_to_matrix


def test_reflection_of_identity_graph():
    identity = validate_transition_matrix(np.eye(2))
    r = dense_reflection(identity)
    assert_allclose(r.entries, np.diag([1, -1, -1, 1]))


def test_zero_phases_give_same_reflection(random_graph):
    g = random_graph(3, seed=0)
    assert_array_equal(dense_reflection(g).entries, dense_reflection(g, np.zeros((3, 3))).entries)


def test_reflection_is_involution(cycle3):
    r = dense_reflection(cycle3)
    assert_allclose((r @ r).entries, np.eye(9), atol=1e-12)


def test_reflection_is_hermitian_unitary(random_graph):
    g = random_graph(4, seed=1)
    r = dense_reflection(g)
    assert_allclose(r.entries, r.entries.conj().T, atol=1e-12)
    assert r.is_unitary()
    phased = dense_reflection(g, np.random.default_rng(1).uniform(-math.pi, math.pi, (4, 4)), apr_angle=0.8)
    assert phased.is_unitary()


def test_swap_permutation():
    s = dense_swap(2)
    expected = np.eye(4)[[0, 2, 1, 3]]
    assert_array_equal(s.entries, expected)
    assert_array_equal((s @ s).entries, np.eye(4))


def test_swap_matches_transpose(random_state):
    v = random_state(4, seed=3)
    assert_allclose(dense_swap(4).entries @ v, matrix_to_vector(apply_swap(vector_to_matrix(v))), atol=1e-15)


def test_oracle_examples():
    assert_array_equal(dense_oracle_operator(3, []).entries, np.eye(9))
    assert_array_equal(dense_oracle_operator(2, {1}, register=1).entries, np.diag([1, 1, -1, -1]))
    everything = range(3)
    product = dense_oracle_operator(3, everything, 1) @ dense_oracle_operator(3, everything, 2)
    assert_array_equal(product.entries, np.eye(9))


def test_swapped_reflection_reflects_over_swapped_states(random_graph):
    g = random_graph(3, seed=5)
    s = dense_swap(3)
    swapped = s.entries @ psi_vectors(g)
    expected = 2 * swapped @ swapped.conj().T - np.eye(9)
    assert_allclose((s @ dense_reflection(g) @ s).entries, expected, atol=1e-12)


def test_evolve(random_graph, random_state):
    u = dense_unitary([("S",), ("R", math.pi)], random_graph(3, seed=2))
    v = random_state(3, seed=2)
    assert_array_equal(dense_evolve(u, v, 0), v)
    w = v
    for _ in range(10):
        w = dense_evolve(u, w, 1)
        assert abs(np.linalg.norm(w) - 1.0) <= 1e-12
    with pytest.raises(DimensionMismatchError):
        dense_evolve(u, np.ones(4), 1)


def test_products_are_unitary(random_graph):
    g = random_graph(3, seed=7)
    u = dense_unitary([("S",), ("Q1", (0, 2), 1.1), ("R", 0.4), ("Q2", (1,), math.pi)], g)
    assert u.is_unitary()


def test_size_cap(monkeypatch, random_graph):
    monkeypatch.setattr(config, "DENSE_CAP", 3)
    with pytest.raises(CapExceededError):
        dense_swap(4)
    with pytest.raises(CapExceededError):
        dense_reflection(random_graph(4))
    assert dense_swap(4, allow_large=True).dim == 16
