"""
Brute-force N^2 x N^2 operators and flattened-vector evolution.

Ground truth for small graphs only: everything here is built entry by entry
from the definitions, independently of the matrix-state kernels.
"""
import logging
import math
from typing import Iterable, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from src import config
from src.errors import CapExceededError, DimensionMismatchError, IndexOutOfRangeError, InputError
from src.graph.transition import TransitionMatrix

logger = logging.getLogger(__name__)


class DenseOperator(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(entries=self.entries @ other.entries)

    def is_unitary(self, tol: float = 1e-10) -> bool:
        m = self.entries
        return bool(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))) <= tol)


def _check_cap(n: int, allow_large: bool) -> None:
    if n > config.DENSE_CAP and not allow_large:
        raise CapExceededError(
            f"dense operators are capped at N={config.DENSE_CAP} (got N={n}); pass allow_large=True to override"
        )


def _phase(angle: float) -> complex:
    # exact -1 for pi so the sign-flip operators stay exact
    return -1.0 if abs(math.remainder(angle - math.pi, 2 * math.pi)) <= 1e-15 else complex(np.exp(1j * angle))


def psi_vectors(g: TransitionMatrix, theta_matrix: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Columns are the flattened |psi_i> = sum_k e^{i theta_ik} sqrt(G_ki) |i>_1 |k>_2.
    """
    n = g.n
    vectors = np.zeros((n * n, n), dtype=np.complex128)
    for i in range(n):
        for k in range(n):
            phase = 1.0 if theta_matrix is None else np.exp(1j * theta_matrix[i, k])
            vectors[n * i + k, i] = phase * math.sqrt(g.entries[k, i])
    return vectors


def dense_reflection(
    g: TransitionMatrix,
    theta_matrix: Optional[np.ndarray] = None,
    apr_angle: float = math.pi,
    allow_large: bool = False,
) -> DenseOperator:
    """(1 - e^{i theta}) sum_i |psi_i><psi_i| - 1."""
    _check_cap(g.n, allow_large)
    if theta_matrix is not None:
        theta_matrix = np.asarray(theta_matrix, dtype=np.float64)
        if theta_matrix.shape != g.entries.shape:
            raise DimensionMismatchError(f"phase matrix shape {theta_matrix.shape} does not match N={g.n}")
    vectors = psi_vectors(g, theta_matrix)
    projector = vectors @ vectors.conj().T
    factor = 1.0 - _phase(apr_angle)
    return DenseOperator(entries=factor * projector - np.eye(g.n * g.n))


def dense_swap(n: int, allow_large: bool = False) -> DenseOperator:
    """Permutation sending basis index N*i + j to N*j + i."""
    _check_cap(n, allow_large)
    m = np.zeros((n * n, n * n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            m[n * j + i, n * i + j] = 1.0
    return DenseOperator(entries=m)


def dense_oracle_operator(
    n: int,
    marked: Iterable[int],
    register: int = 1,
    angle: float = math.pi,
    allow_large: bool = False,
) -> DenseOperator:
    _check_cap(n, allow_large)
    marked = set(int(k) for k in marked)
    if any(not 0 <= k < n for k in marked):
        raise IndexOutOfRangeError(f"marked nodes {sorted(marked)} out of range for N={n}")
    if register not in (1, 2):
        raise InputError(f"register must be 1 or 2, got {register}")
    diag = np.ones(n * n, dtype=np.complex128)
    phase = _phase(angle)
    for i in range(n):
        for j in range(n):
            if (i if register == 1 else j) in marked:
                diag[n * i + j] = phase
    return DenseOperator(entries=np.diag(diag))


def dense_evolve(u: DenseOperator, v, t: int) -> np.ndarray:
    """U^t v by t successive products."""
    vec = np.asarray(v, dtype=np.complex128)
    if vec.shape != (u.dim,):
        raise DimensionMismatchError(f"vector of shape {vec.shape} does not match operator of dim {u.dim}")
    if t < 0:
        raise InputError(f"t must be nonnegative, got {t}")
    for _ in range(t):
        vec = u.entries @ vec
    return vec


def dense_probabilities(v: np.ndarray, register: int) -> np.ndarray:
    """Register-1 or register-2 distribution of a flattened state."""
    n = math.isqrt(v.size)
    amplitudes = np.abs(v.reshape(n, n)) ** 2
    return amplitudes.sum(axis=1 if register == 1 else 0)


def dense_trace(u: DenseOperator, v, steps: int, register: int) -> np.ndarray:
    """(steps + 1, N) distributions of U^t v, t = 0..steps."""
    vec = np.asarray(v, dtype=np.complex128)
    rows = [dense_probabilities(vec, register)]
    for _ in range(steps):
        vec = dense_evolve(u, vec, 1)
        rows.append(dense_probabilities(vec, register))
    return np.array(rows)


def dense_unitary(
    tokens: List[tuple],
    g: TransitionMatrix,
    theta_matrix: Optional[np.ndarray] = None,
    allow_large: bool = False,
) -> DenseOperator:
    """
    Product of dense operators in operator notation (leftmost applied last).

    Each token is ('S',), ('R', angle) or ('Q1' | 'Q2', marked, angle).
    """
    n = g.n
    u = np.eye(n * n, dtype=np.complex128)
    for token in tokens:
        kind = token[0]
        if kind == "S":
            op = dense_swap(n, allow_large)
        elif kind == "R":
            op = dense_reflection(g, theta_matrix, token[1], allow_large)
        elif kind in ("Q1", "Q2"):
            op = dense_oracle_operator(n, token[1], int(kind[1]), token[2], allow_large)
        else:
            raise InputError(f"unknown operator {kind!r}")
        u = u @ op.entries
    return DenseOperator(entries=u)
