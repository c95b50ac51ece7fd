"""
Matrix representation of bipartite pure states.

A state |phi> = sum_ij a_ij |i>_1 |j>_2 on N^2 dimensions is stored as the N x N
matrix Phi with Phi[j, i] = a_ij: the column index is the first register and
the row index the second one. Flattened vectors use index N*i + j for a_ij.
"""
import logging
import math
from typing import TYPE_CHECKING, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.errors import (
    HeterogeneousBatchError,
    IndexOutOfRangeError,
    InputError,
    NotPerfectSquareError,
    ZeroNormError,
)
from src.graph.transition import frozen_array

if TYPE_CHECKING:
    from src.walk.operators import PsiMatrix

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10
ZERO_NORM = 1e-14


def state_dtype(values) -> np.dtype:
    """Real states stay float64; anything complex is promoted to complex128."""
    return np.dtype(np.complex128) if np.iscomplexobj(values) else np.dtype(np.float64)


class MatrixState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _freeze(cls, v):
        arr = frozen_array(v, state_dtype(v))
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"matrix state must be square, got shape {arr.shape}")
        return arr

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def inner(self, other: "MatrixState") -> complex:
        """Frobenius inner product <self|other>."""
        return complex(np.vdot(self.entries, other.entries))


class StateBatch(BaseModel):
    """B states of equal N stacked along a leading axis: entries has shape (B, N, N)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _freeze(cls, v):
        arr = frozen_array(v, state_dtype(v))
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[0] == 0:
            raise ValueError(f"state batch must have shape (B, N, N) with B >= 1, got {arr.shape}")
        return arr

    @classmethod
    def from_states(cls, states: Sequence[MatrixState]) -> "StateBatch":
        if len(states) == 0:
            raise HeterogeneousBatchError("a batch needs at least one state")
        sizes = {s.n for s in states}
        if len(sizes) != 1:
            raise HeterogeneousBatchError(f"batch members have different node counts: {sorted(sizes)}")
        return cls(entries=np.stack([s.entries for s in states]))

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    def member(self, k: int) -> MatrixState:
        return MatrixState(entries=self.entries[k])


def vector_to_matrix(v, normalize: bool = True) -> MatrixState:
    """
    Reshape a length-N^2 state vector into its matrix state.

    Args:
        v: vector with component N*i + j holding a_ij
        normalize: rescale to unit norm when the norm is off by more than 1e-10

    Returns:
        MatrixState with Phi[j, k] = a_kj
    """
    vec = np.asarray(v)
    if vec.ndim != 1 or vec.size == 0:
        raise NotPerfectSquareError(f"state vector must be 1-D and non-empty, got shape {vec.shape}")
    n = math.isqrt(vec.size)
    if n * n != vec.size:
        raise NotPerfectSquareError(f"state vector length {vec.size} is not a perfect square")

    if normalize:
        norm = float(np.linalg.norm(vec))
        if norm < ZERO_NORM:
            raise ZeroNormError("state vector has zero norm")
        if abs(norm - 1.0) > NORM_TOLERANCE:
            logger.warning(f"State vector norm is {norm:.12g}; normalizing")
            vec = vec / norm

    return MatrixState(entries=vec.reshape(n, n).T)


def matrix_to_vector(phi: MatrixState) -> np.ndarray:
    return phi.entries.T.reshape(-1).copy()


def psi_state(psi: "PsiMatrix", i: int) -> MatrixState:
    """
    The state |psi_i>: column i of Psi placed in column i, zeros elsewhere.
    """
    n = psi.n
    if not 0 <= i < n:
        raise IndexOutOfRangeError(f"node index {i} out of range for N={n}")
    entries = np.zeros_like(psi.entries)
    entries[:, i] = psi.entries[:, i]
    return MatrixState(entries=entries)


def psi_state_batch(psi: "PsiMatrix", nodes: Sequence[int]) -> np.ndarray:
    """Writable (len(nodes), N, N) stack of |psi_i> states for i in `nodes`."""
    n = psi.n
    nodes = np.asarray(nodes, dtype=np.intp)
    if nodes.size and (nodes.min() < 0 or nodes.max() >= n):
        raise IndexOutOfRangeError(f"node indices {nodes.tolist()} out of range for N={n}")
    stack = np.zeros((nodes.size, n, n), dtype=psi.entries.dtype)
    stack[np.arange(nodes.size), :, nodes] = psi.entries[:, nodes].T
    return stack


def initial_superposition(psi: "PsiMatrix") -> MatrixState:
    """Equal superposition of all |psi_i>: Psi / sqrt(N)."""
    return MatrixState(entries=psi.entries / math.sqrt(psi.n))


def basis_state(n: int, i: int, j: int) -> MatrixState:
    """|i>_1 |j>_2."""
    if not (0 <= i < n and 0 <= j < n):
        raise InputError(f"basis indices ({i}, {j}) out of range for N={n}")
    entries = np.zeros((n, n))
    entries[j, i] = 1.0
    return MatrixState(entries=entries)
