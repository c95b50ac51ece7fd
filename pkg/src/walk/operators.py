"""
Building-block operators of Szegedy-type walks acting on matrix states.

Every operator works on arrays of shape (..., N, N) so the same kernel serves a
single state and a batch stacked along a leading axis. Kernels never write to
their input and always return a fresh C-ordered array.
"""
import logging
import math
from typing import FrozenSet, Iterable, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.errors import (
    DimensionMismatchError,
    EmptyPipelineError,
    IndexOutOfRangeError,
    InputError,
    ShapeMismatchError,
)
from src.graph.transition import TransitionMatrix, frozen_array
from src.walk.state import MatrixState

logger = logging.getLogger(__name__)

SIGN_FLIP_TOLERANCE = 1e-15


def is_sign_flip(angle: float) -> bool:
    """True when e^{i angle} is -1, i.e. angle is pi modulo 2 pi."""
    return abs(math.remainder(angle - math.pi, 2 * math.pi)) <= SIGN_FLIP_TOLERANCE


class PhaseMatrix(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _freeze(cls, v):
        return frozen_array(v, np.float64)


class PsiMatrix(BaseModel):
    """Column i holds the non-null block of |psi_i>."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _freeze(cls, v):
        return frozen_array(v, np.complex128 if np.iscomplexobj(v) else np.float64)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.entries)

    @property
    def conj(self) -> np.ndarray:
        # ndarray.conj() on a real array returns the array itself
        return self.entries.conj()


class CoefficientVector(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray


def make_phase_matrix(raw) -> PhaseMatrix:
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeMismatchError(f"phase matrix must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("phase matrix contains non-finite angles")
    return PhaseMatrix(entries=arr)


def build_psi_matrix(g: TransitionMatrix, theta: Optional[PhaseMatrix] = None) -> PsiMatrix:
    """
    Psi_ij = e^{i theta_ji} sqrt(G_ij). Without phases (or with all phases zero)
    Psi is the real element-wise square root of G.
    """
    root = np.sqrt(g.entries)
    if theta is None:
        return PsiMatrix(entries=root)
    if theta.entries.shape != g.entries.shape:
        raise ShapeMismatchError(
            f"phase matrix shape {theta.entries.shape} does not match transition matrix {g.entries.shape}"
        )
    if not np.any(theta.entries):
        return PsiMatrix(entries=root)
    return PsiMatrix(entries=root * np.exp(1j * theta.entries.T))


def _check_shape(arr: np.ndarray, n: int) -> None:
    if arr.shape[-2:] != (n, n):
        raise ShapeMismatchError(f"state of shape {arr.shape[-2:]} does not match operator on N={n}")


def _coefficients(arr: np.ndarray, psi: PsiMatrix) -> np.ndarray:
    # C_i = sum_k conj(Psi_ki) Phi_ki, one coefficient per column
    return np.sum(psi.conj * arr, axis=-2)


class ReflectionOperator(BaseModel):
    """R(theta) = (1 - e^{i theta}) Pi - 1; theta = pi is the plain reflection 2 Pi - 1."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    psi: PsiMatrix
    apr_angle: float = math.pi

    @property
    def n(self) -> int:
        return self.psi.n

    @property
    def label(self) -> str:
        return "R" if is_sign_flip(self.apr_angle) else f"R({self.apr_angle!r})"

    def apply_array(self, arr: np.ndarray) -> np.ndarray:
        _check_shape(arr, self.n)
        coeffs = _coefficients(arr, self.psi)
        if is_sign_flip(self.apr_angle):
            coeffs *= 2.0
        else:
            coeffs = coeffs * (1.0 - np.exp(1j * self.apr_angle))
        out = self.psi.entries * coeffs[..., np.newaxis, :]
        out -= arr
        return out


class SwapOperator(BaseModel):
    """Exchange of the two registers: the plain transpose of the matrix state."""

    model_config = ConfigDict(frozen=True)

    @property
    def n(self) -> Optional[int]:
        return None

    @property
    def label(self) -> str:
        return "S"

    def apply_array(self, arr: np.ndarray) -> np.ndarray:
        return np.ascontiguousarray(np.swapaxes(arr, -1, -2))


class OracleOperator(BaseModel):
    """Multiplies amplitudes of marked nodes on one register by e^{i angle}."""

    model_config = ConfigDict(frozen=True)

    n: int
    marked: FrozenSet[int]
    target_register: Literal[1, 2]
    angle: float = math.pi

    @property
    def label(self) -> str:
        nodes = ",".join(str(k) for k in sorted(self.marked))
        suffix = "" if is_sign_flip(self.angle) else f"({self.angle!r})"
        return f"Q{self.target_register}{{{nodes}}}{suffix}"

    def apply_array(self, arr: np.ndarray) -> np.ndarray:
        _check_shape(arr, self.n)
        factor = -1.0 if is_sign_flip(self.angle) else np.exp(1j * self.angle)
        out = arr.astype(np.result_type(arr, factor), order="C", copy=True)
        if self.marked:
            idx = np.fromiter(sorted(self.marked), dtype=np.intp)
            if self.target_register == 1:
                out[..., :, idx] *= factor
            else:
                out[..., idx, :] *= factor
        return out


Operator = Union[ReflectionOperator, SwapOperator, OracleOperator]


class UnitaryPipeline(BaseModel):
    """
    Operator product in operator notation: [S, R] means U = S R, R applied first.
    """

    model_config = ConfigDict(frozen=True)

    ops: List[Operator]

    @property
    def n(self) -> Optional[int]:
        for op in self.ops:
            if op.n is not None:
                return op.n
        return None

    @property
    def label(self) -> str:
        return " ".join(op.label for op in self.ops)

    def apply_array(self, arr: np.ndarray) -> np.ndarray:
        for op in reversed(self.ops):
            arr = op.apply_array(arr)
        return arr


def make_oracle(n: int, marked: Iterable[int], register: int = 1, angle: float = math.pi) -> OracleOperator:
    nodes = frozenset(int(k) for k in marked)
    bad = sorted(k for k in nodes if not 0 <= k < n)
    if bad:
        raise IndexOutOfRangeError(f"marked nodes {bad} out of range for N={n}")
    if register not in (1, 2):
        raise InputError(f"register must be 1 or 2, got {register}")
    return OracleOperator(n=n, marked=nodes, target_register=register, angle=float(angle))


def make_pipeline(ops: List[Operator]) -> UnitaryPipeline:
    if not ops:
        raise EmptyPipelineError("a pipeline needs at least one operator")
    sizes = {op.n for op in ops if op.n is not None}
    if len(sizes) > 1:
        raise DimensionMismatchError(f"pipeline operators act on different node counts: {sorted(sizes)}")
    return UnitaryPipeline(ops=list(ops))


def projection_coefficients(phi: MatrixState, psi: PsiMatrix) -> CoefficientVector:
    _check_shape(phi.entries, psi.n)
    return CoefficientVector(values=_coefficients(phi.entries, psi))


def apply_reflection(phi: MatrixState, r: ReflectionOperator) -> MatrixState:
    return MatrixState(entries=r.apply_array(phi.entries))


def apply_swap(phi: MatrixState) -> MatrixState:
    return MatrixState(entries=phi.entries.T)


def apply_oracle(phi: MatrixState, q: OracleOperator) -> MatrixState:
    return MatrixState(entries=q.apply_array(phi.entries))


def apply_pipeline(phi: MatrixState, u: UnitaryPipeline) -> MatrixState:
    if not u.ops:
        raise EmptyPipelineError("a pipeline needs at least one operator")
    if u.n is not None and u.n != phi.n:
        raise DimensionMismatchError(f"pipeline acts on N={u.n} but state has N={phi.n}")
    return MatrixState(entries=u.apply_array(phi.entries))
