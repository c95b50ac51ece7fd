"""
Time-stepped evolution with per-step measurement.

Only the current state is kept alive while walking; each step is measured and
the state is discarded, so memory stays O(N^2) whatever the number of steps.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterator, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src import config
from src.errors import (
    BatchSizeError,
    DimensionMismatchError,
    HeterogeneousBatchError,
    InputError,
    NotNormalizedError,
    NotOrthonormalError,
    WeightsNotNormalizedError,
)
from src.graph.transition import ProbabilityVector, frozen_array
from src.walk.operators import UnitaryPipeline
from src.walk.state import MatrixState, StateBatch

logger = logging.getLogger(__name__)

Register = Literal[1, 2, "both"]

MEASURE_TOLERANCE = 1e-8
RENORMALIZE_THRESHOLD = 1e-12
WEIGHT_TOLERANCE = 1e-10
ORTHONORMAL_TOLERANCE = 1e-8


class MeasurementResult(BaseModel):
    """
    Per-step distributions, t = 0 included. `traces` maps register (1 or 2) to
    an array of shape (steps + 1, N).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    measured_register: Register
    traces: Dict[int, np.ndarray]
    final_state: Optional[MatrixState] = None

    @property
    def steps(self) -> int:
        return next(iter(self.traces.values())).shape[0] - 1

    @property
    def per_step(self) -> Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]:
        if self.measured_register == "both":
            return self.traces[1], self.traces[2]
        return self.traces[self.measured_register]

    def trace(self, register: int) -> np.ndarray:
        return self.traces[register]

    def distribution(self, step: int, register: int) -> ProbabilityVector:
        return ProbabilityVector(values=self.traces[register][step])


class MixedStateEnsemble(BaseModel):
    """
    Diagonal mixture sum_i c_i |b_i><b_i| over orthonormal members. The weights
    and the Gram matrix are checked on construction.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    members: StateBatch
    weights: np.ndarray

    @field_validator("weights", mode="before")
    @classmethod
    def _freeze(cls, v):
        return frozen_array(v, np.float64)

    @model_validator(mode="after")
    def _check(self) -> "MixedStateEnsemble":
        check_ensemble(self.members, self.weights)
        return self


def _registers(register: Register) -> Tuple[int, ...]:
    if register == "both":
        return (1, 2)
    if register in (1, 2):
        return (register,)
    raise InputError(f"register must be 1, 2 or 'both', got {register!r}")


def clean_distribution(p: np.ndarray) -> np.ndarray:
    # p has shape (..., N); clamp rounding dust and renormalize rows that drifted
    p = np.clip(p, 0.0, None)
    totals = p.sum(axis=-1, keepdims=True)
    drifted = np.abs(totals - 1.0) > RENORMALIZE_THRESHOLD
    if np.any(drifted):
        p = np.where(drifted, p / totals, p)
    return p


def measure_array(arr: np.ndarray, register: Register) -> Dict[int, np.ndarray]:
    """
    Distributions of a state array of shape (..., N, N), one pass over |Phi|^2.
    """
    sq = arr.real * arr.real + arr.imag * arr.imag if np.iscomplexobj(arr) else arr * arr
    totals = sq.sum(axis=(-2, -1))
    worst = float(np.max(np.abs(totals - 1.0)))
    if worst > MEASURE_TOLERANCE:
        raise NotNormalizedError(f"state norm^2 deviates from 1 by {worst:.3g}")
    out = {}
    for reg in _registers(register):
        # register 1 indexes columns, register 2 rows
        out[reg] = clean_distribution(sq.sum(axis=-2 if reg == 1 else -1))
    return out


def measure(phi: MatrixState, register: Register = 1) -> Union[ProbabilityVector, Tuple[ProbabilityVector, ProbabilityVector]]:
    probs = measure_array(phi.entries, register)
    if register == "both":
        return ProbabilityVector(values=probs[1]), ProbabilityVector(values=probs[2])
    return ProbabilityVector(values=probs[register])


def _check_pipeline(u: UnitaryPipeline, n: int) -> None:
    if u.n is not None and u.n != n:
        raise DimensionMismatchError(f"pipeline acts on N={u.n} but state has N={n}")


def _walk_array(arr: np.ndarray, u: UnitaryPipeline, steps: int, register: Register) -> Iterator[Tuple[Dict[int, np.ndarray], np.ndarray]]:
    yield measure_array(arr, register), arr
    for _ in range(steps):
        arr = u.apply_array(arr)
        yield measure_array(arr, register), arr


def iterate_distributions(
    phi0: MatrixState, u: UnitaryPipeline, steps: int, register: Register = 1
) -> Iterator[Dict[int, np.ndarray]]:
    """
    Yield the measured distributions for t = 0..steps without keeping a trace.
    """
    if steps < 0:
        raise InputError(f"steps must be nonnegative, got {steps}")
    _check_pipeline(u, phi0.n)
    for probs, _ in _walk_array(phi0.entries[np.newaxis], u, steps, register):
        yield {reg: p[0] for reg, p in probs.items()}


def evolve_array(arr: np.ndarray, u: UnitaryPipeline, steps: int, register: Register) -> Tuple[Dict[int, np.ndarray], np.ndarray]:
    # arr has shape (B, N, N); traces come back with shape (B, steps + 1, N)
    regs = _registers(register)
    b, n = arr.shape[0], arr.shape[-1]
    traces = {reg: np.empty((b, steps + 1, n)) for reg in regs}
    for t, (probs, arr) in enumerate(_walk_array(arr, u, steps, register)):
        for reg in regs:
            traces[reg][:, t, :] = probs[reg]
    return traces, arr


def evolve(
    phi0: MatrixState,
    u: UnitaryPipeline,
    steps: int,
    register: Register = 1,
    return_state: bool = False,
) -> MeasurementResult:
    """
    Apply U `steps` times, measuring after every application.

    Args:
        phi0: initial matrix state
        u: one walk step
        steps: number of applications of U
        register: 1, 2 or 'both'
        return_state: also return the final state so the walk can be resumed

    Returns:
        MeasurementResult with steps + 1 distributions per register
    """
    if steps < 0:
        raise InputError(f"steps must be nonnegative, got {steps}")
    _check_pipeline(u, phi0.n)
    traces, final = evolve_array(phi0.entries[np.newaxis], u, steps, register)
    logger.debug(f"Evolved N={phi0.n} for {steps} steps with U = {u.label}")
    return MeasurementResult(
        measured_register=register,
        traces={reg: tr[0] for reg, tr in traces.items()},
        final_state=MatrixState(entries=final[0]) if return_state else None,
    )


def _chunks(total: int, chunk_size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)]


def evolve_batch(
    batch: Union[StateBatch, List[MatrixState]],
    u: UnitaryPipeline,
    steps: int,
    register: Register = 1,
    chunk_size: int = 1,
    workers: Optional[int] = None,
) -> List[MeasurementResult]:
    """
    Evolve every member of a batch independently.

    Members are vectorized `chunk_size` at a time (memory ~ chunk_size * N^2);
    with `workers` > 1 chunks run on a thread pool. Results follow member order.
    """
    if not isinstance(batch, StateBatch):
        batch = StateBatch.from_states(batch)
    if steps < 0:
        raise InputError(f"steps must be nonnegative, got {steps}")
    if chunk_size < 1:
        raise BatchSizeError(f"chunk size must be at least 1, got {chunk_size}")
    _check_pipeline(u, batch.n)
    workers = workers or config.WORKERS

    def run(bounds: Tuple[int, int]) -> Dict[int, np.ndarray]:
        start, stop = bounds
        traces, _ = evolve_array(batch.entries[start:stop], u, steps, register)
        logger.debug(f"Evolved batch members {start}..{stop - 1}")
        return traces

    bounds = _chunks(batch.size, chunk_size)
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunk_traces = list(pool.map(run, bounds))
    else:
        chunk_traces = [run(b) for b in bounds]

    results = []
    for traces in chunk_traces:
        members = next(iter(traces.values())).shape[0]
        for k in range(members):
            results.append(MeasurementResult(measured_register=register, traces={reg: tr[k] for reg, tr in traces.items()}))
    return results


def check_ensemble(members: StateBatch, weights: np.ndarray) -> None:
    """
    Raise unless the weights form a distribution over the members and the
    members are orthonormal under the Frobenius inner product.
    """
    c = np.asarray(weights, dtype=np.float64)
    if c.shape != (members.size,):
        raise HeterogeneousBatchError(f"{c.size} weights for {members.size} ensemble members")
    if np.any(c < 0) or abs(c.sum() - 1.0) > WEIGHT_TOLERANCE:
        raise WeightsNotNormalizedError(f"weights must be nonnegative and sum to 1 (sum {c.sum():.15g})")

    flat = members.entries.reshape(members.size, -1)
    gram = flat.conj() @ flat.T
    worst = float(np.max(np.abs(gram - np.eye(members.size))))
    if worst > ORTHONORMAL_TOLERANCE:
        raise NotOrthonormalError(f"ensemble members are not orthonormal (max Gram deviation {worst:.3g})")


def make_ensemble(members: Union[StateBatch, List[MatrixState]], weights) -> MixedStateEnsemble:
    """Validated diagonal mixed state; raises the typed input errors of check_ensemble."""
    if not isinstance(members, StateBatch):
        members = StateBatch.from_states(members)
    c = frozen_array(weights, np.float64)
    check_ensemble(members, c)
    return MixedStateEnsemble(members=members, weights=c)


def mixed_state_probabilities(
    ens: MixedStateEnsemble,
    u: UnitaryPipeline,
    steps: int,
    register: Register = 1,
    chunk_size: int = 1,
) -> MeasurementResult:
    """
    Distributions of a diagonal mixed state: the weighted mean of the member results.
    """
    # model_construct skips validation
    check_ensemble(ens.members, ens.weights)
    results = evolve_batch(ens.members, u, steps, register, chunk_size=chunk_size)
    traces = {}
    for reg in _registers(register):
        stacked = np.stack([r.traces[reg] for r in results])
        traces[reg] = clean_distribution(np.tensordot(ens.weights, stacked, axes=1))
    return MeasurementResult(measured_register=register, traces=traces)
