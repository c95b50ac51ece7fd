"""
Semiclassical Szegedy walks.

Column i of the class-k matrix is the register-k distribution after t_q steps
of U starting from |psi_i>. The walk itself is then a classical walk driven by
that matrix. U is assumed to be built from the same G as the |psi_i> reset
states; nothing checks this.
"""
import logging
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src import config
from src.errors import BatchSizeError, DimensionMismatchError, InputError, StochasticityError
from src.graph.transition import (
    ProbabilityVector,
    TransitionMatrix,
    classical_walk,
    frozen_array,
)
from src.walk.operators import PhaseMatrix, UnitaryPipeline, build_psi_matrix
from src.walk.simulator import evolve_array
from src.walk.state import psi_state_batch

logger = logging.getLogger(__name__)

STOCHASTIC_TOLERANCE = 1e-10


class SemiclassicalConfig(BaseModel):
    quantum_time: int = 1
    classical_time: int = 0
    walk_class: Literal[1, 2] = 1
    batch_size: Optional[int] = None
    memory_budget: Optional[int] = None

    @field_validator("quantum_time", "classical_time")
    @classmethod
    def _times(cls, v):
        if v < 0:
            raise ValueError("quantum and classical times must be nonnegative")
        return v

    @field_validator("batch_size", "memory_budget")
    @classmethod
    def _positive(cls, v):
        if v is not None and v < 1:
            raise ValueError("batch size and memory budget must be at least 1")
        return v


class SemiclassicalMatrix(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray
    quantum_time: int
    walk_class: Literal[1, 2]
    classical_time: int = 0

    @field_validator("entries", mode="before")
    @classmethod
    def _freeze(cls, v):
        return frozen_array(v, np.float64)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def as_transition_matrix(self) -> TransitionMatrix:
        return TransitionMatrix(entries=self.entries)


def default_batch_size(n: int, memory_budget: Optional[int] = None) -> int:
    """
    States per chunk for a budget given in matrix entries; the default budget
    holds BATCH_MEMORY_STATES states of N^2 entries.
    """
    budget = memory_budget if memory_budget is not None else config.BATCH_MEMORY_STATES * n * n
    return max(1, budget // (n * n))


def build_semiclassical_matrix(
    g: TransitionMatrix,
    u: UnitaryPipeline,
    cfg: SemiclassicalConfig,
    theta: Optional[PhaseMatrix] = None,
) -> SemiclassicalMatrix:
    """
    Evaluate the semiclassical matrix of class cfg.walk_class for t_q = cfg.quantum_time.

    Args:
        g: transition matrix whose |psi_i> states are the reset states
        u: one quantum step
        cfg: quantum time, class and batching
        theta: optional phase extension of the reset states

    Returns:
        SemiclassicalMatrix, column-stochastic within 1e-10
    """
    if cfg.quantum_time < 0:
        raise InputError(f"quantum time must be nonnegative, got {cfg.quantum_time}")
    if cfg.walk_class not in (1, 2):
        raise InputError(f"walk class must be 1 or 2, got {cfg.walk_class}")
    if u.n is not None and u.n != g.n:
        raise DimensionMismatchError(f"pipeline acts on N={u.n} but the graph has N={g.n}")

    n = g.n
    batch_size = cfg.batch_size if cfg.batch_size is not None else default_batch_size(n, cfg.memory_budget)
    if batch_size < 1:
        raise BatchSizeError(f"batch size must be at least 1, got {batch_size}")
    batch_size = min(batch_size, n)

    psi = build_psi_matrix(g, theta)
    out = np.empty((n, n))
    for start in range(0, n, batch_size):
        nodes = np.arange(start, min(start + batch_size, n))
        traces, _ = evolve_array(psi_state_batch(psi, nodes), u, cfg.quantum_time, cfg.walk_class)
        out[:, nodes] = traces[cfg.walk_class][:, -1, :].T
        logger.debug(f"Semiclassical columns {nodes[0]}..{nodes[-1]} done")

    sums = out.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > STOCHASTIC_TOLERANCE)
    if bad.size:
        raise StochasticityError(
            f"semiclassical columns {bad[:10].tolist()} do not sum to 1; the unitary is broken"
        )
    logger.info(f"Built class {cfg.walk_class} semiclassical matrix, N={n}, t_q={cfg.quantum_time}, batch={batch_size}")
    return SemiclassicalMatrix(
        entries=out, quantum_time=cfg.quantum_time, walk_class=cfg.walk_class, classical_time=cfg.classical_time
    )


def semiclassical_walk(
    sc: SemiclassicalMatrix, p0: ProbabilityVector, t_c: Optional[int] = None
) -> List[ProbabilityVector]:
    """Classical walk driven by the semiclassical matrix; t_c defaults to the configured classical time."""
    if sc.n != p0.n:
        raise DimensionMismatchError(f"semiclassical matrix has {sc.n} nodes but vector has {p0.n} entries")
    return classical_walk(sc.as_transition_matrix(), p0, sc.classical_time if t_c is None else t_c)
