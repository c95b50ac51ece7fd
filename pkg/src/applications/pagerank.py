"""
Quantum PageRank on the double Szegedy step W = S R(theta1) S R(theta2),
plus the classical power-iteration baseline.
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.errors import InputError, NegativeEntryError, NoConvergenceError, NonSquareError
from src.graph.transition import (
    ProbabilityVector,
    TransitionMatrix,
    uniform_distribution,
    validate_transition_matrix,
)
from src.walk.operators import ReflectionOperator, SwapOperator, build_psi_matrix, make_pipeline
from src.walk.simulator import clean_distribution, evolve
from src.walk.state import initial_superposition

logger = logging.getLogger(__name__)

DEFAULT_DAMPING = 0.85
MAX_ITERATIONS = 100_000


class PageRankConfig(BaseModel):
    steps: int = 100
    apr_angles: Optional[Tuple[float, float]] = None
    damping: float = DEFAULT_DAMPING
    include_t0: bool = False
    keep_trace: bool = False

    @field_validator("steps")
    @classmethod
    def _steps(cls, v):
        if v < 1:
            raise ValueError("steps must be at least 1")
        return v

    @field_validator("damping")
    @classmethod
    def _damping(cls, v):
        if not 0.0 < v <= 1.0:
            raise ValueError("damping must lie in (0, 1]")
        return v

    @field_validator("apr_angles")
    @classmethod
    def _angles(cls, v):
        if v is not None and not all(-2 * math.pi < a <= 2 * math.pi for a in v):
            raise ValueError("APR angles must lie in (-2 pi, 2 pi]")
        return v


class PageRankResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    ranking: ProbabilityVector
    per_step: Optional[np.ndarray] = None


def build_google_matrix(adjacency, damping: float = DEFAULT_DAMPING) -> TransitionMatrix:
    """
    Google matrix alpha H + (1 - alpha)/N, where H is the column-normalized
    adjacency (entry (j, i) is a link i -> j) with dangling columns set uniform.
    """
    adj = np.array(adjacency, dtype=np.float64)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] == 0:
        raise NonSquareError(f"adjacency matrix must be square and non-empty, got shape {adj.shape}")
    if np.any(adj < 0):
        raise NegativeEntryError("adjacency matrix has negative entries")
    if not 0.0 < damping <= 1.0:
        raise InputError(f"damping must lie in (0, 1], got {damping}")

    n = adj.shape[0]
    sums = adj.sum(axis=0)
    dangling = sums == 0
    if np.any(dangling):
        logger.info(f"Patching {int(dangling.sum())} dangling node(s) with uniform columns")
    h = np.divide(adj, sums, out=np.full_like(adj, 1.0 / n), where=~dangling)
    return validate_transition_matrix(damping * h + (1.0 - damping) / n, policy="strict")


def quantum_pagerank(g: TransitionMatrix, cfg: PageRankConfig) -> PageRankResult:
    """
    Time-averaged register-2 distribution of the W walk started from the equal
    superposition of all |psi_i>.

    Args:
        g: transition matrix (typically a Google matrix)
        cfg: steps, optional APR angles (theta1, theta2), averaging window

    Returns:
        PageRankResult
    """
    theta1, theta2 = cfg.apr_angles if cfg.apr_angles is not None else (math.pi, math.pi)
    psi = build_psi_matrix(g)
    r1 = ReflectionOperator(psi=psi, apr_angle=theta1)
    r2 = r1 if theta2 == theta1 else ReflectionOperator(psi=psi, apr_angle=theta2)
    w = make_pipeline([SwapOperator(), r1, SwapOperator(), r2])

    result = evolve(initial_superposition(psi), w, cfg.steps, register=2)
    trace = result.trace(2)
    window = trace if cfg.include_t0 else trace[1:]
    ranking = clean_distribution(window.mean(axis=0))
    logger.info(f"Quantum PageRank on N={g.n}: {cfg.steps} steps of {w.label}")
    return PageRankResult(
        ranking=ProbabilityVector(values=ranking),
        per_step=trace if cfg.keep_trace else None,
    )


def classical_pagerank(g: TransitionMatrix, tol: float = 1e-12, max_iterations: int = MAX_ITERATIONS) -> ProbabilityVector:
    """
    Power iteration from the uniform distribution until the 1-norm change drops below tol.
    """
    p = uniform_distribution(g.n).values
    for iteration in range(1, max_iterations + 1):
        nxt = g.entries @ p
        change = float(np.abs(nxt - p).sum())
        p = nxt
        if change < tol:
            logger.info(f"Classical PageRank converged after {iteration} iteration(s)")
            return ProbabilityVector(values=clean_distribution(p))
    raise NoConvergenceError(f"power iteration did not converge within {max_iterations} iterations (tol {tol})")
