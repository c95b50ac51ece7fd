"""
Transition matrices and classical Markov-chain evolution.

A transition matrix G is column-stochastic: entry (j, i) is the probability of
jumping from node i to node j, so a distribution evolves as p(t+1) = G p(t).
"""
import logging
from typing import List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.errors import (
    DimensionMismatchError,
    InputError,
    NegativeEntryError,
    NonSquareError,
    NotStochasticError,
    ZeroColumnError,
)

logger = logging.getLogger(__name__)

COLUMN_TOLERANCE = 1e-8
PROBABILITY_TOLERANCE = 1e-10
NEGATIVE_DUST = 1e-14

Policy = Literal["strict", "renormalize"]


def frozen_array(values, dtype=None) -> np.ndarray:
    """Copy `values` into a C-ordered read-only array."""
    arr = np.array(values, dtype=dtype, copy=True, order="C")
    arr.setflags(write=False)
    return arr


class TransitionMatrix(BaseModel):
    """Validated column-stochastic N x N matrix. Build it with validate_transition_matrix."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _freeze(cls, v):
        return frozen_array(v, np.float64)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


class ProbabilityVector(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _freeze(cls, v):
        return frozen_array(v, np.float64)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def validate_transition_matrix(raw, policy: Policy = "strict") -> TransitionMatrix:
    """
    Check (and optionally repair) a raw matrix before it drives a walk.

    Args:
        raw: N x N array-like of nonnegative reals
        policy: 'strict' accepts only columns summing to 1 within 1e-8;
                'renormalize' divides every column by its sum first

    Returns:
        TransitionMatrix
    """
    arr = np.array(raw, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NonSquareError(f"transition matrix must be square and non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("transition matrix contains non-finite entries")

    negative = np.argwhere(arr < 0)
    if negative.size:
        j, i = negative[0]
        raise NegativeEntryError(
            f"{len(negative)} negative entries, first at row {j}, column {i}: {arr[j, i]}"
        )

    sums = arr.sum(axis=0)
    dangling = np.flatnonzero(sums == 0)
    if dangling.size:
        raise ZeroColumnError(
            f"column(s) {dangling.tolist()} sum to 0 (dangling nodes); "
            "patch them with build_google_matrix"
        )

    if policy == "renormalize":
        off = np.flatnonzero(np.abs(sums - 1.0) > COLUMN_TOLERANCE)
        if off.size:
            logger.warning(f"Renormalizing {off.size} column(s), first: {off[:5].tolist()}")
        arr = arr / sums
        sums = arr.sum(axis=0)
    elif policy != "strict":
        raise InputError(f"unknown policy {policy!r}, expected 'strict' or 'renormalize'")

    bad = np.flatnonzero(np.abs(sums - 1.0) > COLUMN_TOLERANCE)
    if bad.size:
        detail = ", ".join(f"column {i} sums to {sums[i]:.10g}" for i in bad[:10])
        raise NotStochasticError(f"matrix is not column-stochastic: {detail}")

    return TransitionMatrix(entries=arr)


def validate_probability_vector(raw) -> ProbabilityVector:
    """
    Accept a length-N distribution; rounding dust below zero is clamped.
    """
    arr = np.array(raw, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatchError(f"probability vector must be 1-D and non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("probability vector contains non-finite entries")
    if np.any(arr < -NEGATIVE_DUST):
        raise NegativeEntryError(f"probability vector has negative entries (min {arr.min():.3g})")
    arr = np.clip(arr, 0.0, None)
    total = arr.sum()
    if abs(total - 1.0) > PROBABILITY_TOLERANCE:
        raise NotStochasticError(f"probabilities sum to {total:.15g}, expected 1")
    return ProbabilityVector(values=arr)


def uniform_distribution(n: int) -> ProbabilityVector:
    return ProbabilityVector(values=np.full(n, 1.0 / n))


def classical_step(g: TransitionMatrix, p: ProbabilityVector) -> ProbabilityVector:
    if g.n != p.n:
        raise DimensionMismatchError(f"matrix has {g.n} nodes but vector has {p.n} entries")
    return validate_probability_vector(g.entries @ p.values)


def classical_walk(g: TransitionMatrix, p0: ProbabilityVector, t: int) -> List[ProbabilityVector]:
    """
    Evolve p0 for t steps. The returned list has t + 1 entries, p0 first.
    """
    if t < 0:
        raise InputError(f"step count must be nonnegative, got {t}")
    if g.n != p0.n:
        raise DimensionMismatchError(f"matrix has {g.n} nodes but vector has {p0.n} entries")

    trace = [p0]
    for _ in range(t):
        trace.append(classical_step(g, trace[-1]))
    return trace
