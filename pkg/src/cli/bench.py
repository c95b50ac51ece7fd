"""
Scaling benchmark: time and allocator peak of W = SRSR walks over growing N,
fitted as metric = A * N^n on a log-log scale.
"""
import logging
import time
import tracemalloc
from typing import Iterable, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.stats import linregress

from src import config
from src.errors import InputError, InsufficientSizesError
from src.graph.transition import TransitionMatrix, validate_transition_matrix
from src.walk.operators import ReflectionOperator, SwapOperator, build_psi_matrix, make_pipeline
from src.walk.simulator import iterate_distributions
from src.walk.state import initial_superposition

logger = logging.getLogger(__name__)

Metric = Literal["time", "memory"]
GENERATOR = "uniform(0,1) entries, column-normalized"


class BenchSample(BaseModel):
    size: int
    seconds: float
    peak_bytes: int
    seed: int


class ScalingFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    metric: Metric
    sizes: List[int]
    times: List[float]
    memories: List[int]
    amplitude: float
    exponent: float
    stderr_n: float


def random_stochastic_matrix(n: int, rng: np.random.Generator) -> TransitionMatrix:
    raw = rng.uniform(0.0, 1.0, size=(n, n))
    return validate_transition_matrix(raw / raw.sum(axis=0), policy="strict")


def _drain(g: TransitionMatrix, steps: int) -> None:
    psi = build_psi_matrix(g)
    r = ReflectionOperator(psi=psi)
    w = make_pipeline([SwapOperator(), r, SwapOperator(), r])
    for _ in iterate_distributions(initial_superposition(psi), w, steps, register=2):
        pass


def measure_size(n: int, steps: int, seed: int) -> BenchSample:
    """
    One walk for wall time, a second under tracemalloc for the peak, so the
    tracing overhead stays out of the timing.
    """
    g = random_stochastic_matrix(n, np.random.default_rng(seed))

    start = time.perf_counter()
    _drain(g, steps)
    seconds = time.perf_counter() - start

    tracemalloc.start()
    try:
        tracemalloc.reset_peak()
        base, _ = tracemalloc.get_traced_memory()
        _drain(g, steps)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()

    sample = BenchSample(size=n, seconds=seconds, peak_bytes=max(peak - base, 0), seed=seed)
    logger.info(f"N={n}: {seconds:.3f} s, peak {sample.peak_bytes / 2**20:.1f} MiB")
    return sample


def fit_scaling(samples: List[BenchSample], metric: Metric, include_small: bool = False) -> ScalingFit:
    """
    Least-squares fit of log(metric) = log A + n log N.

    Sizes below SZWALK_BENCH_MIN_SIZE are dropped unless include_small is set;
    at least three strictly increasing sizes must remain.
    """
    if metric not in ("time", "memory"):
        raise InputError(f"metric must be 'time' or 'memory', got {metric!r}")
    kept = [s for s in samples if include_small or s.size >= config.BENCH_MIN_SIZE]
    if len(kept) < len(samples):
        logger.warning(f"Dropped {len(samples) - len(kept)} size(s) below {config.BENCH_MIN_SIZE} from the fit")
    sizes = [s.size for s in kept]
    if len(sizes) < 3:
        raise InsufficientSizesError(f"scaling fit needs at least 3 sizes, got {len(sizes)}")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InsufficientSizesError(f"sizes must be strictly increasing, got {sizes}")

    values = np.array([s.seconds if metric == "time" else s.peak_bytes for s in kept], dtype=np.float64)
    if np.any(values <= 0):
        raise InputError(f"{metric} measurements must be positive for a log-log fit")
    fit = linregress(np.log(sizes), np.log(values))
    return ScalingFit(
        metric=metric,
        sizes=sizes,
        times=[s.seconds for s in kept],
        memories=[s.peak_bytes for s in kept],
        amplitude=float(np.exp(fit.intercept)),
        exponent=float(fit.slope),
        stderr_n=float(fit.stderr),
    )


def run_scaling_bench(
    sizes: Iterable[int],
    steps: int = 100,
    metric: Metric = "time",
    seed: int = 0,
    include_small: bool = False,
    samples_out: Optional[List[BenchSample]] = None,
) -> ScalingFit:
    """
    Run W = SRSR from the equal superposition for `steps` steps at every size
    and fit the scaling law for `metric`.

    Args:
        sizes: node counts, strictly increasing
        steps: walk length per size
        metric: 'time' or 'memory'
        seed: base seed; size k of the list uses seed + k
        include_small: keep sizes below SZWALK_BENCH_MIN_SIZE in the fit
        samples_out: if given, receives the raw per-size samples

    Returns:
        ScalingFit
    """
    sizes = [int(n) for n in sizes]
    if len(sizes) < 3:
        raise InsufficientSizesError(f"scaling bench needs at least 3 sizes, got {len(sizes)}")
    if steps < 0:
        raise InputError(f"steps must be nonnegative, got {steps}")
    logger.info(f"Scaling bench over N={sizes}, {steps} steps, G: {GENERATOR}, seed {seed}")
    samples = [measure_size(n, steps, seed + k) for k, n in enumerate(sizes)]
    if samples_out is not None:
        samples_out.extend(samples)
    return fit_scaling(samples, metric, include_small)
