"""
Regenerate the 4-node-chain quantum PageRank golden file from the dense
reference operators (256 x 256 unitary, flattened-vector evolution).

Usage: python scripts/generate_chain_golden.py [OUTPUT]
"""
import logging
import math
import os
import sys

import numpy as np

# Add project root to path
sys.path.append(os.getcwd())

from src import config
from src.applications.pagerank import build_google_matrix
from src.ingestion.csv_files import write_ranking
from src.oracle.dense import dense_trace, dense_unitary, psi_vectors

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT = os.path.join("tests", "fixtures", "pagerank_chain4_golden.csv")
N = 4
DAMPING = 0.85
STEPS = 50


def chain_adjacency(n: int) -> np.ndarray:
    """Directed cycle 0 -> 1 -> ... -> n-1 -> 0; entry (j, i) is the link i -> j."""
    adj = np.zeros((n, n))
    for i in range(n):
        adj[(i + 1) % n, i] = 1.0
    return adj


def golden_ranking() -> np.ndarray:
    g = build_google_matrix(chain_adjacency(N), DAMPING)
    w = dense_unitary([("S",), ("R", math.pi), ("S",), ("R", math.pi)], g)
    v0 = psi_vectors(g).sum(axis=1) / math.sqrt(N)
    trace = dense_trace(w, v0, STEPS, register=2)
    ranking = trace[1:].mean(axis=0)
    return ranking / ranking.sum()


def main(output: str = DEFAULT_OUTPUT) -> None:
    config.configure_logging()
    ranking = golden_ranking()
    write_ranking(output, ranking)
    logger.info(f"Golden ranking {np.round(ranking, 6).tolist()} -> {output}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
