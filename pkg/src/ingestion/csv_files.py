"""
CSV readers and writers for matrices, vectors, states, traces and rankings.

All files are UTF-8, LF line endings, '.' decimal separator. Only ranking files
carry a header row.
"""
import logging
import math
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from src.errors import FileFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_numeric(path: PathLike, what: str) -> pd.DataFrame:
    try:
        df = pd.read_csv(path, header=None, skipinitialspace=True, float_precision="round_trip")
    except pd.errors.EmptyDataError:
        raise FileFormatError(f"{what} file {path} is empty") from None
    except pd.errors.ParserError as e:
        raise FileFormatError(f"{what} file {path} is malformed: {e}") from None
    try:
        return df.astype(np.float64)
    except (TypeError, ValueError):
        raise FileFormatError(f"{what} file {path} contains non-numeric values") from None


def read_matrix(path: PathLike) -> np.ndarray:
    """
    N lines of N comma-separated values; line j holds row j.
    """
    df = _read_numeric(path, "matrix")
    arr = df.to_numpy()
    if np.isnan(arr).any():
        raise FileFormatError(f"matrix file {path} has missing values or ragged rows")
    logger.info(f"Loaded {arr.shape[0]}x{arr.shape[1]} matrix from {path}")
    return arr


def read_vector(path: PathLike) -> np.ndarray:
    """One value per line."""
    df = _read_numeric(path, "vector")
    if df.shape[1] != 1 or df.isna().any().any():
        raise FileFormatError(f"vector file {path} must hold exactly one value per line")
    return df.iloc[:, 0].to_numpy()


def read_state_vector(path: PathLike) -> np.ndarray:
    """
    N^2 lines 're,im'; line N*i + j holds the amplitude a_ij.
    """
    df = _read_numeric(path, "state")
    if df.shape[1] != 2 or df.isna().any().any():
        raise FileFormatError(f"state file {path} must hold 're,im' on every line")
    values = df.iloc[:, 0].to_numpy() + 1j * df.iloc[:, 1].to_numpy()
    n = math.isqrt(values.size)
    if n * n != values.size:
        raise FileFormatError(f"state file {path} has {values.size} lines, not a perfect square")
    return values


def read_edge_list(path: PathLike, n: Optional[int] = None) -> np.ndarray:
    """
    Edge list 'source,target[,weight]' (0-based, no header) to an adjacency
    matrix whose entry (target, source) accumulates the weights (default 1).
    """
    df = _read_numeric(path, "edge list")
    if df.shape[1] not in (2, 3):
        raise FileFormatError(f"edge list {path} must have 2 or 3 columns, found {df.shape[1]}")
    if df.iloc[:, :2].isna().any().any():
        raise FileFormatError(f"edge list {path} has missing node indices")
    src = df.iloc[:, 0].to_numpy()
    dst = df.iloc[:, 1].to_numpy()
    if np.any(src != np.floor(src)) or np.any(dst != np.floor(dst)) or np.any(src < 0) or np.any(dst < 0):
        raise FileFormatError(f"edge list {path} has non-integer or negative node indices")
    src, dst = src.astype(np.intp), dst.astype(np.intp)
    weights = df.iloc[:, 2].fillna(1.0).to_numpy() if df.shape[1] == 3 else np.ones(src.size)

    size = int(max(src.max(), dst.max())) + 1
    if n is not None:
        if size > n:
            raise FileFormatError(f"edge list {path} references node {size - 1} but N={n}")
        size = n
    adjacency = np.zeros((size, size))
    np.add.at(adjacency, (dst, src), weights)
    logger.info(f"Loaded {src.size} edges on {size} nodes from {path}")
    return adjacency


def _write(df: pd.DataFrame, path: PathLike, header: bool = False) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    # floats are written with repr, the shortest text that reads back exactly
    df.to_csv(path, header=header, index=False, lineterminator="\n", encoding="utf-8")
    logger.info(f"Wrote {path}")


def write_matrix(path: PathLike, matrix: np.ndarray) -> None:
    _write(pd.DataFrame(np.asarray(matrix, dtype=np.float64)), path)


def write_vector(path: PathLike, values: np.ndarray) -> None:
    _write(pd.DataFrame(np.asarray(values, dtype=np.float64).reshape(-1, 1)), path)


def write_state_vector(path: PathLike, values: np.ndarray) -> None:
    values = np.asarray(values, dtype=np.complex128)
    _write(pd.DataFrame({"re": values.real, "im": values.imag}), path)


def write_trace(path: PathLike, trace: np.ndarray) -> None:
    """steps + 1 rows of N probabilities."""
    write_matrix(path, trace)


def write_ranking(path: PathLike, ranking: np.ndarray, by_score: bool = False) -> None:
    """
    'node_index,score' rows sorted by node index, or by descending score
    (ties broken by node index) when by_score is set.
    """
    df = pd.DataFrame({"node_index": np.arange(len(ranking)), "score": np.asarray(ranking, dtype=np.float64)})
    if by_score:
        df = df.sort_values(["score", "node_index"], ascending=[False, True], kind="mergesort")
    _write(df, path, header=True)
