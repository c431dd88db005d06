from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatchError, NonFiniteError, ZeroVectorError
from .settings import get_settings

Vector = NDArray[np.float64]
Matrix = NDArray[np.float64]

T = TypeVar("T")
R = TypeVar("R")


def as_vector(value: ArrayLike, dim: int | None = None, what: str = "vector") -> Vector:
    """Coerce to a finite float vector, checking the dimension when given."""
    vector = np.asarray(value, dtype=float).reshape(-1)
    if dim is not None and vector.shape[0] != dim:
        raise DimensionMismatchError(dim, vector.shape[0], what)
    if not np.all(np.isfinite(vector)):
        raise NonFiniteError(f"{what} has non-finite entries: {vector}")
    return vector


def as_nonzero_vector(value: ArrayLike, dim: int | None = None, what: str = "y") -> Vector:
    vector = as_vector(value, dim, what)
    if not np.any(vector):
        raise ZeroVectorError(f"{what} must be nonzero; maps are only defined on the slit algebra")
    return vector


def random_directions(dim: int, count: int, seed: int = 0) -> Matrix:
    """Unit vectors drawn from a seeded generator, one per row."""
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((count, dim))
    norms = np.linalg.norm(samples, axis=1, keepdims=True)
    return samples / norms


def sample_directions(dim: int, count: int = 64, seed: int = 0) -> Matrix:
    """The validation sample set: the 2n signed axis directions followed by seeded unit directions."""
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    return np.vstack([axes, random_directions(dim, count, seed)])


def parallel_map(fn: Callable[[T], R], items: Iterable[T], max_workers: int | None = None) -> list[R]:
    """Map ``fn`` over ``items`` keeping the input order.

    Runs inline when the worker cap is 1 so results stay deterministic and easy to debug.
    """
    workers = max_workers if max_workers is not None else get_settings().max_workers
    materialized: Sequence[T] = list(items)
    if workers <= 1 or len(materialized) <= 1:
        return [fn(item) for item in materialized]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, materialized))
