"""Input checks shared by the estimator, the solver and the CLI."""

from __future__ import annotations

from typing import Any

import numpy as np

from .tensor import SymmetricTensor, from_dense


def check_tensor(W: Any, *, even_order: bool = False, name: str = "W") -> SymmetricTensor:
    """Return ``W`` as a :class:`SymmetricTensor`.

    Dense hypercubic arrays are accepted and compressed (they must be
    symmetric).  ``even_order`` rejects odd ``m``, which the conic relaxation
    cannot handle: no nonzero odd-order tensor is positive semidefinite.
    """
    if not isinstance(W, SymmetricTensor):
        arr = np.asarray(W, dtype=np.float64)
        W = from_dense(arr)
    if not np.all(np.isfinite(W.values)):
        raise ValueError(f"{name} contains non-finite entries")
    if even_order and W.m % 2:
        raise ValueError(f"{name} has odd order m={W.m}; an even order is required")
    return W


def check_assignment(y: Any, n: int | None = None, *, balanced: bool = True, name: str = "y") -> np.ndarray:
    """Validate a +1/-1 label vector and return it as an int array."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"{name} has length {arr.shape[0]}, expected {n}")
    if not np.all((arr == 1) | (arr == -1)):
        raise ValueError(f"{name} must contain only +1 and -1")
    labels = arr.astype(np.int64)
    if balanced and labels.sum() != 0:
        raise ValueError(f"{name} is not balanced (sum of labels = {labels.sum()})")
    return labels


def check_probability(value: Any, name: str, *, open_interval: bool = False) -> float:
    p = float(value)
    if open_interval:
        if not 0.0 < p < 1.0:
            raise ValueError(f"{name} must lie in (0, 1), got {p}")
    elif not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


def check_probabilities(values: Any, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError(f"{name} entries must lie in [0, 1], got {arr.tolist()}")
    return arr


def check_seed(seed: Any) -> int:
    """Integer seeds only; ``None`` draws fresh entropy."""
    if seed is None:
        return int(np.random.SeedSequence().entropy % (2**32))
    if isinstance(seed, (bool, np.bool_)) or int(seed) != seed or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    return int(seed)
