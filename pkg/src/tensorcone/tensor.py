"""Symmetric tensors in canonical compressed storage.

A symmetric order-``m`` tensor over ``n`` coordinates is stored as one value
per sorted multi-index ``(i1 <= i2 <= ... <= im)``.  The sorted tuples are
enumerated in lexicographic order (the order of
``itertools.combinations_with_replacement``) and the values live in a flat
float64 array aligned with that enumeration.  Dense ``n**m`` arrays are only
produced on request (``to_dense``) and are meant for small ``n``.

Every dense sum over all index tuples is rewritten as a weighted sum over
canonical indices, the weight being the number of distinct permutations of
the multi-index, ``m! / prod(mu_j!)``.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections.abc import Iterable, Mapping
from typing import Any

import numpy as np

__all__ = [
    "SymmetricTensor",
    "Contraction",
    "sym_dim",
    "caratheodory_count",
    "canonical",
    "multiplicity",
    "zeros",
    "rank_one",
    "identity_tensor",
    "inner",
    "frobenius",
    "trace",
    "contract",
    "evaluate",
    "is_sigma2",
    "sigma2_canonical_indices",
    "add_scaled",
    "to_dense",
    "from_dense",
]

_INDEX_LIMIT = np.iinfo(np.int64).max


def sym_dim(n: int, m: int) -> int:
    """Number of independent entries of an order-``m`` symmetric tensor in ``n`` dims.

    Equal to ``C(n + m - 1, m)``.  Raises ``OverflowError`` if the count does not
    fit a signed 64-bit index, which is the addressable limit of the storage.
    """
    n, m = _check_shape(n, m)
    count = math.comb(n + m - 1, m)
    if count > _INDEX_LIMIT:
        raise OverflowError(f"sym_dim({n}, {m}) = {count} exceeds the int64 index range")
    return count


def caratheodory_count(n: int, m: int) -> int:
    """``sym_dim(n, m) + 1``: the number of rank-one terms in a Caratheodory sum."""
    return sym_dim(n, m) + 1


def canonical(index: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(int(i) for i in index))


def multiplicity(index: Iterable[int]) -> int:
    """Number of distinct orderings of ``index`` (``m! / prod(mu_j!)``)."""
    index = tuple(index)
    weight = math.factorial(len(index))
    for count in _counts(index):
        weight //= math.factorial(count)
    return weight


def _counts(index: tuple[int, ...]) -> list[int]:
    return [len(list(group)) for _, group in itertools.groupby(sorted(index))]


def _check_shape(n: Any, m: Any) -> tuple[int, int]:
    if int(n) != n or int(m) != m:
        raise TypeError(f"n and m must be integers, got n={n!r}, m={m!r}")
    n, m = int(n), int(m)
    if n < 1 or m < 1:
        raise ValueError(f"n and m must be >= 1, got n={n}, m={m}")
    return n, m


class _Layout:
    """Index tables shared by all tensors of one (n, m) shape."""

    def __init__(self, n: int, m: int):
        self.n = n
        self.m = m
        self.size = sym_dim(n, m)
        rows = list(itertools.combinations_with_replacement(range(n), m))
        self.indices = np.array(rows, dtype=np.int64).reshape(self.size, m)
        self.indices.flags.writeable = False
        self.position = {row: k for k, row in enumerate(rows)}

        weights = np.empty(self.size)
        even = np.empty(self.size, dtype=bool)
        for k, row in enumerate(rows):
            counts = _counts(row)
            weights[k] = math.factorial(m) // math.prod(math.factorial(c) for c in counts)
            even[k] = all(c % 2 == 0 for c in counts)
        self.weights = weights
        self.weights.flags.writeable = False
        self.even_mask = even
        self.diagonal = np.array([self.position[(i,) * m] for i in range(n)], dtype=np.int64)

    @functools.cached_property
    def reduced(self) -> tuple[np.ndarray, np.ndarray]:
        """Scatter targets for the map ``x -> A x^(m-1)``.

        Returns ``(targets, sub_indices)``: ``sub_indices`` enumerates the
        canonical multi-indices of order ``m - 1``; ``targets[c, j]`` is the flat
        position ``i * len(sub_indices) + r`` where ``i`` is slot ``j`` of ``c`` and
        ``r`` the row of ``c`` with slot ``j`` removed.
        """
        m = self.m
        if m == 1:
            sub = np.zeros((1, 0), dtype=np.int64)
            targets = self.indices[:, :1].copy()
            return targets, sub
        sub_layout = _layout(self.n, m - 1)
        width = sub_layout.size
        targets = np.empty((self.size, m), dtype=np.int64)
        for k, row in enumerate(map(tuple, self.indices.tolist())):
            for j in range(m):
                rest = row[:j] + row[j + 1 :]
                targets[k, j] = row[j] * width + sub_layout.position[rest]
        return targets, sub_layout.indices


@functools.lru_cache(maxsize=64)
def _layout(n: int, m: int) -> _Layout:
    return _Layout(n, m)


class SymmetricTensor:
    """Immutable symmetric tensor of order ``m`` over ``n`` coordinates.

    ``values[k]`` is the entry at canonical index ``indices[k]``.  Entries can be
    read with any permutation of an index: ``A[2, 0, 1, 0] == A[0, 0, 1, 2]``.
    Equality follows dense semantics: two tensors are equal when every entry
    is equal.
    """

    __slots__ = ("n", "m", "_values", "_layout")
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, n: int, m: int, values: Any = None):
        n, m = _check_shape(n, m)
        layout = _layout(n, m)
        if values is None:
            data = np.zeros(layout.size)
        else:
            data = np.array(values, dtype=np.float64).reshape(-1)
            if data.shape != (layout.size,):
                raise ValueError(
                    f"expected {layout.size} canonical values for n={n}, m={m}, got {data.size}"
                )
        data.flags.writeable = False
        self.n = n
        self.m = m
        self._values = data
        self._layout = layout

    @classmethod
    def from_entries(cls, n: int, m: int, entries: Mapping[Iterable[int], float]) -> SymmetricTensor:
        """Build from ``{index: value}``; absent indices are zero.

        Two keys that are permutations of each other are rejected.
        """
        layout = _layout(*_check_shape(n, m))
        values = np.zeros(layout.size)
        seen = set()
        for index, value in entries.items():
            key = canonical(index)
            if len(key) != m or key[0] < 0 or key[-1] >= n:
                raise ValueError(f"index {tuple(index)} is not valid for n={n}, m={m}")
            if key in seen:
                raise ValueError(f"duplicate canonical index {key}")
            seen.add(key)
            values[layout.position[key]] = float(value)
        return cls(n, m, values)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def indices(self) -> np.ndarray:
        """``(sym_dim, m)`` array of canonical indices, aligned with ``values``."""
        return self._layout.indices

    @property
    def weights(self) -> np.ndarray:
        """Permutation count of each canonical index."""
        return self._layout.weights

    @property
    def size(self) -> int:
        return self._layout.size

    def position(self, index: Iterable[int]) -> int:
        return self._layout.position[canonical(index)]

    def __getitem__(self, index: Iterable[int]) -> float:
        key = canonical(index)
        if len(key) != self.m:
            raise IndexError(f"expected {self.m} indices, got {len(key)}")
        try:
            return float(self._values[self._layout.position[key]])
        except KeyError:
            raise IndexError(f"index {key} out of range for n={self.n}") from None

    def entries(self) -> dict[tuple[int, ...], float]:
        """Nonzero entries keyed by canonical index."""
        nz = np.flatnonzero(self._values)
        rows = self.indices[nz].tolist()
        return {tuple(r): float(v) for r, v in zip(rows, self._values[nz])}

    def diagonal(self) -> np.ndarray:
        """The ``n`` pure-diagonal entries ``A[i, ..., i]``."""
        return self._values[self._layout.diagonal]

    def mean(self) -> float:
        """Mean over all ``n**m`` dense entries."""
        return float(self.weights @ self._values) / float(self.n) ** self.m

    def with_values(self, values: Any) -> SymmetricTensor:
        return SymmetricTensor(self.n, self.m, values)

    def same_shape(self, other: SymmetricTensor) -> bool:
        return self.n == other.n and self.m == other.m

    def allclose(self, other: SymmetricTensor, rtol: float = 1e-9, atol: float = 1e-12) -> bool:
        _check_pair(self, other)
        return bool(np.allclose(self._values, other._values, rtol=rtol, atol=atol))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymmetricTensor):
            return NotImplemented
        return self.same_shape(other) and bool(np.array_equal(self._values, other._values))

    def __add__(self, other: SymmetricTensor) -> SymmetricTensor:
        _check_pair(self, other)
        return self.with_values(self._values + other._values)

    def __sub__(self, other: SymmetricTensor) -> SymmetricTensor:
        _check_pair(self, other)
        return self.with_values(self._values - other._values)

    def __neg__(self) -> SymmetricTensor:
        return self.with_values(-self._values)

    def __mul__(self, scalar: float) -> SymmetricTensor:
        if isinstance(scalar, SymmetricTensor):
            return NotImplemented
        return self.with_values(self._values * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> SymmetricTensor:
        return self.with_values(self._values / float(scalar))

    def __repr__(self) -> str:
        nnz = int(np.count_nonzero(self._values))
        return f"SymmetricTensor(n={self.n}, m={self.m}, nnz={nnz}/{self.size})"


def _check_pair(a: SymmetricTensor, b: SymmetricTensor) -> None:
    if not isinstance(a, SymmetricTensor) or not isinstance(b, SymmetricTensor):
        raise TypeError("expected SymmetricTensor operands")
    if not a.same_shape(b):
        raise ValueError(f"shape mismatch: (n={a.n}, m={a.m}) vs (n={b.n}, m={b.m})")


def _as_vector(x: Any, n: int | None = None) -> np.ndarray:
    vec = np.asarray(x, dtype=np.float64)
    if vec.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {vec.shape}")
    if n is not None and vec.shape[0] != n:
        raise ValueError(f"vector has length {vec.shape[0]}, expected {n}")
    return vec


def _monomials(xs: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """``prod_j xs[..., rows[:, j]]``; column-wise products beat ``prod(axis=-1)`` here."""
    if rows.shape[1] == 0:
        return np.ones(xs.shape[:-1] + (rows.shape[0],))
    out = xs[..., rows[:, 0]]
    for j in range(1, rows.shape[1]):
        out *= xs[..., rows[:, j]]
    return out


def zeros(n: int, m: int) -> SymmetricTensor:
    return SymmetricTensor(n, m)


def rank_one(u: Any, m: int) -> SymmetricTensor:
    """The rank-one tensor ``u^(x)m``: entry ``prod_j u[i_j]``."""
    u = _as_vector(u)
    layout = _layout(*_check_shape(u.shape[0], m))
    return SymmetricTensor(layout.n, m, _monomials(u, layout.indices))


def identity_tensor(n: int, m: int) -> SymmetricTensor:
    layout = _layout(*_check_shape(n, m))
    values = np.zeros(layout.size)
    values[layout.diagonal] = 1.0
    return SymmetricTensor(n, m, values)


def inner(a: SymmetricTensor, b: SymmetricTensor) -> float:
    """Dense inner product ``sum_{i1..im} A[i] B[i]``."""
    _check_pair(a, b)
    return float(a.weights @ (a.values * b.values))


def frobenius(a: SymmetricTensor) -> float:
    return math.sqrt(max(inner(a, a), 0.0))


def trace(a: SymmetricTensor) -> float:
    return float(a.diagonal().sum())


def evaluate(a: SymmetricTensor, x: Any) -> np.ndarray | float:
    """``<A, x^(x)m>`` for a vector ``x`` or a stack of row vectors."""
    xs = np.asarray(x, dtype=np.float64)
    if xs.shape[-1] != a.n:
        raise ValueError(f"vector length {xs.shape[-1]} does not match n={a.n}")
    out = _monomials(xs, a.indices) @ (a.weights * a.values)
    return float(out) if xs.ndim == 1 else out


class Contraction:
    """The map ``x -> A x^(m-1)`` with its coefficient matrix precomputed.

    ``(A x^(m-1))_i = sum_{i2..im} A[i, i2, ..., im] x[i2] ... x[im]``.  The
    right-hand side is linear in the degree ``m - 1`` monomials of ``x``, so the
    coefficients are assembled once into an ``n x sym_dim(n, m-1)`` matrix and
    every subsequent call is a gather, a product and a matrix multiply.  Worth
    it whenever the same tensor is contracted against many vectors.
    """

    def __init__(self, a: SymmetricTensor):
        self.n = a.n
        self.m = a.m
        targets, self._sub = a._layout.reduced
        width = self._sub.shape[0]
        coef = np.repeat(a.weights * a.values / a.m, a.m)
        self.matrix = np.bincount(
            targets.ravel(), weights=coef, minlength=a.n * width
        ).reshape(a.n, width)

    def __call__(self, x: Any) -> np.ndarray:
        xs = np.asarray(x, dtype=np.float64)
        if xs.shape[-1] != self.n:
            raise ValueError(f"vector length {xs.shape[-1]} does not match n={self.n}")
        return _monomials(xs, self._sub) @ self.matrix.T


def contract(a: SymmetricTensor, x: Any) -> np.ndarray:
    """``A x^(m-1)``: the vector with components ``sum A[i, i2..im] x[i2]...x[im]``."""
    return Contraction(a)(_as_vector(x, a.n))


def is_sigma2(index: Iterable[int]) -> bool:
    """True iff every distinct index value occurs an even number of times."""
    index = tuple(index)
    if len(index) % 2:
        raise ValueError(f"sigma2 indices need an even order, got m={len(index)}")
    return all(c % 2 == 0 for c in _counts(index))


def sigma2_canonical_indices(n: int, m: int) -> list[tuple[int, ...]]:
    n, m = _check_shape(n, m)
    if m % 2:
        raise ValueError(f"sigma2 indices need an even order, got m={m}")
    layout = _layout(n, m)
    return [tuple(r) for r in layout.indices[layout.even_mask].tolist()]


def sigma2_mask(n: int, m: int) -> np.ndarray:
    """Boolean mask over canonical positions selecting the sigma2 indices."""
    if m % 2:
        raise ValueError(f"sigma2 indices need an even order, got m={m}")
    return _layout(*_check_shape(n, m)).even_mask


def add_scaled(a: SymmetricTensor, b: SymmetricTensor, s: float) -> SymmetricTensor:
    """``A + s * B``."""
    _check_pair(a, b)
    return a.with_values(a.values + float(s) * b.values)


def to_dense(a: SymmetricTensor) -> np.ndarray:
    """Materialize the full ``(n,) * m`` array.  Memory grows as ``n**m``."""
    flat = np.empty(a.n**a.m)
    strides = a.n ** np.arange(a.m - 1, -1, -1)
    for perm in set(itertools.permutations(range(a.m))):
        flat[a.indices[:, perm] @ strides] = a.values
    return flat.reshape((a.n,) * a.m)


def from_dense(dense: Any, atol: float = 1e-9) -> SymmetricTensor:
    """Compress a dense symmetric array; asymmetry beyond ``atol`` is an error."""
    arr = np.asarray(dense, dtype=np.float64)
    if arr.ndim < 1 or len(set(arr.shape)) != 1:
        raise ValueError(f"expected a hypercubic array, got shape {arr.shape}")
    n, m = arr.shape[0], arr.ndim
    for perm in itertools.permutations(range(m)):
        gap = np.max(np.abs(arr - arr.transpose(perm)), initial=0.0)
        if gap > atol:
            raise ValueError(f"dense input is not symmetric (max deviation {gap:.3g})")
    layout = _layout(*_check_shape(n, m))
    return SymmetricTensor(n, m, arr[tuple(layout.indices.T)])
