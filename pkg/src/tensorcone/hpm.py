"""Homogeneous polynomial models: coefficient calculus and the example samplers.

An order-``m`` model over a balanced +1/-1 assignment ``y*`` has expected
affinity entries that depend only on ``l``, the number of +1 labels among the
``m`` indexed entities (counted with multiplicity).  The vector
``alpha = (alpha_0, ..., alpha_m)`` of those expectations and the coefficient
vector ``p`` of the rank-one expansion are related by the integer matrix
``L`` (``alpha = L p``).

The four samplers (counts, hypergraph cuts, bisection, motifs) each return a
:class:`~tensorcone.tensor.SymmetricTensor` drawn with an explicit
``numpy.random.Generator``.
"""

from __future__ import annotations

import dataclasses
import functools
import itertools
import math
from typing import Any, Literal, Sequence

import numpy as np

from .tensor import SymmetricTensor, _layout
from .validation import check_assignment, check_probabilities, check_probability

__all__ = [
    "HpmSpec",
    "CountsParams",
    "CutsParams",
    "BisectionParams",
    "MotifParams",
    "Theorem1Report",
    "f_comb",
    "big_f",
    "big_f_closed_form",
    "l_matrix",
    "p_from_alpha",
    "alpha_from_p",
    "expand_alpha",
    "expected_tensor",
    "expected_dual_diagonal",
    "theorem1_check",
    "theorem1_conditions",
    "random_assignment",
    "sample_counts",
    "hpm_of_counts",
    "sample_bisection",
    "bisection_alpha",
    "hpm_of_bisection",
    "sample_cuts",
    "expected_cut",
    "hpm_of_cuts",
    "motif_match",
    "motif_probability",
    "sample_motif",
    "hpm_of_motif",
    "MOTIFS",
    "motif_adjacency",
]

RepeatsMode = Literal["sample", "zero"]


# -- coefficient calculus ----------------------------------------------------


def f_comb(m: int, l: int, k: int) -> int:
    """``sum_s (-1)^s C(l, k-s) C(m-l, s)`` for ``s`` in ``[max(0, k-l), min(k, m-l)]``."""
    if not (0 <= l <= m and 0 <= k <= m):
        raise ValueError(f"need 0 <= l, k <= m, got m={m}, l={l}, k={k}")
    return sum(
        (-1) ** s * math.comb(l, k - s) * math.comb(m - l, s)
        for s in range(max(0, k - l), min(k, m - l) + 1)
    )


def _signal_sums(m: int, p: Sequence[float]) -> tuple[float, float]:
    p = _check_p(p, m)
    inner = [sum(p[k] * f_comb(m, l, k) for k in range(m + 1)) for l in range(m + 1)]
    positive = sum(math.comb(m - 1, l - 1) * inner[l] for l in range(1, m + 1))
    negative = sum(math.comb(m - 1, l) * inner[l] for l in range(m))
    return positive, negative


def big_f(m: int, p: Sequence[float]) -> float:
    """Signal strength ``F(m, p)``: the smaller of the two dual-diagonal sums."""
    return min(_signal_sums(m, p))


def big_f_closed_form(alpha: Sequence[float]) -> float:
    """``F`` directly from the full expectation weights.

    Uses alternating-sign binomial weights:
    ``min(sum_l C(m-1, l) (-1)^l alpha_l, sum_l C(m-1, l-1) (-1)^l alpha_l)``.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    m = alpha.size - 1
    signs = (-1.0) ** np.arange(m + 1)
    pascal = np.array([math.comb(m - 1, j) for j in range(m)], dtype=np.float64)
    low = float(pascal @ (signs[:m] * alpha[:m]))
    high = float(pascal @ (signs[1:] * alpha[1:]))
    return min(low, high)


@functools.lru_cache(maxsize=None)
def _l_matrix(m: int) -> np.ndarray:
    L = np.zeros((m + 1, m + 1), dtype=np.int64)
    for i in range(1, m + 2):
        for j in range(1, m + 2):
            L[i - 1, j - 1] = sum(
                (-1) ** (i + s - 1) * math.comb(i - 1, j - s - 1) * math.comb(m - i + 1, s)
                for s in range(max(0, j - i), min(j - 1, m - i + 1) + 1)
            )
    L.flags.writeable = False
    return L


def l_matrix(m: int) -> np.ndarray:
    """The integer map ``alpha = L p`` between coefficients and expectation weights."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return _l_matrix(int(m)).copy()


def _check_p(p: Sequence[float], m: int) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64).reshape(-1)
    if arr.size != m + 1:
        raise ValueError(f"expected {m + 1} coefficients for m={m}, got {arr.size}")
    return arr


def p_from_alpha(alpha: Sequence[float], m: int | None = None, residual_tol: float = 1e-10) -> np.ndarray:
    """Solve ``L p = alpha`` for the coefficient vector ``p``."""
    alpha = np.asarray(alpha, dtype=np.float64).reshape(-1)
    m = alpha.size - 1 if m is None else m
    if alpha.size != m + 1:
        raise ValueError(f"expected {m + 1} expectation weights for m={m}, got {alpha.size}")
    L = _l_matrix(m).astype(np.float64)
    try:
        p = np.linalg.solve(L, alpha)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"L matrix for m={m} is singular") from exc
    residual = np.max(np.abs(L @ p - alpha), initial=0.0)
    if residual > residual_tol * max(1.0, np.max(np.abs(alpha), initial=0.0)):
        raise ValueError(f"linear solve residual {residual:.3g} exceeds {residual_tol}")
    return p


def alpha_from_p(p: Sequence[float], m: int | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    m = p.size - 1 if m is None else m
    return _l_matrix(m) @ _check_p(p, m)


def expand_alpha(alpha: Sequence[float], m: int) -> np.ndarray:
    """Full-length weights from either full (``m+1``) or compact (``m/2+1``) form.

    The compact form lists the smaller-group counts; ``alpha_l = alpha_{m-l}``.
    """
    arr = np.asarray(alpha, dtype=np.float64).reshape(-1)
    if arr.size == m + 1:
        return arr.copy()
    if m % 2 == 0 and arr.size == m // 2 + 1:
        return arr[np.minimum(np.arange(m + 1), m - np.arange(m + 1))]
    raise ValueError(f"alpha must have {m + 1} (full) or {m // 2 + 1} (compact) entries, got {arr.size}")


# -- expectations ------------------------------------------------------------


def _positive_counts(y_star: np.ndarray, m: int) -> np.ndarray:
    """Number of +1 labels in each canonical multi-index, with multiplicity."""
    idx = _layout(y_star.size, m).indices
    return (y_star[idx] == 1).sum(axis=1)


def expected_tensor(y_star: Any, alpha: Sequence[float], m: int | None = None) -> SymmetricTensor:
    """``E[W]`` whose entry with ``l`` positive labels is ``alpha[l]``."""
    y_star = check_assignment(y_star, name="y_star")
    alpha = np.asarray(alpha, dtype=np.float64).reshape(-1)
    m = alpha.size - 1 if m is None else m
    alpha = expand_alpha(alpha, m)
    return SymmetricTensor(y_star.size, m, alpha[_positive_counts(y_star, m)])


def expected_dual_diagonal(y_star: Any, alpha: Sequence[float], m: int, n: int | None = None) -> tuple[float, float]:
    """Expected dual diagonal entry for a +1 node and for a -1 node.

    ``(n/2)^(m-1) * sum_l C(m-1, l-1) sum_k p_k f(m, l, k)`` and the analogue
    with ``C(m-1, l)`` over ``l = 0 .. m-1``.
    """
    y_star = check_assignment(y_star, n, name="y_star")
    n = y_star.size
    p = p_from_alpha(expand_alpha(alpha, m), m)
    positive, negative = _signal_sums(m, p)
    scale = (n / 2) ** (m - 1)
    return scale * positive, scale * negative


@dataclasses.dataclass(frozen=True)
class HpmSpec:
    """Parameters of an m-HPM(n, p, sigma^2, B) instance."""

    n: int
    m: int
    p: tuple[float, ...]
    sigma2_bound: float
    entry_bound: float

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if len(self.p) != self.m + 1:
            raise ValueError(f"p must have m+1 = {self.m + 1} entries, got {len(self.p)}")
        if self.sigma2_bound < 0 or self.entry_bound < 0:
            raise ValueError("sigma2_bound and entry_bound must be nonnegative")
        if self.m % 2:
            raise ValueError(f"model order must be even, got m={self.m}")


@dataclasses.dataclass(frozen=True)
class Theorem1Report:
    F: float
    F_positive: bool
    lhs_B: float
    rhs_B: float
    lhs_sigma: float
    rhs_sigma: float
    satisfied: bool

    def as_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return math.inf if num != 0 else math.nan
    return num / den


def theorem1_conditions(
    F: float,
    p0: float,
    n: int,
    m: int,
    sigma2_bound: float,
    entry_bound: float,
    c0: float = 1.0,
    c1: float = 1.0,
) -> Theorem1Report:
    """The sufficient conditions for exact recovery as plain arithmetic in ``(F, p0)``.

    ``(2^(1-m) F - p_0)^2 / B^2 >= 16 ln(n)/n - 8 ln(c0)/n`` and
    ``(2^(1-m) F - p_0)^2 / sigma^2 >= (4 / c1) n^(1-m)``, plus ``F > 0``.
    A zero bound with a nonzero numerator yields an infinite left side.
    """
    if c0 <= 0 or c1 <= 0:
        raise ValueError("c0 and c1 must be positive")
    F = float(F)
    gap = (2.0 ** (1 - m) * F - float(p0)) ** 2
    lhs_B = _ratio(gap, entry_bound**2)
    rhs_B = 16 * math.log(n) / n - 8 * math.log(c0) / n
    lhs_sigma = _ratio(gap, sigma2_bound)
    rhs_sigma = (4 / c1) * float(n) ** (1 - m)
    satisfied = F > 0 and lhs_B >= rhs_B and lhs_sigma >= rhs_sigma
    return Theorem1Report(F, F > 0, lhs_B, rhs_B, lhs_sigma, rhs_sigma, bool(satisfied))


def theorem1_check(spec: HpmSpec, c0: float = 1.0, c1: float = 1.0) -> Theorem1Report:
    """Evaluate the recovery conditions for a model record (``F`` from its ``p``)."""
    F = big_f(spec.m, spec.p)
    return theorem1_conditions(F, spec.p[0], spec.n, spec.m, spec.sigma2_bound, spec.entry_bound, c0, c1)


# -- samplers ----------------------------------------------------------------


def random_assignment(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random balanced +1/-1 labels."""
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and >= 2, got {n}")
    y = np.ones(n, dtype=np.int64)
    y[rng.permutation(n)[: n // 2]] = -1
    return y


def _repeated_mask(n: int, m: int) -> np.ndarray:
    idx = _layout(n, m).indices
    return np.any(idx[:, 1:] == idx[:, :-1], axis=1)


def _check_repeats(mode: str) -> str:
    if mode not in ("sample", "zero"):
        raise ValueError(f"repeats_mode must be 'sample' or 'zero', got {mode!r}")
    return mode


@dataclasses.dataclass(frozen=True)
class CountsParams:
    """High-order counts: ``BIN(T, alpha_compact[l'])`` per multi-index.

    ``l'`` is the size of the smaller label group within the index.
    """

    alpha_compact: tuple[float, ...]
    T: int = 1

    def __post_init__(self):
        alpha = check_probabilities(self.alpha_compact, "alpha")
        object.__setattr__(self, "alpha_compact", tuple(alpha.tolist()))
        if len(alpha) < 2:
            raise ValueError("alpha needs at least two entries")
        if int(self.T) != self.T or self.T < 1:
            raise ValueError(f"T must be a positive integer, got {self.T}")

    @property
    def m(self) -> int:
        return 2 * (len(self.alpha_compact) - 1)


def sample_counts(
    params: CountsParams, y_star: Any, rng: np.random.Generator, repeats_mode: RepeatsMode = "sample"
) -> SymmetricTensor:
    y_star = check_assignment(y_star, name="y_star")
    m = params.m
    n = y_star.size
    l = _positive_counts(y_star, m)
    probs = np.asarray(params.alpha_compact)[np.minimum(l, m - l)]
    values = rng.binomial(params.T, probs).astype(np.float64)
    if _check_repeats(repeats_mode) == "zero":
        values[_repeated_mask(n, m)] = 0.0
    return SymmetricTensor(n, m, values)


def _max_bernoulli_variance(alpha: np.ndarray) -> float:
    return float(np.max(alpha * (1 - alpha), initial=0.0))


def hpm_of_counts(params: CountsParams, n: int) -> HpmSpec:
    """Model record for the counts sampler (entrywise variance bound summed over n^m entries)."""
    m = params.m
    alpha = np.asarray(params.alpha_compact)
    p = p_from_alpha(params.T * expand_alpha(alpha, m), m)
    sigma2 = float(n) ** m * params.T * _max_bernoulli_variance(alpha)
    return HpmSpec(n, m, tuple(p), sigma2, float(params.T))


@dataclasses.dataclass(frozen=True)
class BisectionParams:
    q: float

    def __post_init__(self):
        object.__setattr__(self, "q", check_probability(self.q, "q", open_interval=True))


def sample_bisection(
    params: BisectionParams,
    y_star: Any,
    rng: np.random.Generator,
    m: int,
    repeats_mode: RepeatsMode = "sample",
) -> SymmetricTensor:
    """Each index slot keeps its label w.p. ``1 - q`` and flips it w.p. ``q``.

    The entry is 1 when all ``m`` resulting activations agree.
    """
    y_star = check_assignment(y_star, name="y_star")
    n = y_star.size
    idx = _layout(n, m).indices
    flips = rng.random(idx.shape) < params.q
    b = np.where(flips, -y_star[idx], y_star[idx])
    values = np.all(b == b[:, :1], axis=1).astype(np.float64)
    if _check_repeats(repeats_mode) == "zero":
        values[_repeated_mask(n, m)] = 0.0
    return SymmetricTensor(n, m, values)


def bisection_alpha(q: float, m: int) -> np.ndarray:
    """Exact ``P(all activations equal)`` per positive count, by enumerating all ``2^m`` flip patterns."""
    q = check_probability(q, "q", open_interval=True)
    alpha = np.zeros(m + 1)
    for l in range(m + 1):
        labels = np.array([1] * l + [-1] * (m - l))
        total = 0.0
        for flips in itertools.product((False, True), repeat=m):
            b = np.where(flips, -labels, labels)
            if np.all(b == b[0]):
                k = sum(flips)
                total += q**k * (1 - q) ** (m - k)
        alpha[l] = total
    return alpha


def hpm_of_bisection(params: BisectionParams, m: int, n: int) -> HpmSpec:
    alpha = bisection_alpha(params.q, m)
    p = p_from_alpha(alpha, m)
    return HpmSpec(n, m, tuple(p), float(n) ** m * _max_bernoulli_variance(alpha), 1.0)


@dataclasses.dataclass(frozen=True)
class CutsParams:
    """Hypergraph cuts over a 4-uniform counts hypergraph (``T = 1``)."""

    alpha_compact: tuple[float, ...]
    n: int

    def __post_init__(self):
        alpha = check_probabilities(self.alpha_compact, "alpha")
        if alpha.size != 3:
            raise ValueError(f"cuts model is fixed to m=4 and needs 3 compact weights, got {alpha.size}")
        object.__setattr__(self, "alpha_compact", tuple(alpha.tolist()))
        if self.n < 4:
            raise ValueError(f"cuts model needs n >= 4, got {self.n}")


def sample_cuts(params: CutsParams, y_star: Any, rng: np.random.Generator, m: int = 4) -> SymmetricTensor:
    """Cut size of every 4-subset: hyperedges meeting it, excluding itself.

    Repeated-index entries are zero.
    """
    if m != 4:
        raise ValueError(f"the cuts model is defined for m=4 only, got m={m}")
    y_star = check_assignment(y_star, params.n, name="y_star")
    n = y_star.size
    layout = _layout(n, 4)
    distinct = ~_repeated_mask(n, 4)
    subsets = layout.indices[distinct]
    l = (y_star[subsets] == 1).sum(axis=1)
    probs = np.asarray(params.alpha_compact)[np.minimum(l, 4 - l)]
    in_h = rng.random(subsets.shape[0]) < probs
    incidence = np.zeros((n, subsets.shape[0]))
    np.put_along_axis(incidence.T, subsets, 1.0, axis=1)
    # shared[e, s] > 0 iff hyperedge e touches subset s
    shared = incidence[:, in_h].T @ incidence
    cut = (shared > 0).sum(axis=0) - in_h
    values = np.zeros(layout.size)
    values[distinct] = cut
    return SymmetricTensor(n, 4, values)


def expected_cut(alpha_compact: Sequence[float], tuple_labels: Sequence[int], n_pos: int, n_neg: int) -> float:
    """Expected cut size of a 4-subset with the given labels, by linearity."""
    alpha = check_probabilities(alpha_compact, "alpha")
    labels = check_assignment(tuple_labels, 4, balanced=False, name="tuple_labels")
    if n_pos != n_neg:
        raise ValueError(f"groups must be balanced, got n_pos={n_pos}, n_neg={n_neg}")
    s_pos = int((labels == 1).sum())
    s_neg = 4 - s_pos
    if s_pos > n_pos or s_neg > n_neg:
        raise ValueError("tuple labels exceed the group sizes")
    total = 0.0
    for j in range(5):
        meeting = math.comb(n_pos, j) * math.comb(n_neg, 4 - j) - math.comb(n_pos - s_pos, j) * math.comb(
            n_neg - s_neg, 4 - j
        )
        total += alpha[min(j, 4 - j)] * meeting
    return total - alpha[min(s_pos, 4 - s_pos)]


def hpm_of_cuts(params: CutsParams) -> HpmSpec:
    """Model record for cuts; distinct-vertex expectations only.

    Repeated-index entries are zero, so the expansion is exact only off the
    repeated indices.  ``B`` is the largest possible cut size and the variance
    bound uses ``Var <= B^2 / 4`` per entry.
    """
    n = params.n
    half = n // 2
    alpha = np.array(
        [expected_cut(params.alpha_compact, [1] * l + [-1] * (4 - l), half, half) for l in range(5)]
    )
    p = p_from_alpha(alpha, 4)
    bound = float(math.comb(n, 4) - math.comb(n - 4, 4))
    return HpmSpec(n, 4, tuple(p), float(n) ** 4 * bound**2 / 4, bound)


# -- motifs ------------------------------------------------------------------

MOTIFS: dict[str, tuple[tuple[int, int], ...]] = {
    "cycle": ((0, 1), (1, 2), (2, 3), (3, 0)),
    "bifan": ((0, 2), (0, 3), (1, 2), (1, 3)),
    # top predator eats two intermediate species, both of which eat the basal one
    "food_chain": ((0, 1), (0, 2), (1, 3), (2, 3)),
}


def motif_adjacency(edges: Sequence[tuple[int, int]], m: int) -> np.ndarray:
    adj = np.zeros((m, m), dtype=np.int8)
    for i, j in edges:
        if i == j:
            raise ValueError(f"self-loop {i}->{j} is not allowed in a motif")
        adj[i, j] = 1
    return adj


def _check_square(adj: Any, name: str) -> np.ndarray:
    arr = np.asarray(adj)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be a square adjacency matrix, got shape {arr.shape}")
    if np.any(np.diag(arr)):
        raise ValueError(f"{name} has self-loops")
    return (arr != 0).astype(np.int8)


def _motif_images(motif: np.ndarray) -> set[bytes]:
    m = motif.shape[0]
    images = set()
    for perm in itertools.permutations(range(m)):
        image = np.zeros_like(motif)
        image[np.ix_(perm, perm)] = motif
        images.add(image.tobytes())
    return images


def motif_match(induced: Any, motif: Any) -> bool:
    """True iff some vertex permutation maps ``motif`` exactly onto ``induced``."""
    induced = _check_square(induced, "induced")
    motif = _check_square(motif, "motif")
    if induced.shape != motif.shape:
        raise ValueError(f"shape mismatch: {induced.shape} vs {motif.shape}")
    return induced.tobytes() in _motif_images(motif)


def _edge_probabilities(labels: np.ndarray, alpha4: Sequence[float]) -> np.ndarray:
    a11, a22, a12, a21 = check_probabilities(alpha4, "alpha4")
    src = labels[:, None] == 1
    dst = labels[None, :] == 1
    return np.where(src & dst, a11, np.where(~src & ~dst, a22, np.where(src, a12, a21)))


def motif_probability(motif: Any, tuple_labels: Sequence[int], alpha4: Sequence[float]) -> float:
    """Exact probability that entities with these labels induce ``motif``.

    The distinct permuted copies of the motif are disjoint events, so their
    probabilities add.
    """
    motif = _check_square(motif, "motif")
    m = motif.shape[0]
    if m > 5:
        raise ValueError(f"motif_probability enumerates m! permutations; m={m} is too large")
    labels = check_assignment(tuple_labels, m, balanced=False, name="tuple_labels")
    probs = _edge_probabilities(labels, alpha4)
    off = ~np.eye(m, dtype=bool)
    total = 0.0
    for raw in _motif_images(motif):
        image = np.frombuffer(raw, dtype=np.int8).reshape(m, m).astype(bool)
        total += float(np.prod(np.where(image, probs, 1 - probs)[off]))
    return total


@dataclasses.dataclass(frozen=True)
class MotifParams:
    motif: tuple[tuple[int, ...], ...]
    alpha4: tuple[float, float, float, float]

    def __post_init__(self):
        motif = _check_square(self.motif, "motif")
        object.__setattr__(self, "motif", tuple(map(tuple, motif.tolist())))
        alpha = check_probabilities(self.alpha4, "alpha4")
        if alpha.size != 4:
            raise ValueError(f"alpha4 needs 4 probabilities, got {alpha.size}")
        object.__setattr__(self, "alpha4", tuple(alpha.tolist()))

    @classmethod
    def from_edges(cls, edges: Sequence[tuple[int, int]], alpha4: Sequence[float], m: int = 4) -> MotifParams:
        return cls(tuple(map(tuple, motif_adjacency(edges, m).tolist())), tuple(alpha4))

    @property
    def m(self) -> int:
        return len(self.motif)


def sample_motif(params: MotifParams, y_star: Any, rng: np.random.Generator) -> SymmetricTensor:
    """Indicator that each ``m``-subset of distinct vertices induces the motif exactly.

    The directed graph is sampled once; repeated-index entries are zero.
    """
    y_star = check_assignment(y_star, name="y_star")
    n, m = y_star.size, params.m
    probs = _edge_probabilities(y_star, params.alpha4)
    graph = (rng.random((n, n)) < probs).astype(np.int8)
    np.fill_diagonal(graph, 0)
    layout = _layout(n, m)
    distinct = ~_repeated_mask(n, m)
    subsets = layout.indices[distinct]
    induced = graph[subsets[:, :, None], subsets[:, None, :]]
    codes = induced.reshape(subsets.shape[0], m * m) @ (1 << np.arange(m * m, dtype=np.int64))
    targets = [
        np.frombuffer(raw, dtype=np.int8).astype(np.int64) @ (1 << np.arange(m * m, dtype=np.int64))
        for raw in _motif_images(np.asarray(params.motif, dtype=np.int8))
    ]
    values = np.zeros(layout.size)
    values[distinct] = np.isin(codes, targets)
    return SymmetricTensor(n, m, values)


def hpm_of_motif(params: MotifParams, n: int) -> HpmSpec:
    """Model record for motifs, with per-class probabilities from exact enumeration.

    Only valid when every label class of the motif probability depends on
    the positive count alone (true for the symmetric parameter choices used
    here); the class representative puts the positive labels first.
    """
    m = params.m
    alpha = np.array(
        [motif_probability(params.motif, [1] * l + [-1] * (m - l), params.alpha4) for l in range(m + 1)]
    )
    p = p_from_alpha(alpha, m)
    return HpmSpec(n, m, tuple(p), float(n) ** m * _max_bernoulli_variance(alpha), 1.0)
