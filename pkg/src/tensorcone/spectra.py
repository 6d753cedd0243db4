"""Tensor eigenvalue estimation on the unit sphere.

Three estimators, all multistart and all returning the witness vector they
achieved so the caller can re-evaluate it independently:

* :func:`min_eig_f1` searches for a direction with ``<A, x^m> < 0`` by plain
  gradient descent on ``f1(x) = <I, x^m>^2 / (2m) + <A, x^m> / m`` (Han's
  unconstrained formulation).  Used by the solver to detect PSD violations.
* :func:`lambda_tmax` / :func:`lambda_tmin` approximate the extreme
  variational eigenvalues with shifted projected-gradient ascent.
* :func:`lambda1_constrained` minimizes over unit vectors orthogonal to a
  given set, e.g. ``{1, y}`` for the dual certificate.

None of these are exact: ``lambda_tmax`` is a lower bound on the true
supremum, ``lambda_tmin`` and ``lambda1_constrained`` are upper bounds on the
true infimum.
"""

from __future__ import annotations

import dataclasses
from typing import Any, Sequence

import numpy as np

from .exceptions import NumericalFailure
from .tensor import Contraction, SymmetricTensor, frobenius

__all__ = [
    "AscentConfig",
    "EigenEstimate",
    "min_eig_f1",
    "lambda_tmax",
    "lambda_tmin",
    "lambda1_constrained",
    "complement_basis",
    "ESTIMATOR_DEFAULTS",
]


@dataclasses.dataclass(frozen=True)
class AscentConfig:
    """Settings for the sphere searches.

    ``step_gamma`` is the fixed descent step of :func:`min_eig_f1`.  The
    variational estimators pick their own step from the tensor norm and only
    use ``max_iters``, ``num_starts``, ``seed`` and ``stall_tol`` (as a
    convergence tolerance).
    """

    step_gamma: float = 0.05
    max_iters: int = 20
    num_starts: int = 8
    seed: int = 0
    stall_tol: float = 1e-12

    def __post_init__(self):
        if not self.step_gamma > 0:
            raise ValueError(f"step_gamma must be positive, got {self.step_gamma}")
        if self.num_starts < 1:
            raise ValueError(f"num_starts must be >= 1, got {self.num_starts}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.stall_tol > 0:
            raise ValueError(f"stall_tol must be positive, got {self.stall_tol}")


# The Algorithm-2 defaults (20 iterations) are far too short for converging
# a variational estimate; the estimators fall back to these instead.
ESTIMATOR_DEFAULTS = AscentConfig(max_iters=2000, num_starts=16, stall_tol=1e-15)


@dataclasses.dataclass
class EigenEstimate:
    value: float
    vector: np.ndarray
    certified_negative: bool
    history: list[np.ndarray] = dataclasses.field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.certified_negative and not self.value < 0:
            raise ValueError("a certified-negative estimate needs a negative value")


def _start_points(count: int, dim: int, seed: int) -> np.ndarray:
    # One stream per start so a start's initial point does not depend on how
    # many other starts run.
    rows = [np.random.default_rng(seed + s).standard_normal(dim) for s in range(count)]
    x = np.array(rows).reshape(count, dim)
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def min_eig_f1(A: SymmetricTensor, cfg: AscentConfig | None = None) -> EigenEstimate:
    """Search for a negative tensor eigenvector of ``A``.

    Each start descends ``f1`` with step ``cfg.step_gamma`` and stops as soon
    as ``f1 < 0`` or ``<A, x^m> < 0`` (a negative direction is certified), when
    ``f1`` grows by more than ``cfg.stall_tol``, or after ``cfg.max_iters``
    steps.  The most negative normalized value over certified starts is
    returned; without any certified start the vector is zero.
    """
    cfg = cfg or AscentConfig()
    m = A.m
    if m % 2:
        raise ValueError(f"min_eig_f1 needs an even order, got m={m}")
    op = Contraction(A)
    x = _start_points(cfg.num_starts, A.n, cfg.seed)
    starts = cfg.num_starts
    f_prev = np.full(starts, np.inf)
    active = np.ones(starts, dtype=bool)
    certified = np.zeros(starts, dtype=bool)
    trace = np.full((cfg.max_iters + 1, starts), np.nan)

    # overflow is detected through the finiteness check below
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(cfg.max_iters + 1):
            g = op(x)
            ax = np.einsum("ij,ij->i", x, g)
            xm1 = x.copy()
            for _ in range(m - 2):
                xm1 *= x
            ix = np.einsum("ij,ij->i", xm1, x)
            f1 = ix * ix / (2 * m) + ax / m
            if not np.all(np.isfinite(f1[active])):
                raise NumericalFailure(f"min_eig_f1: non-finite objective at descent iteration {it}")
            trace[it, active] = f1[active]
            negative = active & ((f1 < 0) | (ax < 0))
            stalled = active & ~negative & (f1 > f_prev + cfg.stall_tol)
            certified |= negative
            active &= ~(negative | stalled)
            # On the last pass the iterate is only evaluated, never stepped.
            if it == cfg.max_iters or not active.any():
                break
            step = x - cfg.step_gamma * (ix[:, None] * xm1 + g)
            x = np.where(active[:, None], step, x)
            f_prev = f1

    history = [col[~np.isnan(col)] for col in trace.T]
    best_value, best_vec = 0.0, np.zeros(A.n)
    for k in np.flatnonzero(certified):
        norm = np.linalg.norm(x[k])
        if norm == 0:
            continue
        unit = x[k] / norm
        value = float(unit @ op(unit))
        if value < best_value:
            best_value, best_vec = value, unit
    return EigenEstimate(
        value=best_value,
        vector=best_vec,
        certified_negative=best_value < 0,
        history=history,
    )


def _sphere_search(A: SymmetricTensor, cfg: AscentConfig, sign: float, basis: np.ndarray | None = None):
    """Maximize ``sign * <A, (Q w)^m>`` over unit ``w``.

    Shifted power iteration ``w <- normalize(sign * Q^T A (Qw)^(m-1) + shift * w)``,
    i.e. projected gradient ascent with step ``1 / (m * shift)``.  With
    ``shift = max(m, 2) * ||A||_F``, strictly above the convexity threshold
    ``(m - 1) * ||A||_F``, the objective is monotone along each run and the
    update never vanishes because ``||A u^(m-1)|| <= ||A||_F``.
    Returns ``(best_value, best_unit_vector)`` in the original coordinates,
    where ``best_value`` is ``<A, u^m>`` without the sign.
    """
    n, m = A.n, A.m
    Q = np.eye(n) if basis is None else basis
    dim = Q.shape[1]
    w = _start_points(cfg.num_starts, dim, cfg.seed)
    norm = frobenius(A)
    if norm == 0.0:
        u = w[0] @ Q.T
        return 0.0, u / np.linalg.norm(u)
    op = Contraction(A)
    shift = max(m, 2) * norm
    best = -np.inf
    best_u = None
    prev = np.full(cfg.num_starts, -np.inf)
    for it in range(cfg.max_iters):
        u = w @ Q.T
        g = op(u)
        vals = sign * np.einsum("ij,ij->i", u, g)
        if not np.all(np.isfinite(vals)):
            raise NumericalFailure(f"sphere search: non-finite value at iteration {it}")
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, best_u = float(vals[k]), u[k].copy()
        if np.all(np.abs(vals - prev) <= cfg.stall_tol * max(1.0, norm)):
            break
        prev = vals
        w = sign * (g @ Q) + shift * w
        w /= np.linalg.norm(w, axis=1, keepdims=True)
    return sign * best, best_u


def lambda_tmax(A: SymmetricTensor, cfg: AscentConfig | None = None, *, return_vector: bool = False):
    """Best ``<A, u^m>`` found over unit ``u``; a lower bound on the true maximum."""
    value, u = _sphere_search(A, cfg or ESTIMATOR_DEFAULTS, 1.0)
    return (value, u) if return_vector else value


def lambda_tmin(A: SymmetricTensor, cfg: AscentConfig | None = None, *, return_vector: bool = False):
    """Smallest ``<A, u^m>`` found over unit ``u``; an upper bound on the true minimum."""
    value, u = _sphere_search(A, cfg or ESTIMATOR_DEFAULTS, -1.0)
    return (value, u) if return_vector else value


def complement_basis(forbidden: Sequence[Any], n: int, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (as columns) of the complement of ``span(forbidden)``.

    Gram-Schmidt (two passes per vector) against the forbidden set, then over
    the standard basis vectors in index order; a candidate is kept when its
    residual norm exceeds ``tol``.
    """
    vecs = [np.asarray(v, dtype=np.float64).reshape(-1) for v in forbidden]
    for v in vecs:
        if v.shape != (n,):
            raise ValueError(f"forbidden vector has length {v.shape[0]}, expected {n}")
    if len(vecs) >= n:
        raise ValueError("forbidden vectors span the whole space")
    ortho: list[np.ndarray] = []

    def residual(v: np.ndarray) -> np.ndarray:
        r = v.copy()
        for _ in range(2):
            for q in ortho:
                r -= (q @ r) * q
        return r

    for v in vecs:
        r = residual(v)
        norm = np.linalg.norm(r)
        if norm <= tol * max(1.0, np.linalg.norm(v)):
            raise ValueError("forbidden vectors are linearly dependent")
        ortho.append(r / norm)
    basis = []
    for j in range(n):
        if len(basis) == n - len(vecs):
            break
        r = residual(np.eye(n)[j])
        norm = np.linalg.norm(r)
        if norm > tol:
            q = r / norm
            ortho.append(q)
            basis.append(q)
    return np.array(basis).T


def lambda1_constrained(
    A: SymmetricTensor,
    forbidden: Sequence[Any],
    cfg: AscentConfig | None = None,
    *,
    return_vector: bool = False,
):
    """Smallest ``<A, u^m>`` found over unit ``u`` orthogonal to every forbidden vector.

    An upper bound on the infimum, so a positive value is evidence rather
    than proof that the infimum is positive.
    """
    Q = complement_basis(forbidden, A.n)
    value, u = _sphere_search(A, cfg or ESTIMATOR_DEFAULTS, -1.0, Q)
    return (value, u) if return_vector else value
