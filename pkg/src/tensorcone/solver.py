"""Projected-gradient conic solver, label extraction and dual certificates."""

from __future__ import annotations

import dataclasses
import itertools
import math
import time
from typing import Any, Literal

import numpy as np

from .exceptions import NumericalFailure
from .spectra import ESTIMATOR_DEFAULTS, AscentConfig, EigenEstimate, lambda1_constrained, lambda_tmax, min_eig_f1
from .tensor import SymmetricTensor, _layout, _monomials, contract, identity_tensor, inner, rank_one
from .validation import check_assignment, check_tensor

__all__ = [
    "SolverConfig",
    "SolveResult",
    "Certificate",
    "objective",
    "brute_force",
    "project_balance",
    "project_psd_step",
    "pgd_solve",
    "solve",
    "agreement",
    "extract_assignment",
    "build_dual",
    "certify",
    "BRUTE_FORCE_MAX_N",
]

BRUTE_FORCE_MAX_N = 16
Verdict = Literal["supports_optimality", "refutes", "inconclusive"]


@dataclasses.dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    ``descent_iters`` overrides ``ascent.max_iters`` and the per-call descent
    seeds are drawn from ``seed``; ``ascent`` supplies the descent step,
    number of starts and stall tolerance.
    """

    zeta: float = 0.05
    outer_iters: int = 100
    inner_iters: int = 40
    descent_iters: int = 20
    ascent: AscentConfig = AscentConfig()
    enforce_full_sigma2: bool = False
    balance_always: bool = False
    seed: int = 0
    certify_tol: float = 1e-8

    def __post_init__(self):
        if not (self.zeta > 0 and math.isfinite(self.zeta)):
            raise ValueError(f"zeta must be positive, got {self.zeta}")
        for name in ("outer_iters", "inner_iters", "descent_iters"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.certify_tol < 0:
            raise ValueError(f"certify_tol must be nonnegative, got {self.certify_tol}")

    def descent_config(self, seed: int) -> AscentConfig:
        return dataclasses.replace(self.ascent, max_iters=self.descent_iters, seed=int(seed))

    def estimator_config(self) -> AscentConfig:
        return dataclasses.replace(ESTIMATOR_DEFAULTS, seed=self.seed)


@dataclasses.dataclass
class SolveResult:
    Y: SymmetricTensor
    objective: float
    trace: list[dict[str, float]]
    y_hat: np.ndarray | None = None
    h: float | None = None
    wall_ms: float = 0.0

    @property
    def psd_corrections(self) -> int:
        return int(sum(row["psd_corrections"] for row in self.trace))


@dataclasses.dataclass
class Certificate:
    v_star: SymmetricTensor
    lambda1_estimate: float
    verdict: Verdict
    witness: np.ndarray
    heuristic: bool = True

    def as_dict(self) -> dict[str, Any]:
        return {
            "lambda1_estimate": self.lambda1_estimate,
            "verdict": self.verdict,
            "heuristic": self.heuristic,
            "witness": self.witness.tolist(),
        }


def objective(W: SymmetricTensor, y: Any) -> float:
    """``<W, y^(x)m>`` for a balanced assignment."""
    y = check_assignment(y, W.n)
    return inner(W, rank_one(y, W.m))


def _balanced_assignments(n: int) -> np.ndarray:
    """All balanced labelings with ``y[0] = +1``, in lexicographic order of the positive set."""
    rows = []
    for rest in itertools.combinations(range(1, n), n // 2 - 1):
        y = -np.ones(n, dtype=np.int64)
        y[0] = 1
        y[list(rest)] = 1
        rows.append(y)
    return np.array(rows)


def brute_force(W: SymmetricTensor, chunk: int = 256) -> tuple[np.ndarray, float, bool]:
    """Exhaustive maximizer of the discrete objective over balanced labelings.

    Returns ``(y_opt, value, tie)``; ``tie`` is set when a second labeling is
    within ``1e-12`` (relative) of the maximum.  Only ``y[0] = +1`` is
    enumerated since even ``m`` makes ``y`` and ``-y`` equivalent.
    """
    W = check_tensor(W, even_order=True)
    n = W.n
    if n % 2 or n < 2:
        raise ValueError(f"brute force needs an even n >= 2, got n={n}")
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got n={n}")
    ys = _balanced_assignments(n)
    coef = W.weights * W.values
    scores = np.concatenate(
        [_monomials(ys[s : s + chunk].astype(np.float64), W.indices) @ coef for s in range(0, len(ys), chunk)]
    )
    best = int(np.argmax(scores))
    value = float(scores[best])
    close = np.abs(scores - value) <= 1e-12 * max(1.0, abs(value))
    return ys[best].copy(), value, bool(close.sum() > 1)


def _balance_values(values: np.ndarray, n: int, m: int, full_sigma2: bool) -> np.ndarray:
    layout = _layout(n, m)
    out = values - float(layout.weights @ values) / float(n) ** m
    if full_sigma2:
        out[layout.even_mask] = 1.0
    else:
        out[layout.diagonal] = 1.0
    return out


def _final_balance(values: np.ndarray, n: int, m: int, full_sigma2: bool) -> np.ndarray:
    # joint projection: pin first, then shift only the free entries so the dense mean is zero
    layout = _layout(n, m)
    pinned = layout.even_mask if full_sigma2 else layout.diagonal
    free = np.ones(values.size, dtype=bool)
    free[pinned] = False
    out = values.copy()
    out[pinned] = 1.0
    free_weight = float(layout.weights[free].sum())
    if free_weight:
        out[free] -= float(layout.weights @ out) / free_weight
    return out


def project_balance(Y: SymmetricTensor, enforce_full_sigma2: bool = False) -> SymmetricTensor:
    """Remove the dense mean along the all-ones tensor, then pin the diagonal to 1.

    With ``enforce_full_sigma2`` every index with all-even multiplicities is pinned.
    """
    return Y.with_values(_balance_values(Y.values, Y.n, Y.m, enforce_full_sigma2))


def project_psd_step(Y: SymmetricTensor, estimate: EigenEstimate | np.ndarray) -> SymmetricTensor:
    """Rank-one correction ``Y - c v^(x)m`` when ``c = <Y, v^(x)m>`` is negative."""
    v = estimate.vector if isinstance(estimate, EigenEstimate) else np.asarray(estimate, dtype=np.float64)
    if not np.any(v):
        return Y
    r1 = rank_one(v, Y.m)
    c = inner(Y, r1)
    if c < 0:
        return Y.with_values(Y.values - c * r1.values)
    return Y


def pgd_solve(W: Any, cfg: SolverConfig | None = None) -> SolveResult:
    """Projected gradient ascent on ``<W, Y>`` over the relaxed cone.

    Starting from the identity tensor, each outer step adds ``zeta * W`` and
    then runs ``inner_iters`` rounds of: search for a negative direction ``v``,
    remove it with a rank-one correction, and rebalance.  The result carries
    only ``Y`` and diagnostics; see :func:`solve` for extraction.
    """
    cfg = cfg or SolverConfig()
    W = check_tensor(W, even_order=True)
    n, m = W.n, W.m
    if n % 2:
        raise ValueError(f"the solver needs an even n, got n={n}")
    layout = _layout(n, m)
    rng = np.random.default_rng(cfg.seed)
    seeds = rng.integers(0, 2**31, size=(cfg.outer_iters, cfg.inner_iters))
    step = cfg.zeta * W.values
    Y = identity_tensor(n, m).values.copy()
    trace = []
    start = time.perf_counter()
    for t in range(cfg.outer_iters):
        Y += step
        fixes = 0
        for k in range(cfg.inner_iters):
            est = min_eig_f1(SymmetricTensor(n, m, Y), cfg.descent_config(seeds[t, k]))
            v = est.vector
            if np.any(v):
                r1 = _monomials(v / np.linalg.norm(v), layout.indices)
                c = float(layout.weights @ (Y * r1))
                if c < 0:
                    Y -= c * r1
                    fixes += 1
                    Y = _balance_values(Y, n, m, cfg.enforce_full_sigma2)
                    continue
            if cfg.balance_always:
                Y = _balance_values(Y, n, m, cfg.enforce_full_sigma2)
        Y = _final_balance(Y, n, m, cfg.enforce_full_sigma2)
        if not np.all(np.isfinite(Y)):
            raise NumericalFailure(f"pgd_solve: non-finite iterate at outer iteration {t}")
        trace.append({"iteration": t, "objective": float(layout.weights @ (W.values * Y)), "psd_corrections": fixes})
    Yt = SymmetricTensor(n, m, Y)
    return SolveResult(
        Y=Yt,
        objective=inner(W, Yt),
        trace=trace,
        wall_ms=1000 * (time.perf_counter() - start),
    )


def agreement(Y: SymmetricTensor, y_star: Any) -> float:
    """``<Y, Y*> / <Y*, Y*>`` with ``Y* = y*^(x)m``; the denominator is ``n^m``."""
    y_star = check_assignment(y_star, Y.n, balanced=False, name="y_star")
    return inner(Y, rank_one(y_star, Y.m)) / float(Y.n) ** Y.m


def extract_assignment(Y: SymmetricTensor, cfg: SolverConfig | None = None) -> np.ndarray:
    """Round ``Y`` to a balanced labeling through its top sphere witness.

    Signs of the witness give the labels (zero counts as +1).  An unbalanced
    result is repaired by flipping majority labels with the smallest ``|u_i|``,
    lowest index first.  The output is normalized to ``y[0] = +1``.
    """
    cfg = cfg or SolverConfig()
    n = Y.n
    if n % 2:
        raise ValueError(f"extraction needs an even n, got n={n}")
    _, u = lambda_tmax(Y, cfg.estimator_config(), return_vector=True)
    y = np.where(u >= 0, 1, -1).astype(np.int64)
    excess = int(y.sum()) // 2
    if excess:
        majority = 1 if excess > 0 else -1
        candidates = np.flatnonzero(y == majority)
        order = candidates[np.lexsort((candidates, np.abs(u[candidates])))]
        y[order[: abs(excess)]] = -majority
    return y if y[0] == 1 else -y


def solve(W: Any, cfg: SolverConfig | None = None, y_star: Any = None) -> SolveResult:
    """:func:`pgd_solve` followed by extraction and, given ``y_star``, the agreement score."""
    cfg = cfg or SolverConfig()
    result = pgd_solve(W, cfg)
    result.y_hat = extract_assignment(result.Y, cfg)
    if y_star is not None:
        result.h = agreement(result.Y, y_star)
    return result


def build_dual(W: SymmetricTensor, y: Any) -> SymmetricTensor:
    """Diagonal dual candidate ``V*_{i..i} = y_i (W y^(m-1))_i``."""
    y = check_assignment(y, W.n)
    layout = _layout(W.n, W.m)
    values = np.zeros(layout.size)
    values[layout.diagonal] = y * contract(W, y)
    return SymmetricTensor(W.n, W.m, values)


def certify(W: Any, y: Any, cfg: SolverConfig | None = None) -> Certificate:
    """Estimate ``lambda_1(V* - W)`` over unit vectors orthogonal to ``1`` and ``y``.

    The estimate is an upper bound on the infimum: a negative value comes
    with a witness and refutes optimality of ``y``; a positive one is only
    supporting evidence.
    """
    cfg = cfg or SolverConfig()
    W = check_tensor(W, even_order=True)
    y = check_assignment(y, W.n)
    v_star = build_dual(W, y)
    value, u = lambda1_constrained(
        v_star - W, [np.ones(W.n), y.astype(np.float64)], cfg.estimator_config(), return_vector=True
    )
    if value < -cfg.certify_tol:
        verdict: Verdict = "refutes"
    elif value > cfg.certify_tol:
        verdict = "supports_optimality"
    else:
        verdict = "inconclusive"
    return Certificate(v_star=v_star, lambda1_estimate=float(value), verdict=verdict, witness=np.asarray(u))
