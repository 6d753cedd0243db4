"""scikit-learn style front end for the conic partitioner."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .spectra import AscentConfig
from .solver import Certificate, SolverConfig, agreement, certify, extract_assignment, objective, pgd_solve
from .validation import check_seed, check_tensor

__all__ = ["ConicPartitioner"]


class ConicPartitioner(ClusterMixin, BaseEstimator):
    """Balanced two-way partition of entities from an order-m affinity tensor.

    ``fit`` takes a :class:`~tensorcone.tensor.SymmetricTensor` (or a dense
    symmetric array) in place of a design matrix.  Labels are ``0/1``
    cluster ids as usual for sklearn clusterers; ``assignment_`` holds the
    same partition as ``+1/-1``.

    Parameters
    ----------
    zeta : float
        Gradient step on the agreement tensor.
    outer_iters, inner_iters, descent_iters : int
        Iteration counts of the projected gradient loop and its negative
        direction search.
    gamma : float
        Step of the negative direction search.
    n_starts : int
        Random starts per direction search.
    enforce_full_sigma2, balance_always : bool
        Projection variants; both off reproduces the reference loop.
    random_state : int or None
    """

    def __init__(
        self,
        zeta=0.05,
        outer_iters=100,
        inner_iters=40,
        descent_iters=20,
        gamma=0.05,
        n_starts=8,
        enforce_full_sigma2=False,
        balance_always=False,
        random_state=None,
    ):
        self.zeta = zeta
        self.outer_iters = outer_iters
        self.inner_iters = inner_iters
        self.descent_iters = descent_iters
        self.gamma = gamma
        self.n_starts = n_starts
        self.enforce_full_sigma2 = enforce_full_sigma2
        self.balance_always = balance_always
        self.random_state = random_state

    def _config(self) -> SolverConfig:
        seed = check_seed(self.random_state)
        return SolverConfig(
            zeta=self.zeta,
            outer_iters=self.outer_iters,
            inner_iters=self.inner_iters,
            descent_iters=self.descent_iters,
            ascent=AscentConfig(step_gamma=self.gamma, num_starts=self.n_starts),
            enforce_full_sigma2=self.enforce_full_sigma2,
            balance_always=self.balance_always,
            seed=seed,
        )

    def fit(self, X, y=None):
        W = check_tensor(X, even_order=True, name="X")
        cfg = self._config()
        result = pgd_solve(W, cfg)
        self.solver_config_ = cfg
        self.agreement_tensor_ = result.Y
        self.objective_ = result.objective
        self.trace_ = result.trace
        self.n_psd_corrections_ = result.psd_corrections
        self.assignment_ = extract_assignment(result.Y, cfg)
        self.labels_ = (self.assignment_ < 0).astype(np.int64)
        self.n_features_in_ = W.n
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_

    def score(self, X, y):
        """Agreement ``h`` of the fitted tensor with a ``+1/-1`` ground truth.

        ``X`` is accepted for API symmetry and must match the fitted shape.
        """
        check_is_fitted(self, "agreement_tensor_")
        W = check_tensor(X, even_order=True, name="X")
        if W.n != self.n_features_in_:
            raise ValueError(f"X has n={W.n}, but the estimator was fitted with n={self.n_features_in_}")
        return agreement(self.agreement_tensor_, y)

    def discrete_objective(self, X) -> float:
        check_is_fitted(self, "assignment_")
        return objective(check_tensor(X, even_order=True, name="X"), self.assignment_)

    def certify(self, X) -> Certificate:
        """Dual check of the fitted assignment against ``X`` (heuristic when positive)."""
        check_is_fitted(self, "assignment_")
        return certify(check_tensor(X, even_order=True, name="X"), self.assignment_, self.solver_config_)
