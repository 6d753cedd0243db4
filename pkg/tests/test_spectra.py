import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorcone.exceptions import NumericalFailure
from tensorcone.spectra import (
    AscentConfig,
    EigenEstimate,
    complement_basis,
    lambda1_constrained,
    lambda_tmax,
    lambda_tmin,
    min_eig_f1,
)
from tensorcone.tensor import SymmetricTensor, evaluate, frobenius, identity_tensor, rank_one, sym_dim, zeros

from conftest import random_tensor


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def sphere_probes(rng, count, n):
    x = rng.standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


class TestAscentConfig:
    def test_defaults_match_experiment(self):
        cfg = AscentConfig()
        assert cfg.step_gamma == 0.05 and cfg.max_iters == 20 and cfg.num_starts == 8

    @pytest.mark.parametrize(
        "kwargs", [{"step_gamma": 0.0}, {"num_starts": 0}, {"max_iters": 0}, {"stall_tol": -1.0}]
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            AscentConfig(**kwargs)

    def test_estimate_invariant(self):
        with pytest.raises(ValueError):
            EigenEstimate(value=0.5, vector=np.zeros(2), certified_negative=True)


class TestMinEigF1:
    def test_negative_rank_one_is_certified(self, rng):
        v = unit(rng.standard_normal(5))
        A = -rank_one(v, 4)
        est = min_eig_f1(A)
        assert est.certified_negative
        # the stop rule fires at the first negative iterate, so only the bracket is guaranteed
        assert -1.0 - 1e-9 <= est.value < 0
        assert np.linalg.norm(est.vector) == pytest.approx(1.0, abs=1e-9)
        assert evaluate(A, est.vector) == pytest.approx(est.value, rel=1e-12)

    def test_psd_rank_one(self, rng):
        est = min_eig_f1(rank_one(rng.standard_normal(4), 4))
        assert not est.certified_negative
        assert not np.any(est.vector)
        assert est.value == 0.0

    def test_identity(self):
        est = min_eig_f1(identity_tensor(6, 4))
        assert not est.certified_negative
        assert not np.any(est.vector)

    def test_odd_order_rejected(self):
        with pytest.raises(ValueError):
            min_eig_f1(zeros(3, 3))

    def test_non_finite_iterate(self):
        A = SymmetricTensor(2, 4, np.full(sym_dim(2, 4), 1e200))
        with pytest.raises(NumericalFailure):
            min_eig_f1(A)

    def test_seeded(self, rng):
        A = random_tensor(rng, 5, 4)
        a, b = min_eig_f1(A, AscentConfig(seed=3)), min_eig_f1(A, AscentConfig(seed=3))
        assert a.value == b.value
        np.testing.assert_array_equal(a.vector, b.vector)

    def test_history_length_bounded(self, rng):
        cfg = AscentConfig(max_iters=7, num_starts=3)
        est = min_eig_f1(identity_tensor(4, 4) + 0.1 * random_tensor(rng, 4, 4), cfg)
        assert len(est.history) == 3
        assert all(1 <= len(h) <= 8 for h in est.history)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 5))
def test_descent_is_monotone_until_stop(seed, n):
    rng = np.random.default_rng(seed)
    A = identity_tensor(n, 4) + 0.3 * random_tensor(rng, n, 4)
    cfg = AscentConfig(seed=seed % 1000)
    est = min_eig_f1(A, cfg)
    for trace in est.history:
        # the last recorded value is the one that may trigger a stop
        body = trace[:-1]
        assert np.all(np.diff(body) <= cfg.stall_tol)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 5))
def test_certified_estimates_re_evaluate_negative(seed, n):
    rng = np.random.default_rng(seed)
    A = random_tensor(rng, n, 4)
    est = min_eig_f1(A, AscentConfig(seed=seed % 1000))
    if est.certified_negative:
        assert evaluate(A, est.vector) < 0
        assert np.linalg.norm(est.vector) == pytest.approx(1.0, abs=1e-9)
    else:
        assert not np.any(est.vector)


class TestVariational:
    def test_rank_one_max(self, rng):
        u = unit(rng.standard_normal(4))
        assert lambda_tmax(rank_one(u, 4)) == pytest.approx(1.0, abs=1e-9)

    def test_zero(self):
        assert lambda_tmax(zeros(3, 4)) == 0.0
        assert lambda_tmin(zeros(3, 4)) == 0.0

    def test_random_probe_bracket(self, rng):
        A = random_tensor(rng, 3, 4)
        probes = evaluate(A, sphere_probes(rng, 200, 3))
        value = lambda_tmax(A)
        assert value >= probes.max() - 1e-12
        assert value <= frobenius(A) + 1e-9

    def test_min_of_negative_rank_one(self, rng):
        v = unit(rng.standard_normal(4))
        assert lambda_tmin(-rank_one(v, 4)) == pytest.approx(-1.0, abs=1e-8)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_identity_min(self, n):
        assert lambda_tmin(identity_tensor(n, 4)) == pytest.approx(n ** (1 - 4 / 2), abs=1e-8)

    def test_min_below_probes(self, rng):
        A = random_tensor(rng, 3, 4)
        value = lambda_tmin(A)
        assert value <= evaluate(A, sphere_probes(rng, 200, 3)).min() + 1e-12

    def test_return_vector(self, rng):
        A = random_tensor(rng, 4, 4)
        value, u = lambda_tmax(A, return_vector=True)
        assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-12)
        assert evaluate(A, u) == pytest.approx(value, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5), m=st.sampled_from([2, 3, 4]))
def test_tmax_below_frobenius(seed, n, m):
    A = random_tensor(np.random.default_rng(seed), n, m)
    assert lambda_tmax(A, AscentConfig(max_iters=300, num_starts=4)) <= frobenius(A) + 1e-9


class TestComplementBasis:
    def test_orthonormal_and_orthogonal(self, rng):
        forbidden = [np.ones(6), np.array([1, 1, 1, -1, -1, -1.0])]
        Q = complement_basis(forbidden, 6)
        assert Q.shape == (6, 4)
        np.testing.assert_allclose(Q.T @ Q, np.eye(4), atol=1e-12)
        for f in forbidden:
            np.testing.assert_allclose(Q.T @ f, 0, atol=1e-12)

    def test_rejects_spanning_or_dependent(self):
        with pytest.raises(ValueError):
            complement_basis([np.eye(2)[0], np.eye(2)[1]], 2)
        with pytest.raises(ValueError):
            complement_basis([np.ones(3), 2 * np.ones(3)], 3)
        with pytest.raises(ValueError):
            complement_basis([np.ones(4)], 3)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 8), k=st.integers(1, 2))
def test_complement_basis_property(seed, n, k):
    rng = np.random.default_rng(seed)
    forbidden = list(rng.standard_normal((k, n)))
    Q = complement_basis(forbidden, n)
    assert Q.shape == (n, n - k)
    np.testing.assert_allclose(Q.T @ Q, np.eye(n - k), atol=1e-12)
    for f in forbidden:
        np.testing.assert_allclose(Q.T @ f, 0, atol=1e-12 * max(1.0, np.linalg.norm(f)))


class TestConstrained:
    def test_ones_rank_one(self):
        y = np.array([1, -1, 1, -1.0])
        assert lambda1_constrained(rank_one(np.ones(4), 4), [np.ones(4), y]) == pytest.approx(0.0, abs=1e-12)

    def test_zero(self):
        assert lambda1_constrained(zeros(4, 4), [np.ones(4)]) == 0.0

    def test_identity_against_probes(self, rng):
        forbidden = [np.ones(4), np.array([1, 1, -1, -1.0])]
        value, u = lambda1_constrained(identity_tensor(4, 4), forbidden, return_vector=True)
        Q = complement_basis(forbidden, 4)
        w = sphere_probes(rng, 10_000, Q.shape[1])
        probes = evaluate(identity_tensor(4, 4), w @ Q.T)
        assert value > 0
        assert value <= probes.min() + 1e-9
        assert abs(u @ np.ones(4)) < 1e-12 and abs(u @ forbidden[1]) < 1e-12
