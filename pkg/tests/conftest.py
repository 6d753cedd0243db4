"""Shared fixtures and brute-force oracles.

The oracles deliberately avoid the package's storage tables: dense arrays
are filled by looping over every index tuple and sorting it.
"""

import itertools
import re

import numpy as np
import pytest

from tensorcone.tensor import SymmetricTensor, sym_dim


def random_tensor(rng, n, m, scale=1.0):
    return SymmetricTensor(n, m, scale * rng.standard_normal(sym_dim(n, m)))


def dense_oracle(A):
    """Dense array built by looking up the sorted form of every index tuple."""
    lookup = {tuple(map(int, row)): float(v) for row, v in zip(A.indices, A.values)}
    out = np.zeros((A.n,) * A.m)
    for index in itertools.product(range(A.n), repeat=A.m):
        out[index] = lookup[tuple(sorted(index))]
    return out


def dense_inner(Da, Db):
    total = 0.0
    for index in itertools.product(range(Da.shape[0]), repeat=Da.ndim):
        total += Da[index] * Db[index]
    return total


def dense_contract(D, x):
    n, m = D.shape[0], D.ndim
    out = np.zeros(n)
    for index in itertools.product(range(n), repeat=m):
        out[index[0]] += D[index] * np.prod([x[j] for j in index[1:]])
    return out


def dense_rank_one(u, m):
    out = np.asarray(u, dtype=float)
    for _ in range(m - 1):
        out = np.multiply.outer(out, u)
    return out


def balanced(n, rng):
    y = np.array([1] * (n // 2) + [-1] * (n // 2))
    return rng.permutation(y)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


STRONG = (0.9, 0.1, 0.0, 0.1, 0.9)
WEAK = (0.6, 0.4, 0.0, 0.4, 0.6)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, keyed by the test name."""
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            match = re.search(r"test_criterion_(\d+)_(\w+)", rep.nodeid)
            if not match or (outcome == "passed" and rep.when != "call"):
                continue
            number = int(match.group(1))
            props = dict(getattr(rep, "user_properties", ()))
            title = props.get("criterion", f"{number:>2} {match.group(2).replace('_', ' ')}")
            status = "PASS" if outcome == "passed" else "FAIL"
            if results.get(number, ("PASS",))[0] == "FAIL":
                continue
            results[number] = (status, title, props.get("detail", ""))
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            status, title, detail = results[number]
            terminalreporter.write_line(f"{status}  criterion {title}" + (f"  [{detail}]" if detail else ""))
