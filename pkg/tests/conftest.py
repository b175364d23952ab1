"""Shared fixtures and independent oracles for the test suite.

The LP oracle solves the selection game directly over the marginal
polytope with scipy.optimize.linprog and is completely independent of the
sweep implementation. It is the ground truth for optimal values in float
tests; exact tests use the package's own brute-force adversary enumeration
(which is itself tested against the LP).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from byzsel import Instance, normalize


def random_instance(
    rng: np.random.Generator,
    max_n: int = 12,
    exact: bool = False,
    integer: bool = False,
    max_value: float = 100.0,
    min_n: int = 2,
) -> Instance:
    """Draw a random valid instance: values, then a valid (t, ell) pair
    (0 <= t < n and 1 <= ell < n, so n is at least 2)."""
    n = int(rng.integers(min_n, max_n + 1))
    if integer or exact:
        vals = rng.integers(1, int(max_value) + 1, size=n).tolist()
    else:
        vals = (rng.random(n) * (max_value - 1e-3) + 1e-3).tolist()
    t = int(rng.integers(0, n))
    ell = int(rng.integers(1, n))
    return normalize(vals, t, ell, exact=exact)


def all_small_instances(rng: np.random.Generator, count: int, max_n: int = 7):
    """Yield (values, t, ell) over all valid (t, ell) pairs of random draws."""
    for _ in range(count):
        n = int(rng.integers(2, max_n + 1))
        vals = rng.integers(1, 50, size=n).tolist()
        for t in range(n):
            for ell in range(1, n):
                yield vals, t, ell


def lp_optimum(inst: Instance) -> float:
    """Exact LP over the marginal polytope: max z subject to
    z <= sum(v_i p_i) - sum_{i in B} v_i p_i for every size-t B,
    0 <= p <= 1, sum p <= ell. Variables are (z, p_1..p_n)."""
    from scipy.optimize import linprog

    v = np.asarray([float(x) for x in inst.values])
    n, t, ell = inst.n, inst.t, inst.ell
    a_ub, b_ub = [], []
    for byz in combinations(range(n), t):
        coef = v.copy()
        coef[list(byz)] = 0.0
        a_ub.append(np.concatenate([[1.0], -coef]))
        b_ub.append(0.0)
    a_ub.append(np.concatenate([[0.0], np.ones(n)]))
    b_ub.append(float(ell))
    res = linprog(
        c=np.concatenate([[-1.0], np.zeros(n)]),
        A_ub=np.asarray(a_ub),
        b_ub=np.asarray(b_ub),
        bounds=[(None, None)] + [(0.0, 1.0)] * n,
        method="highs",
    )
    assert res.status == 0, res.message
    return -float(res.fun)


def assert_rel_close(a: float, b: float, rel: float = 1e-9, abs_tol: float = 1e-12):
    assert abs(a - b) <= max(abs_tol, rel * max(abs(a), abs(b), 1.0)), (a, b)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)


@pytest.fixture
def intro_exact() -> Instance:
    return normalize([8, 7, 5, 4], 1, 1, exact=True)


@pytest.fixture
def intro_float() -> Instance:
    return normalize([8, 7, 5, 4], 1, 1)


@pytest.fixture
def figure_exact() -> Instance:
    return normalize([12, 8, 8, 6, 4, 3, 2], 1, 5, exact=True)


@pytest.fixture
def figure_float() -> Instance:
    return normalize([12, 8, 8, 6, 4, 3, 2], 1, 5)


def frac(a: int, b: int = 1) -> Fraction:
    return Fraction(a, b)
