"""Compiled hot loops: the float-mode breakpoint sweep and MWU self-play.

Kept in a separate module so importing the library does not pay the numba
import cost; callers import this lazily. The sweep kernel mirrors the pure
python sweep statement for statement except that reciprocal and value
prefix sums are carried as running scalars behind the two monotone
pointers instead of precomputed arrays, so solving allocates nothing
proportional to n beyond the output marginals. Tests assert the compiled
and interpreted paths agree.
"""

from __future__ import annotations

import numba
import numpy as np

# same guard as _numeric.FLOOR_GUARD (duplicated: kernels cannot close over
# python module attributes without freezing them anyway)
_FLOOR_GUARD = 1e-12


@numba.njit(cache=True)
def sweep_best_kernel(v, t, ell):
    """Best breakpoint of the sweep over presorted float64 values.

    Args:
        v: values, descending, shape (n,).
        t, ell: thresholds.

    Returns:
        (level, value, at_level, saturated) of the maximizing breakpoint;
        ties resolve toward the larger level (the first maximum, since
        levels strictly decrease).
    """
    n = v.shape[0]

    # R_x denotes sum of 1/v_j over j < x, V_x the sum of v_j over j < x.
    r_t1 = 0.0
    for j in range(t + 1):
        r_t1 += 1.0 / v[j]
    budget_level = ell / r_t1
    E = v[t] if v[t] < budget_level else budget_level

    K = t + 1
    rK = r_t1
    while K < n and v[K] >= E:
        rK += 1.0 / v[K]
        K += 1

    cost = E * rK
    if cost >= ell:
        i = t + 1
        ri = r_t1
        while i < K:
            nxt = ri + 1.0 / v[i]
            if E * nxt <= ell + _FLOOR_GUARD:
                ri = nxt
                i += 1
            else:
                break
        p_next = ell - E * ri
    else:
        extra = ell - cost
        m = int(extra + _FLOOR_GUARD)
        i = K + m
        if i >= n:
            i = n
            p_next = 0.0
        else:
            p_next = extra - m
    if p_next < 0.0:
        p_next = 0.0
    elif p_next > 1.0:
        p_next = 1.0

    # running sums behind the slower pointers
    ri1 = 0.0  # R_{i+1}, meaningful only while i < n
    Vi = 0.0  # V_i
    for j in range(min(i + 1, n)):
        ri1 += 1.0 / v[j]
        if j < i:
            Vi += v[j]

    L = i if i < K else K
    VL = 0.0  # V_L
    for j in range(L):
        VL += v[j]

    tail = v[i] * p_next if i < n else 0.0
    X = (L - t) * E + (Vi - VL) + tail
    last_level = E
    last_value = X
    best_level = E
    best_value = X
    best_k = L
    best_i = i

    steps = 0
    cap = 2 * n + 4
    while i < n:
        steps += 1
        if steps > cap:
            break
        if i >= K:
            v_next = v[K] if K < n else -1.0
            eps_sat = (1.0 - p_next) / rK
            eps_cross = E - v_next
            eps = eps_sat if eps_sat <= eps_cross else eps_cross
            if eps < 0.0:
                eps = 0.0
            E = E - eps
            if eps_sat <= eps_cross:
                Vi += v[i]
                i += 1
                if i < n:
                    ri1 += 1.0 / v[i]
            if i < n:
                p_next = ell - E * rK - (i - K)
            else:
                p_next = 0.0
        else:
            level_next = ell / ri1
            if level_next < E:
                E = level_next
            Vi += v[i]
            i += 1
            if i < n:
                ri1 += 1.0 / v[i]
            p_next = 0.0
        while K < n and v[K] >= E:
            rK += 1.0 / v[K]
            K += 1
        if p_next < 0.0:
            p_next = 0.0
        elif p_next > 1.0:
            p_next = 1.0
        newL = i if i < K else K
        while L < newL:
            VL += v[L]
            L += 1
        tail = v[i] * p_next if i < n else 0.0
        X = (L - t) * E + (Vi - VL) + tail
        if E < last_level:
            last_level = E
            last_value = X
            emit = True
        elif X > last_value:
            last_value = X
            emit = True
        else:
            emit = False
        if emit and X > best_value:
            best_level = E
            best_value = X
            best_k = L
            best_i = i
    return best_level, best_value, best_k, best_i


@numba.njit(cache=True)
def fill_value_kernel(v, E, t, ell):
    """Maximal filling at level E and its worst-case value, in one pass.

    At any feasible level the first t+1 products equal E and products are
    nonincreasing, so the adversary removes t * E from the product total.

    Returns:
        (p, value): marginals array and worst-case expected payoff.
    """
    n = v.shape[0]
    p = np.empty(n, np.float64)
    cum = 0.0
    total = 0.0
    for j in range(n):
        cap = E / v[j]
        if cap > 1.0:
            cap = 1.0
        q = ell - cum
        if q > cap:
            q = cap
        if q < 0.0:
            q = 0.0
        p[j] = q
        cum += q
        total += v[j] * q
    return p, total - t * E


@numba.njit(cache=True)
def mwu_kernel(M, eta, iterations):
    """Simultaneous multiplicative-weights self-play on a payoff matrix.

    The row player maximizes, the column player minimizes. Both run Hedge
    with the same step size on cumulative payoffs; the returned strategies
    are the iteration averages, whose exact best responses bracket the game
    value.

    Args:
        M: payoff matrix normalized into [0, 1], shape (rows, cols).
        eta: step size.
        iterations: number of rounds, >= 1.

    Returns:
        (row_avg, col_avg): averaged mixed strategies.
    """
    rows, cols = M.shape
    srow = np.zeros(rows, np.float64)
    scol = np.zeros(cols, np.float64)
    row_avg = np.zeros(rows, np.float64)
    col_avg = np.zeros(cols, np.float64)
    p = np.empty(rows, np.float64)
    q = np.empty(cols, np.float64)
    for _ in range(iterations):
        m = srow[0]
        for r in range(rows):
            if srow[r] > m:
                m = srow[r]
        z = 0.0
        for r in range(rows):
            p[r] = np.exp(eta * (srow[r] - m))
            z += p[r]
        for r in range(rows):
            p[r] /= z
            row_avg[r] += p[r]
        m = scol[0]
        for c in range(cols):
            if scol[c] < m:
                m = scol[c]
        z = 0.0
        for c in range(cols):
            q[c] = np.exp(-eta * (scol[c] - m))
            z += q[c]
        for c in range(cols):
            q[c] /= z
            col_avg[c] += q[c]
        for r in range(rows):
            acc = 0.0
            for c in range(cols):
                acc += M[r, c] * q[c]
            srow[r] += acc
        for c in range(cols):
            acc = 0.0
            for r in range(rows):
                acc += M[r, c] * p[r]
            scol[c] += acc
    for r in range(rows):
        row_avg[r] /= iterations
    for c in range(cols):
        col_avg[c] /= iterations
    return row_avg, col_avg
