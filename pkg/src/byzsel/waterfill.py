"""General-l solver: water-filling construction and the breakpoint sweep.

Picture box i as a container of width 1/v_i and height v_i (unit area), so
pouring p_i units of probability mass into it raises its water level to
h_i = v_i * p_i. A pseudo-distribution is nice at level E when the first
t+1 containers sit exactly at level E, every following container up to some
index i is saturated (p = min{1, E/v}), container i+1 holds the leftover
strictly below its saturation level, and everything later is empty. The
maximal E-nice vector fills containers left to right at level cap E until
the budget l runs out, and some maximal E-nice vector attains the optimum.

The optimum over E is found by sweeping E downward from

    e_max = min{ v_{t+1}, l / sum_{j<=t+1} 1/v_j }

to the first level at which all n containers are used. The worst-case value
is piecewise linear in E, so only the breakpoints where the active-container
structure changes need to be visited; there are at most 2n of them. The
sweep tracks two counters with opposite monotonicity:

    K = number of boxes with v_j >= E (grows as E falls),
    i = number of boxes filled to their cap (grows as E falls),

and the partially filled box i+1 behaves differently depending on which side
of K it lies:

  * i >= K (spill regime): box i+1 has v < E, so lowering E by eps frees
    eps * sum_{j<=K} 1/v_j units of mass from the level set, which pour into
    box i+1 until it saturates (eps = (1 - p_next)/R_K) or a new box reaches
    the level set (eps = E - v_{K+1}), whichever is sooner.
  * i < K (budget regime): box i+1 itself still has v >= E, so the whole
    budget l is spread at a common level over boxes 1..i+1; the next event
    is directly at E' = l / R_{i+1} where box i+1 reaches its cap.

At any state the value has the closed form

    val(E) = (L - t) * E + (V_i - V_L) + v_{i+1} * p_next,  L = min(i, K),

with R and V the prefix sums of 1/v_j and v_j. Everything is evaluated from
these prefix sums, so the whole sweep costs O(n) after sorting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._numeric import FLOOR_GUARD, REL_TOL, guarded_floor
from .errors import LevelOutOfRange
from .model import Instance, Marginals, SelectedSet, value_of_marginals

__all__ = [
    "Breakpoint",
    "SweepState",
    "e_max",
    "maximal_nice",
    "sweep",
    "best_breakpoint",
    "solve",
    "deterministic_baseline",
    "niceness_violations",
    "chain_violations",
]

# float-mode solve switches to the compiled kernel at this size
FAST_PATH_MIN_N = 4096
# hard iteration cap; the sweep provably needs at most 2n + 2 steps
_SWEEP_CAP_SLACK = 4


@dataclass(frozen=True, eq=False)
class Breakpoint:
    """One vertex of the piecewise-linear value curve.

    Fields:
        level: the water level E, within [0, e_max].
        value: worst-case expected payoff of maximal_nice(level).
        at_level: count of boxes pinned at the common level (t+1 <= at_level
            <= saturated); every such box j has v_j >= level.
        saturated: count of boxes filled to their cap min{1, E/v}, the i of
            the (E, i)-nice conditions.
    """

    level: object
    value: object
    at_level: int
    saturated: int


@dataclass(frozen=True, eq=False)
class SweepState:
    """Mutable-in-spirit loop state captured per breakpoint.

    Invariant: (level, value, at_level) describe the current breakpoint
    exactly as Breakpoint does; leftover is the mass in box saturated+1,
    always in [0, 1) and strictly below that box's cap.
    """

    level: object
    value: object
    at_level: int
    saturated: int
    leftover: object


def _reciprocal_prefix(inst: Instance):
    """Prefix sums R[k] = sum_{j<k} 1/v_j and V[k] = sum_{j<k} v_j."""
    v = inst.values
    n = inst.n
    if inst.exact:
        R = [Fraction(0)] * (n + 1)
        V = [Fraction(0)] * (n + 1)
        for j in range(n):
            R[j + 1] = R[j] + 1 / v[j]
            V[j + 1] = V[j] + v[j]
        return R, V
    R = np.empty(n + 1, dtype=np.float64)
    V = np.empty(n + 1, dtype=np.float64)
    R[0] = V[0] = 0.0
    np.cumsum(1.0 / v, out=R[1:])
    np.cumsum(v, out=V[1:])
    return R, V


def e_max(inst: Instance):
    """Largest feasible water level min{v_{t+1}, l / sum_{j<=t+1} 1/v_j}."""
    t, v = inst.t, inst.values
    if inst.exact:
        recip = sum((1 / v[j] for j in range(t + 1)), start=Fraction(0))
        return min(v[t], inst.ell / recip)
    recip = float(np.sum(1.0 / np.asarray(v[: t + 1])))
    return min(float(v[t]), inst.ell / recip)


def maximal_nice(inst: Instance, level, check: bool = True) -> Marginals:
    """The unique maximal E-nice pseudo-distribution at the given level.

    Fills boxes left to right: each gets min{1, E/v} until the budget l is
    exhausted; the first box that cannot be filled to its cap receives all
    remaining mass; later boxes get 0.

    Raises:
        LevelOutOfRange: level < 0 or level > e_max (float mode tolerates
            and clamps a relative 1e-9 overshoot).
    """
    top = e_max(inst)
    if check:
        if level < 0:
            raise LevelOutOfRange(f"level {level} below 0")
        if level > top:
            if inst.exact or float(level) > float(top) * (1 + REL_TOL) + 1e-300:
                raise LevelOutOfRange(f"level {level} above e_max {top}")
            level = top
    v, ell, n = inst.values, inst.ell, inst.n
    if not inst.exact:
        cap = np.minimum(1.0, float(level) / v)
        cum = np.cumsum(cap)
        p = np.clip(ell - (cum - cap), 0.0, cap)
        p.flags.writeable = False
        return Marginals(p)
    budget = Fraction(ell)
    out = []
    level = Fraction(level)
    for j in range(n):
        cap = min(Fraction(1), level / v[j])
        take = cap if cap <= budget else budget
        out.append(take)
        budget -= take
    return Marginals(tuple(out))


def _initial_state(inst: Instance, R):
    """Waterfill at e_max in O(log n): returns (E, K, i, p_next)."""
    t, ell, n, v = inst.t, inst.ell, inst.n, inst.values
    exact = inst.exact
    budget_level = ell / R[t + 1]
    E = v[t] if v[t] < budget_level else budget_level
    K = t + 1
    while K < n and v[K] >= E:
        K += 1
    cost = E * R[K]
    guard = 0 if exact else FLOOR_GUARD
    if cost >= ell:
        # budget regime: largest i <= K with E * R[i] <= l
        lo, hi = t + 1, K
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if E * R[mid] <= ell + guard:
                lo = mid
            else:
                hi = mid - 1
        i = lo
        p_next = ell - E * R[i]
    else:
        extra = ell - cost
        m = guarded_floor(extra)
        i = K + m
        if i >= n:
            i, p_next = n, _zero(exact)
        else:
            p_next = extra - m
    return E, K, i, _clamp_leftover(p_next, exact)


def _zero(exact: bool):
    return Fraction(0) if exact else 0.0


def _clamp_leftover(p_next, exact: bool):
    if exact:
        return p_next
    return min(max(float(p_next), 0.0), 1.0)


def _state_value(inst, V, E, K, i, p_next):
    L = i if i < K else K
    tail = inst.values[i] * p_next if i < inst.n else _zero(inst.exact)
    return (L - inst.t) * E + (V[i] - V[L]) + tail, L


def _sweep_states(inst: Instance):
    """Yield SweepState per breakpoint, from e_max down to the first i = n."""
    R, V = _reciprocal_prefix(inst)
    t, ell, n, v = inst.t, inst.ell, inst.n, inst.values
    exact = inst.exact
    E, K, i, p_next = _initial_state(inst, R)
    value, L = _state_value(inst, V, E, K, i, p_next)
    states = [SweepState(level=E, value=value, at_level=L, saturated=i, leftover=p_next)]
    cap = 2 * n + _SWEEP_CAP_SLACK
    steps = 0
    while i < n:
        steps += 1
        if steps > cap:
            raise RuntimeError("sweep exceeded its 2n iteration bound")
        if i >= K:
            # spill regime: level set drains into full-type box i+1
            v_next = v[K] if K < n else -1
            eps_sat = (1 - p_next) / R[K]
            eps_cross = E - v_next
            eps = eps_sat if eps_sat <= eps_cross else eps_cross
            if not exact and eps < 0:
                eps = _zero(exact)
            E = E - eps
            if eps_sat <= eps_cross:
                i += 1
            p_next = ell - E * R[K] - (i - K) if i < n else _zero(exact)
        else:
            # budget regime: all mass at one level over boxes 1..i+1
            level_next = ell / R[i + 1]
            if level_next < E:
                E = level_next
            i += 1
            p_next = _zero(exact)
        while K < n and v[K] >= E:
            K += 1
        p_next = _clamp_leftover(p_next, exact)
        value, L = _state_value(inst, V, E, K, i, p_next)
        if E < states[-1].level:
            states.append(
                SweepState(level=E, value=value, at_level=L, saturated=i, leftover=p_next)
            )
        elif value > states[-1].value:
            # zero-length interval consumed; keep the better representation
            states[-1] = SweepState(
                level=E, value=value, at_level=L, saturated=i, leftover=p_next
            )
    return states


def sweep(inst: Instance) -> list[Breakpoint]:
    """All breakpoints from e_max down to the first using every box.

    The returned levels are strictly decreasing; the list has at most 2n
    entries. The value curve is linear between consecutive breakpoints.
    """
    return [
        Breakpoint(level=s.level, value=s.value, at_level=s.at_level, saturated=s.saturated)
        for s in _sweep_states(inst)
    ]


def _kernel_best(inst: Instance) -> Breakpoint:
    from . import _kernels

    v = np.asarray(inst.values, dtype=np.float64)
    level, value, at_level, saturated = _kernels.sweep_best_kernel(
        v, inst.t, inst.ell
    )
    return Breakpoint(
        level=float(level),
        value=float(value),
        at_level=int(at_level),
        saturated=int(saturated),
    )


def best_breakpoint(inst: Instance, use_kernel: bool | None = None) -> Breakpoint:
    """Breakpoint of maximum value; ties resolve toward the larger level.

    Args:
        use_kernel: force (True) or forbid (False) the compiled float-mode
            kernel; None picks it automatically for large float instances.
    """
    if use_kernel is None:
        use_kernel = (not inst.exact) and inst.n >= FAST_PATH_MIN_N
    elif use_kernel and inst.exact:
        raise ValueError("the compiled kernel only supports float instances")
    if use_kernel:
        return _kernel_best(inst)
    best = None
    for s in _sweep_states(inst):
        if best is None or s.value > best.value:
            best = s
    return Breakpoint(
        level=best.level, value=best.value, at_level=best.at_level, saturated=best.saturated
    )


def solve(inst: Instance, use_kernel: bool | None = None):
    """Optimal marginals and their worst-case expected payoff.

    Returns:
        (Marginals, value): maximal_nice at the best breakpoint level and
        value_of_marginals of exactly that vector. The marginal mass may sum
        to less than l; pad_marginals tops it up without losing value.
    """
    if use_kernel is None:
        use_kernel = (not inst.exact) and inst.n >= FAST_PATH_MIN_N
    bp = best_breakpoint(inst, use_kernel=use_kernel)
    if use_kernel:
        from . import _kernels

        arr, value = _kernels.fill_value_kernel(
            np.asarray(inst.values, dtype=np.float64),
            bp.level,
            inst.t,
            inst.ell,
        )
        arr.flags.writeable = False
        return Marginals(arr), float(value)
    p = maximal_nice(inst, bp.level, check=False)
    return p, value_of_marginals(p, inst, check=False)


def deterministic_baseline(inst: Instance):
    """Best fixed selection: the top-l boxes.

    Their guaranteed payoff is v_{t+1} + ... + v_l when t < l (the adversary
    empties the t most valuable opened boxes) and 0 otherwise.

    Returns:
        (SelectedSet, value).
    """
    chosen = SelectedSet(frozenset(range(inst.ell)))
    if inst.t >= inst.ell:
        return chosen, _zero(inst.exact)
    if inst.exact:
        val = sum((inst.values[j] for j in range(inst.t, inst.ell)), start=Fraction(0))
    else:
        val = float(np.sum(np.asarray(inst.values[inst.t: inst.ell])))
    return chosen, val


def niceness_violations(inst: Instance, level, p, tol: float = REL_TOL) -> list[str]:
    """Check the four nice-at-level conditions; returns human-readable breaches.

    Conditions, with i = number of boxes filled to their cap:
      1. v_j * p_j = level for j <= t+1.
      2. p_j = min{1, level/v_j} for j <= i.
      3. p_{i+1} < min{1, level/v_{i+1}} strictly (when i < n).
      4. p_j = 0 for j >= i+2.
    """
    seq = p.p if isinstance(p, Marginals) else p
    v, t, n = inst.values, inst.t, inst.n
    exact = inst.exact

    def close(a, b):
        if exact:
            return a == b
        return abs(float(a) - float(b)) <= tol * max(1.0, abs(float(a)), abs(float(b)))

    out = []
    caps = [min(1, level / v[j]) if exact else min(1.0, float(level) / float(v[j])) for j in range(n)]
    i = 0
    while i < n and close(seq[i], caps[i]):
        i += 1
    for j in range(min(t + 1, n)):
        if not close(v[j] * seq[j], level):
            out.append(f"box {j}: product {v[j] * seq[j]} != level {level}")
    if i < n:
        leftover = seq[i]
        cap = caps[i]
        if not exact and float(leftover) > float(cap) * (1 + tol) + tol:
            out.append(f"box {i}: leftover {leftover} above cap {cap}")
        if exact and leftover >= cap:
            out.append(f"box {i}: leftover {leftover} not strictly below cap {cap}")
    for j in range(i + 1, n):
        if not close(seq[j], 0):
            out.append(f"box {j}: expected 0 beyond the leftover box, got {seq[j]}")
    return out


def chain_violations(inst: Instance, p, tol: float = REL_TOL) -> list[str]:
    """Check v_1 p_1 = ... = v_{t+1} p_{t+1} >= ... >= v_n p_n."""
    seq = p.p if isinstance(p, Marginals) else p
    v, t, n = inst.values, inst.t, inst.n
    prods = [v[j] * seq[j] for j in range(n)]
    exact = inst.exact

    def close(a, b):
        if exact:
            return a == b
        return abs(float(a) - float(b)) <= tol * max(1.0, abs(float(a)), abs(float(b)))

    def geq(a, b):
        if exact:
            return a >= b
        return float(a) >= float(b) - tol * max(1.0, abs(float(a)), abs(float(b)))

    out = []
    for j in range(min(t, n - 1)):
        if not close(prods[j], prods[j + 1]):
            out.append(f"boxes {j},{j + 1}: head products differ: {prods[j]} vs {prods[j + 1]}")
    for j in range(t, n - 1):
        if not geq(prods[j], prods[j + 1]):
            out.append(f"boxes {j},{j + 1}: products increase: {prods[j]} < {prods[j + 1]}")
    return out
