"""Independent verifiers: exhaustive enumeration, matrix-game MWU, grid scan.

These deliberately avoid the solver's own machinery (prefix sums, breakpoint
logic) so that agreement between solver and oracle is meaningful evidence.
Guards raise OracleTooLarge instead of silently truncating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import OracleTooLarge
from .model import Instance, check_marginals, value_of_marginals
from .waterfill import e_max, maximal_nice

__all__ = [
    "GameMatrix",
    "MwuEstimate",
    "game_matrix",
    "brute_value",
    "brute_deterministic",
    "mwu_game_value",
    "grid_check",
]

BRUTE_VALUE_MAX_N = 25
BRUTE_PAIRS_MAX = 10**7
MWU_SIDE_MAX = 10**4
_GRID_CHUNK_CELLS = 2_000_000


@dataclass(frozen=True, eq=False)
class GameMatrix:
    """The full zero-sum game: mechanism rows versus adversary columns.

    rows: all size-l subsets; cols: all size-t subsets; entries[r, c] is the
    payoff of opening rows[r] against byzantine set cols[c], as float64.
    """

    rows: tuple
    cols: tuple
    entries: np.ndarray


def _combinations_tuple(n: int, k: int) -> tuple:
    return tuple(combinations(range(n), k))


def game_matrix(inst: Instance) -> GameMatrix:
    """Materialize the payoff matrix (float64 entries).

    Raises:
        OracleTooLarge: either side exceeds 10^4 pure strategies.
    """
    n, t, ell = inst.n, inst.t, inst.ell
    n_rows, n_cols = math.comb(n, ell), math.comb(n, t)
    if n_rows > MWU_SIDE_MAX or n_cols > MWU_SIDE_MAX:
        raise OracleTooLarge(f"game of {n_rows} x {n_cols} pure strategies")
    rows = _combinations_tuple(n, ell)
    cols = _combinations_tuple(n, t)
    v = np.asarray([float(x) for x in inst.values], dtype=np.float64)
    row_ind = np.zeros((n_rows, n), dtype=np.float64)
    for r, s in enumerate(rows):
        row_ind[r, list(s)] = 1.0
    col_ind = np.zeros((n_cols, n), dtype=np.float64)
    for c, b in enumerate(cols):
        col_ind[c, list(b)] = 1.0
    entries = (row_ind * v) @ (1.0 - col_ind).T
    return GameMatrix(rows=rows, cols=cols, entries=entries)


def brute_value(p, inst: Instance, max_n: int = BRUTE_VALUE_MAX_N):
    """Exact minimum over all size-t byzantine sets of the expected payoff.

    Enumerates every set; arithmetic follows the instance mode.

    Raises:
        OracleTooLarge: n exceeds max_n.
    """
    if inst.n > max_n:
        raise OracleTooLarge(f"n={inst.n} beyond enumeration guard {max_n}")
    seq = check_marginals(p, inst)
    v = inst.values
    prods = [v[j] * seq[j] for j in range(inst.n)]
    total = sum(prods, start=Fraction(0)) if inst.exact else float(sum(prods))
    best = None
    for b in combinations(range(inst.n), inst.t):
        hit = sum(prods[j] for j in b)
        inflicted = total - hit
        if best is None or inflicted < best:
            best = inflicted
    return best


def brute_deterministic(inst: Instance, max_pairs: int = BRUTE_PAIRS_MAX):
    """Exact max over selections of the min over byzantine sets of payoff.

    Full double enumeration with early pruning inside the inner minimum.

    Raises:
        OracleTooLarge: C(n,l) * C(n,t) exceeds max_pairs.
    """
    n, t, ell = inst.n, inst.t, inst.ell
    if math.comb(n, ell) * math.comb(n, t) > max_pairs:
        raise OracleTooLarge("selection/adversary pair count beyond guard")
    v = inst.values
    best = None
    for s in combinations(range(n), ell):
        worst = None
        for b in combinations(range(n), t):
            blocked = set(b)
            pay = sum(v[j] for j in s if j not in blocked)
            if worst is None or pay < worst:
                worst = pay
                if best is not None and worst <= best:
                    break  # this selection cannot beat the incumbent
        if best is None or worst > best:
            best = worst
    return best


@dataclass(frozen=True, eq=False)
class MwuEstimate:
    """Approximate game value with a sound enclosure.

    value is the midpoint of [lower, upper], where lower is the exact best
    response against the averaged row strategy and upper the exact best
    response against the averaged column strategy (so lower <= game value
    <= upper always). error_bound is max(theoretical regret bound,
    (upper - lower)/2); the true value lies within error_bound of value.
    """

    value: float
    error_bound: float
    lower: float
    upper: float
    iterations: int


def mwu_game_value(inst: Instance, iterations: int) -> MwuEstimate:
    """Approximate the zero-sum game value by multiplicative-weights self-play.

    Both players run Hedge with step size sqrt(ln(rows)/iterations) on
    payoffs normalized to [0, 1]; the averaged strategies' exact best
    responses certify the returned enclosure.

    Raises:
        OracleTooLarge: via game_matrix.
    """
    from . import _kernels

    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    gm = game_matrix(inst)
    m = gm.entries
    lo, hi = float(m.min()), float(m.max())
    span = hi - lo
    if span == 0.0:
        return MwuEstimate(value=lo, error_bound=0.0, lower=lo, upper=lo,
                           iterations=iterations)
    normalized = (m - lo) / span
    eta = math.sqrt(math.log(m.shape[0]) / iterations)
    row_avg, col_avg = _kernels.mwu_kernel(normalized, eta, iterations)
    lower = float((m.T @ row_avg).min())   # adversary best-responds
    upper = float((m @ col_avg).max())     # mechanism best-responds
    theory = span * math.sqrt(math.log(m.shape[0]) / iterations)
    err = max(theory, (upper - lower) / 2.0)
    return MwuEstimate(value=(lower + upper) / 2.0, error_bound=err,
                       lower=lower, upper=upper, iterations=iterations)


def grid_check(inst: Instance, resolution: int):
    """Max worst-case value of maximal_nice over an even grid of levels.

    The grid spans [0, e_max] inclusive with `resolution` points. Since the
    curve is piecewise linear with at most 2n pieces, the result approaches
    the solver optimum from below as resolution grows.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    top = e_max(inst)
    if inst.exact:
        best = None
        for g in range(resolution):
            level = top * g / (resolution - 1)
            val = value_of_marginals(maximal_nice(inst, level, check=False), inst, check=False)
            if best is None or val > best:
                best = val
        return best
    v = np.asarray(inst.values, dtype=np.float64)
    n, t, ell = inst.n, inst.t, inst.ell
    levels = np.linspace(0.0, float(top), resolution)
    chunk = max(1, _GRID_CHUNK_CELLS // max(1, n))
    best = -np.inf
    for a in range(0, resolution, chunk):
        e_block = levels[a: a + chunk, None]
        caps = np.minimum(1.0, e_block / v[None, :])
        cum = np.cumsum(caps, axis=1)
        p = np.clip(ell - (cum - caps), 0.0, caps)
        prods = p * v[None, :]
        vals = prods.sum(axis=1)
        if t:
            vals -= np.partition(prods, n - t, axis=1)[:, n - t:].sum(axis=1)
        block_best = float(vals.max())
        if block_best > best:
            best = block_best
    return best
