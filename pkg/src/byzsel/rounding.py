"""Realize marginals as actual size-l subsets.

Any p in [0,1]^n with sum p_i = l is the marginal vector of a distribution
over size-l subsets. Two realizations are provided:

  * sample: systematic sampling. Lay the p_i out as consecutive intervals
    on [0, l); a single uniform u in [0, 1) induces the l thresholds
    u, u+1, ..., u+l-1, and box i is picked when one of them lands in its
    interval. Each interval has width p_i <= 1, so no box is picked twice,
    exactly l are picked, and P(i in S) = p_i exactly. One draw, one pass.

  * decompose: an explicit distribution with at most n atoms, built by
    repeatedly giving weight to the l boxes with the largest remaining
    residuals. The weight of each atom is capped so no residual goes
    negative and no unselected residual exceeds the remaining per-atom
    budget; each round ties off at least one box, so at most n rounds run.

solve may return mass below l; pad_marginals tops it up (value never drops,
since the objective is nondecreasing in every coordinate).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._numeric import is_exact
from .errors import DecompositionError, UnnormalizedMarginals
from .model import Instance, Marginals, SelectedSet, check_marginals

__all__ = [
    "SubsetDistribution",
    "pad_marginals",
    "sample",
    "sample_many",
    "decompose",
]

# |sum p - l| tolerance, scaled by max(1, l), before rounding stages refuse
SUM_TOL = 1e-9
# residuals below this (times max(1, l)) snap to zero between greedy rounds
_SNAP = 1e-12


@dataclass(frozen=True, eq=False)
class SubsetDistribution:
    """An explicit distribution over size-l subsets with small support.

    atoms: tuple of (SelectedSet, weight); weights positive and summing
    to 1; at most n atoms. The induced marginals (sum of weights of atoms
    containing each box) reproduce the decomposed vector, exactly so in
    rational mode.
    """

    atoms: tuple

    def induced_marginals(self, n: int) -> list:
        exact = bool(self.atoms) and is_exact(self.atoms[0][1])
        out = [Fraction(0) if exact else 0.0] * n
        for chosen, w in self.atoms:
            for j in chosen.indices:
                out[j] = out[j] + w
        return out

    def total_weight(self):
        return sum(w for _, w in self.atoms)


def _marginal_seq(p) -> Sequence:
    return p.p if isinstance(p, Marginals) else p


def _checked_exact_sum(seq, ell) -> None:
    total = sum(seq, start=Fraction(0))
    if total != ell:
        raise UnnormalizedMarginals(f"marginal mass {total} != l={ell}")


def _float_prepared(seq, ell) -> np.ndarray:
    """Validate the mass and absorb the float residual into the last
    fractional coordinate, returning a writable copy."""
    arr = np.array(seq, dtype=np.float64)
    total = float(arr.sum())
    if abs(total - ell) > SUM_TOL * max(1.0, float(ell)):
        raise UnnormalizedMarginals(f"marginal mass {total!r} != l={ell}")
    residual = ell - total
    if residual != 0.0:
        fractional = np.flatnonzero((arr > 0.0) & (arr < 1.0))
        if fractional.size:
            j = int(fractional[-1])
            arr[j] = min(1.0, max(0.0, arr[j] + residual))
    return arr


def pad_marginals(p, inst: Instance) -> Marginals:
    """Raise coordinates, rightmost first, until the mass is exactly l.

    Each raised coordinate stops at 1. Since n > l is guaranteed and every
    p_i <= 1, the deficit always fits. Raising coordinates never lowers the
    worst-case value.

    Raises:
        InvalidMarginals: p is outside the feasible polytope (in particular
            a mass already beyond l cannot be padded down).
    """
    seq = check_marginals(p, inst)
    n = inst.n
    if inst.exact:
        out = list(seq)
        deficit = inst.ell - sum(out, start=Fraction(0))
        j = n - 1
        while deficit > 0 and j >= 0:
            room = 1 - out[j]
            take = room if room <= deficit else deficit
            out[j] += take
            deficit -= take
            j -= 1
        return Marginals(tuple(out))
    arr = np.array(seq, dtype=np.float64)
    deficit = inst.ell - float(arr.sum())
    if deficit > 0:
        room = 1.0 - arr
        # headroom available strictly to the right of each coordinate
        right_room = np.concatenate([np.cumsum(room[::-1])[::-1][1:], [0.0]])
        arr += np.clip(deficit - right_room, 0.0, room)
    arr.flags.writeable = False
    return Marginals(arr)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample(p, inst: Instance, rng) -> SelectedSet:
    """Draw one size-l subset whose inclusion probabilities are exactly p.

    Args:
        p: marginals summing to exactly l (within 1e-9 in float mode; the
            residual is folded into the last fractional coordinate).
        inst: the instance (supplies l and the arithmetic mode).
        rng: a numpy Generator or a 64-bit seed; the generator algorithm is
            numpy's default (PCG64), fixed for reproducibility.

    Raises:
        UnnormalizedMarginals: mass deviates from l beyond tolerance.
    """
    seq = _marginal_seq(p)
    ell = inst.ell
    gen = _as_rng(rng)
    u = gen.random()
    if inst.exact:
        _checked_exact_sum(seq, ell)
        threshold = Fraction(u)
        chosen = []
        cum = Fraction(0)
        for j, q in enumerate(seq):
            cum += q
            if cum > threshold:
                chosen.append(j)
                threshold += 1
        return SelectedSet(frozenset(chosen))
    arr = _float_prepared(seq, ell)
    cum = np.cumsum(arr)
    idx = np.searchsorted(cum, u + np.arange(ell, dtype=np.float64), side="right")
    idx = np.unique(np.minimum(idx, inst.n - 1))
    if idx.size < ell:  # float drift defense; deterministic top-up
        missing = ell - idx.size
        spare = [j for j in np.argsort(-arr) if j not in set(idx.tolist())]
        idx = np.concatenate([idx, np.asarray(spare[:missing], dtype=idx.dtype)])
    return SelectedSet(frozenset(int(j) for j in idx))


def sample_many(p, inst: Instance, count: int, rng) -> list[SelectedSet]:
    """Draw count subsets; equivalent to count sequential sample calls in
    exact mode and a vectorized batch in float mode."""
    gen = _as_rng(rng)
    if inst.exact:
        return [sample(p, inst, gen) for _ in range(count)]
    seq = _marginal_seq(p)
    ell = inst.ell
    arr = _float_prepared(seq, ell)
    cum = np.cumsum(arr)
    u = gen.random(count)
    thresholds = u[:, None] + np.arange(ell, dtype=np.float64)[None, :]
    idx = np.searchsorted(cum, thresholds, side="right")
    np.minimum(idx, inst.n - 1, out=idx)
    out = []
    for row in idx:
        uniq = frozenset(int(j) for j in row)
        if len(uniq) < ell:
            spare = (j for j in np.argsort(-arr) if int(j) not in uniq)
            uniq = uniq | {int(next(spare)) for _ in range(ell - len(uniq))}
        out.append(SelectedSet(uniq))
    return out


def decompose(p, inst: Instance) -> SubsetDistribution:
    """Express p as an explicit distribution over at most n subsets.

    Greedy peeling: each round selects the l largest residual marginals
    (ties toward the smaller index) and assigns the largest weight that
    keeps every residual nonnegative and every unselected residual within
    the remaining per-atom budget. In rational mode the recomposition is
    exact.

    Raises:
        UnnormalizedMarginals: mass deviates from l beyond tolerance.
        DecompositionError: more than n rounds needed (float drift).
    """
    seq = _marginal_seq(p)
    n, ell = inst.n, inst.ell
    exact = inst.exact
    if exact:
        _checked_exact_sum(seq, ell)
        residual = list(seq)
        zero = Fraction(0)
    else:
        residual = list(_float_prepared(seq, ell))
        zero = 0.0
    snap = 0.0 if exact else _SNAP * max(1.0, float(ell))
    atoms = []
    for _ in range(n):
        total = sum(residual) if exact else float(np.sum(residual))
        if total <= snap * n:
            break
        order = sorted(range(n), key=lambda j: (-residual[j], j))
        chosen = order[:ell]
        others = order[ell:]
        budget = total / ell
        weight = min(residual[j] for j in chosen)
        weight = min(weight, budget)
        if others:
            weight = min(weight, budget - max(residual[j] for j in others))
        if weight <= 0:
            raise DecompositionError("nonpositive atom weight; arithmetic drift")
        for j in chosen:
            residual[j] -= weight
            if not exact and residual[j] < snap:
                residual[j] = zero
        atoms.append((SelectedSet(frozenset(chosen)), weight))
    else:
        leftover = sum(residual) if exact else float(np.sum(residual))
        if (exact and leftover != 0) or (not exact and leftover > snap * n):
            raise DecompositionError(f"residual mass {leftover} after n rounds")
    return SubsetDistribution(atoms=tuple(atoms))
