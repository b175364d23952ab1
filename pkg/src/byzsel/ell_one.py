"""Closed-form solver for the single-selection case l = 1.

For l = 1 the optimum is attained in the finite family p^(t+1), ..., p^(n),
where p^(i) is proportional to (1/v_1, ..., 1/v_i, 0, ..., 0) and sums to 1.
Writing R_i = sum_{j<=i} 1/v_j, its worst-case value is (i - t) / R_i, so a
single pass over the reciprocal prefix sums finds the best prefix length.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidPrefix, InvalidThresholds
from .model import Instance, Marginals

__all__ = ["Ell1Candidate", "candidate", "solve_ell1"]


@dataclass(frozen=True, eq=False)
class Ell1Candidate:
    """One member of the l=1 candidate family.

    Fields:
        i: prefix length, t+1 <= i <= n.
        marginals: p proportional to the first i reciprocals, summing to 1.
        value: (i - t) / R_i.
    """

    i: int
    marginals: Marginals
    value: object


def _require_ell1(inst: Instance):
    if inst.ell != 1:
        raise InvalidThresholds(f"closed form requires l=1, got l={inst.ell}")


def _prefix_candidate(inst: Instance, i: int, recip_sum) -> Ell1Candidate:
    v = inst.values
    if inst.exact:
        p = tuple(1 / (v[j] * recip_sum) if j < i else Fraction(0) for j in range(inst.n))
    else:
        arr = np.zeros(inst.n, dtype=np.float64)
        arr[:i] = 1.0 / (np.asarray(v[:i]) * recip_sum)
        arr.flags.writeable = False
        p = arr
    return Ell1Candidate(i=i, marginals=Marginals(p), value=(i - inst.t) / recip_sum)


def candidate(inst: Instance, i: int) -> Ell1Candidate:
    """The unique candidate supported on the first i boxes.

    Args:
        inst: instance with l = 1.
        i: prefix length in {t+1, ..., n}.

    Raises:
        InvalidPrefix: i out of range.
        InvalidThresholds: inst.ell != 1.
    """
    _require_ell1(inst)
    if not inst.t + 1 <= i <= inst.n:
        raise InvalidPrefix(f"prefix {i} outside [{inst.t + 1}, {inst.n}]")
    v = inst.values
    if inst.exact:
        recip_sum = sum((1 / v[j] for j in range(i)), start=Fraction(0))
    else:
        recip_sum = float(np.sum(1.0 / np.asarray(v[:i])))
    return _prefix_candidate(inst, i, recip_sum)


def solve_ell1(inst: Instance) -> Ell1Candidate:
    """Best candidate over all prefix lengths; ties go to the smaller i.

    Single pass over running prefix sums of 1/v_j.
    """
    _require_ell1(inst)
    t, n, v = inst.t, inst.n, inst.values
    if inst.exact:
        recip = Fraction(0)
        best_i, best_val, best_recip = None, None, None
        for i in range(1, n + 1):
            recip += 1 / v[i - 1]
            if i <= t:
                continue
            val = (i - t) / recip
            if best_val is None or val > best_val:
                best_i, best_val, best_recip = i, val, recip
        return _prefix_candidate(inst, best_i, best_recip)
    recips = np.cumsum(1.0 / np.asarray(v))
    lengths = np.arange(1, n + 1)
    vals = np.where(lengths >= t + 1, (lengths - t) / recips, -np.inf)
    best = int(np.argmax(vals))  # first occurrence wins, hence smallest i
    return _prefix_candidate(inst, best + 1, float(recips[best]))
