"""Domain types, validation, payoff evaluation, and the adversary's response.

The byzantine selection problem: n boxes advertise positive values
v_1 >= ... >= v_n, exactly t of them are secretly empty, and a mechanism
opens l boxes. A randomized mechanism is summarized by its marginals
p in [0,1]^n with sum p_i <= l (the inclusion probabilities of a
distribution over size-l subsets). Its worst-case expected payoff is

    val(p) = min over size-t sets B of sum_{i not in B} v_i * p_i,

that is, the total expectation minus the t largest products v_i * p_i.

Everything here is pure and immutable; arithmetic follows the element type
of the instance values (float64 by default, exact Fractions in exact mode).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from typing import Sequence

import numpy as np

from ._numeric import REL_TOL, coerce_values, format_number, freeze
from .errors import InvalidMarginals, InvalidThresholds, InvalidValue

__all__ = [
    "Instance",
    "Marginals",
    "AdversaryResponse",
    "SelectedSet",
    "normalize",
    "payoff",
    "value_of_marginals",
    "adversary_best_response",
    "check_marginals",
    "to_original_order",
]


@dataclass(frozen=True, eq=False)
class Instance:
    """A validated problem instance.

    Fields:
        values: box values sorted non-increasing, all positive; a tuple of
            Fractions in exact mode or a read-only float64 array otherwise.
        t: number of byzantine (empty) boxes, 0 <= t < n.
        ell: number of boxes to open, 1 <= ell < n.
        perm: perm[k] is the position in the raw input (0-based, counting
            dropped zero entries) of sorted box k.
        dropped: raw positions of zero-valued entries removed by normalize.
    """

    values: Sequence
    t: int
    ell: int
    perm: Sequence[int]
    dropped: tuple[int, ...] = ()

    def __post_init__(self):
        n = len(self.values)
        if n == 0:
            raise InvalidValue("no positive values remain")
        if isinstance(self.values, np.ndarray):
            arr = self.values
            if not np.all(arr > 0):
                raise InvalidValue("values must be positive")
            if not np.all(arr[:-1] >= arr[1:]):
                raise InvalidValue("values must be sorted non-increasing")
        else:
            if any(x <= 0 for x in self.values):
                raise InvalidValue("values must be positive")
            if any(self.values[k] < self.values[k + 1] for k in range(n - 1)):
                raise InvalidValue("values must be sorted non-increasing")
        if not (isinstance(self.t, Integral) and 0 <= self.t < n):
            raise InvalidThresholds(f"t={self.t} outside [0, {n - 1}] for n={n}")
        if not (isinstance(self.ell, Integral) and 1 <= self.ell < n):
            raise InvalidThresholds(f"l={self.ell} outside [1, {n - 1}] for n={n}")
        if len(self.perm) != n:
            raise InvalidValue("perm length must match values")
        raw = n + len(self.dropped)
        if isinstance(self.perm, np.ndarray):
            ok = np.unique(self.perm).size == n and self.perm.min() >= 0 and self.perm.max() < raw
        else:
            ok = len(set(self.perm)) == n and all(0 <= j < raw for j in self.perm)
        if not ok:
            raise InvalidValue("perm must be injective into the raw positions")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def raw_size(self) -> int:
        return self.n + len(self.dropped)

    @property
    def exact(self) -> bool:
        return not isinstance(self.values, np.ndarray)

    @classmethod
    def from_sorted(cls, values: Sequence, t: int, ell: int, exact: bool = False) -> "Instance":
        """Build an instance from already-sorted positive values.

        Skips the O(n log n) sort of normalize; order and positivity are
        still verified in O(n). perm is the identity.
        """
        vals = freeze(coerce_values(values, exact), exact)
        n = len(vals)
        perm = tuple(range(n)) if exact else _frozen_arange(n)
        return cls(values=vals, t=int(t), ell=int(ell), perm=perm)


def _frozen_arange(n: int) -> np.ndarray:
    arr = np.arange(n, dtype=np.int64)
    arr.flags.writeable = False
    return arr


def normalize(raw_values: Sequence, t: int, ell: int, exact: bool = False) -> Instance:
    """Validate raw input and produce a sorted Instance.

    Zero values are dropped and their raw positions recorded in
    Instance.dropped; remaining values are sorted non-increasing with a
    stable tie-break (earlier raw position first) recorded in perm.

    Args:
        raw_values: non-negative numbers in user order; "a/b" strings allowed.
        t: byzantine box count.
        ell: number of boxes to open.
        exact: use Fraction arithmetic instead of float64.

    Raises:
        InvalidValue: on any negative value (message names the 1-based
            offending position) or empty input.
        InvalidThresholds: when after dropping zeros t >= n, ell >= n,
            or ell < 1.
    """
    vals = coerce_values(raw_values, exact)
    if not vals:
        raise InvalidValue("instance has no values")
    for pos, x in enumerate(vals):
        if x < 0:
            raise InvalidValue(f"negative value {format_number(x)} at position {pos + 1}")
    dropped = tuple(pos for pos, x in enumerate(vals) if x == 0)
    kept = [(x, pos) for pos, x in enumerate(vals) if x != 0]
    n = len(kept)
    if n == 0:
        raise InvalidThresholds("no positive values remain after dropping zeros")
    if not (isinstance(t, Integral) and 0 <= t < n):
        raise InvalidThresholds(f"t={t} outside [0, {n - 1}] after dropping zeros (n={n})")
    if not (isinstance(ell, Integral) and 1 <= ell < n):
        raise InvalidThresholds(f"l={ell} outside [1, {n - 1}] after dropping zeros (n={n})")
    t, ell = int(t), int(ell)
    kept.sort(key=lambda item: (-item[0], item[1]))
    values = freeze([x for x, _ in kept], exact)
    perm_list = [pos for _, pos in kept]
    if exact:
        perm: Sequence[int] = tuple(perm_list)
    else:
        perm_arr = np.asarray(perm_list, dtype=np.int64)
        perm_arr.flags.writeable = False
        perm = perm_arr
    return Instance(values=values, t=t, ell=ell, perm=perm, dropped=dropped)


@dataclass(frozen=True, eq=False)
class Marginals:
    """A pseudo-distribution p in [0,1]^n with sum p_i <= l."""

    p: Sequence

    def levels(self, inst: Instance) -> Sequence:
        """Water levels h_i = v_i * p_i."""
        return _products(self.p, inst)

    def sum(self):
        if isinstance(self.p, np.ndarray):
            return float(np.sum(self.p))
        return sum(self.p)

    def __len__(self) -> int:
        return len(self.p)

    def __iter__(self):
        return iter(self.p)

    def __getitem__(self, k):
        return self.p[k]


@dataclass(frozen=True)
class SelectedSet:
    """A set of exactly l box indices (0-based, sorted-instance indexing)."""

    indices: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "indices", frozenset(self.indices))

    def __iter__(self):
        return iter(sorted(self.indices))

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, k) -> bool:
        return k in self.indices


@dataclass(frozen=True, eq=False)
class AdversaryResponse:
    """The adversary's worst-case choice against queried marginals.

    byz_set holds the t indices with the largest products v_i * p_i (ties
    toward the smallest index); inflicted_value is the resulting payoff,
    equal to the minimum over all size-t sets.
    """

    byz_set: frozenset[int]
    inflicted_value: object


def _marginal_seq(p) -> Sequence:
    return p.p if isinstance(p, Marginals) else p


def check_marginals(p, inst: Instance, tol: float = REL_TOL) -> Sequence:
    """Validate p against Delta_{<=l} and return the underlying sequence.

    Exact sequences are checked exactly; float sequences within tol.

    Raises:
        InvalidMarginals: wrong length, a coordinate outside [0, 1], or
            total mass above l.
    """
    seq = _marginal_seq(p)
    n = inst.n
    if len(seq) != n:
        raise InvalidMarginals(f"expected {n} marginals, got {len(seq)}")
    if isinstance(seq, np.ndarray) or not inst.exact:
        arr = np.asarray(seq, dtype=np.float64)
        if np.any(arr < -tol) or np.any(arr > 1 + tol):
            raise InvalidMarginals("marginals must lie in [0, 1]")
        if float(arr.sum()) > inst.ell * (1 + tol) + tol:
            raise InvalidMarginals(f"marginals sum beyond l={inst.ell}")
        return arr
    for q in seq:
        if q < 0 or q > 1:
            raise InvalidMarginals("marginals must lie in [0, 1]")
    if sum(seq, start=Fraction(0)) > inst.ell:
        raise InvalidMarginals(f"marginals sum beyond l={inst.ell}")
    return seq


def _products(p, inst: Instance):
    seq = _marginal_seq(p)
    if isinstance(inst.values, np.ndarray):
        return inst.values * np.asarray(seq, dtype=np.float64)
    return tuple(v * q for v, q in zip(inst.values, seq))


def _value_from_products(prods, t: int):
    """Total minus the sum of the t largest products; shared by all callers."""
    if isinstance(prods, np.ndarray):
        total = float(prods.sum())
        if t == 0:
            return total
        n = prods.size
        return total - float(np.partition(prods, n - t)[n - t:].sum())
    total = sum(prods, start=Fraction(0))
    if t == 0:
        return total
    return total - sum(sorted(prods, reverse=True)[:t], start=Fraction(0))


def payoff(s, b, inst: Instance):
    """Payoff of opening set s when b is the byzantine set.

    Args:
        s: iterable of opened box indices (or a SelectedSet).
        b: iterable of byzantine box indices.
        inst: the instance supplying values.

    Returns:
        Sum of values over s setminus b, in the instance's arithmetic mode.
    """
    s_idx = set(s.indices if isinstance(s, SelectedSet) else s)
    b_idx = set(b.indices if isinstance(b, SelectedSet) else b)
    n = inst.n
    for k in s_idx | b_idx:
        if not 0 <= k < n:
            raise InvalidValue(f"index {k} outside [0, {n - 1}]")
    gained = s_idx - b_idx
    if inst.exact:
        return sum((inst.values[k] for k in gained), start=Fraction(0))
    return float(sum(inst.values[k] for k in gained))


def value_of_marginals(p, inst: Instance, check: bool = True):
    """Worst-case expected payoff of marginals p.

    Equals the total expectation sum v_i * p_i minus the t largest products,
    which is the exact minimum over all size-t byzantine sets.

    Args:
        p: Marginals or plain sequence of n probabilities.
        inst: the instance.
        check: validate p against Delta_{<=l} first.
    """
    seq = check_marginals(p, inst) if check else _marginal_seq(p)
    return _value_from_products(_products(seq, inst), inst.t)


def adversary_best_response(p, inst: Instance, check: bool = True) -> AdversaryResponse:
    """Best byzantine set against marginals p.

    Picks the t indices with the largest products v_i * p_i, breaking ties
    toward the smallest index. The inflicted value equals
    value_of_marginals(p, inst) by construction.
    """
    seq = check_marginals(p, inst) if check else _marginal_seq(p)
    prods = _products(seq, inst)
    t = inst.t
    if t == 0:
        byz: frozenset[int] = frozenset()
    elif isinstance(prods, np.ndarray):
        order = np.lexsort((np.arange(prods.size), -prods))
        byz = frozenset(int(k) for k in order[:t])
    else:
        order = sorted(range(len(prods)), key=lambda k: (-prods[k], k))
        byz = frozenset(order[:t])
    return AdversaryResponse(byz_set=byz, inflicted_value=_value_from_products(prods, t))


def to_original_order(seq, inst: Instance, fill=0):
    """Map a per-box sequence from sorted indexing back to raw input order.

    Positions of dropped zero-value entries receive fill.

    Returns:
        List of length inst.raw_size.
    """
    out = [fill] * inst.raw_size
    for k, pos in enumerate(inst.perm):
        out[int(pos)] = seq[k]
    return out
