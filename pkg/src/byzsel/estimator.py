"""A scikit-learn style facade over the functional core.

ByzantineSelector follows the estimator protocol (parameters set in
__init__ verbatim, fitted attributes with trailing underscores,
get_params/set_params) without importing scikit-learn, so sklearn.base.clone
and parameter search utilities interoperate when that library is present.
"""

from __future__ import annotations

from typing import Sequence

from . import rounding, waterfill
from .model import adversary_best_response, normalize, to_original_order

__all__ = ["ByzantineSelector"]


class ByzantineSelector:
    """Plan and draw worst-case-optimal box selections.

    Parameters:
        t: number of byzantine boxes.
        ell: number of boxes to open per draw.
        exact: use exact rational arithmetic instead of float64.

    Fitted attributes (after fit(values)):
        instance_: the normalized Instance (sorted internally).
        marginals_: optimal per-box selection probabilities in the original
            input order (dropped zero-value boxes get probability 0).
        value_: worst-case expected payoff of marginals_.
        level_: the optimal water level.
        byz_set_: worst-case byzantine set, original 0-based indices.
        baseline_value_: best deterministic guarantee for comparison.
    """

    def __init__(self, t: int = 1, ell: int = 1, exact: bool = False):
        self.t = t
        self.ell = ell
        self.exact = exact

    def get_params(self, deep: bool = True) -> dict:
        return {"t": self.t, "ell": self.ell, "exact": self.exact}

    def set_params(self, **params) -> "ByzantineSelector":
        for key, val in params.items():
            if key not in ("t", "ell", "exact"):
                raise ValueError(f"unknown parameter {key!r}")
            setattr(self, key, val)
        return self

    def fit(self, values: Sequence, y=None) -> "ByzantineSelector":
        """Solve the instance given raw box values (any order, zeros allowed)."""
        inst = normalize(values, self.t, self.ell, exact=self.exact)
        p, val = waterfill.solve(inst)
        response = adversary_best_response(p, inst, check=False)
        self.instance_ = inst
        self._sorted_marginals_ = p
        self.marginals_ = to_original_order(list(p.p), inst)
        self.value_ = val
        self.level_ = inst.values[0] * p.p[0]
        self.byz_set_ = frozenset(int(inst.perm[j]) for j in response.byz_set)
        _, self.baseline_value_ = waterfill.deterministic_baseline(inst)
        return self

    def _check_fitted(self):
        if not hasattr(self, "instance_"):
            raise RuntimeError("call fit before sampling or decomposing")

    def sample(self, n_samples: int = 1, random_state=None) -> list[frozenset]:
        """Draw size-ell subsets realizing the fitted marginals.

        Returns subsets as frozensets of original 0-based indices.
        """
        self._check_fitted()
        inst = self.instance_
        padded = rounding.pad_marginals(self._sorted_marginals_, inst)
        draws = rounding.sample_many(padded, inst, n_samples, random_state)
        return [
            frozenset(int(inst.perm[j]) for j in chosen.indices) for chosen in draws
        ]

    def decompose(self) -> list[tuple[frozenset, object]]:
        """Explicit distribution over subsets, in original indices."""
        self._check_fitted()
        inst = self.instance_
        padded = rounding.pad_marginals(self._sorted_marginals_, inst)
        dist = rounding.decompose(padded, inst)
        return [
            (frozenset(int(inst.perm[j]) for j in chosen.indices), w)
            for chosen, w in dist.atoms
        ]
