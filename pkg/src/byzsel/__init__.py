"""Worst-case optimal selection of l boxes when t of them are byzantine.

Given positive box values v_1 >= ... >= v_n, an adversary secretly empties
t boxes after seeing the selection strategy. This package computes, in
O(n) time after sorting, the randomized strategy whose expected payoff
against the worst adversary is maximal, together with that value, the
water level achieving it, sampled concrete selections, and an explicit
distribution over selections. Independent oracles (exhaustive adversary
enumeration, a grid scan over water levels, and a multiplicative-weights
game solver) cross-check the results.

Quick start:

    >>> import byzsel
    >>> inst = byzsel.normalize([8, 7, 5, 4], t=1, ell=3)
    >>> p, value = byzsel.solve(inst)
    >>> value >= byzsel.deterministic_baseline(inst)[1]
    True

All solver functions accept instances built by normalize (arbitrary input
order, zeros dropped) or Instance.from_sorted (already sorted descending).
Passing exact=True to normalize switches every computation downstream to
exact rational arithmetic.
"""

from .ell_one import Ell1Candidate, solve_ell1
from .errors import (
    ByzselError,
    DecompositionError,
    InvalidMarginals,
    InvalidPrefix,
    InvalidThresholds,
    InvalidValue,
    LevelOutOfRange,
    OracleTooLarge,
    UnnormalizedMarginals,
)
from .estimator import ByzantineSelector
from .model import (
    AdversaryResponse,
    Instance,
    Marginals,
    SelectedSet,
    adversary_best_response,
    check_marginals,
    normalize,
    payoff,
    to_original_order,
    value_of_marginals,
)
from .oracle import (
    GameMatrix,
    game_matrix,
    MwuEstimate,
    brute_deterministic,
    brute_value,
    grid_check,
    mwu_game_value,
)
from .rounding import SubsetDistribution, decompose, pad_marginals, sample, sample_many
from .waterfill import (
    Breakpoint,
    best_breakpoint,
    chain_violations,
    deterministic_baseline,
    e_max,
    maximal_nice,
    niceness_violations,
    solve,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryResponse",
    "Breakpoint",
    "ByzantineSelector",
    "ByzselError",
    "DecompositionError",
    "Ell1Candidate",
    "GameMatrix",
    "Instance",
    "InvalidMarginals",
    "InvalidPrefix",
    "InvalidThresholds",
    "InvalidValue",
    "LevelOutOfRange",
    "Marginals",
    "MwuEstimate",
    "OracleTooLarge",
    "SelectedSet",
    "SubsetDistribution",
    "UnnormalizedMarginals",
    "__version__",
    "adversary_best_response",
    "best_breakpoint",
    "brute_deterministic",
    "brute_value",
    "chain_violations",
    "check_marginals",
    "decompose",
    "deterministic_baseline",
    "e_max",
    "game_matrix",
    "grid_check",
    "maximal_nice",
    "mwu_game_value",
    "niceness_violations",
    "normalize",
    "pad_marginals",
    "payoff",
    "sample",
    "sample_many",
    "solve",
    "solve_ell1",
    "sweep",
    "to_original_order",
    "value_of_marginals",
]
