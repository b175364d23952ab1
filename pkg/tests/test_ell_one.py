"""Closed-form solver for selecting a single box."""

from fractions import Fraction

import pytest

from byzsel import (
    InvalidPrefix,
    normalize,
    solve,
    solve_ell1,
    value_of_marginals,
)
from byzsel.ell_one import candidate

from conftest import assert_rel_close, lp_optimum, random_instance


class TestCandidate:
    def test_prefix_marginals_proportional_to_reciprocals(self, intro_exact):
        cand = candidate(intro_exact, 3)
        assert list(cand.marginals.p) == [
            Fraction(35, 131),
            Fraction(40, 131),
            Fraction(56, 131),
            Fraction(0),
        ]
        assert cand.value == Fraction(560, 131)

    def test_candidate_values_on_intro_instance(self, intro_exact):
        expected = {
            2: Fraction(56, 15),
            3: Fraction(560, 131),
            4: Fraction(840, 201),
        }
        for i, want in expected.items():
            assert candidate(intro_exact, i).value == want

    def test_prefix_bounds_enforced(self, intro_exact):
        with pytest.raises(InvalidPrefix):
            candidate(intro_exact, 1)
        with pytest.raises(InvalidPrefix):
            candidate(intro_exact, 5)

    def test_requires_single_selection(self):
        from byzsel import InvalidThresholds

        inst = normalize([8, 7, 5, 4], 1, 2)
        with pytest.raises(InvalidThresholds):
            candidate(inst, 3)
        with pytest.raises(InvalidThresholds):
            solve_ell1(inst)

    def test_candidate_value_is_its_own_worst_case(self, intro_exact):
        for i in (2, 3, 4):
            cand = candidate(intro_exact, i)
            assert value_of_marginals(cand.marginals.p, intro_exact) == cand.value


class TestSolveEll1:
    def test_picks_best_prefix_on_intro(self, intro_exact):
        best = solve_ell1(intro_exact)
        assert best.i == 3
        assert best.value == Fraction(560, 131)

    def test_tie_prefers_smaller_prefix(self):
        inst = normalize([2, 1, 1], 1, 1, exact=True)
        best = solve_ell1(inst)
        others = [candidate(inst, i).value for i in range(2, 4)]
        assert best.value == max(others)
        assert best.i == 2 + others.index(best.value)

    def test_matches_sweep_exact(self, rng):
        for _ in range(120):
            inst = random_instance(rng, max_n=12, exact=True, max_value=60)
            if inst.ell != 1:
                inst = normalize([int(v) for v in inst.values], inst.t, 1, exact=True)
            best = solve_ell1(inst)
            _, val = solve(inst)
            assert best.value == val

    def test_matches_sweep_float(self, rng):
        for _ in range(200):
            inst = random_instance(rng, max_n=50, max_value=1000.0)
            if inst.ell != 1:
                inst = normalize(
                    [float(v) for v in inst.values], inst.t, 1
                )
            best = solve_ell1(inst)
            _, val = solve(inst)
            assert_rel_close(float(best.value), float(val))

    def test_matches_lp(self, rng):
        for _ in range(25):
            inst = random_instance(rng, max_n=8, max_value=40.0)
            if inst.ell != 1:
                inst = normalize([float(v) for v in inst.values], inst.t, 1)
            best = solve_ell1(inst)
            assert_rel_close(float(best.value), lp_optimum(inst), rel=1e-7)

    def test_t_zero_takes_best_single_box(self):
        inst = normalize([9, 4, 2], 0, 1, exact=True)
        best = solve_ell1(inst)
        assert best.value == 9
        assert best.i == 1
