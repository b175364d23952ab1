"""Water-filling sweep: levels, breakpoints, optimality, structure, kernels."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from byzsel import (
    LevelOutOfRange,
    best_breakpoint,
    brute_value,
    chain_violations,
    deterministic_baseline,
    e_max,
    maximal_nice,
    niceness_violations,
    normalize,
    solve,
    sweep,
    value_of_marginals,
)
from byzsel.model import Instance
from byzsel.waterfill import _sweep_states

from conftest import assert_rel_close, lp_optimum, random_instance


F = Fraction


class TestEMax:
    def test_intro_value(self, intro_exact):
        assert e_max(intro_exact) == F(56, 15)

    def test_figure_value(self, figure_exact):
        assert e_max(figure_exact) == 8

    def test_binding_cases(self):
        cap_bound = normalize([10, 1, 1], 1, 2, exact=True)
        assert e_max(cap_bound) == 1
        budget_bound = normalize([10, 9, 8], 1, 1, exact=True)
        assert e_max(budget_bound) == F(1, F(1, 10) + F(1, 9))

    def test_float_matches_exact(self, rng):
        for _ in range(60):
            inst_x = random_instance(rng, max_n=10, exact=True, max_value=50)
            inst_f = normalize([float(v) for v in inst_x.values], inst_x.t, inst_x.ell)
            assert_rel_close(float(e_max(inst_x)), float(e_max(inst_f)))


class TestMaximalNice:
    def test_figure_marginals(self, figure_exact):
        p = maximal_nice(figure_exact, 7)
        assert list(p.p) == [F(7, 12), F(7, 8), F(7, 8), F(1), F(1), F(2, 3), F(0)]
        assert p.sum() == 5
        assert value_of_marginals(p.p, figure_exact) == 26

    def test_zero_level_is_empty(self, intro_exact):
        p = maximal_nice(intro_exact, 0)
        assert all(q == 0 for q in p.p)

    def test_level_above_e_max_rejected(self, intro_exact):
        with pytest.raises(LevelOutOfRange):
            maximal_nice(intro_exact, e_max(intro_exact) + F(1, 100))
        with pytest.raises(LevelOutOfRange):
            maximal_nice(intro_exact, -1)

    def test_float_overshoot_within_tolerance_is_clamped(self, intro_float):
        top = float(e_max(intro_float))
        p = maximal_nice(intro_float, top * (1 + 1e-13))
        assert p.sum() <= intro_float.ell + 1e-9

    def test_uses_full_budget_when_possible(self, rng):
        for _ in range(80):
            inst = random_instance(rng, max_n=12, exact=True, max_value=40)
            level = e_max(inst) * F(int(rng.integers(0, 5)), 4)
            level = min(level, e_max(inst))
            p = maximal_nice(inst, level)
            used = p.sum()
            caps = [min(F(1), level / v) for v in inst.values]
            assert used == min(F(inst.ell), sum(caps))

    @given(data=st.data())
    @settings(max_examples=60, deadline=None)
    def test_structure_properties(self, data):
        vals = data.draw(st.lists(st.integers(1, 30), min_size=2, max_size=9))
        n = len(vals)
        t = data.draw(st.integers(0, n - 1))
        ell = data.draw(st.integers(1, n - 1))
        inst = normalize(vals, t, ell, exact=True)
        top = e_max(inst)
        level = top * data.draw(st.integers(0, 8)) / 8
        p = maximal_nice(inst, level)
        for j, q in enumerate(p.p):
            assert 0 <= q <= 1
            assert q * inst.values[j] <= level
        assert p.sum() <= inst.ell
        seen_partial = False
        for j, q in enumerate(p.p):
            cap = min(F(1), level / inst.values[j]) if level > 0 else F(0)
            if q < cap:
                seen_partial = True
            elif seen_partial:
                assert q == 0


class TestSweep:
    def test_intro_breakpoints(self, intro_exact):
        bps = sweep(intro_exact)
        got = [(b.level, b.value, b.at_level, b.saturated) for b in bps]
        assert got == [
            (F(56, 15), F(56, 15), 2, 2),
            (F(280, 131), F(560, 131), 3, 3),
            (F(280, 201), F(280, 67), 4, 4),
        ]

    def test_levels_strictly_decreasing(self, rng):
        for _ in range(150):
            inst = random_instance(rng, max_n=30, max_value=500.0)
            bps = sweep(inst)
            levels = [float(b.level) for b in bps]
            assert all(a > b for a, b in zip(levels, levels[1:]))
            assert len(bps) <= 2 * inst.n + 4

    def test_first_breakpoint_is_e_max(self, rng):
        for _ in range(60):
            inst = random_instance(rng, max_n=15, exact=True, max_value=60)
            bps = sweep(inst)
            assert bps[0].level == e_max(inst)

    def test_breakpoint_values_match_evaluator(self, rng):
        for _ in range(80):
            inst = random_instance(rng, max_n=12, exact=True, max_value=50)
            for b in sweep(inst):
                p = maximal_nice(inst, b.level)
                assert value_of_marginals(p.p, inst) == b.value

    def test_value_piecewise_linear_between_breakpoints(self, rng):
        for _ in range(50):
            inst = random_instance(rng, max_n=14, exact=True, max_value=60)
            bps = sweep(inst)
            for hi, lo in zip(bps, bps[1:]):
                mid = (hi.level + lo.level) / 2
                vm = value_of_marginals(maximal_nice(inst, mid).p, inst)
                interp = (hi.value + lo.value) / 2
                assert vm == interp


class TestSolve:
    def test_intro_optimum(self, intro_exact):
        p, val = solve(intro_exact)
        assert val == F(560, 131)
        assert list(p.p) == [F(35, 131), F(40, 131), F(56, 131), F(0)]

    def test_figure_optimum(self, figure_exact):
        p, val = solve(figure_exact)
        assert val == 27
        assert best_breakpoint(figure_exact).level == 8

    def test_figure_level_seven_is_suboptimal(self, figure_exact):
        p7 = maximal_nice(figure_exact, 7)
        assert value_of_marginals(p7.p, figure_exact) == 26 < 27

    def test_matches_lp_float(self, rng):
        for _ in range(120):
            inst = random_instance(rng, max_n=10, max_value=100.0)
            _, val = solve(inst)
            assert_rel_close(float(val), lp_optimum(inst), rel=1e-7)

    def test_matches_lp_exact(self, rng):
        for _ in range(60):
            inst = random_instance(rng, max_n=9, exact=True, max_value=30)
            _, val = solve(inst)
            assert_rel_close(float(val), lp_optimum(inst), rel=1e-7)

    def test_matches_brute_adversary_exact(self, rng):
        for _ in range(60):
            inst = random_instance(rng, max_n=10, exact=True, max_value=50)
            p, val = solve(inst)
            assert brute_value(p, inst) == val

    def test_exact_float_parity(self, rng):
        for _ in range(80):
            inst_x = random_instance(rng, max_n=20, exact=True, max_value=100)
            inst_f = normalize([float(v) for v in inst_x.values], inst_x.t, inst_x.ell)
            _, vx = solve(inst_x)
            _, vf = solve(inst_f)
            assert_rel_close(float(vx), float(vf))

    def test_marginals_are_feasible(self, rng):
        for _ in range(80):
            inst = random_instance(rng, max_n=25, max_value=1000.0)
            p, _ = solve(inst)
            arr = np.asarray([float(q) for q in p.p])
            assert np.all(arr >= -1e-12)
            assert np.all(arr <= 1 + 1e-12)
            assert arr.sum() <= inst.ell + 1e-9

    def test_t_zero_fills_greedily(self):
        inst = normalize([9, 7, 4], 0, 2, exact=True)
        _, val = solve(inst)
        assert val == 16

    def test_all_equal_values(self):
        inst = normalize([5, 5, 5, 5], 1, 2, exact=True)
        p, val = solve(inst)
        assert val == brute_value(p, inst)
        assert val == F(15, 2)

    def test_tiny_instance(self):
        inst = normalize([3, 1], 1, 1, exact=True)
        p, val = solve(inst)
        assert val == brute_value(p, inst)

    def test_huge_value_spread(self):
        inst = normalize([1e12, 1.0, 1e-9], 1, 2)
        p, val = solve(inst)
        assert float(val) >= float(deterministic_baseline(inst)[1]) - 1e-9

    def test_state_count_is_linear(self, rng):
        for _ in range(30):
            inst = random_instance(rng, max_n=40, max_value=100.0)
            assert len(_sweep_states(inst)) <= 2 * inst.n + 4


class TestKernel:
    def test_kernel_matches_python_sweep(self, rng):
        for _ in range(60):
            inst = random_instance(rng, max_n=60, max_value=1000.0)
            slow = best_breakpoint(inst, use_kernel=False)
            fast = best_breakpoint(inst, use_kernel=True)
            assert_rel_close(float(slow.level), float(fast.level))
            assert_rel_close(float(slow.value), float(fast.value))
            assert (slow.at_level, slow.saturated) == (fast.at_level, fast.saturated)

    def test_kernel_rejected_in_exact_mode(self, intro_exact):
        with pytest.raises(ValueError):
            best_breakpoint(intro_exact, use_kernel=True)

    def test_large_instance_runs_and_dominates_baseline(self, rng):
        vals = np.sort(rng.random(50_000))[::-1] + 1e-6
        inst = Instance.from_sorted(vals, 10, 100)
        p, val = solve(inst)
        assert float(val) >= float(deterministic_baseline(inst)[1]) * (1 - 1e-9)
        arr = np.asarray(p.p, dtype=float)
        assert arr.sum() <= inst.ell + 1e-6


class TestBaseline:
    def test_example_value(self):
        inst = normalize([8, 7, 5, 4], 1, 3, exact=True)
        chosen, val = deterministic_baseline(inst)
        assert set(chosen) == {0, 1, 2}
        assert val == 12

    def test_t_at_least_ell_gives_zero(self):
        inst = normalize([8, 7, 5, 4], 3, 2, exact=True)
        _, val = deterministic_baseline(inst)
        assert val == 0

    def test_randomization_strictly_helps_generically(self, rng):
        wins = 0
        for _ in range(40):
            inst = random_instance(rng, max_n=8, exact=True, max_value=30)
            _, val = solve(inst)
            _, base = deterministic_baseline(inst)
            assert val >= base
            if val > base:
                wins += 1
        assert wins > 0


class TestStructureChecks:
    def test_solution_has_no_violations(self, rng):
        for _ in range(80):
            inst = random_instance(rng, max_n=20, max_value=500.0)
            p, _ = solve(inst)
            bp = best_breakpoint(inst)
            assert niceness_violations(inst, bp.level, p) == []
            assert chain_violations(inst, p) == []

    def test_detects_broken_chain(self, intro_exact):
        bad = [F(1, 100), F(40, 131), F(56, 131), F(0)]
        assert chain_violations(intro_exact, bad) != []

    def test_detects_non_nice(self, figure_exact):
        good = maximal_nice(figure_exact, 7)
        tampered = list(good.p)
        tampered[-1] = F(1, 2)
        assert niceness_violations(figure_exact, 7, tampered) != []
