import itertools
import random
from fractions import Fraction

import pytest

from robsel.model import Scenario, SelectionSolution, make_instance
from robsel.oracle import oracle_incremental
from robsel.selection import (
    DualCandidate,
    TrivialCase,
    dual_objective,
    kth_smallest,
    optimal_dual_pair,
    recovery_value_by_split,
    smallest_indices,
    solve_i2st,
    solve_irec,
    solve_selection,
)


def _inst(costs, p, k):
    return make_instance(len(costs), p, k, 0, "continuous", costs, [0] * len(costs))


def _x(items, n):
    return SelectionSolution.of([i - 1 for i in items], n)


def test_selection_examples():
    sol = solve_selection([5, 1, 3], 2)
    assert sol.items == (1, 2) and sol.value == 4
    assert solve_selection([5, 1, 3], 0).items == ()
    tie = solve_selection([2, 2, 2], 2)
    assert tie.items == (0, 1) and tie.value == 4


def test_selection_matches_sorting():
    rng = random.Random(3)
    for _ in range(300):
        n = rng.randint(1, 40)
        costs = [rng.randint(0, 9) for _ in range(n)]
        p = rng.randint(0, n)
        want = sorted(range(n), key=lambda i: (costs[i], i))[:p]
        assert smallest_indices(costs, p) == sorted(want)
        if p:
            assert kth_smallest(costs, p) == sorted(costs)[p - 1]


def test_irec_examples():
    inst = _inst([4, 7, 2, 1, 9], 3, 1)
    y = solve_irec(inst, _x([1, 2, 3], 5), Scenario.nominal(inst))
    assert y.items == (0, 2, 3) and y.value == 7
    inst = _inst([9, 8, 1, 5], 2, 1)
    y = solve_irec(inst, _x([1, 2], 4), Scenario.nominal(inst))
    assert y.items == (1, 2) and y.value == 9


def test_irec_without_recovery_keeps_x():
    inst = _inst([4, 7, 2, 1, 9], 3, 0)
    x = _x([1, 2, 5], 5)
    y = solve_irec(inst, x, Scenario.nominal(inst))
    assert y.items == x.items and y.value == 20


def test_i2st_examples():
    inst = _inst([0, 3, 1], 2, 0)
    y = solve_i2st(inst, _x([1], 3), Scenario.nominal(inst))
    assert y.items == (2,) and y.value == 1
    inst = _inst([5, 1, 3], 2, 0)
    y = solve_i2st(inst, _x([], 3), Scenario.nominal(inst))
    assert y.items == (1, 2) and y.value == 4
    assert solve_i2st(inst, _x([1, 3], 3), Scenario.nominal(inst)).value == 0


def test_dual_pair_examples():
    inst = _inst([4, 7, 2, 1, 9], 3, 1)
    x = _x([1, 2, 3], 5)
    cand, stats = optimal_dual_pair(inst, x, Scenario.nominal(inst))
    assert cand == DualCandidate(Fraction(4), Fraction(0))
    assert dual_objective(inst.nominal_cost, x.items, 3, 1, cand) == 7
    inst = _inst([9, 8, 1, 5], 2, 1)
    x = _x([1, 2], 4)
    cand, stats = optimal_dual_pair(inst, x, Scenario.nominal(inst))
    assert stats.b1 == 8 and stats.b == 5
    assert cand == DualCandidate(Fraction(1), Fraction(7))
    assert dual_objective(inst.nominal_cost, x.items, 2, 1, cand) == 9


def test_dual_pair_constant_costs():
    inst = _inst([3] * 5, 3, 2)
    cand, _ = optimal_dual_pair(inst, _x([1, 2, 3], 5), Scenario.nominal(inst))
    assert cand == DualCandidate(Fraction(3), Fraction(0))


def test_dual_pair_needs_recovery():
    inst = _inst([1, 2], 1, 0)
    with pytest.raises(TrivialCase):
        optimal_dual_pair(inst, _x([1], 2), Scenario.nominal(inst))


def test_incremental_against_oracle():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randint(1, 8)
        p = rng.randint(1, n)
        k = rng.randint(0, p)
        costs = [Fraction(rng.randint(0, 12), rng.choice([1, 2, 3])) for _ in range(n)]
        inst = _inst(costs, p, k)
        scen = Scenario.nominal(inst)
        x = SelectionSolution.of(rng.sample(range(n), p), n)
        want = oracle_incremental(inst, x, scen, "irec").value
        assert solve_irec(inst, x, scen).value == want
        assert recovery_value_by_split(costs, x.items, p, k) == want
        if k:
            cand, _ = optimal_dual_pair(inst, x, scen)
            assert dual_objective(costs, x.items, p, k, cand) == want
        xs = SelectionSolution.of(rng.sample(range(n), rng.randint(0, p)), n)
        assert solve_i2st(inst, xs, scen).value == oracle_incremental(inst, xs, scen, "i2st").value


def test_full_recovery_is_plain_selection():
    costs = [6, 2, 8, 1, 4]
    inst = _inst(costs, 3, 3)
    for items in itertools.combinations(range(5), 3):
        x = SelectionSolution.of(items, 5)
        assert solve_irec(inst, x, Scenario.nominal(inst)).value == 7


def test_dual_pair_when_b1_ties_b():
    # b1 = b = 109, but two outsiders (96, 60) are strictly cheaper than b while k = 1
    costs = [109, 66, 96, 60, 109, 109]
    inst = _inst(costs, 4, 1)
    x = _x([1, 2, 5, 6], 6)
    cand, stats = optimal_dual_pair(inst, x, Scenario.nominal(inst))
    assert stats.b1 == stats.b == 109
    assert cand == DualCandidate(Fraction(60), Fraction(49))
    assert dual_objective(costs, x.items, 4, 1, cand) == solve_irec(inst, x, Scenario.nominal(inst)).value == 344
