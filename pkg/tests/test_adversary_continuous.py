import random
from fractions import Fraction

import pytest

from conftest import random_first_stage, random_instance
from robsel.adversary_continuous import (
    EnvelopeProblem,
    a2st_continuous,
    arec_continuous_dual,
    arec_continuous_intervals,
    arec_continuous_levels,
    dual_value,
    greedy_worst_scenario,
    maximize_envelope,
)
from robsel.model import Scenario, SelectionSolution, make_instance, scenario_violations
from robsel.oracle import oracle_adversarial_continuous
from robsel.selection import DualCandidate, solve_i2st, solve_irec

F = Fraction


def two_items(gamma=5):
    return make_instance(2, 1, 1, gamma, "continuous", [0, 0], [10, 10])


def three_items():
    return make_instance(3, 2, 1, 2, "continuous", [1, 2, 1], [3, 3, 0], [1, 1, 4])


def test_envelope_crossing_points():
    t, _ = maximize_envelope(EnvelopeProblem(F(4), F(5), (F(-5), F(44)), (F(4), F(4))))
    assert t == F(40, 9)
    t, v = maximize_envelope(EnvelopeProblem(F(0), F(10), (F(-2), F(28)), (F(2), F(17))))
    assert t == F(11, 4) and v == F(45, 2)


def test_envelope_increasing_takes_right_end():
    assert maximize_envelope(EnvelopeProblem(F(0), F(1), (F(1), F(0)), (F(1), F(0)))) == (1, 1)


def test_envelope_rejects_empty_interval():
    with pytest.raises(ValueError):
        EnvelopeProblem(F(2), F(1), (F(0), F(0)), (F(0), F(0)))


def test_greedy_scenario():
    inst = two_items()
    x = SelectionSolution.of([0], 2)
    scen = greedy_worst_scenario(inst, x, DualCandidate(F(5, 2)))
    assert scen.deltas == (F(5, 2), F(5, 2))
    assert greedy_worst_scenario(inst, x, DualCandidate(F(-1))).deltas == (0, 0)
    zero = two_items(gamma=0)
    assert greedy_worst_scenario(zero, x, DualCandidate(F(7), F(2))).deltas == (0, 0)


@pytest.mark.parametrize("solver", [arec_continuous_intervals, arec_continuous_levels])
def test_arec_examples(solver):
    value, scen = solver(two_items(), SelectionSolution.of([0], 2))
    assert value == F(5, 2)
    value, scen = solver(three_items(), SelectionSolution.of([0, 1], 3))
    assert value == F(7, 2)
    assert solve_irec(three_items(), SelectionSolution.of([0, 1], 3), scen).value == F(7, 2)


def test_zero_budget_is_nominal():
    inst = make_instance(4, 2, 1, 0, "continuous", [3, 1, 4, 1], [5, 9, 2, 6])
    x = SelectionSolution.of([0, 2], 4)
    nominal = solve_irec(inst, x, Scenario.nominal(inst)).value
    assert arec_continuous_intervals(inst, x)[0] == nominal
    assert arec_continuous_levels(inst, x)[0] == nominal


def test_levels_no_headroom():
    inst = make_instance(4, 2, 1, 3, "continuous", [3, 1, 4, 1], [0, 0, 0, 0])
    x = SelectionSolution.of([0, 2], 4)
    states = []
    value, _ = arec_continuous_levels(inst, x, trace=states.append)
    assert value == solve_irec(inst, x, Scenario.nominal(inst)).value
    assert len(states) == 1


def test_levels_saturating_budget():
    inst = make_instance(4, 2, 1, 100, "continuous", [3, 1, 4, 1], [5, 9, 2, 6])
    x = SelectionSolution.of([0, 2], 4)
    value, scen = arec_continuous_levels(inst, x)
    assert scen.deltas == inst.deviation
    assert value == solve_irec(inst, x, Scenario.upper(inst)).value


def test_levels_trace_states_are_consistent():
    rng = random.Random(8)
    for _ in range(40):
        inst = random_instance(rng, "continuous", n_max=12, k=lambda p: rng.randint(1, p))
        x = random_first_stage(rng, inst)
        states = []
        value, _ = arec_continuous_levels(inst, x, trace=states.append)
        assert states[-1].value == value
        values = [s.value for s in states]
        assert values == sorted(values)
        for s in states:
            scen = s.scenario(inst, x)
            assert not scenario_violations(inst, scen)
            assert solve_irec(inst, x, scen).value == s.value
            assert s.remaining_budget == inst.gamma - sum(scen.deltas)


def test_dual_route_agrees():
    rng = random.Random(9)
    for _ in range(100):
        inst = random_instance(rng, "continuous", k=lambda p: rng.randint(1, p))
        x = random_first_stage(rng, inst)
        value, cand = arec_continuous_dual(inst, x)
        assert dual_value(inst, x, cand) == value
        scen = greedy_worst_scenario(inst, x, cand)
        assert solve_irec(inst, x, scen).value == value


def test_arec_against_lp_oracle():
    rng = random.Random(10)
    for _ in range(150):
        inst = random_instance(rng, "continuous")
        if rng.random() < 0.3:
            inst = inst.replace(gamma=F(rng.randint(0, 60), rng.randint(1, 7)))
        x = random_first_stage(rng, inst)
        want = oracle_adversarial_continuous(inst, x, "arec").value
        for solver in (arec_continuous_intervals, arec_continuous_levels):
            value, scen = solver(inst, x)
            assert value == want
            assert not scenario_violations(inst, scen)
            assert solve_irec(inst, x, scen).value == want


def test_a2st_examples():
    inst = make_instance(3, 2, 0, 3, "continuous", [1, 1, 1], [2, 2, 2])
    assert a2st_continuous(inst, SelectionSolution.of([], 3))[0] == 4
    assert a2st_continuous(inst, SelectionSolution.of([0, 2], 3))[0] == 0
    flat = make_instance(4, 3, 0, 0, "continuous", [4, 2, 7, 1], [3, 3, 3, 3])
    assert a2st_continuous(flat, SelectionSolution.of([3], 4))[0] == 6


def test_a2st_against_lp_oracle():
    rng = random.Random(12)
    for _ in range(150):
        inst = random_instance(rng, "continuous")
        x = random_first_stage(rng, inst, rng.randint(0, inst.p))
        value, scen = a2st_continuous(inst, x)
        assert value == oracle_adversarial_continuous(inst, x, "a2st").value
        assert solve_i2st(inst, x, scen).value == value


def test_wrong_first_stage_size():
    with pytest.raises(ValueError):
        arec_continuous_levels(three_items(), SelectionSolution.of([0], 3))
    with pytest.raises(ValueError):
        a2st_continuous(three_items(), SelectionSolution.of([0, 1, 2], 3))
