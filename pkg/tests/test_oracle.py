import itertools
from fractions import Fraction

import pytest

from robsel.model import Scenario, SelectionSolution, make_instance
from robsel.oracle import (
    OracleCapExceeded,
    oracle_adversarial_continuous,
    oracle_adversarial_discrete,
    oracle_incremental,
    oracle_robust,
)
from robsel.robust_continuous import solve_rrec_continuous
from robsel.selection import solve_irec, solve_selection


def test_incremental_examples():
    inst = make_instance(5, 3, 1, 0, "continuous", [4, 7, 2, 1, 9], [0] * 5)
    rep = oracle_incremental(inst, SelectionSolution.of([0, 1, 2], 5), Scenario.nominal(inst), "irec")
    assert rep.value == 7 and rep.witness_y.items == (0, 2, 3)
    inst = make_instance(4, 2, 1, 0, "continuous", [9, 8, 1, 5], [0] * 4)
    assert oracle_incremental(inst, SelectionSolution.of([0, 1], 4), Scenario.nominal(inst), "irec").value == 9


def test_incremental_extreme_recovery():
    costs = [6, 2, 8, 1, 4]
    full = make_instance(5, 3, 3, 0, "continuous", costs, [0] * 5)
    x = SelectionSolution.of([0, 2, 4], 5)
    assert oracle_incremental(full, x, Scenario.nominal(full), "irec").value == solve_selection(costs, 3).value
    none = full.replace(k=0)
    assert oracle_incremental(none, x, Scenario.nominal(none), "irec").value == 18


def test_discrete_adversary_example():
    inst = make_instance(3, 2, 1, 1, "discrete", [2, 3, 1], [5, 0, 4])
    rep = oracle_adversarial_discrete(inst, SelectionSolution.of([0, 1], 3), "arec")
    assert rep.value == 5
    assert rep.enumeration_size == 4


def test_discrete_adversary_extremes():
    inst = make_instance(4, 2, 1, 0, "discrete", [3, 1, 4, 1], [5, 9, 2, 6])
    x = SelectionSolution.of([0, 2], 4)
    assert oracle_adversarial_discrete(inst, x, "arec").value == solve_irec(inst, x, Scenario.nominal(inst)).value
    full = inst.replace(gamma=Fraction(4))
    assert oracle_adversarial_discrete(full, x, "arec").value == solve_irec(full, x, Scenario.upper(full)).value


def test_continuous_full_recovery_ignores_x():
    inst = make_instance(4, 2, 2, 5, "continuous", [3, 1, 4, 1], [5, 9, 2, 6])
    values = {oracle_adversarial_continuous(inst, SelectionSolution.of(c, 4), "arec").value
              for c in itertools.combinations(range(4), 2)}
    assert len(values) == 1


def test_robust_examples():
    inst = make_instance(3, 2, 1, 2, "continuous", [1, 2, 1], [3, 3, 0], [1, 1, 4])
    assert oracle_robust(inst, "rrec").value == Fraction(11, 2)
    inst = make_instance(2, 1, 0, 5, "continuous", [1, 1], [5, 5], [10, 10])
    rep = oracle_robust(inst, "r2st")
    assert rep.value == Fraction(7, 2) and rep.witness_x.items == ()


def test_caps(monkeypatch):
    big = make_instance(13, 2, 1, 1, "continuous", [1] * 13, [1] * 13)
    with pytest.raises(OracleCapExceeded):
        oracle_robust(big, "rrec")
    monkeypatch.setenv("ROBSEL_ORACLE_CAP", "13")
    assert oracle_robust(big, "rrec").value == solve_rrec_continuous(big)[1]
    monkeypatch.setenv("ROBSEL_ORACLE_CAP", "2")
    with pytest.raises(OracleCapExceeded):
        oracle_robust(big, "r2st")
