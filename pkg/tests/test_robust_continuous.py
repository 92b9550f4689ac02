import random
from fractions import Fraction

from conftest import random_instance
from robsel.adversary_continuous import a2st_continuous
from robsel.lp import build_nominal_rrec_lp, solve_lp
from robsel.model import SelectionSolution, make_instance
from robsel.oracle import oracle_robust
from robsel.robust_continuous import (
    count_cells,
    dominance_preprocess,
    pi_candidates,
    solve_r2st_continuous,
    solve_rrec_continuous,
)

F = Fraction


def test_pi_candidates():
    assert pi_candidates(2, 1, "r2st") == [0, F(1, 2), 1]
    assert pi_candidates(2, 2, "rrec") == [0, F(1, 3), F(1, 2), F(2, 3), 1]
    for n in range(1, 7):
        assert len(pi_candidates(n, n, "rrec")) <= (n + 2) ** 2


def test_dominance_example():
    inst = make_instance(2, 1, 1, 1, "continuous", [1, 2], [1, 1], [1, 2])
    dom = dominance_preprocess(inst)
    assert dom.removed == [1]
    assert dom.mapping == [0]
    assert dom.instance == inst


def test_dominated_item_still_serves_recovery():
    # item 1 is dominated by items 2 and 3, yet deleting it outright raises the optimum to 8
    inst = make_instance(3, 2, 1, 6, "continuous", [3, 1, 1], [2, 3, 3], [1, 0, 0])
    assert dominance_preprocess(inst).removed == [0]
    assert oracle_robust(inst, "rrec").value == F(22, 3)
    assert solve_rrec_continuous(inst, preprocess=True)[1] == F(22, 3)
    deleted = make_instance(2, 2, 1, 6, "continuous", [1, 1], [3, 3], [0, 0])
    assert oracle_robust(deleted, "rrec").value == 8


def test_dominance_nothing_to_remove():
    inst = make_instance(3, 2, 1, 1, "continuous", [1, 2, 3], [1, 1, 1], [3, 2, 1])
    dom = dominance_preprocess(inst)
    assert dom.removed == [] and dom.instance == inst


def test_rrec_example():
    inst = make_instance(3, 2, 1, 2, "continuous", [1, 2, 1], [3, 3, 0], [1, 1, 4])
    x, value = solve_rrec_continuous(inst)
    assert x.items == (0, 1) and value == F(11, 2)
    assert solve_rrec_continuous(inst, preprocess=True)[1] == F(11, 2)


def test_rrec_zero_budget_is_nominal():
    rng = random.Random(31)
    for _ in range(20):
        inst = random_instance(rng, "continuous", n_max=6, gamma=lambda n, d: 0)
        assert solve_rrec_continuous(inst)[1] == solve_lp(build_nominal_rrec_lp(inst)).value


def test_rrec_saturated_budget():
    rng = random.Random(32)
    for _ in range(20):
        inst = random_instance(rng, "continuous", n_max=6, value_max=10, gamma=lambda n, d: sum(d) + 1)
        assert solve_rrec_continuous(inst)[1] == oracle_robust(inst, "rrec").value


def test_r2st_example():
    inst = make_instance(2, 1, 0, 5, "continuous", [1, 1], [5, 5], [10, 10])
    x, value = solve_r2st_continuous(inst)
    assert x.items == () and value == F(7, 2)


def test_r2st_zero_budget():
    inst = make_instance(4, 2, 0, 0, "continuous", [3, 1, 4, 1], [5, 9, 2, 6], [2, 5, 1, 8])
    assert solve_r2st_continuous(inst)[1] == 2


def test_r2st_never_worse_than_empty_first_stage():
    rng = random.Random(33)
    for _ in range(20):
        inst = random_instance(rng, "continuous", n_max=6, with_first_stage=False)
        empty = a2st_continuous(inst, SelectionSolution.of([], inst.n))[0]
        assert solve_r2st_continuous(inst)[1] <= empty


def test_against_oracle():
    rng = random.Random(34)
    for _ in range(40):
        inst = random_instance(rng, "continuous", n_max=6, value_max=10)
        if rng.random() < 0.3:
            inst = inst.replace(gamma=F(rng.randint(0, 30), rng.randint(1, 4)))
        x, value = solve_rrec_continuous(inst)
        assert value == oracle_robust(inst, "rrec").value
        assert len(x.items) == inst.p
        x, value = solve_r2st_continuous(inst)
        assert value == oracle_robust(inst, "r2st").value


def test_cell_count_is_polynomial():
    inst = make_instance(5, 3, 1, 4, "continuous", [1, 2, 3, 4, 5], [2] * 5, [1] * 5)
    assert 0 < count_cells(inst, "rrec") <= 2 * 5 * (5 + 2) ** 2 * 6 ** 2 * 4
    assert 0 < count_cells(inst, "r2st") <= (5 + 1) ** 2 * 4 * 6
