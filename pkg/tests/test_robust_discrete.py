import itertools
import random
from fractions import Fraction

import pytest

from conftest import random_instance
from robsel.adversary_discrete import a2st_discrete, arec_discrete
from robsel.lp import build_nominal_rrec_lp, solve_lp
from robsel.model import SelectionSolution, make_instance
from robsel.oracle import oracle_robust
from robsel.robust_discrete import (
    approx_nominal_rrec,
    approx_r2st,
    build_r2st_discrete_mip,
    build_rrec_discrete_mip,
    evaluate_fixed_x,
    minmax_budgeted,
    parse_lp,
    solve_exact_enumeration,
    special_cases,
    write_lp,
)
from robsel.selection import smallest_indices


def first_stages(inst, problem):
    sizes = [inst.p] if problem == "rrec" else range(inst.p + 1)
    for size in sizes:
        for items in itertools.combinations(range(inst.n), size):
            yield SelectionSolution.of(items, inst.n)


def cost(inst, x):
    return sum((inst.first_stage_cost[i] for i in x.items), Fraction(0))


def test_mip_structure():
    inst = make_instance(3, 2, 1, 1, "discrete", [2, 3, 1], [5, 0, 4], [1, 1, 1])
    m = build_rrec_discrete_mip(inst)
    S = len(m.candidates)
    assert m.num_vars == 1 + 3 + S * (1 + 3)
    assert m.num_rows == 1 + S * (3 + 1)
    m2 = build_r2st_discrete_mip(inst)
    assert len(m2.candidates) <= 2 * 3 + 1
    assert m2.num_vars == 1 + 3 + len(m2.candidates) * 4


def test_fixed_x_matches_adversary():
    rng = random.Random(41)
    for _ in range(40):
        inst = random_instance(rng, "discrete", n_max=6, value_max=10, k=lambda p: rng.randint(1, p))
        m = build_rrec_discrete_mip(inst)
        for x in first_stages(inst, "rrec"):
            assert evaluate_fixed_x(m, x) == cost(inst, x) + arec_discrete(inst, x)[0]
        m = build_r2st_discrete_mip(inst)
        for x in first_stages(inst, "r2st"):
            assert evaluate_fixed_x(m, x) == cost(inst, x) + a2st_discrete(inst, x)[0]


def test_zero_budget_mip_is_nominal():
    inst = make_instance(5, 3, 1, 0, "discrete", [4, 8, 1, 6, 3], [2, 2, 2, 2, 2], [1, 5, 2, 2, 3])
    m = build_rrec_discrete_mip(inst)
    best = min(evaluate_fixed_x(m, x) for x in first_stages(inst, "rrec"))
    assert best == solve_lp(build_nominal_rrec_lp(inst)).value


def test_mip_rejects_without_recovery():
    inst = make_instance(2, 1, 0, 1, "discrete", [1, 2], [1, 1])
    with pytest.raises(ValueError):
        build_rrec_discrete_mip(inst)


def test_enumeration():
    inst = make_instance(3, 3, 1, 1, "discrete", [1, 2, 3], [1, 1, 1], [1, 1, 1])
    x, value = solve_exact_enumeration(inst, "rrec")
    assert x.items == (0, 1, 2) and value == 3 + 6 + 1
    flat = make_instance(4, 2, 1, 0, "discrete", [4, 1, 3, 2], [5, 5, 5, 5], [0, 0, 0, 0])
    assert solve_exact_enumeration(flat, "rrec")[1] == 3
    assert solve_exact_enumeration(flat, "r2st")[1] == 0


def test_minmax_examples():
    inst = make_instance(3, 2, 0, 1, "discrete", [1, 1, 1], [2, 2, 2])
    assert minmax_budgeted(inst)[1] == 4
    plain = make_instance(4, 2, 0, 2, "discrete", [4, 1, 3, 2], [0] * 4, [1, 1, 1, 1])
    assert minmax_budgeted(plain)[1] == 2 + 3


def test_minmax_continuous_budget():
    # a fractional budget can only lift one item partially
    inst = make_instance(2, 1, 0, 1, "continuous", [0, 0], [2, 2])
    assert minmax_budgeted(inst)[1] == 1
    rng = random.Random(42)
    for _ in range(40):
        inst = random_instance(rng, "continuous", n_max=6, k=lambda p: 0)
        inst = inst.replace(gamma=Fraction(rng.randint(0, 40), 3))
        assert minmax_budgeted(inst)[1] == oracle_robust(inst, "rrec").value


def test_special_cases():
    inst = make_instance(4, 2, 1, 1, "discrete", [4, 1, 3, 2], [2, 6, 1, 1])
    case = special_cases(inst, "rrec")
    assert case.case == "k>=gamma,C=0"
    assert case.x.items == tuple(sorted(smallest_indices(inst.nominal_cost, 2)))
    assert case.value == oracle_robust(inst, "rrec").value
    none = inst.replace(k=0)
    assert special_cases(none, "rrec").case == "k=0"
    priced = make_instance(4, 2, 1, 2, "discrete", [4, 1, 3, 2], [2, 6, 1, 1], [1, 2, 3, 4])
    assert special_cases(priced, "rrec") is None
    assert special_cases(priced, "r2st") is None


def test_approx_exact_without_deviation():
    inst = make_instance(5, 3, 1, 2, "discrete", [4, 8, 1, 6, 3], [0] * 5, [1, 5, 2, 2, 3])
    res = approx_nominal_rrec(inst, 1)
    assert res.value == oracle_robust(inst, "rrec").value
    assert approx_r2st(inst, 1).value == oracle_robust(inst, "r2st").value


def test_approx_full_recovery_takes_cheapest_first_stage():
    inst = make_instance(4, 2, 2, 1, "discrete", [4, 4, 4, 4], [2, 2, 2, 2], [3, 1, 4, 2])
    assert approx_nominal_rrec(inst, Fraction(1, 2)).x.items == (1, 3)


def test_approx_r2st_examples():
    inst = make_instance(2, 1, 0, 1, "discrete", [3, 1], [0, 0], [2, 5])
    assert approx_r2st(inst, 1).x.items == ()
    free = make_instance(3, 2, 0, 1, "discrete", [3, 1, 2], [1, 1, 1], [0, 0, 0])
    res = approx_r2st(free, Fraction(1, 2))
    assert len(res.x.items) == 2 and res.value == 0


def test_approx_premise_is_checked():
    inst = make_instance(2, 1, 0, 1, "discrete", [1, 1], [5, 0])
    with pytest.raises(ValueError):
        approx_r2st(inst, Fraction(1, 2))


def test_lp_export_round_trip():
    inst = make_instance(3, 2, 1, 1, "discrete", ["1/3", 3, 1], [5, "0.5", 4], [1, 2, 1])
    for build in (build_rrec_discrete_mip, build_r2st_discrete_mip):
        m = build(inst)
        text = write_lp(m)
        assert text == write_lp(build(inst))
        binary = text.split("Binary\n")[1].split("End")[0].split()
        assert binary == ["x_1", "x_2", "x_3"]
        back = parse_lp(text)
        for x in first_stages(inst, m.problem):
            assert evaluate_fixed_x(back, x) == evaluate_fixed_x(m, x)
