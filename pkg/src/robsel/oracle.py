"""Brute-force reference solvers.

Nothing here reuses the greedy or dual machinery that it is meant to check:
recovery problems are solved by listing subsets, discrete adversaries by
listing raised-item sets, and continuous adversaries through the exact LP.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .lp import build_a2st_lp, build_arec_lp, solve_lp
from .model import Instance, Scenario, SelectionSolution, scenario_violations

INCREMENTAL_CAP = 20
DISCRETE_CAP = 16
DISCRETE_GAMMA_CAP = 8
ROBUST_CAP = 12


class OracleCapExceeded(RuntimeError):
    pass


def _cap(default: int) -> int:
    env = os.environ.get("ROBSEL_ORACLE_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise OracleCapExceeded(f"ROBSEL_ORACLE_CAP is not an integer: {env!r}") from None
    return default


def _require(n: int, default: int, what: str) -> None:
    cap = _cap(default)
    if n > cap:
        raise OracleCapExceeded(f"{what}: n={n} exceeds the oracle cap {cap}")


@dataclass(frozen=True)
class OracleReport:
    value: Fraction
    witness_x: SelectionSolution | None = None
    witness_scenario: Scenario | None = None
    witness_y: SelectionSolution | None = None
    enumeration_size: int = 0


@lru_cache(maxsize=256)
def _subsets(pool: tuple[int, ...], size: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(pool, size))


def _feasible_recoveries(n: int, x_items: tuple[int, ...], p: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(y for y in _subsets(tuple(range(n)), p) if sum(1 for i in x_items if i not in y) <= k)


def _feasible_completions(n: int, x_items: tuple[int, ...], p: int) -> tuple[tuple[int, ...], ...]:
    rest = tuple(i for i in range(n) if i not in set(x_items))
    return _subsets(rest, p - len(x_items))


def _best(costs, candidates) -> tuple[Fraction, tuple[int, ...]]:
    best_v = None
    best_y: tuple[int, ...] = ()
    for y in candidates:
        v = sum((costs[i] for i in y), Fraction(0))
        if best_v is None or v < best_v:
            best_v, best_y = v, y
    if best_v is None:
        raise ValueError("no feasible second-stage solution")
    return best_v, best_y


def oracle_incremental(inst: Instance, x: SelectionSolution, scen: Scenario, problem: str) -> OracleReport:
    _require(inst.n, INCREMENTAL_CAP, "oracle_incremental")
    costs = scen.costs(inst)
    if problem == "irec":
        if len(x.items) != inst.p:
            raise ValueError("first stage must contain exactly p items")
        cands = _feasible_recoveries(inst.n, x.items, inst.p, inst.k)
    elif problem == "i2st":
        if len(x.items) > inst.p:
            raise ValueError("first stage has more than p items")
        cands = _feasible_completions(inst.n, x.items, inst.p)
    else:
        raise ValueError(f"unknown incremental problem {problem!r}")
    v, y = _best(costs, cands)
    return OracleReport(v, x, scen, SelectionSolution.of(y, inst.n, v), len(cands))


def _incremental_problem(problem: str) -> str:
    return {"arec": "irec", "a2st": "i2st"}[problem]


def oracle_adversarial_discrete(inst: Instance, x: SelectionSolution, problem: str) -> OracleReport:
    _require(inst.n, DISCRETE_CAP, "oracle_adversarial_discrete")
    g = int(inst.gamma)
    if g > _cap(DISCRETE_GAMMA_CAP) and g < inst.n:
        raise OracleCapExceeded(f"oracle_adversarial_discrete: gamma={g} exceeds the oracle cap")
    inc = _incremental_problem(problem)
    if inc == "irec":
        cands = _feasible_recoveries(inst.n, x.items, inst.p, inst.k)
    else:
        cands = _feasible_completions(inst.n, x.items, inst.p)
    best = None
    count = 0
    for size in range(min(g, inst.n) + 1):
        for raised in _subsets(tuple(range(inst.n)), size):
            count += 1
            deltas = [Fraction(0)] * inst.n
            for i in raised:
                deltas[i] = inst.deviation[i]
            scen = Scenario(tuple(deltas))
            costs = scen.costs(inst)
            v, y = _best(costs, cands)
            if best is None or v > best[0]:
                best = (v, scen, y)
    assert best is not None
    v, scen, y = best
    assert not scenario_violations(inst, scen)
    return OracleReport(v, x, scen, SelectionSolution.of(y, inst.n, v), count)


def oracle_adversarial_continuous(inst: Instance, x: SelectionSolution, problem: str) -> OracleReport:
    if problem == "arec":
        model = build_arec_lp(inst, x)
    elif problem == "a2st":
        model = build_a2st_lp(inst, x)
    else:
        raise ValueError(f"unknown adversarial problem {problem!r}")
    sol = solve_lp(model)
    if sol.status != "optimal":
        raise RuntimeError(f"adversarial LP ended with status {sol.status}")
    first = model.names.index("delta_1")
    scen = Scenario(tuple(sol.x[first : first + inst.n]))
    assert not scenario_violations(inst, scen, inst.budget_model)
    return OracleReport(sol.value, x, scen, None, 1)


def oracle_adversarial(inst: Instance, x: SelectionSolution, problem: str) -> OracleReport:
    if inst.discrete:
        return oracle_adversarial_discrete(inst, x, problem)
    return oracle_adversarial_continuous(inst, x, problem)


def oracle_robust(inst: Instance, problem: str) -> OracleReport:
    """min over first-stage sets of C x + adversarial value."""
    _require(inst.n, ROBUST_CAP, "oracle_robust")
    if problem == "rrec":
        firsts = list(_subsets(tuple(range(inst.n)), inst.p))
        adv = "arec"
    elif problem == "r2st":
        firsts = [s for size in range(inst.p + 1) for s in _subsets(tuple(range(inst.n)), size)]
        adv = "a2st"
    else:
        raise ValueError(f"unknown robust problem {problem!r}")
    best = None
    for items in firsts:
        x = SelectionSolution.of(items, inst.n)
        rep = oracle_adversarial(inst, x, adv)
        v = sum((inst.first_stage_cost[i] for i in items), Fraction(0)) + rep.value
        if best is None or v < best[0] or (v == best[0] and items < best[1].items):
            best = (v, SelectionSolution.of(items, inst.n, v), rep.witness_scenario)
    assert best is not None
    return OracleReport(best[0], best[1], best[2], None, len(firsts))
