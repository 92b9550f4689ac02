"""Recoverable and two-stage robust selection under the continuous budget.

Both problems are solved exactly by enumerating a polynomial family of cells.
A cell fixes pi and the cardinalities of the rescaled second-stage variables;
what remains is a totally unimodular LP solved by the exact simplex. Every
cell value is an upper bound on the optimum and some cell attains it, so cells
are visited in order of a cheap lower bound and the search stops as soon as
that bound reaches the incumbent.
"""

from __future__ import annotations

import dataclasses
import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .adversary_continuous import a2st_continuous, arec_continuous_intervals
from .lp import build_r2st_tu_subproblem, build_rrec_tu_subproblem, solve_lp
from .model import Instance, SelectionSolution
from .selection import smallest_indices


@dataclass(frozen=True)
class EnumerationCell:
    problem: str
    pi: Fraction
    J: tuple[int, ...]
    Z: int
    Zbar: int
    Zp: int = 0
    Zbarp: int = 0
    X: int = 0
    # item outside J: (index, x_j, z_j, zbar_j); None in the integral branch
    fixed: tuple[int, int, Fraction, Fraction] | None = None
    offset: Fraction = Fraction(0)


def pi_candidates(n: int, p: int, variant: str) -> list[Fraction]:
    """All q/r in [0, 1]: q <= n, r <= n+1 for RREC; q <= p, r <= n for R2ST."""
    if n < 1:
        raise ValueError("n must be positive")
    v = variant.lower()
    if v == "rrec":
        qs, rs = range(n + 1), range(1, n + 2)
    elif v == "r2st":
        qs, rs = range(p + 1), range(1, n + 1)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    out = {Fraction(q, r) for q in qs for r in rs if q <= r}
    out |= {Fraction(0), Fraction(1)}
    return sorted(out)


class Dominance(NamedTuple):
    instance: Instance
    removed: list[int]  # kept out of the first stage
    forced_in: list[int]
    mapping: list[int]  # first-stage candidates, ascending


def _dominates(inst: Instance, a: int, b: int) -> bool:
    return (
        inst.first_stage_cost[a] <= inst.first_stage_cost[b]
        and inst.nominal_cost[a] <= inst.nominal_cost[b]
        and inst.upper_cost[a] <= inst.upper_cost[b]
    )


def dominance_preprocess(inst: Instance) -> Dominance:
    """Exclude items dominated by at least p others from the first stage.

    Exclusion is repeated until nothing changes. Excluded items stay in the
    instance: the adversary may still push the dominating items above them, so
    they remain useful for recovery and deleting them can raise the optimum.
    Items that may be fixed to 1 are only reported.
    """
    if inst.discrete:
        raise ValueError("continuous budget model required")
    alive = list(range(inst.n))
    removed: list[int] = []
    changed = True
    while changed:
        changed = False
        for l in reversed(alive):
            count = sum(1 for k in alive if k != l and _dominates(inst, k, l))
            if count >= inst.p:
                alive.remove(l)
                removed.append(l)
                changed = True
                break
    forced = [
        l for l in alive if sum(1 for k in alive if k != l and _dominates(inst, l, k)) >= len(alive) - inst.p
    ]
    return Dominance(inst, sorted(removed), forced, alive)


class _Prefix:
    """Sums of the m smallest first-stage, nominal and upper costs over an item set."""

    def __init__(self, inst: Instance, J: Sequence[int]):
        def pre(vals):
            out = [Fraction(0)]
            for v in sorted(vals):
                out.append(out[-1] + v)
            return out

        self.C = pre(inst.first_stage_cost[i] for i in J)
        self.lo = pre(inst.nominal_cost[i] for i in J)
        self.hi = pre(inst.upper_cost[i] for i in J)

    def bound(self, x_count: int, Z: int, Zbar: int, pi: Fraction) -> Fraction:
        return self.C[x_count] + pi * self.lo[Z] + (1 - pi) * self.hi[Zbar]


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def _overlap_guesses(pi: Fraction, need: Fraction, Zcap: int, Zbarcap: int):
    """Minimal (Z', Zbar') pairs with pi*Z' + (1-pi)*Zbar' >= need."""
    for zbp in range(Zbarcap + 1):
        rest = need - (1 - pi) * zbp
        if pi == 0:
            if rest > 0:
                continue
            zp = 0
        else:
            zp = max(0, _ceil(rest / pi))
        if zp <= Zcap:
            yield zp, zbp
            if zp == 0:
                break


def _rrec_cells(inst: Instance, fixed_out: frozenset[int] = frozenset()):
    n, p, k = inst.n, inst.p, inst.k
    gamma = inst.gamma
    full = tuple(range(n))
    pref = _Prefix(inst, full)
    need = Fraction(p - k)
    # integral branch: every z, zbar in {0, 1}
    for Z in range(n + 1):
        for Zb in range(Z + 1):
            if Z == Zb:
                if Z != p:
                    continue
                pis = [Fraction(0), Fraction(1)]
            else:
                if not Zb <= p <= Z:
                    continue
                pis = [Fraction(p - Zb, Z - Zb)]
            for pi in pis:
                for zp, zbp in _overlap_guesses(pi, need, min(Z, p), min(Zb, p)):
                    cell = EnumerationCell("rrec", pi, full, Z, Zb, zp, zbp, offset=gamma * pi)
                    yield cell, cell.offset + pref.bound(p, Z, Zb, pi)
    # one fractional variable on an item j kept outside J
    pis = pi_candidates(n, p, "rrec")
    for j in range(n):
        J = tuple(i for i in range(n) if i != j)
        pref_j = _Prefix(inst, J)
        C, lo, up = inst.first_stage_cost[j], inst.nominal_cost[j], inst.upper_cost[j]
        for xj in (0,) if j in fixed_out else (0, 1):
            xt = p - xj
            if xt > n - 1:
                continue
            for pi in pis:
                if pi == 0:
                    continue
                for Z in range(n):
                    for Zb in range(Z + 1) if pi < 1 else (0,):
                        # fractional z_j (zbar_j = 0)
                        zj = (p - Zb - (Z - Zb) * pi) / pi
                        if 0 <= zj <= 1:
                            off = gamma * pi + C * xj + lo * pi * zj
                            extra = xj * pi * zj
                            for zp, zbp in _overlap_guesses(pi, need - extra, min(Z, xt), min(Zb, xt)):
                                cell = EnumerationCell("rrec", pi, J, Z, Zb, zp, zbp, fixed=(j, xj, zj, Fraction(0)), offset=off)
                                yield cell, off + pref_j.bound(xt, Z, Zb, pi)
                        # fractional zbar_j (z_j = 1)
                        if pi < 1:
                            zbj = (p - pi * (Z + 1) - (1 - pi) * Zb) / (1 - pi)
                            if 0 <= zbj <= 1:
                                off = gamma * pi + C * xj + lo * pi + up * (1 - pi) * zbj
                                extra = xj * (pi + (1 - pi) * zbj)
                                for zp, zbp in _overlap_guesses(pi, need - extra, min(Z, xt), min(Zb, xt)):
                                    cell = EnumerationCell("rrec", pi, J, Z, Zb, zp, zbp, fixed=(j, xj, Fraction(1), zbj), offset=off)
                                    yield cell, off + pref_j.bound(xt, Z, Zb, pi)


def _r2st_cells(inst: Instance):
    n, p = inst.n, inst.p
    pref = _Prefix(inst, range(n))
    for pi in pi_candidates(n, p, "r2st"):
        for X in range(p + 1):
            if pi == 0:
                combos = [(0, p - X)]
            elif pi == 1:
                combos = [(p - X, 0)]
            else:
                combos = []
                for Zb in range(n + 1):
                    Z = (p - X - (1 - pi) * Zb) / pi
                    if Z.denominator == 1 and Zb <= Z <= n:
                        combos.append((int(Z), Zb))
            for Z, Zb in combos:
                if X + Z > n or X + Zb > n:
                    continue
                cell = EnumerationCell("r2st", pi, tuple(range(n)), Z, Zb, X=X, offset=inst.gamma * pi)
                yield cell, cell.offset + pref.bound(X, Z, Zb, pi)


def _solve_cell(inst: Instance, cell: EnumerationCell, fixed_out: frozenset[int] = frozenset()):
    if cell.problem == "rrec":
        xt = inst.p - (cell.fixed[1] if cell.fixed else 0)
        model = build_rrec_tu_subproblem(
            inst, cell.J, cell.Z, cell.Zbar, cell.Zp, cell.Zbarp, cell.pi, x_total=xt, fixed_out=fixed_out
        )
        width = 5
    else:
        model = build_r2st_tu_subproblem(inst, cell.X, cell.Z, cell.Zbar, cell.pi)
        width = 3
    model = dataclasses.replace(model, offset=cell.offset)
    sol = solve_lp(model)
    if sol.status != "optimal":
        return None
    if not sol.is_integral():
        raise AssertionError(f"non-integral vertex in a totally unimodular cell: {cell}")
    items = [i for t, i in enumerate(cell.J) if sol.x[width * t] == 1]
    if cell.fixed is not None and cell.fixed[1] == 1:
        items.append(cell.fixed[0])
    return sol.value, sorted(items)


def _best_first(inst: Instance, cells, fixed_out: frozenset[int] = frozenset()) -> tuple[Fraction, list[int], int]:
    heap = []
    for ordinal, (cell, lb) in enumerate(cells):
        heap.append((lb, ordinal, cell))
    heapq.heapify(heap)
    best = None
    solved = 0
    while heap:
        lb, _, cell = heapq.heappop(heap)
        if best is not None and lb >= best[0]:
            break
        res = _solve_cell(inst, cell, fixed_out)
        solved += 1
        if res is not None and (best is None or res[0] < best[0]):
            best = res
    assert best is not None, "no feasible cell"
    return best[0], best[1], solved


def _first_stage_cost(inst: Instance, items: Sequence[int]) -> Fraction:
    return sum((inst.first_stage_cost[i] for i in items), Fraction(0))


def solve_rrec_continuous(inst: Instance, preprocess: bool = False) -> tuple[SelectionSolution, Fraction]:
    """Exact recoverable robust selection under the continuous budget.

    With ``preprocess`` the first stage is restricted to the items that survive
    dominance_preprocess.
    """
    if inst.discrete:
        raise ValueError("continuous budget model required")
    pool = dominance_preprocess(inst).mapping if preprocess else list(range(inst.n))
    fixed_out = frozenset(range(inst.n)) - frozenset(pool)
    if inst.k == 0:
        from .robust_discrete import minmax_budgeted

        return minmax_budgeted(inst, restrict=pool)
    if inst.k == inst.p:
        items = smallest_indices(inst.first_stage_cost, inst.p, among=pool)
        x = SelectionSolution.of(items, inst.n)
        v = _first_stage_cost(inst, items) + arec_continuous_intervals(inst, x)[0]
        return SelectionSolution.of(items, inst.n, v), v
    value, items, _ = _best_first(inst, _rrec_cells(inst, fixed_out), fixed_out)
    x = SelectionSolution.of(items, inst.n)
    check = _first_stage_cost(inst, items) + arec_continuous_intervals(inst, x)[0]
    if check != value:
        raise RuntimeError(f"cell value {value} disagrees with the re-evaluated first stage ({check})")
    return SelectionSolution.of(items, inst.n, value), value


def solve_r2st_continuous(inst: Instance) -> tuple[SelectionSolution, Fraction]:
    """Exact two-stage robust selection under the continuous budget."""
    if inst.discrete:
        raise ValueError("continuous budget model required")
    value, items, _ = _best_first(inst, _r2st_cells(inst))
    x = SelectionSolution.of(items, inst.n)
    check = _first_stage_cost(inst, items) + a2st_continuous(inst, x)[0]
    if check != value:
        raise RuntimeError(f"cell value {value} disagrees with the re-evaluated first stage ({check})")
    return SelectionSolution.of(items, inst.n, value), value


def count_cells(inst: Instance, problem: str) -> int:
    """Number of cells before pruning (diagnostic)."""
    gen = _rrec_cells(inst) if problem == "rrec" else _r2st_cells(inst)
    return sum(1 for _ in gen)
