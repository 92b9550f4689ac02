"""Nominal selection, order statistics and the incremental problems.

Ties between equal costs are resolved by item index, so every routine here
is deterministic and agrees with a stable sort on ``(cost, index)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import Instance, Scenario, SelectionSolution


class TrivialCase(ValueError):
    """Signals an input for which the requested quantity is not defined (k = 0)."""


@dataclass(frozen=True)
class DualCandidate:
    alpha: Fraction
    beta: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")


@dataclass(frozen=True)
class OrderStatistics:
    b: Fraction
    b1: Fraction | None
    b2: Fraction | None


def _select_keys(keys: list, m: int) -> list:
    """Return the m smallest keys (unordered) by randomized partitioning."""
    if m <= 0:
        return []
    if m >= len(keys):
        return list(keys)
    rng = random.Random(len(keys) * 7919 + m)
    chosen: list = []
    pool = keys
    need = m
    budget = 4 * max(1, len(keys).bit_length())
    while need > 0:
        if len(pool) <= 16 or budget == 0:
            pool.sort()
            chosen.extend(pool[:need])
            break
        budget -= 1
        pivot = pool[rng.randrange(len(pool))]
        low = [key for key in pool if key < pivot]
        if len(low) >= need:
            pool = low
            continue
        chosen.extend(low)
        need -= len(low)
        high = [key for key in pool if key > pivot]
        chosen.append(pivot)
        need -= 1
        pool = high
    return chosen


def smallest_indices(costs: Sequence, m: int, among: Sequence[int] | None = None) -> list[int]:
    """Indices of the m cheapest items (index breaks ties), sorted by index."""
    idx = range(len(costs)) if among is None else among
    if m > len(idx):
        raise ValueError("cannot select more items than available")
    keys = [(costs[i], i) for i in idx]
    return sorted(i for _, i in _select_keys(keys, m))


def kth_smallest(values: Sequence, k: int):
    """The k-th smallest entry (1-based)."""
    if not 1 <= k <= len(values):
        raise ValueError("order statistic out of range")
    keys = [(v, i) for i, v in enumerate(values)]
    return max(_select_keys(keys, k))[0]


def solve_selection(costs: Sequence, p: int) -> SelectionSolution:
    n = len(costs)
    if p < 0 or p > n:
        raise ValueError("p exceeds n")
    items = smallest_indices(costs, p)
    return SelectionSolution.of(items, n, sum((costs[i] for i in items), Fraction(0)))


def _check_recovery_input(inst: Instance, x: SelectionSolution) -> None:
    if len(x.items) != inst.p:
        raise ValueError("first stage must contain exactly p items")


def solve_irec(inst: Instance, x: SelectionSolution, scen: Scenario) -> SelectionSolution:
    """Best recovery: p-k cheapest of X_x, then the k cheapest of what is left."""
    _check_recovery_input(inst, x)
    return incremental_recovery(scen.costs(inst), x.items, inst.p, inst.k)


def incremental_recovery(costs: Sequence, x_items: Sequence[int], p: int, k: int) -> SelectionSolution:
    n = len(costs)
    keep = smallest_indices(costs, p - k, among=list(x_items))
    kept = set(keep)
    rest = [i for i in range(n) if i not in kept]
    extra = smallest_indices(costs, k, among=rest)
    items = keep + extra
    return SelectionSolution.of(items, n, sum((costs[i] for i in items), Fraction(0)))


def solve_i2st(inst: Instance, x: SelectionSolution, scen: Scenario) -> SelectionSolution:
    """Complete x to p items with the cheapest items outside X_x."""
    if len(x.items) > inst.p:
        raise ValueError("first stage has more than p items")
    return incremental_completion(scen.costs(inst), x.items, inst.p)


def incremental_completion(costs: Sequence, x_items: Sequence[int], p: int) -> SelectionSolution:
    n = len(costs)
    taken = set(x_items)
    rest = [i for i in range(n) if i not in taken]
    items = smallest_indices(costs, p - len(taken), among=rest)
    return SelectionSolution.of(items, n, sum((costs[i] for i in items), Fraction(0)))


def order_statistics(costs: Sequence, x_items: Sequence[int], p: int, k: int) -> OrderStatistics:
    n = len(costs)
    members = set(x_items)
    inside = [costs[i] for i in range(n) if i in members]
    outside = [costs[i] for i in range(n) if i not in members]
    b = kth_smallest(list(costs), p)
    b1 = kth_smallest(inside, p - k) if p - k >= 1 else None
    b2 = kth_smallest(outside, k) if 1 <= k <= len(outside) else None
    return OrderStatistics(Fraction(b), None if b1 is None else Fraction(b1), None if b2 is None else Fraction(b2))


def dual_objective(costs: Sequence, x_items: Sequence[int], p: int, k: int, cand: DualCandidate) -> Fraction:
    """p*alpha + (p-k)*beta - sum_i [alpha + beta*x_i - c_i]_+."""
    members = set(x_items)
    a, b = cand.alpha, cand.beta
    total = p * a + (p - k) * b
    for i, c in enumerate(costs):
        t = a + (b if i in members else 0) - c
        if t > 0:
            total -= t
    return Fraction(total)


def optimal_dual_pair(inst: Instance, x: SelectionSolution, scen: Scenario) -> tuple[DualCandidate, OrderStatistics]:
    _check_recovery_input(inst, x)
    if inst.k == 0:
        raise TrivialCase("k = 0: recovery is fixed to y = x, no dual pair is needed")
    return dual_pair_for_costs(scen.costs(inst), x.items, inst.p, inst.k)


def dual_pair_for_costs(costs: Sequence, x_items: Sequence[int], p: int, k: int) -> tuple[DualCandidate, OrderStatistics]:
    stats = order_statistics(costs, x_items, p, k)
    if stats.b1 is None or stats.b1 < stats.b:
        return DualCandidate(stats.b, Fraction(0)), stats
    if stats.b1 == stats.b:
        # With b1 tied to b the p cheapest can still hold more than k outsiders
        # (all strictly below b); then the unconstrained value is not reachable.
        members = set(x_items)
        cheap_outside = sum(1 for i, c in enumerate(costs) if i not in members and c < stats.b)
        if cheap_outside <= k:
            return DualCandidate(stats.b, Fraction(0)), stats
    # here the p cheapest need at least k+1 outsiders, so b2 exists
    assert stats.b2 is not None
    return DualCandidate(stats.b2, stats.b1 - stats.b2), stats


def recovery_value_by_split(costs: Sequence, x_items: Sequence[int], p: int, k: int) -> Fraction:
    """min over j in [p-k, p] of (j cheapest in X_x) + (p-j cheapest outside)."""
    members = set(x_items)
    inside = sorted(c for i, c in enumerate(costs) if i in members)
    outside = sorted(c for i, c in enumerate(costs) if i not in members)
    pre_in = [Fraction(0)]
    for c in inside:
        pre_in.append(pre_in[-1] + c)
    pre_out = [Fraction(0)]
    for c in outside:
        pre_out.append(pre_out[-1] + c)
    best = None
    for j in range(p - k, p + 1):
        if j > len(inside) or p - j > len(outside):
            continue
        v = pre_in[j] + pre_out[p - j]
        if best is None or v < best:
            best = v
    assert best is not None
    return best
