"""Worst-case scenarios under the discrete budget (at most gamma items raised).

The recoverable adversary is solved by enumerating a finite set of dual pairs
(alpha, beta) built from order-statistic windows of the nominal and upper
costs; for each pair the inner problem is a plain selection of the gamma
largest gains. The two-stage adversary only needs alpha from
{0} u {nominal costs} u {upper costs}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .model import Instance, Scenario, SelectionSolution
from .selection import DualCandidate


@dataclass
class CandidateSet:
    pairs: list[DualCandidate] = field(default_factory=list)
    alphas: list[Fraction] = field(default_factory=list)
    provenance: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.pairs) if self.pairs else len(self.alphas)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, DualCandidate):
            return item in self.pairs
        return item in self.alphas


def _check_discrete(inst: Instance) -> None:
    if not inst.discrete:
        raise ValueError("discrete budget model required")


def candidate_pairs_arec(inst: Instance, x: SelectionSolution | None = None) -> CandidateSet:
    """Dual pairs containing an optimum of the recoverable adversary (for x, or for every x)."""
    _check_discrete(inst)
    if inst.k < 1:
        raise ValueError("candidate pairs need k >= 1")
    n, p, k, g = inst.n, inst.p, inst.k, inst.gamma_int
    lows, highs = list(inst.nominal_cost), list(inst.upper_cost)
    flat = _rank_range(lows, highs, p, p, g)
    if x is not None:
        members = set(x.items)
        inside = [i for i in range(n) if i in members]
        outside = [i for i in range(n) if i not in members]
        upper_list = _rank_range([lows[i] for i in inside], [highs[i] for i in inside], p - k, p - k, g)
        lower_list = _rank_range([lows[i] for i in outside], [highs[i] for i in outside], k, k, g)
        tag = ("sigma(p)", "nu(p-k)", "varsigma(k)")
        if p - k >= 1 and upper_list:
            smallest_b1 = upper_list[0]
            flat = [a for a in flat if smallest_b1 <= a]
    else:
        # x-independent windows: ranks of the same order statistics over all items
        upper_list = _rank_range(lows, highs, p - k, n - k, g)
        lower_list = _rank_range(lows, highs, k, k + p, g)
        tag = ("sigma(p)", "sigma(p-k)", "sigma(k)")
    out = CandidateSet()
    seen: set[DualCandidate] = set()

    def add(cand: DualCandidate, why: str) -> None:
        if cand not in seen:
            seen.add(cand)
            out.pairs.append(cand)
            out.provenance.append(why)

    for a in flat:
        add(DualCandidate(a, Fraction(0)), tag[0])
    for a in lower_list:
        for b in upper_list:
            if b > a:
                add(DualCandidate(a, b - a), f"{tag[2]} x {tag[1]}")
    return out


def _rank_range(lows: Sequence[Fraction], highs: Sequence[Fraction], first: int, last: int, gamma: int) -> list[Fraction]:
    """Values that can be an order statistic of rank first..last once gamma items are raised.

    Nominal costs of rank first..last+gamma and upper costs of rank 1..last,
    with ranks clamped into the list.
    """
    m = len(lows)
    if first < 1 or first > m:
        return []
    lo_sorted = sorted(lows)
    out = [lo_sorted[min(j, m) - 1] for j in range(first, last + gamma + 1)]
    if gamma > 0:
        out += sorted(highs)[: min(last, m)]
    return sorted(set(out))


def _top_gains(gains: Sequence[tuple[int, Fraction]], budget: int) -> list[tuple[int, Fraction]]:
    """Up to ``budget`` strictly positive gains, largest first, smaller index on ties."""
    positive = [(i, g) for i, g in gains if g > 0]
    positive.sort(key=lambda t: (-t[1], t[0]))
    return positive[:budget]


def pair_value(inst: Instance, x: SelectionSolution, cand: DualCandidate) -> tuple[Fraction, list[int]]:
    """Inner optimum for a fixed dual pair and the items the adversary raises."""
    members = set(x.items)
    a, b = cand.alpha, cand.beta
    total = inst.p * a + (inst.p - inst.k) * b
    gains = []
    for i, (c, d) in enumerate(zip(inst.nominal_cost, inst.deviation)):
        t = a + (b if i in members else 0) - c
        if t > 0:
            total -= t
            gains.append((i, t - max(t - d, Fraction(0))))
    top = _top_gains(gains, inst.gamma_int)
    total += sum((g for _, g in top), Fraction(0))
    return total, [i for i, _ in top]


def _raise(inst: Instance, items: Sequence[int]) -> Scenario:
    deltas = [Fraction(0)] * inst.n
    for i in items:
        deltas[i] = inst.deviation[i]
    return Scenario(tuple(deltas))


def arec_discrete(inst: Instance, x: SelectionSolution) -> tuple[Fraction, Scenario]:
    _check_discrete(inst)
    if len(x.items) != inst.p:
        raise ValueError("first stage must contain exactly p items")
    if inst.k == 0:
        # no recovery: raise the gamma largest deviations inside X_x
        top = _top_gains([(i, inst.deviation[i]) for i in x.items], inst.gamma_int)
        base = sum((inst.nominal_cost[i] for i in x.items), Fraction(0))
        return base + sum((g for _, g in top), Fraction(0)), _raise(inst, [i for i, _ in top])
    best = None
    for cand in candidate_pairs_arec(inst, x).pairs:
        v, raised = pair_value(inst, x, cand)
        if best is None or v > best[0]:
            best = (v, raised)
    assert best is not None
    return best[0], _raise(inst, best[1])


def candidate_alphas_a2st(inst: Instance) -> CandidateSet:
    _check_discrete(inst)
    values = {Fraction(0)} | set(inst.nominal_cost) | set(inst.upper_cost)
    alphas = sorted(values)
    return CandidateSet(alphas=alphas, provenance=["candidate alpha"] * len(alphas))


def alpha_value(inst: Instance, x: SelectionSolution, alpha: Fraction) -> tuple[Fraction, list[int]]:
    members = set(x.items)
    need = inst.p - len(x.items)
    total = need * alpha
    gains = []
    for i, (c, d) in enumerate(zip(inst.nominal_cost, inst.deviation)):
        if i in members:
            continue
        t = alpha - c
        if t > 0:
            total -= t
            gains.append((i, t - max(t - d, Fraction(0))))
    top = _top_gains(gains, inst.gamma_int)
    return total + sum((g for _, g in top), Fraction(0)), [i for i, _ in top]


def a2st_discrete(inst: Instance, x: SelectionSolution) -> tuple[Fraction, Scenario]:
    _check_discrete(inst)
    if len(x.items) > inst.p:
        raise ValueError("first stage has more than p items")
    if len(x.items) == inst.p:
        return Fraction(0), Scenario.nominal(inst)
    best = None
    for alpha in candidate_alphas_a2st(inst).alphas:
        v, raised = alpha_value(inst, x, alpha)
        if best is None or v > best[0]:
            best = (v, raised)
    assert best is not None
    return best[0], _raise(inst, best[1])
