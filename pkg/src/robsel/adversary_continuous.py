"""Worst-case scenarios under the continuous budget (sum of deviations <= gamma).

Two exact algorithms for the recoverable adversary are provided: a scan over
the dual variables (alpha, beta) restricted to the breakpoint set of all
nominal and upper costs, and an event-driven level-raising greedy that runs in
O(n log n). Both return the optimal value together with a worst scenario.
"""

from __future__ import annotations

import heapq
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .model import Instance, Scenario, SelectionSolution
from .selection import DualCandidate, incremental_recovery


@dataclass(frozen=True)
class EnvelopeProblem:
    """Maximize min(f1, f2) over [lo, hi]; each f is (slope, intercept)."""

    lo: Fraction
    hi: Fraction
    f1: tuple[Fraction, Fraction]
    f2: tuple[Fraction, Fraction]

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("empty interval")


def _norm(q):
    if isinstance(q, Fraction) and q.denominator == 1:
        return q.numerator
    return q


def _ratio(num, den):
    if isinstance(num, int) and isinstance(den, int):
        return _norm(Fraction(num, den))
    return _norm(Fraction(num) / den)


def _envelope(lo, hi, a1, b1, a2, b2):
    best_t = lo
    best_v = min(a1 * lo + b1, a2 * lo + b2)
    if hi == lo:
        return best_t, best_v
    if a1 != a2:
        num, den = b2 - b1, a1 - a2
        if den < 0:
            num, den = -num, -den
        if lo * den < num < hi * den:
            t = _ratio(num, den)
            v = a1 * t + b1
            if v > best_v:
                best_t, best_v = t, v
    v = min(a1 * hi + b1, a2 * hi + b2)
    if v > best_v:
        best_t, best_v = hi, v
    return best_t, best_v


def maximize_envelope(ep: EnvelopeProblem) -> tuple[Fraction, Fraction]:
    t, v = _envelope(ep.lo, ep.hi, ep.f1[0], ep.f1[1], ep.f2[0], ep.f2[1])
    return Fraction(t), Fraction(v)


def _check_continuous(inst: Instance) -> None:
    if inst.discrete:
        raise ValueError("continuous budget model required")


def _check_recovery(inst: Instance, x: SelectionSolution) -> None:
    _check_continuous(inst)
    if len(x.items) != inst.p:
        raise ValueError("first stage must contain exactly p items")


def _greedy(inst: Instance, excess: Sequence[tuple[int, object]]) -> Scenario:
    deltas = [Fraction(0)] * inst.n
    left = inst.gamma
    for i, a in excess:
        if left <= 0:
            break
        if a > 0:
            step = min(a, inst.deviation[i], left)
            deltas[i] = Fraction(step)
            left -= step
    return Scenario(tuple(deltas))


def greedy_worst_scenario(inst: Instance, x: SelectionSolution, dual: DualCandidate) -> Scenario:
    """Spend the budget in index order on items with alpha + beta*x_i > c_i."""
    members = set(x.items)
    a, b = dual.alpha, dual.beta
    return _greedy(inst, [(i, a + (b if i in members else 0) - c) for i, c in enumerate(inst.nominal_cost)])


def dual_value(inst: Instance, x: SelectionSolution, dual: DualCandidate) -> Fraction:
    """p*alpha + (p-k)*beta minus the cheapest way to absorb the excess with the budget."""
    members = set(x.items)
    a, b = dual.alpha, dual.beta
    lo_sum = hi_sum = Fraction(0)
    for i, (c, d) in enumerate(zip(inst.nominal_cost, inst.deviation)):
        t = a + (b if i in members else 0) - c
        if t > 0:
            lo_sum += t
        if t > d:
            hi_sum += t - d
    return inst.p * a + (inst.p - inst.k) * b - max(lo_sum - inst.gamma, hi_sum)


def _k0(inst: Instance, x: SelectionSolution) -> tuple[Fraction, Scenario]:
    # No recovery: the adversary pours the whole budget into X_x.
    base = sum((inst.nominal_cost[i] for i in x.items), Fraction(0))
    room = sum((inst.deviation[i] for i in x.items), Fraction(0))
    worst = _greedy(inst, [(i, inst.deviation[i]) for i in x.items])
    return base + min(inst.gamma, room), worst


class _Side:
    """Sorted nominal/upper costs of one item group with prefix sums."""

    def __init__(self, lows: Sequence, highs: Sequence):
        self.lows = sorted(lows)
        self.highs = sorted(highs)
        self.pre_lo = [0]
        for v in self.lows:
            self.pre_lo.append(self.pre_lo[-1] + v)
        self.pre_hi = [0]
        for v in self.highs:
            self.pre_hi.append(self.pre_hi[-1] + v)
        self.points = sorted(set(self.lows) | set(self.highs))

    def excess(self, t):
        """(sum [t - low]_+, sum [t - high]_+)."""
        i = bisect_right(self.lows, t)
        j = bisect_right(self.highs, t)
        return i * t - self.pre_lo[i], j * t - self.pre_hi[j]


def _scan_flat(side: _Side, p: int, gamma):
    """Best alpha for p*alpha - max(sum[alpha-low]_+ - gamma, sum[alpha-high]_+)."""
    pts = side.points
    lows, highs = side.lows, side.highs
    i = j = 0
    s1 = s2 = 0
    best = None
    for idx, lo in enumerate(pts):
        hi = pts[idx + 1] if idx + 1 < len(pts) else lo
        while i < len(lows) and lows[i] <= lo:
            s1 += lows[i]
            i += 1
        while j < len(highs) and highs[j] <= lo:
            s2 += highs[j]
            j += 1
        t, v = _envelope(lo, hi, p - i, s1 + gamma, p - j, s2)
        if best is None or v > best[1]:
            best = (t, v)
    return best


def _scan_beta_positive(xs: _Side, xb: _Side, p: int, k: int, gamma, everything: Sequence):
    """Best (alpha, gamma') with gamma' = alpha + beta >= alpha and one of them in the breakpoint set."""
    best = None
    pk = p - k
    # gamma' fixed at a breakpoint, alpha scanned over the complement's breakpoints.
    for G in everything:
        ex_lo, ex_hi = xs.excess(G)
        top = bisect_right(xb.points, G)
        pts = xb.points[:top]
        if not pts or pts[-1] != G:
            pts = pts + [G]
        lows, highs = xb.lows, xb.highs
        i = j = 0
        s1 = s2 = 0
        base1 = pk * G - ex_lo + gamma
        base2 = pk * G - ex_hi
        for idx, lo in enumerate(pts):
            hi = pts[idx + 1] if idx + 1 < len(pts) else lo
            while i < len(lows) and lows[i] <= lo:
                s1 += lows[i]
                i += 1
            while j < len(highs) and highs[j] <= lo:
                s2 += highs[j]
                j += 1
            t, v = _envelope(lo, hi, k - i, base1 + s1, k - j, base2 + s2)
            if best is None or v > best[2]:
                best = (t, G - t, v)
    # alpha fixed at a breakpoint, gamma' scanned over the breakpoints of X_x.
    for A in everything:
        ex_lo, ex_hi = xb.excess(A)
        start = bisect_right(xs.points, A)
        pts = [A] + xs.points[start:]
        lows, highs = xs.lows, xs.highs
        i = bisect_right(lows, A)
        j = bisect_right(highs, A)
        s1, s2 = xs.pre_lo[i], xs.pre_hi[j]
        base1 = k * A - ex_lo + gamma
        base2 = k * A - ex_hi
        for idx, lo in enumerate(pts):
            hi = pts[idx + 1] if idx + 1 < len(pts) else lo
            while i < len(lows) and lows[i] <= lo:
                s1 += lows[i]
                i += 1
            while j < len(highs) and highs[j] <= lo:
                s2 += highs[j]
                j += 1
            t, v = _envelope(lo, hi, pk - i, base1 + s1, pk - j, base2 + s2)
            if best is None or v > best[2]:
                best = (A, t - A, v)
    return best


def _split(inst: Instance, x: SelectionSolution):
    members = set(x.items)
    lo = [_norm(c) for c in inst.nominal_cost]
    hi = [_norm(c + d) for c, d in zip(inst.nominal_cost, inst.deviation)]
    xs = _Side([lo[i] for i in range(inst.n) if i in members], [hi[i] for i in range(inst.n) if i in members])
    xb = _Side([lo[i] for i in range(inst.n) if i not in members], [hi[i] for i in range(inst.n) if i not in members])
    return xs, xb, lo, hi


def arec_continuous_dual(inst: Instance, x: SelectionSolution) -> tuple[Fraction, DualCandidate]:
    """Optimal dual pair found by the interval scan, with its value."""
    _check_recovery(inst, x)
    if inst.k == 0:
        raise ValueError("k = 0 has no dual pair; use the closed form")
    xs, xb, lo, hi = _split(inst, x)
    gamma = _norm(inst.gamma)
    everything = _Side(lo, hi)
    a0, v0 = _scan_flat(everything, inst.p, gamma)
    best = (a0, 0, v0)
    other = _scan_beta_positive(xs, xb, inst.p, inst.k, gamma, everything.points)
    if other is not None and other[2] > best[2]:
        best = other
    alpha, beta, value = best
    return Fraction(value), DualCandidate(Fraction(alpha), Fraction(beta))


def arec_continuous_intervals(inst: Instance, x: SelectionSolution) -> tuple[Fraction, Scenario]:
    """Recoverable adversary via the (alpha, beta) breakpoint scan, O(n^2)."""
    _check_recovery(inst, x)
    if inst.k == 0:
        return _k0(inst, x)
    value, dual = arec_continuous_dual(inst, x)
    return value, greedy_worst_scenario(inst, x, dual)


@dataclass(frozen=True)
class LevelState:
    """Snapshot of the level-raising algorithm at an event point.

    A level of None means that side is saturated: every item sits at its upper cost.
    """

    level_x: Fraction | None
    level_xbar: Fraction | None
    active_x: int
    active_xbar: int
    selected_count_x: int
    selected_count_xbar: int
    remaining_budget: Fraction
    value: Fraction

    def scenario(self, inst: Instance, x: SelectionSolution) -> Scenario:
        return compatible_scenario(inst, x, self.level_x, self.level_xbar)


def compatible_scenario(inst: Instance, x: SelectionSolution, level_x, level_xbar) -> Scenario:
    """Costs clipped to level_x on X_x and level_xbar elsewhere (None = upper cost)."""
    members = set(x.items)
    lx, lb = _norm(level_x), _norm(level_xbar)
    deltas = []
    for i, (c, d) in enumerate(zip(inst.nominal_cost, inst.deviation)):
        c, d = _norm(c), _norm(d)
        level = lx if i in members else lb
        if level is None or level >= c + d:
            deltas.append(d)
        elif level <= c:
            deltas.append(0)
        else:
            deltas.append(level - c)
    return Scenario(tuple(Fraction(v) for v in deltas))


class _Group:
    """One side of the level algorithm: a level, an activation pointer and a heap of upper costs."""

    def __init__(self, items: Sequence[int], lo: Sequence, hi: Sequence):
        order = sorted(items, key=lambda i: (lo[i], i))
        self.by_low = order
        self.lows = [lo[i] for i in order]
        self.highs = sorted(hi[i] for i in items)
        self.lo, self.hi = lo, hi
        self.ptr = 0
        self.heap: list = []
        self.level = self.lows[0] if order else None

    def advance(self) -> None:
        L = self.level
        if L is None:
            return
        while self.ptr < len(self.by_low) and self.lows[self.ptr] <= L:
            i = self.by_low[self.ptr]
            heapq.heappush(self.heap, self.hi[i])
            self.ptr += 1
        while self.heap and self.heap[0] <= L:
            heapq.heappop(self.heap)

    @property
    def active(self) -> int:
        return len(self.heap)

    @property
    def at_or_below(self) -> int:
        """Items with cost <= level that are not active."""
        return self.ptr - len(self.heap)

    def count_le(self, v) -> int:
        """Items whose current cost is <= v."""
        if self.level is None or v < self.level:
            return bisect_right(self.highs, v)
        return bisect_right(self.lows, v)

    def next_low(self):
        return self.lows[self.ptr] if self.ptr < len(self.lows) else None


def arec_continuous_levels(
    inst: Instance,
    x: SelectionSolution,
    trace: Callable[[LevelState], None] | None = None,
) -> tuple[Fraction, Scenario]:
    """Recoverable adversary by greedy level raising, O(n log n).

    ``trace`` is called with a :class:`LevelState` at the start and after every event.
    """
    _check_recovery(inst, x)
    total_dev = sum(inst.deviation, Fraction(0))
    if inst.gamma >= total_dev:
        # the budget covers every deviation; costs are monotone, so the upper scenario is worst
        upper = [c + d for c, d in zip(inst.nominal_cost, inst.deviation)]
        value = incremental_recovery(upper, x.items, inst.p, inst.k).value
        if trace is not None:
            trace(LevelState(None, None, 0, 0, 0, 0, inst.gamma - total_dev, value))
        return value, Scenario(tuple(inst.deviation))
    if inst.k == 0:
        return _k0(inst, x)
    n, p, k = inst.n, inst.p, inst.k
    pk = p - k
    members = set(x.items)
    lo = [_norm(c) for c in inst.nominal_cost]
    hi = [_norm(c + d) for c, d in zip(inst.nominal_cost, inst.deviation)]
    gx = _Group([i for i in range(n) if i in members], lo, hi)
    gb = _Group([i for i in range(n) if i not in members], lo, hi)
    events = sorted(set(lo) | set(hi))
    budget = _norm(inst.gamma)
    value = _norm(incremental_recovery(lo, x.items, p, k).value)

    def emit(sx=0, sb=0):
        if trace is not None:
            trace(
                LevelState(
                    None if gx.level is None else Fraction(gx.level),
                    None if gb.level is None else Fraction(gb.level),
                    gx.active,
                    gb.active,
                    sx,
                    sb,
                    Fraction(budget),
                    Fraction(value),
                )
            )

    def next_event(L):
        j = bisect_right(events, L)
        return events[j] if j < len(events) else None

    for g in (gx, gb):
        g.advance()
    emit()
    while budget > 0:
        # A side with nothing active moves for free to its next nominal cost.
        moved = False
        for g, other in ((gx, gb), (gb, gx)):
            if g.level is not None and g.active == 0:
                nxt = g.next_low()
                if other.level is not None and other.level > g.level and (nxt is None or other.level < nxt):
                    nxt = other.level
                if nxt is None:
                    g.level = None
                else:
                    g.level = nxt
                    g.advance()
                moved = True
        if moved:
            continue
        Lx, Lb = gx.level, gb.level
        mx = gx.active if Lx is not None else 0
        mb = gb.active if Lb is not None else 0
        cand = []
        if mx:
            ue = gx.at_or_below
            f = min(max(pk - ue, 0), mx)
            r = max(ue - pk, 0) + gb.count_le(Lx)
            sel_x = f + min(mx - f, max(k - r, 0))
            cand.append((sel_x, mx, 0, sel_x, 0))
        if mb:
            r = max(gx.count_le(Lb) - pk, 0) + gb.at_or_below
            sel_b = min(max(k - r, 0), mb)
            cand.append((sel_b, mb, 1, 0, sel_b))
        if mx and mb and Lx == Lb:
            ue = gx.at_or_below
            f = min(max(pk - ue, 0), mx)
            r = max(ue - pk, 0) + gb.at_or_below
            sj = f + min(max(k - r, 0), (mx - f) + mb)
            cand.append((sj, mx + mb, 2, sj, 0))
        if not cand:
            break
        # ratios are compared by cross-multiplication; joint wins ties, then X_x
        best = cand[0]
        for c in cand[1:]:
            lhs, rhs = c[0] * best[1], best[0] * c[1]
            if lhs > rhs or (lhs == rhs and c[2] == 2):
                best = c
        _, _, kind, sx, sb = best
        if best[0] == 0:
            break
        if kind == 2:
            L, rate, gain = Lx, mx + mb, sx
        elif kind == 0:
            L, rate, gain = Lx, mx, sx
        else:
            L, rate, gain = Lb, mb, sb
        target = next_event(L)
        if kind != 2:
            other = gb.level if kind == 0 else gx.level
            if other is not None and other > L and (target is None or other < target):
                target = other
        step_cap = _ratio(budget, rate)
        if target is None or target - L >= step_cap:
            step = step_cap
        else:
            step = target - L
        newL = _norm(L + step)
        budget = _norm(budget - step * rate)
        value = _norm(value + step * gain)
        if kind in (0, 2):
            gx.level = newL
            gx.advance()
        if kind in (1, 2):
            gb.level = newL
            gb.advance()
        emit(sx if kind != 1 else 0, sb)
    worst = compatible_scenario(inst, x, gx.level, gb.level)
    return Fraction(value), worst


def a2st_continuous(inst: Instance, x: SelectionSolution) -> tuple[Fraction, Scenario]:
    """Two-stage adversary: the same flat scan on the items outside X_x with p - |X_x| to buy."""
    _check_continuous(inst)
    if len(x.items) > inst.p:
        raise ValueError("first stage has more than p items")
    members = set(x.items)
    rest = [i for i in range(inst.n) if i not in members]
    need = inst.p - len(x.items)
    if need == 0:
        return Fraction(0), Scenario.nominal(inst)
    side = _Side([_norm(inst.nominal_cost[i]) for i in rest], [_norm(inst.upper_cost[i]) for i in rest])
    alpha, value = _scan_flat(side, need, _norm(inst.gamma))
    worst = _greedy(inst, [(i, alpha - inst.nominal_cost[i]) for i in rest])
    return Fraction(value), worst
