"""Exact dense simplex over the rationals and the LP builders used around it.

The solver is a textbook two-phase tableau method with Bland's rule, which
guarantees termination on the highly degenerate totally unimodular models
produced by the enumeration algorithms. All entries are Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Collection, Sequence

from .model import Instance, SelectionSolution

LE, EQ, GE = "<=", "=", ">="

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class LpModel:
    sense: str  # "min" or "max"
    objective: tuple[Fraction, ...]
    rows: tuple[tuple[tuple[Fraction, ...], str, Fraction], ...]
    bounds: tuple[tuple[Fraction | None, Fraction | None], ...]
    names: tuple[str, ...] = ()
    offset: Fraction = Fraction(0)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: tuple[Fraction, ...] = ()
    value: Fraction | None = None
    basis: tuple[int, ...] = field(default=())

    def is_integral(self, indices: Sequence[int] | None = None) -> bool:
        idx = range(len(self.x)) if indices is None else indices
        return all(self.x[i].denominator == 1 for i in idx)


class LpBuilder:
    """Small helper to assemble an :class:`LpModel` by variable name."""

    def __init__(self, sense: str = "min"):
        self.sense = sense
        self.names: list[str] = []
        self._pos: dict[str, int] = {}
        self.obj: list[Fraction] = []
        self.bounds: list[tuple[Fraction | None, Fraction | None]] = []
        self.rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
        self.offset = Fraction(0)

    def var(self, name: str, cost=0, lo=0, hi=None) -> int:
        j = len(self.names)
        self.names.append(name)
        self._pos[name] = j
        self.obj.append(Fraction(cost))
        self.bounds.append((None if lo is None else Fraction(lo), None if hi is None else Fraction(hi)))
        return j

    def row(self, terms: dict[int, object], rel: str, rhs) -> None:
        clean = {j: Fraction(a) for j, a in terms.items() if a != 0}
        self.rows.append((clean, rel, Fraction(rhs)))

    def build(self) -> LpModel:
        nv = len(self.names)
        dense = []
        for terms, rel, rhs in self.rows:
            coeffs = [_ZERO] * nv
            for j, a in terms.items():
                coeffs[j] = a
            dense.append((tuple(coeffs), rel, rhs))
        return LpModel(self.sense, tuple(self.obj), tuple(dense), tuple(self.bounds), tuple(self.names), self.offset)


# --------------------------------------------------------------------------
# solver


def _pivot(T: list[list[Fraction]], zrows: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    prow = T[r]
    piv = prow[c]
    if piv != 1:
        inv = _ONE / piv
        prow = [v * inv if v else v for v in prow]
        T[r] = prow
    nz = [j for j, v in enumerate(prow) if v]
    for i, row in enumerate(T):
        if i == r:
            continue
        f = row[c]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
    for z in zrows:
        f = z[c]
        if f:
            for j in nz:
                z[j] -= f * prow[j]
    basis[r] = c


def _bland(T, z, basis, allowed: int) -> str:
    """Minimize with reduced-cost row z; columns >= allowed never enter."""
    rhs = len(z) - 1
    while True:
        c = -1
        for j in range(allowed):
            if z[j] < 0:
                c = j
                break
        if c < 0:
            return "optimal"
        r = -1
        best = None
        for i, row in enumerate(T):
            a = row[c]
            if a > 0:
                ratio = row[rhs] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[r]):
                    best, r = ratio, i
        if r < 0:
            return "unbounded"
        _pivot(T, [z], basis, r, c)


def solve_lp(m: LpModel) -> LpSolution:
    # Map every model variable onto nonnegative columns: x_j = shift + sum(sign * col).
    maps: list[tuple[Fraction, list[tuple[int, int]]]] = []
    ncols = 0
    extra_rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
    for lo, hi in m.bounds:
        if lo is not None:
            maps.append((lo, [(ncols, 1)]))
            if hi is not None:
                if hi < lo:
                    return LpSolution("infeasible")
                extra_rows.append(({ncols: _ONE}, LE, hi - lo))
            ncols += 1
        elif hi is not None:
            maps.append((hi, [(ncols, -1)]))
            ncols += 1
        else:
            maps.append((_ZERO, [(ncols, 1), (ncols + 1, -1)]))
            ncols += 2

    rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
    for coeffs, rel, rhs in m.rows:
        terms: dict[int, Fraction] = {}
        b = Fraction(rhs)
        for j, a in enumerate(coeffs):
            if not a:
                continue
            shift, cols = maps[j]
            b -= a * shift
            for col, sign in cols:
                terms[col] = terms.get(col, _ZERO) + a * sign
        rows.append((terms, rel, b))
    rows.extend(extra_rows)

    sign = 1 if m.sense == "min" else -1
    cost = [_ZERO] * ncols
    const = Fraction(m.offset)
    for j, cj in enumerate(m.objective):
        if not cj:
            continue
        shift, cols = maps[j]
        const += cj * shift
        for col, s in cols:
            cost[col] += sign * cj * s

    # Standard form with slacks and artificials; right-hand sides made nonnegative.
    norm = []
    n_slack = 0
    for terms, rel, b in rows:
        if b < 0:
            terms = {j: -a for j, a in terms.items()}
            b = -b
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        norm.append((terms, rel, b))
        if rel != EQ:
            n_slack += 1
    n_art = sum(1 for _, rel, _ in norm if rel != LE)
    width = ncols + n_slack + n_art
    T: list[list[Fraction]] = []
    basis: list[int] = []
    s_next = ncols
    a_next = ncols + n_slack
    art_rows = []
    for i, (terms, rel, b) in enumerate(norm):
        row = [_ZERO] * (width + 1)
        for j, a in terms.items():
            row[j] = a
        row[width] = b
        if rel == LE:
            row[s_next] = _ONE
            basis.append(s_next)
            s_next += 1
        else:
            if rel == GE:
                row[s_next] = -_ONE
                s_next += 1
            row[a_next] = _ONE
            basis.append(a_next)
            art_rows.append(i)
            a_next += 1
        T.append(row)

    first_art = ncols + n_slack
    if n_art:
        z1 = [_ZERO] * (width + 1)
        for i in art_rows:
            row = T[i]
            for j, v in enumerate(row):
                if v and (j < first_art or j == width):
                    z1[j] -= v
        _bland(T, z1, basis, first_art)
        if z1[width] < 0:
            return LpSolution("infeasible")
        # Drive zero-level artificials out of the basis; drop redundant rows.
        i = 0
        while i < len(T):
            if basis[i] >= first_art:
                row = T[i]
                c = next((j for j in range(first_art) if row[j]), -1)
                if c < 0:
                    del T[i]
                    del basis[i]
                    continue
                _pivot(T, [], basis, i, c)
            i += 1
        for row in T:
            del row[first_art:width]
        width = first_art
    z = [_ZERO] * (width + 1)
    for j in range(ncols):
        z[j] = cost[j]
    for i, bv in enumerate(basis):
        cb = cost[bv] if bv < ncols else _ZERO
        if cb:
            for j, v in enumerate(T[i]):
                if v:
                    z[j] -= cb * v
    status = _bland(T, z, basis, width)
    if status == "unbounded":
        return LpSolution("unbounded")
    colval = [_ZERO] * width
    for i, bv in enumerate(basis):
        colval[bv] = T[i][width]
    xs = []
    for shift, cols in maps:
        v = shift
        for col, s in cols:
            v += s * colval[col]
        xs.append(v)
    value = sum((cj * v for cj, v in zip(m.objective, xs)), Fraction(m.offset))
    return LpSolution("optimal", tuple(xs), value, tuple(basis))


# --------------------------------------------------------------------------
# builders


def build_arec_lp(inst: Instance, x: SelectionSolution) -> LpModel:
    """Dual LP of the recovery problem with the deviations as extra variables."""
    if inst.discrete:
        raise ValueError("the adversarial LP is for the continuous budget model")
    if len(x.items) != inst.p:
        raise ValueError("first stage must contain exactly p items")
    n, p, k = inst.n, inst.p, inst.k
    members = set(x.items)
    lb = LpBuilder("max")
    a = lb.var("alpha", p, lo=None)
    b = lb.var("beta", p - k)
    g = [lb.var(f"gamma_{i + 1}", -1) for i in range(n)]
    d = [lb.var(f"delta_{i + 1}", 0) for i in range(n)]
    for i in range(n):
        lb.row({a: 1, b: 1 if i in members else 0, g[i]: -1, d[i]: -1}, LE, inst.nominal_cost[i])
    lb.row({d[i]: 1 for i in range(n)}, LE, inst.gamma)
    for i in range(n):
        lb.row({d[i]: 1}, LE, inst.deviation[i])
    return lb.build()


def build_a2st_lp(inst: Instance, x: SelectionSolution) -> LpModel:
    """Dual LP of the completion problem with the deviations as variables."""
    if len(x.items) > inst.p:
        raise ValueError("first stage has more than p items")
    n = inst.n
    members = set(x.items)
    lb = LpBuilder("max")
    a = lb.var("alpha", inst.p - len(members), lo=None)
    g = [lb.var(f"gamma_{i + 1}", 0 if i in members else -1) for i in range(n)]
    d = [lb.var(f"delta_{i + 1}", 0) for i in range(n)]
    for i in range(n):
        lb.row({a: 1, g[i]: -1, d[i]: -1}, LE, inst.nominal_cost[i])
    lb.row({d[i]: 1 for i in range(n)}, LE, inst.gamma)
    for i in range(n):
        lb.row({d[i]: 1}, LE, inst.deviation[i])
    return lb.build()


def build_rrec_tu_subproblem(
    inst: Instance,
    J: Sequence[int],
    Z: int,
    Zbar: int,
    Zp: int,
    Zbarp: int,
    pi,
    x_total: int | None = None,
    fixed_out: Collection[int] = (),
) -> LpModel:
    """Relaxed cell problem for a guessed pi and guessed cardinalities.

    Variables per item i in J (in this order): x_i, z_i, zbar_i, zp_i, zbarp_i.
    ``x_total`` defaults to p; it is p - 1 when a fixed item outside J is
    already in the first stage. Items in ``fixed_out`` get x_i = 0.
    """
    pi = Fraction(pi)
    C, lo, up = inst.first_stage_cost, inst.nominal_cost, inst.upper_cost
    lb = LpBuilder("min")
    xs, zs, zbs, zps, zbps = [], [], [], [], []
    for i in J:
        xs.append(lb.var(f"x_{i + 1}", C[i], 0, 0 if i in fixed_out else 1))
        zs.append(lb.var(f"z_{i + 1}", pi * lo[i], 0, 1))
        zbs.append(lb.var(f"zbar_{i + 1}", (1 - pi) * up[i], 0, 1))
        zps.append(lb.var(f"zp_{i + 1}", 0, 0, 1))
        zbps.append(lb.var(f"zbarp_{i + 1}", 0, 0, 1))
    lb.row({j: 1 for j in xs}, EQ, inst.p if x_total is None else x_total)
    lb.row({j: 1 for j in zs}, EQ, Z)
    lb.row({j: 1 for j in zbs}, EQ, Zbar)
    lb.row({j: 1 for j in zps}, GE, Zp)
    lb.row({j: 1 for j in zbps}, GE, Zbarp)
    for t in range(len(J)):
        lb.row({zps[t]: 1, xs[t]: -1}, LE, 0)
        lb.row({zps[t]: 1, zs[t]: -1}, LE, 0)
        lb.row({zbps[t]: 1, xs[t]: -1}, LE, 0)
        lb.row({zbps[t]: 1, zbs[t]: -1}, LE, 0)
    return lb.build()


def build_r2st_tu_subproblem(inst: Instance, X: int, Z: int, Zbar: int, pi) -> LpModel:
    """Relaxed cell problem for the two-stage variant. Variables: x_i, z_i, zbar_i."""
    pi = Fraction(pi)
    C, lo, up = inst.first_stage_cost, inst.nominal_cost, inst.upper_cost
    lb = LpBuilder("min")
    xs, zs, zbs = [], [], []
    for i in range(inst.n):
        xs.append(lb.var(f"x_{i + 1}", C[i], 0, 1))
        zs.append(lb.var(f"z_{i + 1}", pi * lo[i], 0, 1))
        zbs.append(lb.var(f"zbar_{i + 1}", (1 - pi) * up[i], 0, 1))
    lb.row({j: 1 for j in xs}, EQ, X)
    lb.row({j: 1 for j in zs}, EQ, Z)
    lb.row({j: 1 for j in zbs}, EQ, Zbar)
    for t in range(inst.n):
        lb.row({xs[t]: 1, zs[t]: 1}, LE, 1)
        lb.row({xs[t]: 1, zbs[t]: 1}, LE, 1)
    return lb.build()


def build_nominal_rrec_lp(inst: Instance) -> LpModel:
    """Recoverable problem under the single nominal scenario. Variables: x_i, y_i, w_i."""
    n = inst.n
    lb = LpBuilder("min")
    xs = [lb.var(f"x_{i + 1}", inst.first_stage_cost[i], 0, 1) for i in range(n)]
    ys = [lb.var(f"y_{i + 1}", inst.nominal_cost[i], 0, 1) for i in range(n)]
    ws = [lb.var(f"w_{i + 1}", 0, 0, 1) for i in range(n)]
    lb.row({j: 1 for j in xs}, EQ, inst.p)
    lb.row({j: 1 for j in ys}, EQ, inst.p)
    lb.row({j: 1 for j in ws}, GE, inst.p - inst.k)
    for i in range(n):
        lb.row({ws[i]: 1, xs[i]: -1}, LE, 0)
        lb.row({ws[i]: 1, ys[i]: -1}, LE, 0)
    return lb.build()
