"""Robust problems under the discrete budget: compact MIPs, exact enumeration,
polynomial special cases and two approximation algorithms.

No branch-and-bound is attempted. The MIPs can be written in LP file format
for an external solver; for a fixed first stage they are evaluated in closed
form, which is what the tests rely on.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .adversary_continuous import a2st_continuous, arec_continuous_intervals
from .adversary_discrete import a2st_discrete, arec_discrete, candidate_alphas_a2st, candidate_pairs_arec
from .lp import build_nominal_rrec_lp, solve_lp
from .model import Instance, SelectionSolution, decimal_string, format_rational, make_instance
from .selection import smallest_indices

ENUMERATION_CAP = 16


def _pos(v: Fraction) -> Fraction:
    return v if v > 0 else Fraction(0)


@dataclass
class MipModel:
    """A linear MIP with named variables and sparse rows.

    Rows are ``(name, {var: coef}, rel, rhs)`` with rel one of "<=", "=", ">=".
    Variables default to [0, +inf) unless listed in ``bounds``.
    """

    problem: str
    names: list[str]
    objective: dict[str, Fraction]
    rows: list[tuple[str, dict[str, Fraction], str, Fraction]]
    bounds: dict[str, tuple[Fraction | None, Fraction | None]] = field(default_factory=dict)
    binaries: list[str] = field(default_factory=list)
    candidates: list = field(default_factory=list)
    sense: str = "min"

    @property
    def num_vars(self) -> int:
        return len(self.names)

    @property
    def num_rows(self) -> int:
        return len(self.rows)


def _x(i: int) -> str:
    return f"x_{i + 1}"


def _block_vars(names: list[str], n: int, blocks: int) -> None:
    for l in range(1, blocks + 1):
        names.append(f"pi_{l}")
        names.extend(f"rho_{l}_{i + 1}" for i in range(n))


def build_rrec_discrete_mip(inst: Instance) -> MipModel:
    """lambda >= C x + block value for every candidate pair of the x-independent set."""
    if not inst.discrete:
        raise ValueError("discrete budget model required")
    if inst.k == 0:
        raise ValueError("k = 0: use minmax_budgeted")
    n, p, k = inst.n, inst.p, inst.k
    cands = candidate_pairs_arec(inst).pairs
    names = ["lambda"] + [_x(i) for i in range(n)]
    _block_vars(names, n, len(cands))
    rows: list = [("card", {_x(i): Fraction(1) for i in range(n)}, "=", Fraction(p))]
    gamma = Fraction(inst.gamma_int)
    for l, cand in enumerate(cands, start=1):
        a, b = cand.alpha, cand.beta
        cut: dict[str, Fraction] = {"lambda": Fraction(1)}
        const = p * a + (p - k) * b
        for i in range(n):
            lo, d = inst.nominal_cost[i], inst.deviation[i]
            out0, out1 = _pos(a - lo), _pos(a + b - lo)
            const -= out0
            # lambda - C_i x_i + (slope of the excess) x_i ...
            coef = -inst.first_stage_cost[i] + (out1 - out0)
            if coef:
                cut[_x(i)] = coef
            g0 = out0 - _pos(a - lo - d)
            g1 = out1 - _pos(a + b - lo - d)
            link = {f"pi_{l}": Fraction(1), f"rho_{l}_{i + 1}": Fraction(1)}
            if g1 != g0:
                link[_x(i)] = -(g1 - g0)
            rows.append((f"link_{l}_{i + 1}", link, ">=", g0))
        cut[f"pi_{l}"] = -gamma
        for i in range(n):
            cut[f"rho_{l}_{i + 1}"] = Fraction(-1)
        rows.append((f"cut_{l}", cut, ">=", const))
    return MipModel(
        "rrec",
        names,
        {"lambda": Fraction(1)},
        rows,
        {"lambda": (None, None)},
        [_x(i) for i in range(n)],
        list(cands),
    )


def build_r2st_discrete_mip(inst: Instance) -> MipModel:
    if not inst.discrete:
        raise ValueError("discrete budget model required")
    n, p = inst.n, inst.p
    alphas = candidate_alphas_a2st(inst).alphas
    names = ["lambda"] + [_x(i) for i in range(n)]
    _block_vars(names, n, len(alphas))
    rows: list = [("card", {_x(i): Fraction(1) for i in range(n)}, "<=", Fraction(p))]
    gamma = Fraction(inst.gamma_int)
    for l, a in enumerate(alphas, start=1):
        cut: dict[str, Fraction] = {"lambda": Fraction(1)}
        const = p * a
        for i in range(n):
            lo, up = inst.nominal_cost[i], inst.upper_cost[i]
            out = _pos(a - lo)
            const -= out
            # lambda >= C x + (p - sum x) a - sum (1 - x_i) out_i + ...
            coef = -inst.first_stage_cost[i] + a - out
            if coef:
                cut[_x(i)] = coef
            g = out - _pos(a - up)
            link = {f"pi_{l}": Fraction(1), f"rho_{l}_{i + 1}": Fraction(1)}
            if g:
                link[_x(i)] = g
            rows.append((f"link_{l}_{i + 1}", link, ">=", g))
        cut[f"pi_{l}"] = -gamma
        for i in range(n):
            cut[f"rho_{l}_{i + 1}"] = Fraction(-1)
        rows.append((f"cut_{l}", cut, ">=", const))
    return MipModel(
        "r2st",
        names,
        {"lambda": Fraction(1)},
        rows,
        {"lambda": (None, None)},
        [_x(i) for i in range(n)],
        list(alphas),
    )


def _holds(lhs: Fraction, rel: str, rhs: Fraction) -> bool:
    return {"<=": lhs <= rhs, "=": lhs == rhs, ">=": lhs >= rhs}[rel]


def evaluate_fixed_x(m: MipModel, x: SelectionSolution) -> Fraction:
    """Smallest feasible lambda once the binaries are fixed to x.

    Each block is min over pi >= 0 of G*pi + sum_i w_i [r_i - pi]_+, read off the
    normalized rows; lambda is the largest block bound.
    """
    xv = {name: Fraction(0) for name in m.binaries}
    for i in x.items:
        name = _x(i)
        if name not in xv:
            raise ValueError(f"item {i + 1} is not in the model")
        xv[name] = Fraction(1)
    links: dict[str, list[Fraction]] = {}
    cuts = []
    for name, terms, rel, rhs in m.rows:
        fixed = sum((c * xv[v] for v, c in terms.items() if v in xv), Fraction(0))
        free = {v: c for v, c in terms.items() if v not in xv}
        if not free:
            if not _holds(fixed, rel, rhs):
                raise ValueError(f"x violates row {name}")
            continue
        if "lambda" in free:
            cuts.append((free, rhs - fixed))
            continue
        pis = [v for v in free if v.startswith("pi_")]
        rhos = [v for v in free if v.startswith("rho_")]
        if rel != ">=" or len(pis) != 1 or len(rhos) != 1 or free[pis[0]] != free[rhos[0]] or free[pis[0]] <= 0:
            raise ValueError(f"row {name} is not a pi/rho coupling row")
        links.setdefault(pis[0], []).append((rhs - fixed) / free[pis[0]])
    best = None
    for free, rest in cuts:
        scale = free["lambda"]
        if scale <= 0:
            raise ValueError("lambda must have a positive coefficient in its cuts")
        bound = rest / scale
        pis = [v for v in free if v.startswith("pi_")]
        if len(pis) != 1:
            raise ValueError("each cut needs exactly one pi variable")
        pi = pis[0]
        weight_pi = -free[pi] / scale
        weights = {-free[v] / scale for v in free if v.startswith("rho_")}
        if weights - {Fraction(1)}:
            raise ValueError("rho weights must be 1 after scaling")
        req = links.get(pi, [])
        block = None
        for t in [Fraction(0)] + [r for r in req if r > 0]:
            v = weight_pi * t + sum((r - t for r in req if r > t), Fraction(0))
            if block is None or v < block:
                block = v
        total = bound + (block or Fraction(0))
        if best is None or total > best:
            best = total
    if best is None:
        raise ValueError("model has no lambda cuts")
    return best


def _cost(inst: Instance, items: Sequence[int]) -> Fraction:
    return sum((inst.first_stage_cost[i] for i in items), Fraction(0))


def _adversary(inst: Instance, problem: str):
    if problem == "rrec":
        return arec_discrete if inst.discrete else _arec_continuous
    if problem == "r2st":
        return a2st_discrete if inst.discrete else a2st_continuous
    raise ValueError(f"unknown problem {problem!r}")


def _arec_continuous(inst: Instance, x: SelectionSolution):
    return arec_continuous_intervals(inst, x)


def solve_exact_enumeration(inst: Instance, problem: str, cap: int = ENUMERATION_CAP) -> tuple[SelectionSolution, Fraction]:
    """min over every first stage of C x + adversarial value."""
    if inst.n > cap:
        raise ValueError(f"n={inst.n} exceeds the enumeration cap {cap}")
    adversary = _adversary(inst, problem)
    sizes = [inst.p] if problem == "rrec" else range(inst.p + 1)
    best = None
    for size in sizes:
        for items in itertools.combinations(range(inst.n), size):
            x = SelectionSolution.of(items, inst.n)
            v = _cost(inst, items) + adversary(inst, x)[0]
            if best is None or v < best[1] or (v == best[1] and items < best[0]):
                best = (items, v)
    assert best is not None
    return SelectionSolution.of(best[0], inst.n, best[1]), best[1]


def minmax_budgeted(inst: Instance, restrict: Sequence[int] | None = None) -> tuple[SelectionSolution, Fraction]:
    """min over x of max over scenarios of (C + c) x, the no-recovery problem.

    Discrete budget: theta in {0} u {d_i} with costs C + c + [d - theta]_+ and
    offset gamma*theta. Continuous budget: the inner dual only needs
    theta in {0, 1}, giving costs C + c + d or C + c with offset gamma.
    """
    pool = list(range(inst.n)) if restrict is None else sorted(restrict)
    base = [inst.first_stage_cost[i] + inst.nominal_cost[i] for i in range(inst.n)]
    if inst.discrete:
        thetas = sorted({Fraction(0)} | {inst.deviation[i] for i in pool})
        options = [(Fraction(inst.gamma_int) * t, [b + _pos(d - t) for b, d in zip(base, inst.deviation)]) for t in thetas]
    else:
        options = [
            (Fraction(0), [b + d for b, d in zip(base, inst.deviation)]),
            (inst.gamma, base),
        ]
    best = None
    for offset, costs in options:
        items = smallest_indices(costs, inst.p, among=pool)
        v = offset + sum((costs[i] for i in items), Fraction(0))
        if best is None or v < best[1]:
            best = (items, v)
    assert best is not None
    return SelectionSolution.of(best[0], inst.n, best[1]), best[1]


class SpecialCase(NamedTuple):
    x: SelectionSolution
    value: Fraction
    case: str


def _nominal_rrec_x(inst: Instance) -> SelectionSolution:
    model = build_nominal_rrec_lp(inst)
    sol = solve_lp(model)
    if sol.status != "optimal" or not sol.is_integral():
        raise RuntimeError("nominal recoverable LP did not return an integral vertex")
    items = [i for i in range(inst.n) if sol.x[i] == 1]
    return SelectionSolution.of(items, inst.n)


def special_cases(inst: Instance, problem: str) -> SpecialCase | None:
    """Polynomial cases of the discrete model, or None when none applies."""
    if not inst.discrete:
        raise ValueError("discrete budget model required")
    if problem == "rrec":
        if inst.k == 0:
            x, v = minmax_budgeted(inst)
            return SpecialCase(x, v, "k=0")
        if inst.k == inst.p:
            items = smallest_indices(inst.first_stage_cost, inst.p)
            v = _cost(inst, items) + arec_discrete(inst, SelectionSolution.of(items, inst.n))[0]
            return SpecialCase(SelectionSolution.of(items, inst.n, v), v, "k=p")
        if inst.gamma >= inst.n:
            # every item can be raised, so the only relevant scenario is the upper one
            upper = make_instance(inst.n, inst.p, inst.k, 0, "discrete", inst.upper_cost, [0] * inst.n, inst.first_stage_cost)
            x = _nominal_rrec_x(upper)
            v = _cost(inst, x.items) + arec_discrete(inst, x)[0]
            return SpecialCase(SelectionSolution.of(x.items, inst.n, v), v, "gamma>=n")
        if inst.k >= inst.gamma and all(c == 0 for c in inst.first_stage_cost):
            items = smallest_indices(inst.nominal_cost, inst.p)
            x = SelectionSolution.of(items, inst.n)
            v = arec_discrete(inst, x)[0]
            return SpecialCase(SelectionSolution.of(items, inst.n, v), v, "k>=gamma,C=0")
        return None
    if problem == "r2st":
        if inst.gamma >= inst.n:
            mixed = [min(c, u) for c, u in zip(inst.first_stage_cost, inst.upper_cost)]
            chosen = smallest_indices(mixed, inst.p)
            items = [i for i in chosen if inst.first_stage_cost[i] <= inst.upper_cost[i]]
            x = SelectionSolution.of(items, inst.n)
            v = _cost(inst, items) + a2st_discrete(inst, x)[0]
            return SpecialCase(SelectionSolution.of(items, inst.n, v), v, "gamma>=n")
        return None
    raise ValueError(f"unknown problem {problem!r}")


class ApproxResult(NamedTuple):
    x: SelectionSolution
    value: Fraction
    guarantee: Fraction  # value <= guarantee * OPT


def _check_premise(inst: Instance, alpha_bound) -> Fraction:
    if not inst.discrete:
        raise ValueError("discrete budget model required")
    a = Fraction(alpha_bound)
    if not 0 < a <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    for i, (lo, up) in enumerate(zip(inst.nominal_cost, inst.upper_cost)):
        if lo < a * up:
            raise ValueError(f"item {i + 1}: nominal cost below alpha times upper cost")
    return a


def approx_nominal_rrec(inst: Instance, alpha_bound) -> ApproxResult:
    """First stage of the nominal recoverable problem, priced against the real adversary."""
    a = _check_premise(inst, alpha_bound)
    x = _nominal_rrec_x(inst)
    v = _cost(inst, x.items) + arec_discrete(inst, x)[0]
    return ApproxResult(SelectionSolution.of(x.items, inst.n, v), v, 1 / a)


def approx_r2st(inst: Instance, alpha_bound) -> ApproxResult:
    """Select p items by min(C_i, nominal_i); those priced by C go to the first stage."""
    a = _check_premise(inst, alpha_bound)
    mixed = [min(c, lo) for c, lo in zip(inst.first_stage_cost, inst.nominal_cost)]
    chosen = smallest_indices(mixed, inst.p)
    items = [i for i in chosen if mixed[i] == inst.first_stage_cost[i]]
    x = SelectionSolution.of(items, inst.n)
    v = _cost(inst, items) + a2st_discrete(inst, x)[0]
    return ApproxResult(SelectionSolution.of(items, inst.n, v), v, 1 / a)


# LP file format


def _render_row(coefs: list[Fraction]) -> tuple[list[str], Fraction]:
    """Exact text for a row: decimals if every entry allows it, else scaled to integers."""
    texts = [decimal_string(c) for c in coefs]
    if all(t is not None for t in texts):
        return texts, Fraction(1)
    scale = 1
    for c in coefs:
        scale = scale * c.denominator // math.gcd(scale, c.denominator)
    return [str(int(c * scale)) for c in coefs], Fraction(scale)


def _terms_text(names: list[str], texts: list[str]) -> str:
    parts = []
    for name, t in zip(names, texts):
        neg = t.startswith("-")
        mag = t[1:] if neg else t
        coef = "" if mag == "1" else f"{mag} "
        if not parts:
            parts.append(f"{'-' if neg else ''}{coef}{name}")
        else:
            parts.append(f"{'-' if neg else '+'} {coef}{name}")
    return " ".join(parts) if parts else "0"


def write_lp(m: MipModel) -> str:
    order = {name: j for j, name in enumerate(m.names)}
    out = [f"\\ {m.problem} model: {m.num_vars} variables, {m.num_rows} rows"]
    out.append("Minimize" if m.sense == "min" else "Maximize")
    onames = sorted(m.objective, key=order.__getitem__)
    texts, _ = _render_row([m.objective[v] for v in onames])
    out.append(f" obj: {_terms_text(onames, texts)}")
    out.append("Subject To")
    for name, terms, rel, rhs in m.rows:
        vnames = sorted(terms, key=order.__getitem__)
        texts, scale = _render_row([terms[v] for v in vnames] + [rhs])
        out.append(f" {name}: {_terms_text(vnames, texts[:-1])} {rel} {texts[-1]}")
    out.append("Bounds")
    for name in m.names:
        lo, hi = m.bounds.get(name, (Fraction(0), None))
        if lo is None and hi is None:
            out.append(f" {name} free")
        elif (lo, hi) != (Fraction(0), None) and name not in m.binaries:
            lo_t = "-inf" if lo is None else format_rational(lo)
            hi_t = "+inf" if hi is None else format_rational(hi)
            out.append(f" {lo_t} <= {name} <= {hi_t}")
    out.append("Binary")
    for name in m.binaries:
        out.append(f" {name}")
    out.append("End")
    return "\n".join(out) + "\n"


_TERM = re.compile(r"([+-]?)\s*([0-9./]+)?\s*([A-Za-z_][A-Za-z0-9_]*)")


def _parse_terms(text: str) -> dict[str, Fraction]:
    terms: dict[str, Fraction] = {}
    text = text.strip()
    if text == "0":
        return terms
    pos = 0
    while pos < len(text):
        mt = _TERM.match(text, pos)
        if not mt:
            raise ValueError(f"cannot parse terms near {text[pos:]!r}")
        sign = -1 if mt.group(1) == "-" else 1
        coef = Fraction(mt.group(2)) if mt.group(2) else Fraction(1)
        terms[mt.group(3)] = terms.get(mt.group(3), Fraction(0)) + sign * coef
        pos = mt.end()
        while pos < len(text) and text[pos] == " ":
            pos += 1
    return terms


def parse_lp(text: str, problem: str = "") -> MipModel:
    """Read back what :func:`write_lp` produces."""
    section = None
    names: list[str] = []
    seen: set[str] = set()
    objective: dict[str, Fraction] = {}
    rows = []
    bounds: dict[str, tuple] = {}
    binaries: list[str] = []
    sense = "min"

    def note(vs):
        for v in vs:
            if v not in seen:
                seen.add(v)
                names.append(v)

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in ("minimize", "maximize", "subject to", "bounds", "binary", "end"):
            section = low
            if low == "maximize":
                sense = "max"
            continue
        if section in ("minimize", "maximize"):
            _, body = line.split(":", 1)
            objective = _parse_terms(body)
            note(objective)
        elif section == "subject to":
            name, body = line.split(":", 1)
            mt = re.match(r"(.*?)\s*(<=|>=|=)\s*(\S+)$", body.strip())
            if not mt:
                raise ValueError(f"bad row {line!r}")
            terms = _parse_terms(mt.group(1))
            note(terms)
            rows.append((name.strip(), terms, mt.group(2), Fraction(mt.group(3))))
        elif section == "bounds":
            if low.endswith(" free"):
                bounds[line.split()[0]] = (None, None)
            else:
                mt = re.match(r"(\S+)\s*<=\s*(\S+)\s*<=\s*(\S+)$", line)
                if not mt:
                    raise ValueError(f"bad bound {line!r}")
                lo = None if mt.group(1) == "-inf" else Fraction(mt.group(1))
                hi = None if mt.group(3) in ("+inf", "inf") else Fraction(mt.group(3))
                bounds[mt.group(2)] = (lo, hi)
        elif section == "binary":
            binaries.extend(line.split())
            note(line.split())
    return MipModel(problem, names, objective, rows, bounds, binaries, [], sense)
