"""Command-line interface: solve, gen, export and verify.

Results are written as JSON lines to stdout (or --output); diagnostics go to
stderr. Item indices on the command line and in the output are 1-based.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import adversary_continuous as ac
from . import adversary_discrete as ad
from . import oracle
from . import robust_continuous as rc
from . import robust_discrete as rd
from .model import (
    Instance,
    InstanceError,
    Scenario,
    SelectionSolution,
    decimal_string,
    format_rational,
    instance_to_dict,
    make_instance,
    parse_instance,
    scenario_violations,
    serialize_instance,
    to_rational,
)
from .selection import solve_i2st, solve_irec

PROBLEMS = ("irec", "i2st", "arec", "a2st", "rrec", "r2st")
ALGORITHMS = ("auto", "intervals", "levels", "lp", "enum", "approx", "oracle")

EXIT_INPUT = 1
EXIT_MISMATCH = 2


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    problem: str | None = None
    algorithm: str = "auto"
    instance: str | None = None
    output: str | None = None
    seed: int = 0
    n: int = 10
    p: int | None = None
    k: int | None = None
    gamma: str | None = None
    budget_model: str = "continuous"
    cost_min: int = 0
    cost_max: int = 20
    dev_max: int = 20
    first_stage_max: int = 20
    count: int = 1
    x: list[int] | None = None
    deltas: list[Fraction] | None = None
    extra: dict = field(default_factory=dict)


# algorithm tables: (problem, discrete?) -> allowed algorithms
_ALLOWED = {
    ("irec", False): {"auto", "oracle"},
    ("irec", True): {"auto", "oracle"},
    ("i2st", False): {"auto", "oracle"},
    ("i2st", True): {"auto", "oracle"},
    ("arec", False): {"auto", "intervals", "levels", "lp", "oracle"},
    ("arec", True): {"auto", "enum", "oracle"},
    ("a2st", False): {"auto", "intervals", "lp", "oracle"},
    ("a2st", True): {"auto", "enum", "oracle"},
    ("rrec", False): {"auto", "lp", "enum", "oracle"},
    ("rrec", True): {"auto", "enum", "approx", "oracle"},
    ("r2st", False): {"auto", "lp", "enum", "oracle"},
    ("r2st", True): {"auto", "enum", "approx", "oracle"},
}


def check_pairing(problem: str, algorithm: str, inst: Instance) -> None:
    allowed = _ALLOWED[(problem, inst.discrete)]
    if algorithm not in allowed:
        raise CliError(
            f"algorithm {algorithm!r} is not available for {problem} under the {inst.budget_model.value} budget "
            f"(choose from {', '.join(sorted(allowed))})",
            EXIT_MISMATCH,
        )


def _rounded(v: Fraction, digits: int = 6) -> str:
    q = Fraction(round(v * 10**digits), 10**digits)
    return decimal_string(q) or format_rational(q)


def _alpha_bound(inst: Instance) -> Fraction:
    ratios = [lo / up for lo, up in zip(inst.nominal_cost, inst.upper_cost) if up > 0]
    return min(ratios, default=Fraction(1))


def _first_stage(cfg: RunConfig, inst: Instance, exact: int | None) -> SelectionSolution:
    if cfg.x is None:
        raise CliError(f"--x is required for {cfg.problem}")
    items = [i - 1 for i in cfg.x]
    if any(not 0 <= i < inst.n for i in items) or len(set(items)) != len(items):
        raise CliError("--x must list distinct items between 1 and n")
    if exact is not None and len(items) != exact:
        raise CliError(f"--x must contain exactly p={exact} items")
    if len(items) > inst.p:
        raise CliError("--x has more than p items")
    return SelectionSolution.of(items, inst.n)


def _scenario(cfg: RunConfig, inst: Instance) -> Scenario:
    if cfg.deltas is None:
        return Scenario.nominal(inst)
    if len(cfg.deltas) != inst.n:
        raise CliError("--deltas must have n entries")
    scen = Scenario(tuple(cfg.deltas))
    problems = scenario_violations(inst, scen)
    if problems:
        raise CliError(f"--deltas: {problems[0]}")
    return scen


def run_algorithm(cfg: RunConfig, inst: Instance) -> dict:
    """Run the configured algorithm; returns value, witness items and maybe a scenario."""
    problem, algo = cfg.problem, cfg.algorithm
    assert problem is not None
    check_pairing(problem, algo, inst)
    scen_out = None
    if problem in ("irec", "i2st"):
        x = _first_stage(cfg, inst, inst.p if problem == "irec" else None)
        scen = _scenario(cfg, inst)
        if algo == "oracle":
            rep = oracle.oracle_incremental(inst, x, scen, problem)
            y = rep.witness_y
        else:
            y = (solve_irec if problem == "irec" else solve_i2st)(inst, x, scen)
        return {"value": y.value, "items": y.items}
    if problem in ("arec", "a2st"):
        x = _first_stage(cfg, inst, inst.p if problem == "arec" else None)
        if algo in ("oracle", "lp"):
            rep = oracle.oracle_adversarial(inst, x, problem)
            value, scen_out = rep.value, rep.witness_scenario
        elif inst.discrete:
            value, scen_out = (ad.arec_discrete if problem == "arec" else ad.a2st_discrete)(inst, x)
        elif problem == "a2st":
            value, scen_out = ac.a2st_continuous(inst, x)
        elif algo == "intervals":
            value, scen_out = ac.arec_continuous_intervals(inst, x)
        else:
            value, scen_out = ac.arec_continuous_levels(inst, x)
        return {"value": value, "items": x.items, "scenario": scen_out}
    # robust problems
    if algo == "oracle":
        rep = oracle.oracle_robust(inst, problem)
        assert rep.witness_x is not None
        return {"value": rep.value, "items": rep.witness_x.items}
    if algo == "enum":
        x, value = rd.solve_exact_enumeration(inst, problem)
        return {"value": value, "items": x.items}
    if algo == "approx":
        a = _alpha_bound(inst)
        if a == 0:
            raise CliError("approx needs every nominal cost to be a positive fraction of its upper cost")
        res = (rd.approx_nominal_rrec if problem == "rrec" else rd.approx_r2st)(inst, a)
        return {"value": res.value, "items": res.x.items, "guarantee": res.guarantee}
    if not inst.discrete:
        x, value = (rc.solve_rrec_continuous if problem == "rrec" else rc.solve_r2st_continuous)(inst)
        return {"value": value, "items": x.items}
    special = rd.special_cases(inst, problem)
    if special is not None:
        return {"value": special.value, "items": special.x.items, "case": special.case}
    x, value = rd.solve_exact_enumeration(inst, problem)
    return {"value": value, "items": x.items}


def _record(cfg: RunConfig, result: dict, elapsed_ms: float) -> dict:
    value = Fraction(result["value"])
    rec = {
        "problem": cfg.problem,
        "algorithm": cfg.algorithm,
        "value": format_rational(value),
        "value_decimal": _rounded(value),
        "items": [i + 1 for i in result["items"]],
    }
    if result.get("scenario") is not None:
        rec["scenario"] = [format_rational(d) for d in result["scenario"].deltas]
    if "case" in result:
        rec["case"] = result["case"]
    if "guarantee" in result:
        rec["guarantee"] = format_rational(result["guarantee"])
    rec["wall_time_ms"] = round(elapsed_ms, 3)
    return rec


def _read_instance(path: str | None) -> Instance:
    if path is None:
        raise CliError("--instance is required")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_instance(text)
    except InstanceError as exc:
        raise CliError(f"invalid instance: {exc}") from None


def _emit(cfg: RunConfig, lines: list[str]) -> None:
    text = "".join(line if line.endswith("\n") else line + "\n" for line in lines)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(cfg: RunConfig) -> int:
    inst = _read_instance(cfg.instance)
    start = time.perf_counter()
    result = run_algorithm(cfg, inst)
    elapsed = (time.perf_counter() - start) * 1000
    _emit(cfg, [json.dumps(_record(cfg, result, elapsed))])
    return 0


def generate(cfg: RunConfig, seed: int) -> Instance:
    """Seeded random instance with integer data in the configured ranges."""
    if cfg.n < 1:
        raise CliError("n must be positive")
    if cfg.cost_min < 0 or cfg.cost_max < cfg.cost_min or cfg.dev_max < 0 or cfg.first_stage_max < 0:
        raise CliError("invalid cost ranges")
    rng = random.Random(seed)
    n = cfg.n
    p = cfg.p if cfg.p is not None else max(1, n // 2)
    k = cfg.k if cfg.k is not None else p // 2
    C = [rng.randint(0, cfg.first_stage_max) for _ in range(n)]
    lo = [rng.randint(cfg.cost_min, cfg.cost_max) for _ in range(n)]
    d = [rng.randint(0, cfg.dev_max) for _ in range(n)]
    if cfg.gamma is not None:
        gamma: object = cfg.gamma
    elif cfg.budget_model == "discrete":
        gamma = math.ceil(n / 4)
    else:
        gamma = sum(d) // 4
    try:
        return make_instance(n, p, k, gamma, cfg.budget_model, lo, d, C)
    except InstanceError as exc:
        raise CliError(f"invalid generator parameters: {exc}") from None


def cmd_gen(cfg: RunConfig) -> int:
    _emit(cfg, [serialize_instance(generate(cfg, cfg.seed))])
    return 0


def cmd_export(cfg: RunConfig) -> int:
    inst = _read_instance(cfg.instance)
    if cfg.problem not in ("rrec", "r2st"):
        raise CliError("export supports --problem rrec or r2st", EXIT_MISMATCH)
    if not inst.discrete:
        raise CliError("export is only defined for the discrete budget model", EXIT_MISMATCH)
    if cfg.problem == "rrec" and inst.k == 0:
        raise CliError("k = 0 has no recoverable MIP; it is solved by the min-max routine", EXIT_MISMATCH)
    model = rd.build_rrec_discrete_mip(inst) if cfg.problem == "rrec" else rd.build_r2st_discrete_mip(inst)
    _emit(cfg, [rd.write_lp(model)])
    return 0


def _oracle_value(problem: str, inst: Instance, x: SelectionSolution | None, scen: Scenario | None) -> Fraction:
    if problem in ("irec", "i2st"):
        return oracle.oracle_incremental(inst, x, scen, problem).value
    if problem in ("arec", "a2st"):
        return oracle.oracle_adversarial(inst, x, problem).value
    return oracle.oracle_robust(inst, problem).value


def _first_stages(cfg: RunConfig, inst: Instance):
    if cfg.x is not None:
        yield [i - 1 for i in cfg.x]
        return
    sizes = [inst.p] if cfg.problem in ("irec", "arec") else range(inst.p + 1)
    for size in sizes:
        yield from itertools.combinations(range(inst.n), size)


def verify_instance(cfg: RunConfig, inst: Instance) -> dict | None:
    """None when the algorithm agrees with the oracle, else a counterexample record."""
    problem = cfg.problem
    assert problem is not None
    if problem in ("rrec", "r2st"):
        got = Fraction(run_algorithm(cfg, inst)["value"])
        want = _oracle_value(problem, inst, None, None)
        if got != want:
            return {"instance": instance_to_dict(inst), "algorithm_value": format_rational(got), "oracle_value": format_rational(want)}
        return None
    scen = _scenario(cfg, inst)
    for items in _first_stages(cfg, inst):
        sub = RunConfig(**{**cfg.__dict__, "x": [i + 1 for i in items]})
        got = Fraction(run_algorithm(sub, inst)["value"])
        want = _oracle_value(problem, inst, SelectionSolution.of(items, inst.n), scen)
        if got != want:
            return {
                "instance": instance_to_dict(inst),
                "x": [i + 1 for i in items],
                "algorithm_value": format_rational(got),
                "oracle_value": format_rational(want),
            }
    return None


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.instance is not None:
        batch = [(None, _read_instance(cfg.instance))]
    else:
        batch = [(s, generate(cfg, s)) for s in range(cfg.seed, cfg.seed + cfg.count)]
    lines = []
    bad = 0
    for seed, inst in batch:
        try:
            fault = verify_instance(cfg, inst)
        except oracle.OracleCapExceeded as exc:
            raise CliError(str(exc)) from None
        rec = {"seed": seed, "status": "EQUAL" if fault is None else "COUNTEREXAMPLE"}
        if fault is not None:
            rec.update(fault)
            bad += 1
        lines.append(json.dumps(rec))
    lines.append(json.dumps({"problem": cfg.problem, "algorithm": cfg.algorithm, "instances": len(batch), "status": "EQUAL" if bad == 0 else "MISMATCH"}))
    _emit(cfg, lines)
    return 0 if bad == 0 else 1


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None


def _rational_list(text: str) -> list[Fraction]:
    try:
        return [to_rational(t.strip()) for t in text.split(",") if t.strip()]
    except InstanceError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robsel", description="Robust recoverable and two-stage selection.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, problem_required=True):
        sp.add_argument("--problem", choices=PROBLEMS, required=problem_required)
        sp.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
        sp.add_argument("--instance", help="instance JSON file")
        sp.add_argument("--output", help="write results here instead of stdout")
        sp.add_argument("--x", type=_int_list, help="first-stage items, 1-based, comma separated")
        sp.add_argument("--deltas", type=_rational_list, help="scenario deviations for irec/i2st")

    def gen_args(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--n", type=int, default=10)
        sp.add_argument("--p", type=int)
        sp.add_argument("--k", type=int)
        sp.add_argument("--gamma")
        sp.add_argument("--budget-model", choices=("continuous", "discrete"), default="continuous")
        sp.add_argument("--cost-min", type=int, default=0)
        sp.add_argument("--cost-max", type=int, default=20)
        sp.add_argument("--dev-max", type=int, default=20)
        sp.add_argument("--first-stage-max", type=int, default=20)

    common(sub.add_parser("solve", help="solve one instance"))
    sp = sub.add_parser("gen", help="generate a seeded random instance")
    sp.add_argument("--output")
    gen_args(sp)
    sp = sub.add_parser("export", help="write the discrete MIP in LP file format")
    sp.add_argument("--problem", choices=("rrec", "r2st"), required=True)
    sp.add_argument("--instance", required=True)
    sp.add_argument("--output")
    sp = sub.add_parser("verify", help="compare an algorithm with the brute-force oracle")
    common(sp)
    gen_args(sp)
    sp.add_argument("--count", type=int, default=1)
    return parser


def _config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    for name in cfg.__dataclass_fields__:
        if hasattr(ns, name) and getattr(ns, name) is not None:
            setattr(cfg, name, getattr(ns, name))
    return cfg


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "solve": cmd_solve,
    "gen": cmd_gen,
    "export": cmd_export,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = _config(ns)
    try:
        return COMMANDS[cfg.command](cfg)
    except CliError as exc:
        print(f"robsel: {exc}", file=sys.stderr)
        return exc.code
    except (InstanceError, ValueError) as exc:
        print(f"robsel: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except oracle.OracleCapExceeded as exc:
        print(f"robsel: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
