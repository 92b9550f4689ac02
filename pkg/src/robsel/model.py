"""Domain types, exact numbers and JSON instance I/O.

Every real-valued quantity in the package is a :class:`fractions.Fraction`
(or a plain ``int`` where that is cheaper); nothing goes through floats.
Item indices are 0-based inside the library. The CLI converts to 1-based.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

Rational = Fraction


class BudgetModel(str, enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


class InstanceError(ValueError):
    """Raised when an instance document is malformed or violates an invariant."""

    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


def to_rational(value: Any, field: str = "value") -> Fraction:
    """Convert an int, a decimal string or a ``"p/q"`` string exactly."""
    if isinstance(value, bool):
        raise InstanceError(field, "expected a number, got a boolean")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # JSON floats are taken at their shortest repr, which is what the user typed.
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InstanceError(field, f"not an exact number: {value!r}") from None
    raise InstanceError(field, f"expected a number, got {type(value).__name__}")


def is_lowest_terms(q: Fraction) -> bool:
    """Debug hook for the lowest-terms invariant."""
    from math import gcd

    return q.denominator > 0 and gcd(q.numerator, q.denominator) == 1


def format_rational(q: Fraction) -> str:
    """Render ``q`` as ``"a"`` or ``"a/b"``."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def decimal_string(q: Fraction) -> str | None:
    """Exact decimal rendering, or None when the denominator is not 2^a 5^b."""
    q = Fraction(q)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    digits = max(twos, fives)
    if digits == 0:
        return str(q.numerator)
    scaled = abs(q.numerator) * (10**digits // q.denominator)
    sign = "-" if q < 0 else ""
    text = str(scaled).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def _json_number(q: Fraction) -> int | str:
    if q.denominator == 1:
        return q.numerator
    return decimal_string(q) or format_rational(q)


@dataclass(frozen=True)
class Instance:
    n: int
    p: int
    k: int
    gamma: Fraction
    budget_model: BudgetModel
    first_stage_cost: tuple[Fraction, ...]
    nominal_cost: tuple[Fraction, ...]
    deviation: tuple[Fraction, ...]

    @property
    def upper_cost(self) -> tuple[Fraction, ...]:
        return tuple(c + d for c, d in zip(self.nominal_cost, self.deviation))

    @property
    def discrete(self) -> bool:
        return self.budget_model is BudgetModel.DISCRETE

    @property
    def gamma_int(self) -> int:
        """Budget as an item count (discrete model), capped at n."""
        return min(self.n, int(self.gamma))

    def replace(self, **changes: Any) -> "Instance":
        data = {
            "n": self.n,
            "p": self.p,
            "k": self.k,
            "gamma": self.gamma,
            "budget_model": self.budget_model,
            "first_stage_cost": self.first_stage_cost,
            "nominal_cost": self.nominal_cost,
            "deviation": self.deviation,
        }
        data.update(changes)
        return make_instance(**data)


def make_instance(
    n: int,
    p: int,
    k: int,
    gamma: Any,
    budget_model: BudgetModel | str,
    nominal_cost: Sequence[Any],
    deviation: Sequence[Any],
    first_stage_cost: Sequence[Any] | None = None,
    *,
    check: bool = True,
) -> Instance:
    """Build an :class:`Instance` from loosely typed values.

    Raises InstanceError on the first violation when ``check`` is set.
    """
    if first_stage_cost is None:
        first_stage_cost = [0] * len(nominal_cost)
    inst = Instance(
        n=n,
        p=p,
        k=k,
        gamma=to_rational(gamma, "gamma"),
        budget_model=BudgetModel(budget_model),
        first_stage_cost=tuple(to_rational(v, "first_stage_cost") for v in first_stage_cost),
        nominal_cost=tuple(to_rational(v, "nominal_cost") for v in nominal_cost),
        deviation=tuple(to_rational(v, "deviation") for v in deviation),
    )
    if check:
        problems = _violations(inst)
        if problems:
            raise InstanceError(*problems[0])
    return inst


def _violations(inst: Instance) -> list[tuple[str, str]]:
    out: list[tuple[str, str]] = []
    if inst.n < 1:
        out.append(("n", "n must be positive"))
    if inst.p < 1:
        out.append(("p", "p must be positive"))
    if inst.p > inst.n:
        out.append(("p", "p exceeds n"))
    if inst.k < 0:
        out.append(("k", "k must be nonnegative"))
    if inst.k > inst.p:
        out.append(("k", "k exceeds p"))
    if inst.gamma < 0:
        out.append(("gamma", "gamma must be nonnegative"))
    if inst.budget_model is BudgetModel.DISCRETE and inst.gamma.denominator != 1:
        out.append(("gamma", "discrete budget must be integer"))
    for name, vec in (
        ("first_stage_cost", inst.first_stage_cost),
        ("nominal_cost", inst.nominal_cost),
        ("deviation", inst.deviation),
    ):
        if len(vec) != inst.n:
            out.append((name, f"{name} must have length n"))
    if any(v < 0 for v in inst.first_stage_cost):
        out.append(("first_stage_cost", "first stage cost must be nonnegative"))
    if any(v < 0 for v in inst.nominal_cost):
        out.append(("nominal_cost", "nominal cost must be nonnegative"))
    if any(v < 0 for v in inst.deviation):
        out.append(("deviation", "deviation must be nonnegative"))
    return out


def validate_instance(inst: Instance) -> list[str]:
    """Return every violated invariant (an empty list means valid)."""
    return [msg for _, msg in _violations(inst)]


_FIELDS = ("n", "p", "k", "gamma", "budget_model", "nominal_cost", "deviation")


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError("document", f"invalid JSON ({exc.msg})") from None
    return instance_from_dict(doc)


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError("document", "expected a JSON object")
    for name in _FIELDS:
        if name not in doc:
            raise InstanceError(name, "missing field")
    for name in ("n", "p", "k"):
        if not isinstance(doc[name], int) or isinstance(doc[name], bool):
            raise InstanceError(name, "expected an integer")
    if doc["budget_model"] not in ("continuous", "discrete"):
        raise InstanceError("budget_model", "expected 'continuous' or 'discrete'")
    arrays = ["nominal_cost", "deviation"] + (["first_stage_cost"] if "first_stage_cost" in doc else [])
    for name in arrays:
        if not isinstance(doc[name], list):
            raise InstanceError(name, "expected an array")
        if len(doc[name]) != doc["n"]:
            raise InstanceError(name, "array length must equal n")
    return make_instance(
        n=doc["n"],
        p=doc["p"],
        k=doc["k"],
        gamma=doc["gamma"],
        budget_model=doc["budget_model"],
        nominal_cost=doc["nominal_cost"],
        deviation=doc["deviation"],
        first_stage_cost=doc.get("first_stage_cost"),
    )


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    return {
        "n": inst.n,
        "p": inst.p,
        "k": inst.k,
        "gamma": _json_number(inst.gamma),
        "budget_model": inst.budget_model.value,
        "first_stage_cost": [_json_number(v) for v in inst.first_stage_cost],
        "nominal_cost": [_json_number(v) for v in inst.nominal_cost],
        "deviation": [_json_number(v) for v in inst.deviation],
    }


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), sort_keys=False) + "\n"


@dataclass(frozen=True)
class Scenario:
    """A cost realization, stored as its deviation vector."""

    deltas: tuple[Fraction, ...]

    def costs(self, inst: Instance) -> tuple[Fraction, ...]:
        return tuple(c + d for c, d in zip(inst.nominal_cost, self.deltas))

    @classmethod
    def nominal(cls, inst: Instance) -> "Scenario":
        return cls(tuple(Fraction(0) for _ in range(inst.n)))

    @classmethod
    def upper(cls, inst: Instance) -> "Scenario":
        return cls(tuple(inst.deviation))


def scenario_violations(inst: Instance, scen: Scenario, model: BudgetModel | None = None) -> list[str]:
    model = model or inst.budget_model
    out: list[str] = []
    if len(scen.deltas) != inst.n:
        return ["scenario length must equal n"]
    for dl, d in zip(scen.deltas, inst.deviation):
        if dl < 0 or dl > d:
            out.append("deviation out of range")
            break
    if model is BudgetModel.CONTINUOUS:
        if sum(scen.deltas, Fraction(0)) > inst.gamma:
            out.append("budget exceeded")
    else:
        raised = 0
        for dl, d in zip(scen.deltas, inst.deviation):
            if dl != 0 and dl != d:
                out.append("discrete deviation must be 0 or d_i")
                break
            if dl != 0:
                raised += 1
        if raised > inst.gamma:
            out.append("too many raised items")
    return out


@dataclass(frozen=True)
class SelectionSolution:
    """An item subset (sorted, 0-based) over ``n`` items with its cost."""

    items: tuple[int, ...]
    n: int
    value: Fraction = Fraction(0)

    @classmethod
    def of(cls, items: Iterable[int], n: int, value: Any = 0) -> "SelectionSolution":
        return cls(tuple(sorted(set(items))), n, Fraction(value))

    @property
    def indicator(self) -> tuple[int, ...]:
        members = set(self.items)
        return tuple(1 if i in members else 0 for i in range(self.n))

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, i: object) -> bool:
        return i in self.items
