import random
from fractions import Fraction

import pytest

from robsel.model import SelectionSolution, make_instance


def random_instance(rng: random.Random, budget_model: str, n_max: int = 8, value_max: int = 20,
                    k=None, gamma=None, with_first_stage: bool = True):
    n = rng.randint(1, n_max)
    p = rng.randint(1, n)
    kk = rng.randint(0, p) if k is None else k(p)
    lo = [rng.randint(0, value_max) for _ in range(n)]
    d = [rng.randint(0, value_max) for _ in range(n)]
    C = [rng.randint(0, value_max) for _ in range(n)] if with_first_stage else None
    if gamma is None:
        g = rng.randint(0, sum(d)) if budget_model == "continuous" else rng.randint(0, min(4, n))
    else:
        g = gamma(n, d)
    return make_instance(n, p, kk, g, budget_model, lo, d, C)


def random_first_stage(rng: random.Random, inst, size=None) -> SelectionSolution:
    m = inst.p if size is None else size
    return SelectionSolution.of(rng.sample(range(inst.n), m), inst.n)


def gamma_grid(total: int) -> list[Fraction]:
    """Five budget points from 0 to total."""
    return sorted({Fraction(total * t, 4) for t in range(5)})


@pytest.fixture
def rng():
    return random.Random(20240611)
