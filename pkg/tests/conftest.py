import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from folia.polyring import Polynomial, VariableContext, monomials_up_to


def random_poly(rng: random.Random, ctx: VariableContext, degree: int, terms: int = 4,
                coeff_range: int = 5) -> Polynomial:
    monos = monomials_up_to(ctx.nvars, degree)
    out = {}
    for _ in range(rng.randint(1, terms)):
        c = rng.randint(-coeff_range, coeff_range)
        if c:
            out[rng.choice(monos)] = c
    return Polynomial(ctx, out)


def poly_strategy(ctx: VariableContext, degree: int = 4, max_terms: int = 5):
    monos = monomials_up_to(ctx.nvars, degree)
    coeff = st.fractions(min_value=-6, max_value=6, max_denominator=4)
    return st.dictionaries(st.sampled_from(monos), coeff, max_size=max_terms).map(
        lambda d: Polynomial(ctx, d))


@pytest.fixture
def xy():
    return VariableContext(["x", "y"])


@pytest.fixture
def xyz():
    return VariableContext(["x", "y", "z"])


@pytest.fixture
def uvxy():
    return VariableContext(["u", "v", "x", "y"], ["t1", "t2"])


__all__ = ["random_poly", "poly_strategy", "Fraction"]
