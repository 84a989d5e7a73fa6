import itertools
import random
from fractions import Fraction

import pytest

from folia.foliation import Derivation, Finite, FoliationSpec, apply_word, contact_order
from folia.invariant import (
    EvalPoint,
    NotCertified,
    functional_matrix,
    invariant_variety_estimate,
    nf_profile,
    truncated_invariant_ideal,
)
from folia.polyring import Polynomial, VariableContext, polys_in

from oracles import brute_kernel

XY = VariableContext(["x", "y"])
x, y = polys_in(XY, "x", "y")
ZERO = Polynomial.zero(XY)
F12 = FoliationSpec.of([Derivation((x, 2 * y))])

UVXY = VariableContext(["u", "v", "x", "y"], ["t1", "t2"])
u, v, X, Y = polys_in(UVXY, "u", "v", "x", "y")
Z4 = Polynomial.zero(UVXY)
SIX = FoliationSpec.of([Derivation((Z4, Z4, u * X, v * Y))])
GENERIC = EvalPoint.of(UVXY, [UVXY.param("t1"), UVXY.param("t2"), 1, 1])


def pt(ctx, *coords):
    return EvalPoint.of(ctx, coords)


def test_eval_point_tags():
    assert pt(XY, 1, 2).tag == "closed"
    assert GENERIC.tag == "generic"
    with pytest.raises(ValueError):
        pt(XY, 1)


def test_functional_matrix_examples():
    assert functional_matrix(pt(XY, 1, 1), F12, 2).rank == 5
    assert functional_matrix(pt(XY, 0, 0), F12, 2).rank == 1
    for F in (F12, SIX):
        p = pt(F.ctx, *[1] * F.ctx.nvars)
        fm = functional_matrix(p, F, 0)
        assert fm.rank == 1 and len(fm.rows) == 1


def test_rows_only_added_when_rank_grows():
    fm = functional_matrix(pt(XY, 1, 1), F12, 3)
    assert len(fm.rows) == fm.rank <= len(fm.basis)
    assert fm.words[0] == ()


def test_truncated_invariant_ideal_examples():
    assert truncated_invariant_ideal(pt(XY, 1, 1), F12, 2) == [x**2 - y]
    assert truncated_invariant_ideal(pt(XY, 1, 1), F12, 1) == []
    assert truncated_invariant_ideal(pt(XY, 3, -1), F12, 0) == []


def test_late_rank_growth_is_not_missed():
    # under d/dx + 3x^2 d/dy at the origin, y is killed by D and D^2 but D^3(y) = 6
    F = FoliationSpec.of([Derivation((Polynomial.constant(XY, 1), 3 * x**2))])
    assert truncated_invariant_ideal(pt(XY, 0, 0), F, 1) == []
    assert functional_matrix(pt(XY, 0, 0), F, 1).certified


@pytest.mark.parametrize("point,F,n,depth", [
    ((1, 1), F12, 2, 6),
    ((1, 1), F12, 3, 10),
    ((0, 0), F12, 2, 4),
    ((2, -1), FoliationSpec.of([Derivation((y, -x))]), 2, 8),
    ((0, 0), FoliationSpec.of([Derivation((Polynomial.constant(XY, 1), 3 * x**2))]), 2, 8),
    ((1, 0), FoliationSpec.of([Derivation((Polynomial.constant(XY, 1), ZERO)),
                               Derivation((ZERO, x))]), 2, 4),
])
def test_rank_matches_brute_force(point, F, n, depth):
    want, _ = brute_kernel(point, list(F), n, depth)
    assert functional_matrix(pt(XY, *point), F, n).rank == want


def test_six_examples():
    est = invariant_variety_estimate(pt(UVXY, 1, 2, 1, 1), SIX, 4)
    assert est.dimension == 1 and est.stabilized and est.certified
    gens = {str(g) for g in est.ideal.basis}
    assert {"u - 1", "v - 2", "x^2 - y"} <= gens
    assert invariant_variety_estimate(pt(UVXY, 3, 5, 0, 0), SIX, 2).dimension == 0
    est = invariant_variety_estimate(GENERIC, SIX, 4)
    assert est.dimension == 2 and est.stabilized


def test_profile_examples():
    rows = nf_profile([pt(UVXY, 1, 2, 1, 1), pt(UVXY, 3, 5, 0, 0), pt(UVXY, 1, 1, 2, 0)], SIX, 4)
    assert [r.dimension for r in rows] == [1, 0, 1]
    assert all(r.stabilized and r.error is None for r in rows)
    zero = FoliationSpec.of([Derivation((ZERO, ZERO))])
    assert nf_profile([pt(XY, 3, Fraction(1, 2))], zero, 2)[0].dimension == 0
    with pytest.raises(ValueError):
        nf_profile([], SIX, 2)


def test_profile_records_row_errors():
    bad = EvalPoint((XY.scalar(1),), "closed", "short")
    rows = nf_profile([bad, pt(XY, 1, 1)], F12, 2)
    assert rows[0].error and rows[0].dimension is None
    assert rows[1].dimension == 1


def test_not_certified_warns():
    # depth cap 0 forbids every word beyond evaluation at the point
    with pytest.warns(NotCertified):
        est = invariant_variety_estimate(pt(XY, 1, 1), F12, 2, depth_cap=0)
    assert not est.certified


def test_uncertified_generators_are_noted():
    F = FoliationSpec((("A", "B")), (Derivation((x, ZERO)), Derivation((ZERO, y))))
    assert "generators not certified bracket-closed" in functional_matrix(pt(XY, 1, 1), F, 1).warnings


CASES = [
    (pt(XY, 1, 1), F12),
    (pt(XY, 0, 1), F12),
    (pt(XY, 2, -1), FoliationSpec.of([Derivation((y, -x))])),
    (pt(UVXY, 1, 2, 1, 1), SIX),
    (pt(UVXY, 1, 1, 2, 0), SIX),
]


@pytest.mark.parametrize("x0,F", CASES)
def test_dimension_non_increasing(x0, F):
    est = invariant_variety_estimate(x0, F, 4)
    dims = [d for _, d in est.history]
    assert all(a >= b for a, b in zip(dims, dims[1:]))


@pytest.mark.parametrize("x0,F", CASES)
def test_kernel_soundness_containment_tangency(x0, F):
    for n in (1, 2, 3):
        for k in truncated_invariant_ideal(x0, F, n):
            assert k.evaluate(x0.coords) == 0
            assert not isinstance(contact_order(k, F, x0, word_cap=12), Finite)
            for d in F:
                for r in range(3):
                    for word in itertools.product(range(len(F)), repeat=r):
                        assert apply_word(word, d(k), F).evaluate(x0.coords) == 0


def semicontinuity_violations(count=10, seed=1, n_max=3):
    rng = random.Random(seed)
    specs = [(Fraction(rng.randint(-4, 4), rng.randint(1, 3)), Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
             for _ in range(count - 3)] + [(1, 2), (0, 0), (2, 3)]
    generic = [functional_matrix(GENERIC, SIX, n).rank for n in range(1, n_max + 1)]
    bad = 0
    for a, b in specs:
        p = pt(UVXY, a, b, 1, 1)
        for n in range(1, n_max + 1):
            if functional_matrix(p, SIX, n).rank > generic[n - 1]:
                bad += 1
    return bad, len(specs)


def test_rank_lower_semicontinuity():
    bad, count = semicontinuity_violations()
    assert count == 10 and bad == 0


def test_generic_point_with_pole():
    ctx = VariableContext(["x", "y"], ["t"])
    t = ctx.param("t")
    with pytest.raises(ZeroDivisionError):
        EvalPoint.of(ctx, [t / (t - t), 1])
