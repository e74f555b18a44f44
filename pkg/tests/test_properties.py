import random
from fractions import Fraction as F

from hypothesis import given, settings, strategies as st

from relfix import contraction
from relfix.properties import Case, PROPERTIES, prop_mf_nf_formulas, random_case, run_suite, shrink


def test_small_suite_passes():
    result = run_suite(seed=7, cases=40)
    assert result.ok, result.render()
    assert set(result.checks) == set(PROPERTIES)


def test_generation_is_seeded():
    a = [random_case(random.Random(3)) for _ in range(2)]
    assert a[0] == a[1]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_generated_cases_are_valid(seed):
    case = random_case(random.Random(seed))
    inst = case.instance()
    assert set(inst.space.points()) == set(case.points)
    assert 0 <= case.k < 1


def test_shrinking_keeps_violation(monkeypatch):
    def broken(inst, x, y):
        dxy, dxfx, dyfy, _, _ = contraction._terms(inst, x, y)
        return max(dxy, (dxfx + dyfy) / 2)

    monkeypatch.setattr(contraction, "n_f", broken)
    rng = random.Random(0)
    case = next(c for c in (random_case(rng) for _ in range(200)) if prop_mf_nf_formulas(c) is not None)
    small, witness = shrink(case, prop_mf_nf_formulas)
    assert prop_mf_nf_formulas(small) is not None
    assert len(small.points) <= len(case.points) and not small.pairs
    x, y = witness["pair"]
    assert witness["n_f"] != witness["expected_n_f"]


def test_point_removal_keeps_self_map():
    case = Case((F(0), F(1), F(2)), None, ((F(0), F(0)), (F(1), F(0)), (F(2), F(1))), ((F(2), F(1)),), F(1, 2))
    assert case.without_point(F(1)) is None
    smaller = case.without_point(F(2))
    assert smaller.points == (0, 1) and smaller.pairs == ()
    smaller.instance()
