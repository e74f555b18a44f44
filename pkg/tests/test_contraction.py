from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from relfix.comparison import Linear
from relfix.contraction import (
    CondKind, Condition, ContractionInstance, check_contraction, check_mf_step_bound, check_pairs, check_closure_agreement,
    check_nf_below_mf, m_f, n_f, pair_source, sides,
)
from relfix.relation import Relation, symmetric_closure
from relfix.selfmap import SelfMap
from relfix.space import MetricSpace
from relfix.verdict import Kind


def test_m_f_examples(e1, e3):
    assert m_f(e3, 1, 2) == 2
    assert m_f(e3, 4, 4) == 0
    assert m_f(e1, 3, 1) == 2


def test_n_f_examples(e2, e3):
    assert n_f(e3, 1, 2) == 2
    assert n_f(e3, 0, 0) == 0
    assert n_f(e2, 0, 2) == 2


def test_remark_exhaustive_on_pairs(e3):
    assert check_nf_below_mf(e3, pairs=e3.relation.sorted_pairs()).kind is Kind.HOLDS
    assert check_nf_below_mf(e3, pairs=[(4, 4)]).kind is Kind.HOLDS


def test_lemma_points(e1, e2, e3):
    assert check_mf_step_bound(e1, points=[3]).kind is Kind.HOLDS
    assert check_mf_step_bound(e3, points=[4]).kind is Kind.HOLDS
    assert check_mf_step_bound(e2, points=[2]).kind is Kind.HOLDS
    assert m_f(e2, 2, 1) <= max(e2.d(2, 1), e2.d(1, 0))


def test_example_contraction_exhaustive(e3):
    src = pair_source(e3)
    assert src.exhaustive and len(src.pairs) == 6
    moving = [(x, y) for x, y in src.pairs if e3.d(e3.f(x), e3.f(y)) > 0]
    assert moving == [(1, 2)]
    assert sides(e3, 1, 2) == (1, F(3, 2))
    assert check_contraction(e3).kind is Kind.HOLDS


@pytest.mark.parametrize("k", [F(0), F(1, 2), F(99, 100)])
def test_banach_never_fits_example(e3, k):
    v = check_contraction(e3.with_condition(Condition(CondKind.BANACH, (k,))))
    assert v.kind is Kind.FAILS
    assert v.witness["pair"] == (1, 2)
    assert v.witness["lhs"] == 1 and v.witness["rhs"] == k


def test_phi_n_over_closure(e2):
    inst = e2.with_relation(symmetric_closure(e2.relation))
    assert sides(inst, 0, 2) == (1, F(3, 2))
    assert check_contraction(inst).kind is Kind.HOLDS


def test_sampled_interval_contraction(e1):
    assert check_contraction(e1).kind is Kind.HOLDS_SAMPLED


def test_prop_1_20_agreement(e1, e3):
    assert check_closure_agreement(e3).kind is Kind.HOLDS
    assert check_closure_agreement(e1).kind is Kind.HOLDS_SAMPLED
    bad = e3.with_condition(Condition(CondKind.PHI_M), Linear(F(1, 4)))
    assert check_contraction(bad).kind is Kind.FAILS
    assert check_contraction(bad, relation=symmetric_closure(bad.relation)).kind is Kind.FAILS
    assert check_closure_agreement(bad).kind is not Kind.FAILS


def test_condition_ranges():
    with pytest.raises(ValueError, match=r"k must lie in \[0,1\)"):
        Condition(CondKind.BANACH, (1,))
    with pytest.raises(ValueError):
        Condition(CondKind.KANNAN, (F(1, 2),))
    with pytest.raises(ValueError):
        Condition(CondKind.ABC, (F(1, 2), F(1, 8), F(1, 8)))
    Condition(CondKind.ABC, (F(1, 4), F(1, 8), F(1, 8)))


def test_instance_validation(e1):
    with pytest.raises(ValueError):
        ContractionInstance(e1.space, e1.relation, e1.f, Condition(CondKind.PHI_M))
    with pytest.raises(ValueError):
        e1.with_subspace(MetricSpace.intervals("[0,2)"))


def test_missing_phi_rejected_by_check(e3):
    banach = e3.with_condition(Condition(CondKind.BANACH, (F(1, 2),)))
    with pytest.raises(ValueError):
        check_pairs(banach, pair_source(banach), Condition(CondKind.PHI_N))


@st.composite
def finite_instances(draw):
    pts = draw(st.lists(st.integers(-6, 6), min_size=1, max_size=5, unique=True))
    space = MetricSpace.finite(pts)
    f = SelfMap.from_table({p: draw(st.sampled_from(pts)) for p in pts})
    prs = draw(st.lists(st.tuples(st.sampled_from(pts), st.sampled_from(pts)), max_size=10))
    return ContractionInstance(space, Relation.of_pairs(space, prs), f, Condition(CondKind.PHI_M), Linear(F(1, 2)))


@given(finite_instances())
def test_functional_symmetry_and_bounds(inst):
    for x in inst.space.points():
        for y in inst.space.points():
            assert m_f(inst, x, y) == m_f(inst, y, x)
            assert n_f(inst, x, y) == n_f(inst, y, x)
            assert inst.d(x, y) <= n_f(inst, x, y) <= m_f(inst, x, y)


@settings(deadline=None)
@given(finite_instances(), st.fractions(0, F(19, 20), max_denominator=20))
def test_strength_ordering(inst, k):
    banach = check_contraction(inst.with_condition(Condition(CondKind.BANACH, (k,))))
    ciric = check_contraction(inst.with_condition(Condition(CondKind.CIRIC, (k,))))
    phi_n = check_contraction(inst.with_condition(Condition(CondKind.PHI_N), Linear(k)))
    phi_m = check_contraction(inst.with_condition(Condition(CondKind.PHI_M), Linear(k)))
    if banach.passed:
        assert ciric.passed
    if ciric.passed:
        assert phi_m.passed
    if phi_n.passed:
        assert phi_m.passed


@given(finite_instances())
def test_failure_witness_replays(inst):
    v = check_contraction(inst)
    if v.kind is Kind.FAILS:
        x, y = v.witness["pair"]
        lhs, rhs = sides(inst, x, y)
        assert lhs > rhs
