from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from relfix.relation import Relation
from relfix.space import Component, IntervalUnion, MetricSpace, is_complete, is_r_complete, verify_metric_axioms
from relfix.verdict import Kind


def test_usual_metric_on_points_holds():
    assert verify_metric_axioms(MetricSpace.finite([0, 1, 2])).kind is Kind.HOLDS


def test_triangle_violation_reports_triple():
    # points a, b, c stand in as 0, 1, 2
    space = MetricSpace.finite([0, 1, 2], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    v = verify_metric_axioms(space)
    assert v.kind is Kind.FAILS
    x, y, z = v.witness
    assert space.distance(x, z) > space.distance(x, y) + space.distance(y, z)


def test_intervals_usual_metric_holds():
    assert verify_metric_axioms(MetricSpace.intervals("(-1,4)")).kind is Kind.HOLDS


@pytest.mark.parametrize(
    "space,x,inside",
    [
        (MetricSpace.intervals("(-1,4)"), 4, False),
        (MetricSpace.intervals("[-1/2,2)"), F(-1, 2), True),
        (MetricSpace.finite([0, 1, 2]), F(3, 2), False),
    ],
)
def test_membership_respects_endpoints(space, x, inside):
    assert space.contains(x) is inside


def test_distance_examples(e3):
    usual = MetricSpace.intervals("[0,10]")
    assert usual.distance(1, 3) == 2
    assert usual.distance(F(7, 3), F(7, 3)) == 0
    assert e3.d(e3.f(1), e3.f(2)) == 1


def test_distance_outside_carrier_rejected():
    with pytest.raises(ValueError):
        MetricSpace.intervals("(-1,4)").distance(4, 0)


@pytest.mark.parametrize("text,limit", [("(-1,4)", 4), ("[0,3)", 3)])
def test_open_right_end_is_incomplete(text, limit):
    space = MetricSpace.intervals(text)
    v = is_complete(space)
    assert v.kind is Kind.FAILS
    assert v.witness.limit == limit
    assert v.witness.replays(space)


def test_finite_space_complete():
    assert is_complete(MetricSpace.finite(range(5))).kind is Kind.HOLDS


def test_r_completeness_examples(e2):
    y = MetricSpace.intervals("[-1/2,2)")
    assert is_r_complete(y, Relation.geq(y)).kind is Kind.HOLDS
    x = MetricSpace.intervals("(-1,4)")
    v = is_r_complete(x, Relation.geq(x))
    assert v.kind is Kind.FAILS
    assert v.witness.limit == -1 and not v.witness.increasing
    assert v.witness.replays(x)
    y2 = MetricSpace.intervals("[0,1]")
    assert is_r_complete(y2, Relation.of_pairs(y2, [(0, 0), (0, 1), (1, 0), (1, 1)])).kind is Kind.HOLDS


def test_empty_and_malformed_intervals_rejected():
    with pytest.raises(ValueError):
        Component.parse("(2,2)")
    with pytest.raises(ValueError):
        Component.parse("[3,1]")
    with pytest.raises(ValueError):
        MetricSpace.finite([0, 1], [[0, 1], [2, 0]])


def test_adjacent_components_merge():
    u = IntervalUnion.of("[0,1)", "[1,2]", "(5,6)")
    assert [str(c) for c in u.components] == ["[0, 2]", "(5, 6)"]


bound = st.integers(-20, 20)
components = st.tuples(bound, st.integers(0, 6), st.booleans(), st.booleans()).map(
    lambda t: Component(F(t[0]), F(t[0] + t[1]), t[2] or t[1] == 0, t[3] or t[1] == 0)
)


@given(st.lists(components, min_size=1, max_size=5))
def test_normalization_idempotent(comps):
    u = IntervalUnion(tuple(comps))
    assert IntervalUnion(u.components) == u
    for a, b in zip(u.components, u.components[1:]):
        assert a.hi < b.lo or (a.hi == b.lo and not (a.hi_closed or b.lo_closed))


kinds = st.sampled_from(["geq", "leq", "universal"])


@given(st.lists(components, min_size=1, max_size=4), kinds)
def test_completeness_implies_r_completeness(comps, kind):
    space = MetricSpace(IntervalUnion(tuple(comps)))
    rel = getattr(Relation, kind)(space)
    if is_complete(space).kind is Kind.HOLDS:
        assert is_r_complete(space, rel).kind is Kind.HOLDS
    if kind == "universal":
        assert is_r_complete(space, rel).kind is is_complete(space).kind


@given(st.lists(components, min_size=1, max_size=4), kinds)
def test_failure_witnesses_replay(comps, kind):
    space = MetricSpace(IntervalUnion(tuple(comps)))
    for v in (is_complete(space), is_r_complete(space, getattr(Relation, kind)(space))):
        if v.kind is Kind.FAILS:
            assert v.witness.replays(space)
