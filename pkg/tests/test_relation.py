from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from relfix.relation import (
    Relation, RelKind, find_path, inverse, is_complete_relation, is_d_self_closed, is_directed, is_f_closed,
    is_preserving, related, restrict, sym_related, symmetric_closure,
)
from relfix.selfmap import SelfMap
from relfix.space import FiniteSet, IntervalUnion, MetricSpace
from relfix.verdict import Kind

X = MetricSpace.intervals("[0,4]")


def pairs(rel):
    return set(rel.pairs)


def test_inverse():
    assert pairs(inverse(Relation.of_pairs(X, [(0, 1)]))) == {(0, 1)[::-1]}
    assert inverse(Relation.geq(X)).kind is RelKind.LEQ


def test_inverse_is_involution(e3):
    assert inverse(inverse(e3.relation)) == e3.relation


def test_symmetric_closure_of_pairs():
    s = symmetric_closure(Relation.of_pairs(X, [(0, 1), (0, 2)]))
    assert pairs(s) == {(0, 1), (1, 0), (0, 2), (2, 0)}


def test_example_closure_matches_listed_s(e2):
    s = symmetric_closure(e2.relation)
    assert pairs(s) == {(0, 0), (0, 1), (1, 0), (0, 2), (2, 0), (1, 1), (2, 2)}


def test_order_closure_relates_everything():
    s = symmetric_closure(Relation.geq(X))
    assert all(s.holds_for(a, b) for a in (0, F(1, 3), 4) for b in (0, 2, 4))


def test_related_and_sym_related(e3):
    r = e3.relation
    assert related(r, 1, 2) and not related(r, 2, 1) and sym_related(r, 2, 1)
    assert related(Relation.geq(X), 3, 1)
    assert not sym_related(r, 0, 3)
    with pytest.raises(ValueError):
        related(r, 5, 0)


def test_complete_relation(e1, e3):
    assert is_complete_relation(e1.relation, e1.image()).kind is Kind.HOLDS
    v = is_complete_relation(e3.relation, e3.image())
    assert v.kind is Kind.FAILS and v.witness == (0, 3)
    assert is_complete_relation(Relation.universal(X), IntervalUnion.of("[0,4]")).kind is Kind.HOLDS


def test_f_closed(e1, e2):
    assert is_f_closed(e1.relation, e1.f).kind is Kind.HOLDS
    assert is_f_closed(symmetric_closure(e2.relation), e2.f).kind is Kind.HOLDS
    unit = MetricSpace.intervals("[-1,1]")
    v = is_f_closed(Relation.geq(unit), SelfMap.affine(("[-1,1]", -1, 0)))
    assert v.kind is Kind.FAILS
    x, y = v.witness
    assert x >= y and not (-x >= -y)


def test_preserving(e2):
    assert is_preserving(Relation.geq(X), [3, 2, 2, F(1, 2)])
    assert not is_preserving(Relation.geq(X), [1, 2])
    assert is_preserving(symmetric_closure(e2.relation), [1, 0, 0])


def test_d_self_closed(e2, e3):
    y = MetricSpace.intervals("[0,1]")
    assert is_d_self_closed(restrict(symmetric_closure(e2.relation), y)).kind is Kind.HOLDS
    assert is_d_self_closed(e3.relation).kind is Kind.HOLDS
    assert is_d_self_closed(Relation.universal(y)).kind is Kind.HOLDS


def test_directed(e1, e3):
    v = is_directed(e3.relation, e3.image(), use_symmetric=True)
    assert v.kind is Kind.FAILS and v.witness == (0, 3)
    assert is_directed(e1.relation, e1.image(), use_symmetric=True).kind is Kind.HOLDS
    assert is_directed(e3.relation, FiniteSet.of(4), use_symmetric=True).kind is Kind.HOLDS


def test_paths(e2, e3):
    p = find_path(symmetric_closure(e2.relation), 1, 2)
    assert p.nodes == (1, 0, 2) and p.length == 2
    g = find_path(symmetric_closure(Relation.geq(X)), F("0.2"), F("3.7"))
    assert g.nodes == (F("0.2"), F("3.7")) and g.length == 1
    assert find_path(symmetric_closure(e3.relation), 0, 3, max_len=10) is None
    with pytest.raises(ValueError):
        find_path(e3.relation, 0, 3, max_len=0)


points = st.lists(st.integers(0, 6), min_size=1, max_size=6, unique=True)


@st.composite
def pair_relations(draw):
    pts = draw(points)
    space = MetricSpace.finite(pts)
    prs = draw(st.lists(st.tuples(st.sampled_from(pts), st.sampled_from(pts)), max_size=12))
    return space, Relation.of_pairs(space, prs)


@given(pair_relations())
def test_symmetric_membership_matches_closure(sr):
    space, rel = sr
    s = symmetric_closure(rel)
    for x in space.points():
        for y in space.points():
            assert sym_related(rel, x, y) == related(s, x, y)


@given(pair_relations())
def test_closure_idempotent_and_contains(sr):
    _, rel = sr
    s = symmetric_closure(rel)
    assert symmetric_closure(s) == s
    assert pairs(rel) <= pairs(s)
    assert inverse(inverse(rel)) == rel


@given(pair_relations(), st.data())
def test_paths_preserve_relation(sr, data):
    space, rel = sr
    x = data.draw(st.sampled_from(space.points()))
    y = data.draw(st.sampled_from(space.points()))
    path = find_path(rel, x, y)
    if path is not None:
        assert path.nodes[0] == x and path.nodes[-1] == y
        assert is_preserving(rel, list(path.nodes))


@given(st.sampled_from(["geq", "leq", "universal"]), st.lists(st.fractions(-5, 5, max_denominator=8), min_size=2, max_size=6))
def test_order_closure_membership_on_grid(kind, grid):
    rel = getattr(Relation, kind)(MetricSpace.intervals("[-5,5]"))
    s = symmetric_closure(rel)
    for x in grid:
        for y in grid:
            assert sym_related(rel, x, y) == related(s, x, y)
