from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from relfix.comparison import (
    Linear, OrderedTable, Rational, check_lambda_membership, check_phi_membership, evaluate, iterate,
)
from relfix.verdict import Kind

PASSING = (Kind.HOLDS, Kind.HOLDS_SAMPLED)


def test_evaluate():
    assert evaluate(Linear(F(1, 2)), 2) == 1
    assert evaluate(Linear(F(3, 4)), 2) == F(3, 2)
    for phi in (Linear(F(1, 3)), Rational(2), OrderedTable(((1, F(1, 2)), (3, 2)))):
        assert evaluate(phi, 0) == 0
    with pytest.raises(ValueError):
        evaluate(Linear(F(1, 2)), -1)


def test_iterate():
    assert iterate(Linear(F(1, 2)), 3, 8) == 1
    assert iterate(Rational(3), 0, 5) == 5
    assert iterate(Rational(1), 2, 1) == F(1, 3)


@given(st.integers(0, 30), st.fractions(0, 50, max_denominator=20))
def test_rational_iterate_closed_form(n, t):
    # c = 1: psi^n(t) = t / (1 + n t)
    assert iterate(Rational(1), n, t) == t / (1 + n * t)


def test_linear_membership_exact():
    r = check_phi_membership(Linear(F(3, 4)), [F(1, 10), 1, 10], terms=200)
    assert (r.phi1.kind, r.phi2.kind, r.below_diagonal.kind) == (Kind.HOLDS,) * 3


def test_identity_table_breaks_strict_decrease():
    r = check_phi_membership(OrderedTable(((1, 1), (2, 2))))
    assert r.below_diagonal.kind is Kind.FAILS
    t = r.below_diagonal.witness
    assert evaluate(OrderedTable(((1, 1), (2, 2))), t) == t


def test_harmonic_iterates_not_summable():
    r = check_phi_membership(Rational(1), [1], terms=10_000)
    assert r.phi2.kind is Kind.FAILS
    assert r.phi2.witness["t"] == 1


def test_lambda_candidate():
    r = check_lambda_membership(Rational(2, 1), T=1)
    assert (r.lambda1.kind, r.lambda2.kind, r.lambda3.kind) == (Kind.HOLDS_SAMPLED,) * 3
    assert r.phi_cross_check.kind in PASSING
    assert r.in_lambda and r.in_phi


def test_linear_not_in_lambda():
    r = check_lambda_membership(Linear(F(1, 2)))
    assert r.lambda2.kind is Kind.FAILS
    a, b = r.lambda2.witness
    assert a < b


def test_log_singular_integral_diverges():
    r = check_lambda_membership(Rational(1))
    assert r.lambda3.kind is Kind.FAILS


def test_table_invariants_rejected():
    with pytest.raises(ValueError):
        OrderedTable(((2, 1), (1, F(1, 2))))
    with pytest.raises(ValueError):
        Linear(1)


fractions01 = st.fractions(0, F(99, 100), max_denominator=100)


@settings(max_examples=40, deadline=None)
@given(fractions01)
def test_linear_lemma_coupling(k):
    r = check_phi_membership(Linear(k), terms=500)
    assert r.phi1.kind is Kind.HOLDS and r.phi2.kind is Kind.HOLDS
    assert r.below_diagonal.kind in PASSING


@st.composite
def tables(draw):
    n = draw(st.integers(1, 4))
    xs = sorted(draw(st.lists(st.integers(1, 20), min_size=n, max_size=n, unique=True)))
    vals, last = [], F(0)
    for x in xs:
        v = draw(st.fractions(last, x, max_denominator=10))
        vals.append(v)
        last = v
    return OrderedTable(tuple(zip(map(F, xs), vals)))


@settings(max_examples=40, deadline=None)
@given(tables())
def test_table_lemma_coupling(phi):
    r = check_phi_membership(phi, terms=2000)
    if r.phi1.kind is Kind.HOLDS and r.phi2.kind in PASSING:
        assert r.below_diagonal.kind in PASSING


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([Linear(F(1, 2)), Rational(3), Rational(5, 2)]), st.lists(st.fractions(0, 40, max_denominator=50), min_size=2, max_size=10))
def test_monotone_on_sorted_grid(phi, grid):
    vals = [evaluate(phi, t) for t in sorted(grid)]
    assert vals == sorted(vals)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([Linear(F(9, 10)), Rational(4, 1), Rational(1, F(1, 2))]), st.fractions(F(1, 100), 10, max_denominator=100))
def test_iterates_decay(phi, t):
    seq = [iterate(phi, n, t) for n in range(0, 60, 3)]
    assert all(b <= a for a, b in zip(seq, seq[1:]))
    assert float(iterate(phi, 400, t)) < 0.1 * float(t) + 1e-3
