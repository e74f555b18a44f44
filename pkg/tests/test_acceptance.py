"""End-to-end acceptance checks; each test prints one PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) or under pytest.
"""

import random
import sys
import time
from fractions import Fraction as F

import pytest

from relfix import solver
from relfix.checker import check_hypotheses, compare_theorems
from relfix.cli import golden_text, reproduce_text
from relfix.comparison import Linear, OrderedTable, Rational, check_lambda_membership, check_phi_membership, iterate
from relfix.contraction import CondKind, Condition, check_contraction, pair_source, sides
from relfix.document import load
from relfix.properties import random_case, run_suite
from relfix.relation import is_complete_relation, is_directed, symmetric_closure
from relfix.space import FiniteSet
from relfix.verdict import Kind

PASSING = (Kind.HOLDS, Kind.HOLDS_SAMPLED)
# pytest shows these in its terminal summary (see conftest.py)
LINES: list[str] = []


class Criterion:
    """Collects named sub-checks and prints one line for the criterion."""

    def __init__(self, number: int, title: str, budget: float | None = None):
        self.number, self.title, self.budget = number, title, budget
        self.failed: list[str] = []

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def expect(self, ok: bool, what: str):
        if not ok:
            self.failed.append(what)

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc is not None:
            self.failed.append(f"{exc_type.__name__}: {exc}")
        if self.budget is not None and elapsed >= self.budget:
            self.failed.append(f"took {elapsed:.2f} s, limit {self.budget:g} s")
        status = "PASS" if not self.failed else "FAIL"
        detail = "" if not self.failed else "  [" + "; ".join(self.failed) + "]"
        line = f"criterion {self.number} {status}  {self.title} ({elapsed:.2f} s){detail}"
        LINES.append(line)
        print(line, flush=True)
        assert not self.failed, self.failed
        return False


def slot(report, label):
    return next(s.verdict for s in report.slots if s.label == label)


def test_criterion_1_halving_map():
    with Criterion(1, "halving map: F(f)={0}, |x_n| <= 2^(1-n), T2.1/T2.5/T2.7 pass, T1.17/C2.2 fail at (i)", 1.0) as c:
        inst = load("example4.1").instance
        c.expect(solver.fixed_points(inst) == FiniteSet.of(0), "fixed points")
        orbit = solver.picard(inst, 1)
        c.expect(orbit.converged and orbit.limit == 0, "orbit limit")
        c.expect(len(orbit.points) >= 41, "fewer than 41 iterates")
        c.expect(all(abs(x) <= F(2) / 2**n for n, x in enumerate(orbit.points[:41])), "|x_n| bound")
        table = compare_theorems(inst, ["T2.1", "T2.5", "T2.7", "T1.17", "C2.2"])
        rows = {r.theorem: r.report for r in table.rows}
        for tid in ("T2.1", "T2.5", "T2.7"):
            c.expect(rows[tid].overall.kind in PASSING, f"{tid} does not pass")
        for tid, limit in (("T1.17", 4), ("C2.2", -1)):
            v = slot(rows[tid], "(i)")
            c.expect(rows[tid].failing_slot == "(i)" and v.kind is Kind.FAILS, f"{tid} slot (i)")
            c.expect(v.witness is not None and v.witness.limit == limit and v.witness.replays(inst.space), f"{tid} witness")


def test_criterion_2_step_map():
    with Criterion(2, "step map: F(f)={0}, X(f,S)={0,1}, C2.8 passes on Y=[0,1], T1.17 fails at (i) toward 3", 1.0) as c:
        inst = load("example4.2").instance
        c.expect(solver.fixed_points(inst) == FiniteSet.of(0), "fixed points")
        s = symmetric_closure(inst.relation)
        c.expect(solver.compute_x_f_r(inst, s).points == FiniteSet.of(0, 1), "X(f,S)")
        c.expect(str(inst.y.carrier) == "[0, 1]", "Y")
        rows = {r.theorem: r.report for r in compare_theorems(inst, ["C2.8", "T1.17"]).rows}
        c.expect(rows["C2.8"].overall.kind in PASSING, "C2.8 does not pass")
        c.expect(rows["T1.17"].failing_slot == "(i)", "T1.17 slot")
        w = slot(rows["T1.17"], "(i)").witness
        c.expect(w is not None and w.limit == 3, "T1.17 witness")


def test_criterion_3_two_fixed_points():
    with Criterion(3, "two fixed points: F(f)={0,4}, 6-pair check with 1 <= 3/2, Banach fails at (1,2), (0,3) witnesses", 1.0) as c:
        inst = load("example4.3").instance
        c.expect(solver.fixed_points(inst) == FiniteSet.of(0, 4), "fixed points")
        src = pair_source(inst)
        c.expect(src.exhaustive and len(src.pairs) == 6, "pair count")
        moving = [(p, sides(inst, *p)) for p in src.pairs if sides(inst, *p)[0] > 0]
        c.expect(moving == [((1, 2), (1, F(3, 2)))], "single nonzero case")
        c.expect(check_hypotheses(inst, "T2.1").overall.kind is Kind.HOLDS, "T2.1")
        row = compare_theorems(inst, ["T1.18"]).rows[0].report
        v = slot(row, "(v)")
        c.expect(row.failing_slot == "(v)" and v.witness["pair"] == (1, 2), "T1.18 slot (v)")
        for k in (F(0), F(1, 2), F(3, 4), F(999, 1000)):
            b = check_contraction(inst.with_condition(Condition(CondKind.BANACH, (k,))))
            c.expect(b.kind is Kind.FAILS and b.witness["lhs"] - b.witness["rhs"] == 1 - k, f"residual at k={k}")
        d = is_directed(inst.relation, inst.image(), use_symmetric=True)
        c.expect(d.kind is Kind.FAILS and d.witness == (0, 3), "directedness")
        r = is_complete_relation(inst.relation, inst.image())
        c.expect(r.kind is Kind.FAILS and r.witness == (0, 3), "complete restriction")


def test_criterion_4_property_suite():
    with Criterion(4, "property suite: 500 seeded finite instances, zero violations", 30.0) as c:
        result = run_suite(seed=0, cases=500)
        c.expect(result.ok, result.render())
        c.expect(min(result.checks.values()) == 500, "not every property ran on every case")


def test_criterion_5_comparison_functions():
    with Criterion(5, "comparison functions: linear family exact, identity table, harmonic divergence, Lambda candidate") as c:
        for k in (F(0), F(1, 2), F(3, 4), F(99, 100)):
            r = check_phi_membership(Linear(k))
            c.expect((r.phi1.kind, r.phi2.kind, r.below_diagonal.kind) == (Kind.HOLDS,) * 3, f"Linear({k})")
        r = check_phi_membership(OrderedTable(((1, 1), (2, 2))))
        c.expect(r.below_diagonal.kind is Kind.FAILS and r.below_diagonal.witness is not None, "identity table")
        r = check_phi_membership(Rational(1))
        c.expect(r.phi2.kind is Kind.FAILS, "t/(1+t) summability")
        r = check_lambda_membership(Rational(2, 1))
        c.expect(all(v.kind in PASSING for v in (r.lambda1, r.lambda2, r.lambda3)), "Lambda candidate")
        c.expect(r.phi_cross_check is not None and r.phi_cross_check.kind in PASSING, "Lambda implies Phi cross-check")


def _corpus():
    for name in ("example4.1", "example4.2", "example4.3"):
        doc = load(name)
        yield name, doc.instance, doc.solver.x0
    rng = random.Random(0)
    for i in range(300):
        inst = random_case(rng).instance()
        start = solver.compute_x_f_r(inst)
        if not start.empty:
            yield f"random #{i}", inst, start.witness


def test_criterion_6_displacement_bound():
    with Criterion(6, "d(x_n,x_n+1) <= phi^n(d(x0,x1)) + 1e-9 on every passing corpus instance") as c:
        checked = 0
        for name, inst, x0 in _corpus():
            if inst.condition.kind is not CondKind.PHI_M:
                inst = inst.with_condition(Condition(CondKind.PHI_M), inst.phi)
            if not check_hypotheses(inst, "T2.1", validate=False).overall.passed:
                continue
            orbit = solver.picard(inst, x0)
            d0 = orbit.displacements[0] if orbit.displacements else 0
            for n, dn in enumerate(orbit.displacements):
                if float(dn) > float(iterate(inst.phi, n, d0)) + 1e-9:
                    c.expect(False, f"{name}: step {n}")
                    break
            checked += 1
        c.expect(checked >= 20, f"only {checked} passing instances")


def test_criterion_7_example_facts_reproduced():
    with Criterion(7, "every example-level fact reproduced exactly: golden reports regenerate byte-identically", 3.0) as c:
        for example in ("4.1", "4.2", "4.3"):
            c.expect(reproduce_text(example) == golden_text(example), f"golden {example}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
