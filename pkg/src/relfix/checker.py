"""Hypothesis bundles for each fixed-point theorem, conclusion validation and cross-theorem tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import solver
from .comparison import Linear, check_lambda_membership, check_phi_membership, default_grid
from .contraction import (
    DEFAULT_BUDGET,
    Condition,
    CondKind,
    ContractionInstance,
    check_contraction,
    infer_constant,
)
from .relation import (
    Relation,
    find_path,
    is_complete_relation,
    is_d_self_closed,
    is_directed,
    is_f_closed,
    is_r_continuous,
    restrict,
    symmetric_closure,
)
from .space import fmt, is_complete, is_r_complete
from .verdict import Kind, Verdict, fails, holds, sampled, unknown, worst

EXISTENCE = "existence"
UNIQUENESS = "existence+uniqueness"


@dataclass(frozen=True)
class TheoremSpec:
    id: str
    conclusion: str
    condition: CondKind
    slots: tuple
    note: str = ""


@dataclass(frozen=True)
class Slot:
    label: str
    description: str
    verdict: Verdict


@dataclass(frozen=True)
class HypothesisReport:
    theorem: str
    conclusion_kind: str
    condition: str
    slots: tuple
    overall: Verdict
    failing_slot: str | None = None
    conclusion_check: Verdict | None = None
    note: str = ""

    @property
    def status(self) -> str:
        k = self.overall.kind
        if k is Kind.FAILS:
            return f"fail{self.failing_slot}"
        if k is Kind.UNKNOWN:
            return f"unknown{self.failing_slot}"
        return "pass" if k is Kind.HOLDS else "pass (sampled)"


class Context:
    """Per-instance cache so that bundles sharing a slot compute it once."""

    def __init__(self, inst: ContractionInstance, budget: int = DEFAULT_BUDGET, memo: dict | None = None):
        self.inst = inst
        self.budget = budget
        # every key either ignores the condition or names it, so contexts of derived instances may share
        self._memo: dict = {} if memo is None else memo
        self.sym = symmetric_closure(inst.relation)

    def memo(self, key, fn: Callable):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    def rel(self, which: str) -> Relation:
        if which == "S":
            return self.sym
        if which == "U":
            return Relation.universal(self.inst.space)
        return self.inst.relation

    @property
    def image(self):
        return self.memo("image", self.inst.image)

    @property
    def fixed(self):
        return self.memo("fixed", lambda: solver.fixed_points(self.inst))

    def admissible(self, which: str):
        return self.memo(("xfr", which), lambda: solver.compute_x_f_r(self.inst, self.rel(which)))


def _either(a: Verdict, b: Verdict, note: str) -> Verdict:
    """Disjunction: the better grade of the two."""
    passing = [v for v in (a, b) if v.passed]
    if passing:
        best = min(passing, key=lambda v: 0 if v.kind is Kind.HOLDS else 1)
        return Verdict(best.kind, f"{note}: {best.note}")
    if a.failed and b.failed:
        return fails(f"{note}: neither holds ({a.note}; {b.note})", (a.witness, b.witness))
    return unknown(f"{note}: {a.note}; {b.note}")


# slot builders: each takes (ctx, which-relation) and returns a Verdict


def _slot_r_complete(space_key: str):
    def run(ctx: Context, which: str) -> Verdict:
        space = ctx.inst.y if space_key == "Y" else ctx.inst.space
        v = is_r_complete(space, ctx.rel(which))
        return Verdict(v.kind, f"({space_key} = {space.carrier}) {v.note}", v.witness)

    return run


def _slot_complete(space_key: str):
    def run(ctx: Context, which: str) -> Verdict:
        space = ctx.inst.y if space_key == "Y" else ctx.inst.space
        v = is_complete(space)
        return Verdict(v.kind, f"({space_key} = {space.carrier}) {v.note}", v.witness)

    return run


def _slot_admissible(ctx: Context, which: str) -> Verdict:
    a = ctx.admissible(which)
    if a.empty:
        return fails("X(f,R) is empty", "X(f,R) = ∅")
    return holds(f"X(f,R) = {a.points}, x0 = {fmt(a.witness)}")


def _slot_f_closed(ctx: Context, which: str) -> Verdict:
    return ctx.memo(("fclosed", which), lambda: is_f_closed(ctx.rel(which), ctx.inst.f))


def _slot_continuity_or_dsc(ordinary: bool = False, on: str = "Y"):
    def run(ctx: Context, which: str) -> Verdict:
        rel = ctx.rel(which)
        cont_rel = Relation.universal(ctx.inst.space) if ordinary else rel
        cont = ctx.memo(("cont", ordinary, which), lambda: is_r_continuous(cont_rel, ctx.inst.f))
        space = ctx.inst.y if on == "Y" else ctx.inst.space
        dsc = is_d_self_closed(restrict(rel, space), space)
        label = "f continuous" if ordinary else "f R-continuous"
        return _either(cont, dsc, f"{label} or R|{on} d-self-closed")

    return run


def _slot_regular(ctx: Context, which: str) -> Verdict:
    return is_d_self_closed(ctx.rel(which), ctx.inst.space)


def _phi_membership(ctx: Context, phi) -> Verdict:
    def run():
        a = ctx.admissible("R")
        scale = None
        if a.witness is not None:
            x0 = a.witness
            scale = ctx.inst.d(x0, ctx.inst.f(x0))
        report = check_phi_membership(phi, default_grid(scale))
        bad = next((v for v in (report.phi1, report.phi2) if not v.passed), None)
        if bad is None:
            grade = worst([report.phi1.kind, report.phi2.kind])
            return Verdict(grade, f"phi in Phi ({report.phi2.note})")
        return Verdict(bad.kind, f"phi not shown to be in Phi: {bad.note}", bad.witness)

    return ctx.memo(("phi", str(phi)), run)


def _slot_contraction(ctx: Context, which: str) -> Verdict:
    inst = ctx.inst
    key = ("contraction", str(inst.condition), str(inst.phi), which)
    v = ctx.memo(key, lambda: check_contraction(inst, ctx.budget, ctx.rel(which)))
    if not inst.condition.needs_phi or not v.passed:
        return v
    if inst.condition.kind is CondKind.LAMBDA_N:
        lam = ctx.memo(("lambda", str(inst.phi)), lambda: check_lambda_membership(inst.phi))
        if not lam.in_lambda:
            bad = next(x for x in (lam.lambda1, lam.lambda2, lam.lambda3) if not x.passed)
            return unknown(f"{v.note}; psi not verified in Lambda ({bad.note})", bad.witness)
        grade = worst([v.kind, lam.lambda1.kind, lam.lambda2.kind, lam.lambda3.kind])
        return Verdict(grade, f"{v.note}; psi in Lambda (sampled)")
    member = _phi_membership(ctx, inst.phi)
    if not member.passed:
        return member
    return Verdict(worst([v.kind, member.kind]), f"{v.note}; {member.note}")


def _slot_fx_directed(ctx: Context, which: str) -> Verdict:
    return ctx.memo(
        ("fxdir", which),
        lambda: is_directed(ctx.rel(which), ctx.image, use_symmetric=True, candidate_pool=solver.default_pool(ctx.inst)),
    )


def _slot_fixed_directed(ctx: Context, which: str) -> Verdict:
    fixed = ctx.fixed
    if fixed is None:
        return holds("F(f) is empty, so directedness is vacuous")
    v = is_directed(ctx.rel(which), fixed, use_symmetric=True, candidate_pool=solver.default_pool(ctx.inst))
    fx = _slot_fx_directed(ctx, which)
    return Verdict(v.kind, f"F(f) = {fixed}: {v.note} [fX directedness: {fx.kind.value}]", v.witness)


def _slot_fx_complete(ctx: Context, which: str) -> Verdict:
    return ctx.memo(("fxcomplete", which), lambda: is_complete_relation(ctx.rel(which), ctx.image))


def _slot_paths(ctx: Context, which: str) -> Verdict:
    fixed = ctx.fixed
    note = "checked between fixed points only (the hypothesis asks it for every pair of X)"
    if fixed is None:
        return holds(f"F(f) is empty; {note}")
    if not fixed.is_finite:
        return unknown(f"F(f) = {fixed} is infinite; {note}")
    sym = symmetric_closure(ctx.inst.relation)
    for p, q in solver.all_fixed_pairs(fixed):
        if find_path(sym, p, q) is None:
            return fails(f"no path from {fmt(p)} to {fmt(q)} in R^s; {note}", (p, q))
    return holds(f"paths exist between all fixed points; {note}")


def _slot_universal_complete(ctx: Context, which: str) -> Verdict:
    return holds("the universal relation is complete on every subset")


_I_RC = ("(i)", "(Y,d) is R-complete, fX ⊆ Y ⊆ X", _slot_r_complete("Y"))
_II = ("(ii)", "X(f,R) is non-empty", _slot_admissible)
_III = ("(iii)", "R is f-closed", _slot_f_closed)
_IV = ("(iv)", "f is R-continuous or R|Y is d-self-closed", _slot_continuity_or_dsc())
_V_M = ("(v)", "d(fx,fy) <= phi(M_f(x,y)) on R", _slot_contraction)
_V_N = ("(v)", "d(fx,fy) <= phi(N_f(x,y)) on R", _slot_contraction)
_VI_DIR = ("(vi)", "fX is R^s-directed", _slot_fx_directed)
_VI_COMPLETE = ("(vi)'", "R|fX is complete", _slot_fx_complete)
_BASE_N = (_I_RC, _II, _III, _IV, _V_N)


def _linear(label: str) -> tuple:
    return (_I_RC, _II, _III, _IV, ("(v)", label, _slot_contraction), _VI_DIR)


THEOREMS: dict[str, TheoremSpec] = {
    t.id: t
    for t in (
        TheoremSpec("T2.1", EXISTENCE, CondKind.PHI_M, (_I_RC, _II, _III, _IV, _V_M)),
        TheoremSpec(
            "C2.2", EXISTENCE, CondKind.PHI_M,
            (("(i)", "(X,d) is R-complete", _slot_r_complete("X")), _II, _III,
             ("(iv)", "f is R-continuous or R is d-self-closed", _slot_continuity_or_dsc(on="X")), _V_M),
        ),
        TheoremSpec(
            "C2.3", EXISTENCE, CondKind.PHI_M,
            (("(i)", "(Y,d) is complete, fX ⊆ Y ⊆ X", _slot_complete("Y")), _II, _III,
             ("(iv)", "f is continuous or R|Y is d-self-closed", _slot_continuity_or_dsc(ordinary=True)), _V_M),
        ),
        TheoremSpec("C2.4", EXISTENCE, CondKind.PHI_N, _BASE_N),
        TheoremSpec("T2.5", UNIQUENESS, CondKind.PHI_N, _BASE_N + (_VI_DIR,)),
        TheoremSpec("T2.7", UNIQUENESS, CondKind.PHI_N, _BASE_N + (_VI_COMPLETE,)),
        TheoremSpec(
            "C2.8", UNIQUENESS, CondKind.PHI_N,
            tuple((l, d.replace("R", "S"), fn) for l, d, fn in _BASE_N)
            + (("(vi)", "F(f) is S-directed", _slot_fixed_directed),),
            "uniqueness here asks F(f) to be S-directed where the general bundle asks fX; both are evaluated",
        ),
        TheoremSpec(
            "C2.10", UNIQUENESS, CondKind.LAMBDA_N,
            _BASE_N[:4] + (("(v)'", "d(fx,fy) <= psi(N_f(x,y)) on R, psi in Lambda", _slot_contraction), _VI_DIR),
        ),
        TheoremSpec("C3.1", UNIQUENESS, CondKind.CIRIC, _linear("d(fx,fy) <= k N_f(x,y) on R")),
        TheoremSpec("C3.3", UNIQUENESS, CondKind.ABC, _linear("d(fx,fy) <= a d + b[d(x,fx)+d(y,fy)] + c[d(x,fy)+d(y,fx)]")),
        TheoremSpec("C3.5", UNIQUENESS, CondKind.BANACH, _linear("d(fx,fy) <= k d(x,y) on R")),
        TheoremSpec("C3.6", UNIQUENESS, CondKind.KANNAN, _linear("d(fx,fy) <= k[d(x,fx)+d(y,fy)] on R")),
        TheoremSpec("C3.8", UNIQUENESS, CondKind.CHATTERJEA, _linear("d(fx,fy) <= k[d(x,fy)+d(y,fx)] on R")),
        TheoremSpec(
            "C3.10", UNIQUENESS, CondKind.PHI_N,
            (("(i)", "(Y,d) is complete, fX ⊆ Y ⊆ X", _slot_complete("Y")),
             ("(iii)", "d(fx,fy) <= phi(N_f(x,y)) for all x, y", _slot_contraction),
             ("(vi)'", "X x X restricted to fX is complete", _slot_universal_complete)),
            "universal relation substituted for R",
        ),
        TheoremSpec(
            "T1.17", UNIQUENESS, CondKind.PHI_N,
            (("(i)", "(X,d) is complete", _slot_complete("X")),
             ("(ii)", "some x0 has (x0,fx0) in S", _slot_admissible),
             ("(iii)", "S is f-closed", _slot_f_closed),
             ("(iv)", "(X,d,S) is regular", _slot_regular),
             ("(v)", "d(fx,fy) <= phi(N_f(x,y)) on S", _slot_contraction),
             ("(vi)", "F(f) is S-directed", _slot_fixed_directed)),
        ),
        TheoremSpec(
            "T1.18", UNIQUENESS, CondKind.BANACH,
            (_I_RC, _II, _III, _IV, ("(v)", "d(fx,fy) <= k d(x,y) on R", _slot_contraction),
             ("(vi)", "paths in R^s join every pair of points", _slot_paths)),
        ),
    )
}

# which relation each bundle runs its relation-side checks against
_RELATION_OF = {"C2.8": "S", "T1.17": "S", "C3.10": "U"}


def _overall(slots: list[Slot]) -> tuple[Verdict, str | None]:
    kind = worst(s.verdict.kind for s in slots)
    if kind in (Kind.FAILS, Kind.UNKNOWN):
        first = next(s for s in slots if s.verdict.kind is kind)
        return Verdict(kind, f"slot {first.label}: {first.verdict.note}", first.verdict.witness), first.label
    return Verdict(kind, "all hypotheses hold" if kind is Kind.HOLDS else "applies (sampled evidence)"), None


def check_hypotheses(inst: ContractionInstance, theorem: str, budget: int = DEFAULT_BUDGET,
                     ctx: Context | None = None, validate: bool = True) -> HypothesisReport:
    spec = THEOREMS.get(theorem)
    if spec is None:
        raise ValueError(f"unknown theorem id {theorem!r}")
    if inst.condition.kind is not spec.condition:
        raise ValueError(f"{theorem} needs a {spec.condition.value} condition, the instance has {inst.condition.kind.value}")
    ctx = ctx if ctx is not None and ctx.inst == inst else Context(inst, budget)
    which = _RELATION_OF.get(theorem, "R")
    slots = [Slot(label, desc, fn(ctx, which)) for label, desc, fn in spec.slots]
    overall, failing = _overall(slots)
    report = HypothesisReport(theorem, spec.conclusion, _condition_text(inst), tuple(slots), overall, failing, None, spec.note)
    if validate and overall.passed:
        report = _with_conclusion(report, validate_conclusion(inst, report, ctx))
    return report


def _with_conclusion(report: HypothesisReport, verdict: Verdict) -> HypothesisReport:
    return HypothesisReport(
        report.theorem, report.conclusion_kind, report.condition, report.slots, report.overall,
        report.failing_slot, verdict, report.note,
    )


def _condition_text(inst: ContractionInstance) -> str:
    return f"{inst.condition} with phi: {inst.phi}" if inst.phi is not None else str(inst.condition)


def validate_conclusion(inst: ContractionInstance, report: HypothesisReport, ctx: Context | None = None) -> Verdict:
    if not report.overall.passed:
        raise ValueError("conclusions are only validated for passing hypothesis bundles")
    ctx = ctx or Context(inst)
    fixed = ctx.fixed
    if fixed is None:
        return fails("F(f) is empty although the hypotheses pass", "F(f) = ∅")
    which = _RELATION_OF.get(report.theorem, "R")
    start = ctx.admissible(which).witness
    if start is None:
        start = ctx.admissible("R").witness
    orbit = ctx.memo(("orbit", start), lambda: solver.picard(inst, start))
    if not orbit.converged or not fixed.contains(orbit.limit):
        return fails(f"Picard orbit from {fmt(start)} did not reach F(f) = {fixed}: {orbit.summary()}", {"start": start, "orbit": orbit})
    note = f"F(f) = {fixed}; orbit from {fmt(start)} {orbit.summary()}"
    if report.conclusion_kind == UNIQUENESS and not solver.is_singleton(fixed):
        return fails(f"F(f) = {fixed} is not a singleton", fixed)
    return holds(note)


@dataclass(frozen=True)
class Row:
    theorem: str
    report: HypothesisReport
    derivation: str = ""

    @property
    def status(self) -> str:
        return self.report.status


@dataclass(frozen=True)
class ComparisonTable:
    instance: str
    rows: tuple = field(default_factory=tuple)

    @property
    def overall(self) -> Kind:
        return worst(r.report.overall.kind for r in self.rows)


def derive(inst: ContractionInstance, target: CondKind, budget: int = DEFAULT_BUDGET):
    """Re-express the instance under the condition kind a theorem needs.

    Returns ``(instance or None, note, forced_fail)``; ``forced_fail`` is a Fails verdict
    when no admissible constant exists.
    """
    cond = inst.condition
    if cond.kind is target:
        return inst, "", None
    if target in (CondKind.PHI_M, CondKind.PHI_N, CondKind.LAMBDA_N):
        phi = inst.phi if inst.phi is not None else cond.linear_equivalent()
        why = "same comparison function" if inst.phi is not None else f"{phi} implied by {cond}"
        return inst.with_condition(Condition(target), phi), f"re-derived as {target.value} with {why}", None
    probe = CondKind.BANACH if target is CondKind.ABC else target
    k, pair, exhaustive = infer_constant(inst, probe, budget)
    upper = Fraction(1, 2) if target in (CondKind.KANNAN, CondKind.CHATTERJEA) else Fraction(1)
    scope = "all related pairs" if exhaustive else "sampled related pairs"
    if pair is None:
        k = Fraction(0)
    if k >= upper:
        x, y = pair
        lhs, base = _ratio_parts(inst, probe, x, y)
        return None, f"least constant over {scope} is {_num(k)}", fails(
            f"at ({fmt(x)}, {fmt(y)}): d(fx,fy) = {fmt(lhs)} > k * {fmt(base)} for every admissible k < {fmt(upper)}",
            {"pair": (x, y), "lhs": lhs, "base": base, "least_k": k},
        )
    params = (k, 0, 0) if target is CondKind.ABC else (k,)
    new = Condition(target, params)
    return inst.with_condition(new), f"re-derived as {new} (least constant over {scope})", None


def _num(k) -> str:
    return "inf" if k == float("inf") else fmt(k)


def _ratio_parts(inst, kind, x, y):
    from .contraction import _base

    return inst.d(inst.f(x), inst.f(y)), _base(inst, x, y, kind)


def _forced_report(theorem: str, inst: ContractionInstance, budget: int, ctx: Context, failure: Verdict) -> HypothesisReport:
    """Run every slot except the contraction, which is replaced by ``failure``."""
    spec = THEOREMS[theorem]
    which = _RELATION_OF.get(theorem, "R")
    slots = []
    for label, desc, fn in spec.slots:
        v = failure if fn is _slot_contraction else fn(ctx, which)
        slots.append(Slot(label, desc, v))
    overall, failing = _overall(slots)
    return HypothesisReport(theorem, spec.conclusion, spec.condition.value, tuple(slots), overall, failing, None, spec.note)


def compare_theorems(inst: ContractionInstance, ids, budget: int = DEFAULT_BUDGET) -> ComparisonTable:
    ids = list(ids)
    if not ids:
        raise ValueError("no theorems requested")
    base_ctx = Context(inst, budget)
    rows = []
    for tid in ids:
        spec = THEOREMS.get(tid)
        if spec is None:
            raise ValueError(f"unknown theorem id {tid!r}")
        derived, note, forced = derive(inst, spec.condition, budget)
        if forced is not None:
            rows.append(Row(tid, _forced_report(tid, inst, budget, base_ctx, forced), note))
            continue
        ctx = Context(derived, budget, base_ctx._memo)
        rows.append(Row(tid, check_hypotheses(derived, tid, budget, ctx), note))
    return ComparisonTable(inst.name, tuple(rows))
