"""Plain-text and JSON renderings of tables, orbits and example scenarios."""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from fractions import Fraction

from . import solver
from .checker import ComparisonTable, HypothesisReport, compare_theorems
from .contraction import CondKind, ContractionInstance, check_mf_step_bound, check_closure_agreement, check_nf_below_mf, pair_source
from .document import InstanceDocument
from .relation import RelKind, is_complete_relation, is_directed, symmetric_closure
from .space import fmt
from .verdict import Verdict


def jsonable(value):
    """Exact numbers become strings (``1/2``); dataclasses, enums and tuples become plain JSON."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return fmt(value)
    if isinstance(value, float):
        return fmt(value) if math.isinf(value) else value
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, Verdict):
        return {"kind": value.kind.value, "note": value.note, "witness": jsonable(value.witness)}
    if dataclasses.is_dataclass(value):
        return {f.name: jsonable(getattr(value, f.name)) for f in dataclasses.fields(value) if not f.name.startswith("_") and f.name != "marks"}
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [jsonable(v) for v in value]
    return str(value)


def describe_instance(inst: ContractionInstance) -> list[str]:
    lines = [
        f"X = {inst.space}",
        f"Y = {inst.y.carrier}",
        f"R = {inst.relation}",
        f"f = {inst.f}",
        f"condition = {inst.condition}" + (f", phi: {inst.phi}" if inst.phi is not None else ""),
    ]
    return lines


def _verdict_line(v: Verdict) -> str:
    return f"{v.kind.value}: {v.note}" if v.note else v.kind.value


def render_report(report: HypothesisReport, derivation: str = "") -> list[str]:
    lines = [f"{report.theorem} [{report.conclusion_kind}] -> {report.status}"]
    if derivation:
        lines.append(f"  condition: {derivation}")
    if report.note:
        lines.append(f"  note: {report.note}")
    width = max(len(s.label) for s in report.slots)
    for s in report.slots:
        lines.append(f"  {s.label:<{width}}  {s.description}")
        lines.append(f"  {'':<{width}}    {_verdict_line(s.verdict)}")
    if report.conclusion_check is not None:
        lines.append(f"  conclusion: {_verdict_line(report.conclusion_check)}")
    return lines


def render_table(table: ComparisonTable, inst: ContractionInstance) -> str:
    lines = [f"instance: {table.instance or '(unnamed)'}"]
    lines += [f"  {line}" for line in describe_instance(inst)]
    lines.append("")
    width = max(len(r.theorem) for r in table.rows)
    lines.append("summary:")
    for r in table.rows:
        lines.append(f"  {r.theorem:<{width}}  {r.status}")
    for r in table.rows:
        lines.append("")
        lines += render_report(r.report, r.derivation)
    return "\n".join(lines) + "\n"


def table_data(table: ComparisonTable) -> dict:
    return {
        "instance": table.instance,
        "rows": [
            {"theorem": r.theorem, "status": r.status, "derivation": r.derivation, **jsonable(r.report)}
            for r in table.rows
        ],
    }


def render_orbit(result: solver.SolveResult, inst: ContractionInstance, prefix: int = 8) -> list[str]:
    orbit = result.orbit
    shown = ", ".join(fmt(p) for p in orbit.points[:prefix])
    more = ", ..." if len(orbit.points) > prefix else ""
    lines = [f"start x0 = {fmt(result.start)}", f"  orbit: {shown}{more} ({len(orbit.points)} points)", f"  status: {orbit.summary()}"]
    if orbit.converged:
        fixed = "yes" if result.fixed_point is not None else "no"
        lines.append(f"  limit: {fmt(orbit.limit)} (fixed point: {fixed})")
    if orbit.rounded_from is not None:
        lines.append(f"  note: iterates rounded to nearby rationals from step {orbit.rounded_from}")
    if result.error_bound is not None:
        phi = inst.phi if inst.phi is not None else inst.condition.linear_equivalent()
        exact = "exact geometric tail" if solver.tail_is_exact(phi) else "truncated series tail"
        lines.append(f"  error bound sum_(k>=n) phi^k(d(x0,x1)) at n = {orbit.iterations}: {float(result.error_bound):.6g} ({exact})")
    return lines


def scenario(doc: InstanceDocument, theorems) -> str:
    """Full example run: facts, hypothesis table, Picard run and cross-checks."""
    inst = doc.instance
    table = compare_theorems(inst, theorems, doc.budget)
    fixed = solver.fixed_points(inst)
    xfr = solver.compute_x_f_r(inst)
    img = inst.image()
    lines = [render_table(table, inst).rstrip("\n"), "", "facts:"]
    lines.append(f"  fX = {img}")
    lines.append(f"  X(f,R) = {solver.describe(xfr.points)}")
    if inst.relation.kind is not RelKind.UNIVERSAL:
        closed = solver.compute_x_f_r(inst, symmetric_closure(inst.relation))
        lines.append(f"  X(f,R^s) = {solver.describe(closed.points)}")
    lines.append(f"  F(f) = {solver.describe(fixed)}")
    source = pair_source(inst, budget=doc.budget)
    lines.append(f"  contraction pairs: {source.description}")
    lines.append("")
    lines.append("solve:")
    x0 = doc.solver.x0 if doc.solver.x0 is not None else xfr.witness
    if x0 is not None:
        result = solver.solve(inst, x0, doc.solver.max_iters, doc.solver.tol)
        lines += [f"  {line}" for line in render_orbit(result, inst)]
        phi = inst.phi if inst.phi is not None else inst.condition.linear_equivalent()
        if phi is not None:
            lines.append(f"  displacement bound d(x_n,x_n+1) <= phi^n(d(x0,x1)): {_verdict_line(solver.check_displacements(result.orbit, phi))}")
    lines.append("")
    lines.append("cross-checks:")
    pool = solver.default_pool(inst)
    checks = [
        ("fX is R^s-directed", is_directed(inst.relation, img, use_symmetric=True, candidate_pool=pool)),
        ("R restricted to fX is complete", is_complete_relation(inst.relation, img)),
        ("N_f <= M_f", check_nf_below_mf(inst)),
        ("M_f(x,fx) <= max(d(x,fx), d(fx,f^2x))", check_mf_step_bound(inst)),
    ]
    if inst.condition.kind is CondKind.PHI_M:
        checks.append(("R and its symmetric closure agree on the contraction", check_closure_agreement(inst, doc.budget)))
    for label, v in checks:
        witness = f" witness {_witness_text(v.witness)}" if v.witness is not None else ""
        lines.append(f"  {label}: {v.kind.value}{witness}")
    return "\n".join(lines) + "\n"


def _witness_text(w) -> str:
    if isinstance(w, tuple):
        return "(" + ", ".join(fmt(p) if isinstance(p, Fraction) else str(p) for p in w) + ")"
    return json.dumps(jsonable(w), sort_keys=True)


def dumps(data) -> str:
    return json.dumps(jsonable(data), indent=2, sort_keys=False, ensure_ascii=False) + "\n"
