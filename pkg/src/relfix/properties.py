"""Seeded random finite instances and the cross-module invariants they must satisfy.

Every property here is a theorem about the definitions, so a violation is a
bug.  Failures are shrunk by greedily deleting relation pairs and leaf points
of the map's functional graph, then reported with the replay command.
"""

from __future__ import annotations

import random
import time
from contextlib import ExitStack
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable
from unittest import mock

from . import contraction, solver
from .checker import check_hypotheses
from .comparison import Linear
from .contraction import CondKind, Condition, ContractionInstance
from .relation import Relation, related, sym_related, symmetric_closure
from .selfmap import SelfMap
from .space import MetricSpace, fmt

THEOREM_CASES = (("T2.1", CondKind.PHI_M, False), ("T2.5", CondKind.PHI_N, True), ("T2.7", CondKind.PHI_N, True))


@dataclass(frozen=True)
class Case:
    """A finite instance in shrinkable form: raw points, optional metric matrix, map table and pairs."""

    points: tuple[Fraction, ...]
    matrix: tuple[tuple[Fraction, ...], ...] | None
    table: tuple[tuple[Fraction, Fraction], ...]
    pairs: tuple[tuple[Fraction, Fraction], ...]
    k: Fraction

    def space(self) -> MetricSpace:
        return MetricSpace.finite(self.points, self.matrix)

    def instance(self, kind: CondKind = CondKind.PHI_M, k: Fraction | None = None) -> ContractionInstance:
        space = self.space()
        return ContractionInstance(
            space, Relation.of_pairs(space, self.pairs), SelfMap.from_table(self.table),
            Condition(kind), Linear(self.k if k is None else k), name="random",
        )

    def describe(self) -> str:
        metric = "usual" if self.matrix is None else "matrix " + str([[fmt(v) for v in row] for row in self.matrix])
        f = ", ".join(f"{fmt(x)}->{fmt(y)}" for x, y in self.table)
        rel = ", ".join(f"({fmt(x)},{fmt(y)})" for x, y in self.pairs)
        return f"X={{{', '.join(fmt(p) for p in self.points)}}} d={metric} f: {f} R={{{rel}}} phi=t -> {fmt(self.k)} t"

    def without_pair(self, i: int) -> Case:
        return replace(self, pairs=self.pairs[:i] + self.pairs[i + 1:])

    def without_point(self, p: Fraction) -> Case | None:
        """Drop ``p`` when no other point maps onto it; the remaining map is still a self-map."""
        if len(self.points) < 2 or any(y == p for x, y in self.table if x != p):
            return None
        keep = [i for i, q in enumerate(self.points) if q != p]
        matrix = None if self.matrix is None else tuple(tuple(self.matrix[i][j] for j in keep) for i in keep)
        return replace(
            self,
            points=tuple(self.points[i] for i in keep),
            matrix=matrix,
            table=tuple((x, y) for x, y in self.table if x != p),
            pairs=tuple((x, y) for x, y in self.pairs if p not in (x, y)),
        )


def _shortest_paths(n: int, rng: random.Random) -> tuple[tuple[Fraction, ...], ...]:
    w = [[Fraction(0) if i == j else None for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = Fraction(rng.randint(1, 8), rng.choice((1, 2)))
    for m in range(n):
        for i in range(n):
            for j in range(n):
                if w[i][m] + w[m][j] < w[i][j]:
                    w[i][j] = w[i][m] + w[m][j]
    return tuple(tuple(row) for row in w)


def _close_under(pairs: set, f: dict) -> set:
    todo = list(pairs)
    while todo:
        x, y = todo.pop()
        img = (f[x], f[y])
        if img not in pairs:
            pairs.add(img)
            todo.append(img)
    return pairs


def random_case(rng: random.Random) -> Case:
    n = rng.randint(1, 6)
    points = tuple(sorted(Fraction(v, rng.choice((1, 2))) for v in rng.sample(range(-8, 9), n)))
    points = tuple(sorted(set(points)))
    n = len(points)
    matrix = _shortest_paths(n, rng) if rng.random() < 0.5 else None
    f = {x: rng.choice(points) for x in points}
    if rng.random() < 0.3:
        # collapse toward one point so that contractions (and fixed points) turn up often
        target = rng.choice(points)
        f = {x: target if rng.random() < 0.6 else y for x, y in f.items()}
    pairs = {(rng.choice(points), rng.choice(points)) for _ in range(rng.randint(0, 2 * n))}
    if rng.random() < 0.7:
        pairs = _close_under(pairs, f)
    case = Case(points, matrix, tuple(sorted(f.items())), tuple(sorted(pairs)), Fraction(1, 2))
    k_star, _, _ = contraction.infer_constant(case.instance(), CondKind.PHI_M)
    k = max(k_star, Fraction(1, 2)) if k_star < 1 else Fraction(rng.randint(0, 9), 10)
    return replace(case, k=k)


# Each property returns None on success, else a witness describing the violation.

def _independent_sides(case: Case, x, y):
    idx = {p: i for i, p in enumerate(case.points)}
    f = dict(case.table)

    def d(a, b):
        return abs(a - b) if case.matrix is None else case.matrix[idx[a]][idx[b]]

    a, b, c, e, g = d(x, y), d(x, f[x]), d(y, f[y]), d(x, f[y]), d(y, f[x])
    return max(a, b, c, (e + g) / 2), max(a, (b + c) / 2, (e + g) / 2)


def prop_mf_nf_formulas(case: Case):
    inst = case.instance()
    for x in case.points:
        for y in case.points:
            m, n = _independent_sides(case, x, y)
            if contraction.m_f(inst, x, y) != m or contraction.n_f(inst, x, y) != n:
                return {"pair": (x, y), "m_f": contraction.m_f(inst, x, y), "expected_m_f": m,
                        "n_f": contraction.n_f(inst, x, y), "expected_n_f": n}
    return None


def prop_nf_below_mf(case: Case):
    v = contraction.check_nf_below_mf(case.instance())
    return v.witness if v.failed else None


def prop_displacement_bound(case: Case):
    v = contraction.check_mf_step_bound(case.instance())
    return v.witness if v.failed else None


def prop_symmetric_membership(case: Case):
    inst = case.instance()
    closure = symmetric_closure(inst.relation)
    for x in case.points:
        for y in case.points:
            if sym_related(inst.relation, x, y) != related(closure, x, y):
                return {"pair": (x, y)}
    return None


def prop_closure_agreement(case: Case):
    v = contraction.check_closure_agreement(case.instance())
    return v.witness if v.failed else None


def prop_condition_ordering(case: Case):
    inst = case.instance()
    k = case.k
    banach = contraction.check_contraction(inst.with_condition(Condition(CondKind.BANACH, (k,))))
    ciric = contraction.check_contraction(inst.with_condition(Condition(CondKind.CIRIC, (k,))))
    phim = contraction.check_contraction(inst.with_condition(Condition(CondKind.PHI_M), Linear(k)))
    if banach.passed and not ciric.passed:
        return {"k": k, "banach": banach.kind.value, "ciric": ciric.kind.value, "ciric_witness": ciric.witness}
    if ciric.passed and not phim.passed:
        return {"k": k, "ciric": ciric.kind.value, "phi_m": phim.kind.value, "phi_m_witness": phim.witness}
    return None


def prop_soundness(case: Case):
    for theorem, kind, unique in THEOREM_CASES:
        inst = case.instance(kind)
        report = check_hypotheses(inst, theorem, validate=False)
        if not report.overall.passed:
            continue
        fixed = solver.fixed_points(inst)
        if fixed is None or (unique and not solver.is_singleton(fixed)):
            return {"theorem": theorem, "fixed_points": solver.describe(fixed)}
    return None


PROPERTIES: dict[str, Callable[[Case], object]] = {
    "M_f and N_f match an independent evaluation": prop_mf_nf_formulas,
    "N_f <= M_f": prop_nf_below_mf,
    "M_f(x,fx) <= max(d(x,fx), d(fx,f^2x))": prop_displacement_bound,
    "symmetric relatedness equals membership in the closure": prop_symmetric_membership,
    "M_f condition agrees over R and its symmetric closure": prop_closure_agreement,
    "Banach(k) => Ciric(k) => PhiM(t -> k t)": prop_condition_ordering,
    "passing T2.1/T2.5/T2.7 bundles have the promised fixed points": prop_soundness,
}


def shrink(case: Case, prop: Callable[[Case], object]) -> tuple[Case, object]:
    """Greedy: keep any single deletion that still violates ``prop``."""
    witness = prop(case)
    changed = True
    while changed:
        changed = False
        smaller = [case.without_pair(i) for i in range(len(case.pairs))]
        smaller += [c for c in (case.without_point(p) for p in case.points) if c is not None]
        for cand in smaller:
            try:
                w = prop(cand)
            except ValueError:
                continue
            if w is not None:
                case, witness, changed = cand, w, True
                break
    return case, witness


@dataclass
class Failure:
    prop: str
    index: int
    case: Case
    witness: object


@dataclass
class SuiteResult:
    seed: int
    cases: int
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def render(self, timing: bool = False) -> str:
        lines = [f"property suite: seed {self.seed}, {self.cases} random finite instances"]
        width = max(len(name) for name in PROPERTIES)
        for name in PROPERTIES:
            bad = sum(1 for f in self.failures if f.prop == name)
            lines.append(f"  {name:<{width}}  {'ok' if not bad else 'VIOLATED'}  ({self.checks.get(name, 0)} cases)")
        for f in self.failures:
            lines.append("")
            lines.append(f"violation of {f.prop!r} at case {f.index}")
            lines.append(f"  shrunk instance: {f.case.describe()}")
            lines.append(f"  witness: {_show(f.witness)}")
            lines.append(f"  replay: relfix properties --seed {self.seed} --cases {f.index + 1}")
        if timing:
            lines.append(f"elapsed {self.elapsed:.2f} s")
        lines.append("result: " + ("all properties hold" if self.ok else f"{len(self.failures)} violation(s)"))
        return "\n".join(lines) + "\n"


def _show(w) -> str:
    if isinstance(w, Fraction):
        return fmt(w)
    if isinstance(w, tuple):
        return "(" + ", ".join(_show(v) for v in w) + ")"
    if isinstance(w, dict):
        return "{" + ", ".join(f"{k}: {_show(v)}" for k, v in w.items()) + "}"
    return str(w)


def _nf_missing_term(inst, x, y):
    dxy, dxfx, dyfy, _, _ = contraction._terms(inst, x, y)
    return max(dxy, (dxfx + dyfy) / 2)


MUTANTS = {"nf-missing-term": ("relfix.contraction.n_f", _nf_missing_term)}


def run_suite(seed: int = 0, cases: int = 500, mutant: str | None = None) -> SuiteResult:
    """Generate ``cases`` instances from ``seed`` and check every property on each.

    ``mutant`` swaps in a deliberately broken implementation to show the suite catches it.
    """
    rng = random.Random(seed)
    result = SuiteResult(seed, cases)
    start = time.perf_counter()
    with ExitStack() as stack:
        if mutant is not None:
            target, impl = MUTANTS[mutant]
            stack.enter_context(mock.patch(target, impl))
        for i in range(cases):
            case = random_case(rng)
            for name, prop in PROPERTIES.items():
                if any(f.prop == name for f in result.failures):
                    continue
                result.checks[name] = result.checks.get(name, 0) + 1
                if prop(case) is not None:
                    small, witness = shrink(case, prop)
                    result.failures.append(Failure(name, i, small, witness))
    result.elapsed = time.perf_counter() - start
    return result
