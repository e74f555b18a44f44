"""The M_f / N_f functionals and every contraction condition the checker knows about.

Pairs come from the relation itself when it is a finite list, from the whole
carrier when the carrier is finite, and otherwise from a deterministic grid
enriched with probes around every breakpoint of the map.  Sampled violations
are confirmed in exact arithmetic before they are reported.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .comparison import Linear
from .relation import Relation, RelKind, symmetric_closure
from .selfmap import SelfMap
from .space import IntervalUnion, MetricSpace, exact, finite_point, fmt
from .verdict import EPS, EPS_CMP, Kind, Verdict, fails, holds, sampled, unknown

DEFAULT_BUDGET = 10_000
_EPS_EXACT = Fraction(1, 10**9)
_EPS_CMP_EXACT = Fraction(1, 10**12)
# exact re-checks attempted per sampled check before giving up on float violations
_CONFIRM_LIMIT = 25


class CondKind(enum.Enum):
    PHI_M = "PhiM"
    PHI_N = "PhiN"
    LAMBDA_N = "LambdaN"
    BANACH = "LinearBanach"
    CIRIC = "LinearCiric"
    ABC = "RationalABC"
    KANNAN = "Kannan"
    CHATTERJEA = "Chatterjea"


_PHI_KINDS = (CondKind.PHI_M, CondKind.PHI_N, CondKind.LAMBDA_N)


@dataclass(frozen=True)
class Condition:
    kind: CondKind
    params: tuple = ()

    def __post_init__(self):
        params = tuple(finite_point(p) for p in self.params)
        kind = self.kind
        if kind in _PHI_KINDS:
            if params:
                raise ValueError(f"{kind.value} takes no constants; it uses the comparison function")
        elif kind is CondKind.ABC:
            if len(params) != 3:
                raise ValueError("RationalABC needs three constants a, b, c")
            a, b, c = params
            if min(a, b, c) < 0 or a + 2 * b + 2 * c >= 1:
                raise ValueError("RationalABC needs a, b, c >= 0 with a + 2b + 2c < 1")
        else:
            if len(params) != 1:
                raise ValueError(f"{kind.value} needs one constant k")
            (k,) = params
            upper = Fraction(1, 2) if kind in (CondKind.KANNAN, CondKind.CHATTERJEA) else Fraction(1)
            if not 0 <= k < upper:
                raise ValueError(f"k must lie in [0,{fmt(upper)})")
        object.__setattr__(self, "params", params)

    @classmethod
    def parse(cls, tag: str, params=()) -> Condition:
        return cls(CondKind(tag), tuple(exact(p) for p in params))

    @property
    def needs_phi(self) -> bool:
        return self.kind in _PHI_KINDS

    @property
    def k(self) -> Fraction:
        return self.params[0]

    def linear_equivalent(self) -> Linear | None:
        """A linear comparison function this condition implies for the N_f form, if any."""
        kind = self.kind
        if kind in (CondKind.BANACH, CondKind.CIRIC):
            return Linear(self.k)
        if kind in (CondKind.KANNAN, CondKind.CHATTERJEA):
            return Linear(2 * self.k)
        if kind is CondKind.ABC:
            a, b, c = self.params
            return Linear(a + 2 * b + 2 * c)
        return None

    def __str__(self):
        if not self.params:
            return self.kind.value
        return f"{self.kind.value}({', '.join(fmt(p) for p in self.params)})"


@dataclass(frozen=True)
class ContractionInstance:
    space: MetricSpace
    relation: Relation
    f: SelfMap
    condition: Condition
    phi: object = None
    subspace: MetricSpace | None = None
    name: str = ""

    def __post_init__(self):
        if self.relation.carrier != self.space:
            raise ValueError("the relation must live on the instance's space")
        self.f.check_partition(self.space)
        if self.condition.needs_phi != (self.phi is not None):
            raise ValueError(f"{self.condition.kind.value} {'needs' if self.condition.needs_phi else 'takes no'} comparison function")
        y = self.subspace if self.subspace is not None else self.space
        if not y.carrier.issubset(self.space.carrier):
            raise ValueError(f"Y = {y.carrier} is not a subset of X = {self.space.carrier}")
        img = self.f.image(self.space)
        if not img.issubset(y.carrier):
            raise ValueError(f"fX = {img} is not a subset of Y = {y.carrier}")
        object.__setattr__(self, "subspace", y)

    @property
    def y(self) -> MetricSpace:
        return self.subspace

    def image(self):
        return self.f.image(self.space)

    def d(self, x, y):
        return self.space.distance(x, y)

    def with_condition(self, condition: Condition, phi=None) -> ContractionInstance:
        return replace(self, condition=condition, phi=phi)

    def with_relation(self, relation: Relation) -> ContractionInstance:
        return replace(self, relation=relation)

    def with_subspace(self, subspace: MetricSpace) -> ContractionInstance:
        return replace(self, subspace=subspace)


def _terms(inst: ContractionInstance, x, y):
    d, f = inst.d, inst.f
    fx, fy = f(x), f(y)
    return d(x, y), d(x, fx), d(y, fy), d(x, fy), d(y, fx)


def m_f(inst: ContractionInstance, x, y):
    dxy, dxfx, dyfy, dxfy, dyfx = _terms(inst, x, y)
    return max(dxy, dxfx, dyfy, (dxfy + dyfx) / 2)


def n_f(inst: ContractionInstance, x, y):
    dxy, dxfx, dyfy, dxfy, dyfx = _terms(inst, x, y)
    return max(dxy, (dxfx + dyfy) / 2, (dxfy + dyfx) / 2)


def sides(inst: ContractionInstance, x, y, condition: Condition | None = None, phi=None):
    """Exact ``(d(fx, fy), bound)`` for the condition (the instance's own by default)."""
    cond = condition or inst.condition
    phi = phi if phi is not None else inst.phi
    dxy, dxfx, dyfy, dxfy, dyfx = _terms(inst, x, y)
    lhs = inst.d(inst.f(x), inst.f(y))
    kind = cond.kind
    if kind is CondKind.PHI_M:
        rhs = phi(max(dxy, dxfx, dyfy, (dxfy + dyfx) / 2))
    elif kind in (CondKind.PHI_N, CondKind.LAMBDA_N):
        rhs = phi(max(dxy, (dxfx + dyfy) / 2, (dxfy + dyfx) / 2))
    elif kind is CondKind.BANACH:
        rhs = cond.k * dxy
    elif kind is CondKind.CIRIC:
        rhs = cond.k * max(dxy, (dxfx + dyfy) / 2, (dxfy + dyfx) / 2)
    elif kind is CondKind.ABC:
        a, b, c = cond.params
        rhs = a * dxy + b * (dxfx + dyfy) + c * (dxfy + dyfx)
    elif kind is CondKind.KANNAN:
        rhs = cond.k * (dxfx + dyfy)
    else:
        rhs = cond.k * (dxfy + dyfx)
    return lhs, rhs


def _sides_array(inst, xs, ys, cond: Condition, phi):
    f = inst.f
    fx, fy = f.apply_array(xs), f.apply_array(ys)
    dxy, dxfx, dyfy = np.abs(xs - ys), np.abs(xs - fx), np.abs(ys - fy)
    dxfy, dyfx = np.abs(xs - fy), np.abs(ys - fx)
    lhs = np.abs(fx - fy)
    kind = cond.kind
    if kind is CondKind.PHI_M:
        rhs = phi.array(np.maximum.reduce([dxy, dxfx, dyfy, (dxfy + dyfx) / 2]))
    elif kind in (CondKind.PHI_N, CondKind.LAMBDA_N):
        rhs = phi.array(np.maximum.reduce([dxy, (dxfx + dyfy) / 2, (dxfy + dyfx) / 2]))
    elif kind is CondKind.BANACH:
        rhs = float(cond.k) * dxy
    elif kind is CondKind.CIRIC:
        rhs = float(cond.k) * np.maximum.reduce([dxy, (dxfx + dyfy) / 2, (dxfy + dyfx) / 2])
    elif kind is CondKind.ABC:
        a, b, c = (float(p) for p in cond.params)
        rhs = a * dxy + b * (dxfx + dyfy) + c * (dxfy + dyfx)
    elif kind is CondKind.KANNAN:
        rhs = float(cond.k) * (dxfx + dyfy)
    else:
        rhs = float(cond.k) * (dxfy + dyfx)
    return lhs, rhs


def _window(union: IntervalUnion, f: SelfMap) -> tuple[Fraction, Fraction]:
    finite = [e for c in union.components for e in (c.lo, c.hi) if not math.isinf(e)]
    finite += list(f.breakpoints())
    scale = max([Fraction(1)] + [abs(e) for e in finite])
    return -10 * scale, 10 * scale


def sample_points(inst: ContractionInstance, budget: int = DEFAULT_BUDGET) -> list[Fraction]:
    """Carrier points for pair checks: everything on a finite carrier, else grid plus breakpoint probes."""
    space = inst.space
    if space.is_finite:
        return list(space.points())
    lo_w, hi_w = _window(space.carrier, inst.f)
    comps = []
    for c in space.carrier.components:
        lo, hi = max(c.lo, lo_w) if math.isinf(c.lo) else c.lo, min(c.hi, hi_w) if math.isinf(c.hi) else c.hi
        comps.append((c, exact(lo), exact(hi)))
    total = sum(hi - lo for _, lo, hi in comps) or Fraction(1)
    per_side = max(4, math.isqrt(max(budget, 1)))
    pts = set()
    for c, lo, hi in comps:
        if c.is_degenerate:
            pts.add(c.lo)
            continue
        m = max(2, round(per_side * (hi - lo) / total))
        step = (hi - lo) / m
        pts.update(lo + step * (2 * i + 1) / 2 for i in range(m))
        for e, closed in ((c.lo, c.lo_closed), (c.hi, c.hi_closed)):
            if closed:
                pts.add(e)
    probes = set(inst.f.breakpoints())
    for c in space.carrier.components:
        probes.update(e for e in (c.lo, c.hi) if not math.isinf(e))
    for b in probes:
        delta = _EPS_EXACT * max(Fraction(1), abs(b))
        pts.update(p for p in (b - delta, b, b + delta) if space.contains(p))
    return sorted(pts)


@dataclass(frozen=True)
class PairSource:
    pairs: tuple
    exhaustive: bool
    description: str


def pair_source(inst: ContractionInstance, relation: Relation | None = None, budget: int = DEFAULT_BUDGET) -> PairSource:
    rel = relation if relation is not None else inst.relation
    if rel.kind is RelKind.PAIRS:
        return PairSource(tuple(rel.sorted_pairs()), True, f"all {len(rel.pairs)} pairs of the relation")
    pts = sample_points(inst, budget)
    pairs = tuple((x, y) for x in pts for y in pts if rel.holds_for(x, y))
    if inst.space.is_finite:
        return PairSource(pairs, True, f"all {len(pairs)} related pairs of the finite carrier")
    return PairSource(pairs, False, f"{len(pairs)} related pairs from {len(pts)} grid and breakpoint points")


def _grade(diff) -> Kind:
    if diff <= _EPS_CMP_EXACT:
        return Kind.HOLDS
    if diff > _EPS_EXACT:
        return Kind.FAILS
    return Kind.UNKNOWN


def _violation(inst, x, y, lhs, rhs, cond) -> dict:
    return {"pair": (x, y), "lhs": lhs, "rhs": rhs, "condition": str(cond)}


def check_pairs(inst: ContractionInstance, source: PairSource, condition: Condition | None = None, phi=None) -> Verdict:
    cond = condition or inst.condition
    phi = phi if phi is not None else inst.phi
    if cond.needs_phi and phi is None:
        raise ValueError(f"{cond.kind.value} needs a comparison function")
    label = f"d(fx,fy) <= bound for {cond}"
    if not source.pairs:
        return holds(f"{label}: no related pairs to check")
    if source.exhaustive or len(source.pairs) < 64:
        deadband = None
        for x, y in source.pairs:
            lhs, rhs = sides(inst, x, y, cond, phi)
            g = _grade(lhs - rhs)
            if g is Kind.FAILS:
                return fails(f"{label} violated at ({fmt(x)}, {fmt(y)}): {fmt(lhs)} > {fmt(rhs)}", _violation(inst, x, y, lhs, rhs, cond))
            if g is Kind.UNKNOWN and deadband is None:
                deadband = (x, y, lhs, rhs)
        if deadband is not None:
            x, y, lhs, rhs = deadband
            return unknown(f"{label}: ({fmt(x)}, {fmt(y)}) within rounding tolerance", _violation(inst, x, y, lhs, rhs, cond))
        note = f"{label}: checked {source.description}"
        return holds(note) if source.exhaustive else sampled(note)
    xs = np.array([float(x) for x, _ in source.pairs])
    ys = np.array([float(y) for _, y in source.pairs])
    lhs, rhs = _sides_array(inst, xs, ys, cond, phi)
    excess = lhs - rhs
    suspects = np.argsort(-excess)[:_CONFIRM_LIMIT]
    deadband = None
    for i in suspects:
        if excess[i] <= EPS_CMP:
            break
        x, y = source.pairs[i]
        l, r = sides(inst, x, y, cond, phi)
        g = _grade(l - r)
        if g is Kind.FAILS:
            return fails(f"{label} violated at ({fmt(x)}, {fmt(y)}): {float(l):.12g} > {float(r):.12g}", _violation(inst, x, y, l, r, cond))
        if g is Kind.UNKNOWN and deadband is None:
            deadband = (x, y, l, r)
    if deadband is not None:
        x, y, l, r = deadband
        return unknown(f"{label}: ({fmt(x)}, {fmt(y)}) within rounding tolerance", _violation(inst, x, y, l, r, cond))
    return sampled(f"{label}: checked {source.description}")


def check_contraction(inst: ContractionInstance, pair_budget: int = DEFAULT_BUDGET, relation: Relation | None = None) -> Verdict:
    """The instance's condition over all R-pairs (or a sample of them on interval carriers)."""
    return check_pairs(inst, pair_source(inst, relation, pair_budget))


def check_nf_below_mf(inst: ContractionInstance, pairs=None, budget: int = 400) -> Verdict:
    """``N_f <= M_f`` on the supplied pairs (exhaustive over them), or on all pairs of sample points."""
    exhaustive = inst.space.is_finite or pairs is not None
    if pairs is None:
        pts = sample_points(inst, budget)
        pairs = [(x, y) for x in pts for y in pts]
    count = 0
    for x, y in pairs:
        n, m = n_f(inst, x, y), m_f(inst, x, y)
        if n > m:
            return fails(f"implementation bug: N_f({fmt(x)}, {fmt(y)}) = {fmt(n)} > M_f = {fmt(m)}", (x, y))
        count += 1
    note = f"N_f <= M_f on {count} pairs"
    return holds(note) if exhaustive else sampled(note)


def check_mf_step_bound(inst: ContractionInstance, points=None, budget: int = 400) -> Verdict:
    """``M_f(x, fx) <= max{d(x, fx), d(fx, f^2 x)}`` at every supplied point."""
    exhaustive = inst.space.is_finite or points is not None
    if points is None:
        points = sample_points(inst, budget)
    count = 0
    f, d = inst.f, inst.d
    for x in points:
        fx = f(x)
        lhs = m_f(inst, x, fx)
        rhs = max(d(x, fx), d(fx, f(fx)))
        if lhs > rhs:
            return fails(f"implementation bug: M_f({fmt(x)}, f{fmt(x)}) = {fmt(lhs)} > {fmt(rhs)}", x)
        count += 1
    note = f"M_f(x, fx) <= max(d(x, fx), d(fx, f^2 x)) at {count} points"
    return holds(note) if exhaustive else sampled(note)


def check_closure_agreement(inst: ContractionInstance, pair_budget: int = DEFAULT_BUDGET) -> Verdict:
    """The M_f condition over R agrees with the same condition over the symmetric closure of R."""
    if inst.condition.kind is not CondKind.PHI_M:
        raise ValueError("the symmetric-closure agreement check applies to the PhiM condition")
    on_r = check_contraction(inst, pair_budget)
    on_s = check_contraction(inst, pair_budget, symmetric_closure(inst.relation))
    if on_r.passed == on_s.passed and on_r.failed == on_s.failed:
        both = "pass" if on_r.passed else ("fail" if on_r.failed else "are inconclusive")
        note = f"R and its symmetric closure agree: both {both}"
        if Kind.HOLDS_SAMPLED in (on_r.kind, on_s.kind):
            return sampled(note)
        return holds(note) if on_r.kind is on_s.kind else unknown(note)
    return fails(f"disagreement: over R {on_r.kind.value}, over the closure {on_s.kind.value}", (on_r, on_s))


def _base(inst, x, y, kind: CondKind):
    dxy, dxfx, dyfy, dxfy, dyfx = _terms(inst, x, y)
    if kind is CondKind.BANACH:
        return dxy
    if kind in (CondKind.CIRIC, CondKind.ABC):
        return max(dxy, (dxfx + dyfy) / 2, (dxfy + dyfx) / 2)
    if kind is CondKind.KANNAN:
        return dxfx + dyfy
    if kind is CondKind.CHATTERJEA:
        return dxfy + dyfx
    return max(dxy, dxfx, dyfy, (dxfy + dyfx) / 2)


def infer_constant(inst: ContractionInstance, kind: CondKind, pair_budget: int = DEFAULT_BUDGET):
    """Least ``k`` with ``d(fx, fy) <= k * base(x, y)`` over the checked pairs, and the pair attaining it.

    ``base`` is d for Banach, N_f for Ciric (and the ABC reduction), the sum of
    displacements for Kannan, the cross sum for Chatterjea and M_f otherwise.
    Returns ``(k, pair, exhaustive)``; ``k`` is ``inf`` when some pair has a zero
    base but moves apart.
    """
    source = pair_source(inst, budget=pair_budget)
    best, arg = Fraction(0), None
    for x, y in source.pairs:
        lhs = inst.d(inst.f(x), inst.f(y))
        if lhs == 0:
            continue
        base = _base(inst, x, y, kind)
        ratio = math.inf if base == 0 else lhs / base
        if arg is None or ratio > best:
            best, arg = ratio, (x, y)
    return best, arg, source.exhaustive
