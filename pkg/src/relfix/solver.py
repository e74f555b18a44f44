"""Picard iteration, exact fixed-point sets, admissible starting points and the two uniqueness procedures.

Empty point sets are represented by ``None`` throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .comparison import Linear, iterate
from .contraction import ContractionInstance, check_contraction
from .relation import Relation, RelKind, find_bridge, is_complete_relation, sym_related
from .space import Component, FiniteSet, IntervalUnion, exact, fmt
from .verdict import Verdict, fails, holds, unknown

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 100_000
CYCLE_WINDOW = 1_000
# past this denominator size iterates are rounded to a nearby rational to keep arithmetic cheap
_MAX_DENOMINATOR = 10**30
_ROUND_TO = 10**24


def describe(points) -> str:
    return "∅" if points is None else str(points)


def _half_line_piece(c: Component, bound: Fraction, upper: bool) -> Component | None:
    """``c ∩ (-inf, bound]`` when ``upper`` else ``c ∩ [bound, inf)``."""
    if upper:
        if bound < c.lo or (bound == c.lo and not c.lo_closed):
            return None
        if bound > c.hi or (bound == c.hi and c.hi_closed):
            return c
        return Component(c.lo, bound, c.lo_closed, True)
    if bound > c.hi or (bound == c.hi and not c.hi_closed):
        return None
    if bound < c.lo or (bound == c.lo and c.lo_closed):
        return c
    return Component(bound, c.hi, True, c.hi_closed)


def _union(components: list[Component]):
    return IntervalUnion(tuple(components)) if components else None


@dataclass(frozen=True)
class Admissible:
    """``X(f, R)`` and its distinguished starting point."""

    points: object
    witness: Fraction | None

    @property
    def empty(self) -> bool:
        return self.points is None


def _least(points) -> Fraction | None:
    if points is None:
        return None
    return points.sample_point()


def compute_x_f_r(inst: ContractionInstance, relation: Relation | None = None) -> Admissible:
    """Points ``x`` with ``(x, fx)`` in R."""
    rel = relation if relation is not None else inst.relation
    f, space = inst.f, inst.space
    if space.is_finite or rel.kind is RelKind.PAIRS:
        pool = space.points() if space.is_finite else rel.support()
        pts = [x for x in pool if rel.holds_for(x, f(x))]
        s = FiniteSet(tuple(pts)) if pts else None
        return Admissible(s, _least(s))
    if rel.kind is RelKind.UNIVERSAL:
        return Admissible(space.carrier, space.carrier.sample_point())
    comps = []
    for p in f.pieces:
        # x >= a x + b  <=>  (1 - a) x >= b ; the LEQ case flips the inequality
        a, b = p.slope, p.intercept
        ge = rel.kind is RelKind.GEQ
        if a == 1:
            ok = (0 >= b) if ge else (0 <= b)
            if ok:
                comps.append(p.domain)
            continue
        root = b / (1 - a)
        upper = (a > 1) == ge
        piece = _half_line_piece(p.domain, root, upper)
        if piece is not None:
            comps.append(piece)
    s = _union(comps)
    return Admissible(s, _least(s))


def fixed_points(inst: ContractionInstance):
    f, space = inst.f, inst.space
    if space.is_finite:
        pts = [x for x in space.points() if f(x) == x]
        return FiniteSet(tuple(pts)) if pts else None
    comps = []
    for p in f.pieces:
        a, b = p.slope, p.intercept
        if a == 1:
            if b == 0:
                comps.append(p.domain)
            continue
        x = b / (1 - a)
        if p.domain.contains(x):
            comps.append(Component.point(x))
    s = _union(comps)
    if s is not None and s.is_finite:
        return FiniteSet(s.points())
    return s


class Status(enum.Enum):
    CONVERGED = "converged"
    CYCLED = "cycled"
    EXHAUSTED = "budget exhausted"
    ESCAPED = "escaped"


@dataclass(frozen=True)
class Orbit:
    points: tuple
    displacements: tuple
    status: Status
    limit: Fraction | None = None
    iterations: int | None = None
    period: int | None = None
    rounded_from: int | None = None
    limit_in_space: bool = True

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def summary(self) -> str:
        if self.status is Status.CONVERGED:
            where = "" if self.limit_in_space else " (outside the space)"
            return f"converged to {fmt(self.limit)}{where} after {self.iterations} iterations"
        if self.status is Status.CYCLED:
            return f"cycle of period {self.period}"
        return self.status.value


def _snap(inst: ContractionInstance, x: Fraction, tol: float) -> Fraction:
    candidates = set(inst.f.breakpoints()) | set(inst.space.carrier.breakpoints())
    fp = fixed_points(inst)
    if isinstance(fp, FiniteSet):
        candidates.update(fp.points())
    near = [c for c in candidates if abs(c - x) <= 10 * tol]
    return min(near, key=lambda c: abs(c - x)) if near else x


def picard(inst: ContractionInstance, x0, max_iters: int = DEFAULT_MAX_ITERS, tol: float = DEFAULT_TOL) -> Orbit:
    """``x_{n+1} = f(x_n)`` until the displacement drops below ``tol``.

    ``iterations`` is the index of the first point whose image is within ``tol``,
    so a fixed start converges after 0 iterations.  ``points`` also stores that image.
    """
    x = exact(x0)
    if not inst.space.contains(x):
        raise ValueError(f"start {fmt(x)} is outside the carrier")
    if tol <= 0:
        raise ValueError("tol must be positive")
    f, d = inst.f, inst.space.distance
    points, disps = [x], []
    seen: dict = {x: 0}
    rounded_from = None
    for n in range(max_iters):
        try:
            fx = f(x)
        except ValueError:
            return Orbit(tuple(points), tuple(disps), Status.ESCAPED, rounded_from=rounded_from)
        if not inst.space.contains(fx):
            points.append(fx)
            return Orbit(tuple(points), tuple(disps), Status.ESCAPED, rounded_from=rounded_from)
        step = d(x, fx)
        points.append(fx)
        disps.append(step)
        if step < tol:
            limit = fx if step == 0 else _snap(inst, fx, tol)
            return Orbit(
                tuple(points), tuple(disps), Status.CONVERGED, limit, n,
                rounded_from=rounded_from, limit_in_space=inst.y.contains(limit) or inst.space.contains(limit),
            )
        if fx in seen:
            return Orbit(tuple(points), tuple(disps), Status.CYCLED, period=n + 1 - seen[fx], rounded_from=rounded_from)
        seen[fx] = n + 1
        if len(seen) > CYCLE_WINDOW:
            seen.pop(next(iter(seen)))
        if fx.denominator > _MAX_DENOMINATOR:
            fx = fx.limit_denominator(_ROUND_TO)
            if rounded_from is None:
                rounded_from = n + 1
            points[-1] = fx
        x = fx
    return Orbit(tuple(points), tuple(disps), Status.EXHAUSTED, rounded_from=rounded_from)


def error_bound(phi, d0, n: int, tail_terms: int = 10_000):
    """``sum_{k >= n} phi^k(d0)``: closed form for linear phi, else a truncated float sum.

    The truncated sum is a lower estimate of the tail; ``tail_is_exact`` says which case applies.
    """
    d0 = exact(d0)
    if d0 < 0:
        raise ValueError("d0 must be nonnegative")
    if d0 == 0:
        return Fraction(0)
    if isinstance(phi, Linear):
        return phi.k**n * d0 / (1 - phi.k)
    t = float(iterate(phi, n, d0))
    total = 0.0
    for _ in range(tail_terms):
        total += t
        if t == 0:
            break
        t = float(phi(t))
    return total


def tail_is_exact(phi) -> bool:
    return isinstance(phi, Linear)


def check_displacements(orbit: Orbit, phi, slack: float = 1e-9) -> Verdict:
    """``d(x_n, x_{n+1}) <= phi^n(d(x_0, x_1)) + slack`` for every recorded step."""
    if not orbit.displacements:
        return holds("no steps recorded")
    d0 = orbit.displacements[0]
    bound = d0
    for n, step in enumerate(orbit.displacements):
        if step > bound + Fraction(slack):
            return fails(f"step {n}: d = {float(step):.6g} > phi^{n}(d0) = {float(bound):.6g}", {"n": n, "step": step, "bound": bound})
        bound = phi(bound)
    return holds(f"{len(orbit.displacements)} steps within the iterated bound")


@dataclass(frozen=True)
class SolveResult:
    fixed_point: Fraction | None
    orbit: Orbit
    error_bound: object = None
    start: Fraction | None = None


def solve(inst: ContractionInstance, x0=None, max_iters: int = DEFAULT_MAX_ITERS, tol: float = DEFAULT_TOL) -> SolveResult:
    if x0 is None:
        x0 = compute_x_f_r(inst).witness
        if x0 is None:
            raise ValueError("X(f,R) is empty and no start point was given")
    x0 = exact(x0)
    orbit = picard(inst, x0, max_iters, tol)
    fp = orbit.limit if orbit.converged and inst.f(orbit.limit) == orbit.limit else None
    bound = None
    phi = inst.phi if inst.phi is not None else inst.condition.linear_equivalent()
    if phi is not None and orbit.displacements and orbit.converged:
        bound = error_bound(phi, orbit.displacements[0], orbit.iterations)
    return SolveResult(fp, orbit, bound, x0)


class Mode(enum.Enum):
    DIRECTEDNESS = "directedness"
    COMPLETE_RESTRICTION = "complete restriction"


@dataclass(frozen=True)
class UniquenessEvidence:
    mode: Mode
    verdict: Verdict
    bridge_point: Fraction | None = None
    bridge_orbits: tuple | None = None


def _require_fixed(inst: ContractionInstance, *points) -> None:
    for p in points:
        if not inst.space.contains(p) or inst.f(p) != p:
            raise ValueError(f"{fmt(p)} is not a fixed point")


def default_pool(inst: ContractionInstance) -> list:
    pool = set(inst.relation.support() or ())
    fp = fixed_points(inst)
    if isinstance(fp, FiniteSet):
        pool.update(fp.points())
    pool.update(b for b in inst.f.breakpoints() if inst.space.contains(b))
    return sorted(pool)


def uniqueness_via_directedness(inst: ContractionInstance, p, q, candidate_pool=None,
                                max_iters: int = DEFAULT_MAX_ITERS, tol: float = DEFAULT_TOL) -> UniquenessEvidence:
    p, q = exact(p), exact(q)
    _require_fixed(inst, p, q)
    if p == q:
        return UniquenessEvidence(Mode.DIRECTEDNESS, holds(f"p = q = {fmt(p)}"), p)
    pool = default_pool(inst) if candidate_pool is None else list(candidate_pool)
    z = find_bridge(inst.relation, p, q, pool, use_symmetric=True)
    if z is None:
        return UniquenessEvidence(
            Mode.DIRECTEDNESS,
            unknown(f"no z with [{fmt(p)}, z] and [{fmt(q)}, z] in R among {len(pool)} candidates", (p, q)),
        )
    orbit = picard(inst, z, max_iters, tol)
    last = orbit.points[-1]
    dp, dq = inst.space.distance(p, last), inst.space.distance(q, last)
    if dp < tol and dq < tol:
        verdict = holds(f"orbit of z = {fmt(z)} approaches both {fmt(p)} and {fmt(q)}")
    else:
        verdict = fails(
            f"z = {fmt(z)} bridges {fmt(p)} and {fmt(q)} but its orbit ends at {fmt(last)} "
            f"(d to p = {float(dp):.3g}, d to q = {float(dq):.3g})",
            {"z": z, "orbit": orbit},
        )
    return UniquenessEvidence(Mode.DIRECTEDNESS, verdict, z, (orbit, orbit))


def uniqueness_via_complete_restriction(inst: ContractionInstance, p, q, contraction: Verdict | None = None) -> UniquenessEvidence:
    p, q = exact(p), exact(q)
    _require_fixed(inst, p, q)
    img = inst.image()
    complete = is_complete_relation(inst.relation, img)
    if p == q:
        return UniquenessEvidence(Mode.COMPLETE_RESTRICTION, holds(f"p = q = {fmt(p)}"))
    if not complete.passed:
        return UniquenessEvidence(
            Mode.COMPLETE_RESTRICTION,
            holds(f"R restricted to fX is not complete ({complete.note}); no uniqueness claim"),
        )
    contraction = contraction if contraction is not None else check_contraction(inst)
    if contraction.passed and sym_related(inst.relation, p, q):
        return UniquenessEvidence(
            Mode.COMPLETE_RESTRICTION,
            fails(f"inconsistent instance: [{fmt(p)}, {fmt(q)}] in R, the contraction passed, yet both are fixed", (p, q)),
        )
    return UniquenessEvidence(Mode.COMPLETE_RESTRICTION, holds("contraction does not pass; no uniqueness claim"))


def all_fixed_pairs(points) -> list:
    if points is None or not points.is_finite:
        return []
    pts = points.points()
    return [(a, b) for i, a in enumerate(pts) for b in pts[i + 1:]]


def is_singleton(points) -> bool:
    return points is not None and points.is_finite and len(points.points()) == 1


def size(points) -> float:
    if points is None:
        return 0
    return len(points.points()) if points.is_finite else math.inf
