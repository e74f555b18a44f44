"""Metric spaces over finite real point sets and unions of real intervals.

Carriers are either a :class:`FiniteSet` of exact rationals or an
:class:`IntervalUnion` whose components track endpoint openness.  All stored
values are :class:`fractions.Fraction` (or ``±inf`` for unbounded ends), so
membership never depends on floating point.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

from .verdict import Verdict, fails, holds

Real = Union[Fraction, float]
INF = math.inf


def exact(value) -> Real:
    """Convert a literal (int, str, float, Fraction) to an exact value; only ``±inf`` stays a float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if math.isnan(value):
            raise ValueError("NaN is not a point")
        return value if math.isinf(value) else Fraction(value)
    if isinstance(value, str):
        text = value.strip().lower().replace(" ", "")
        if text in ("inf", "+inf", "infinity", "+infinity", "oo", "+oo"):
            return INF
        if text in ("-inf", "-infinity", "-oo"):
            return -INF
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not an exact number: {value!r}") from None
    raise TypeError(f"not a number: {value!r}")


def finite_point(value) -> Fraction:
    x = exact(value)
    if isinstance(x, float):
        raise ValueError(f"points must be finite, got {value!r}")
    return x


def fmt(x: Real) -> str:
    """Short exact rendering: integers plainly, other rationals as p/q."""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Component:
    lo: Real
    hi: Real
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", exact(self.lo))
        object.__setattr__(self, "hi", exact(self.hi))
        if self.lo == INF or self.hi == -INF:
            raise ValueError(f"bad interval {self}")
        if (math.isinf(self.lo) and self.lo_closed) or (math.isinf(self.hi) and self.hi_closed):
            raise ValueError(f"infinite endpoints must be open: {self}")
        if self.lo > self.hi:
            raise ValueError(f"empty interval {self}")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValueError(f"empty interval {self}")

    @classmethod
    def point(cls, x) -> Component:
        return cls(x, x, True, True)

    @classmethod
    def parse(cls, text: str) -> Component:
        m = _INTERVAL_RE.fullmatch(text.strip())
        if not m:
            raise ValueError(f"malformed interval {text!r}; expected e.g. '[-1/2, 2)'")
        left, lo, hi, right = m.groups()
        return cls(exact(lo), exact(hi), left == "[", right == "]")

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if self.lo_closed:
            if x < self.lo:
                return False
        elif x <= self.lo:
            return False
        if self.hi_closed:
            return x <= self.hi
        return x < self.hi

    def within(self, other: Component) -> bool:
        lo_ok = other.lo < self.lo or (other.lo == self.lo and (other.lo_closed or not self.lo_closed))
        hi_ok = self.hi < other.hi or (self.hi == other.hi and (other.hi_closed or not self.hi_closed))
        return lo_ok and hi_ok

    def interior_point(self) -> Fraction:
        if self.is_degenerate:
            return self.lo
        if math.isinf(self.lo) and math.isinf(self.hi):
            return Fraction(0)
        if math.isinf(self.lo):
            return self.hi - 1
        if math.isinf(self.hi):
            return self.lo + 1
        return (self.lo + self.hi) / 2

    def least(self) -> Fraction | None:
        return self.lo if self.lo_closed else None

    def __str__(self):
        if self.is_degenerate:
            return "{" + fmt(self.lo) + "}"
        return f"{'[' if self.lo_closed else '('}{fmt(self.lo)}, {fmt(self.hi)}{']' if self.hi_closed else ')'}"


_NUM = r"\s*([+-]?(?:inf|infinity|oo|[0-9.eE+\-/]+))\s*"
_INTERVAL_RE = re.compile(r"([\[(])" + _NUM + "," + _NUM + r"([\])])", re.IGNORECASE)


def _normalize(components: Iterable[Component]) -> tuple[Component, ...]:
    comps = sorted(components, key=lambda c: (c.lo, not c.lo_closed))
    merged: list[Component] = []
    for c in comps:
        if merged:
            last = merged[-1]
            touches = c.lo < last.hi or (c.lo == last.hi and (last.hi_closed or c.lo_closed))
            if touches:
                if c.hi > last.hi:
                    hi, hi_closed = c.hi, c.hi_closed
                elif c.hi == last.hi:
                    hi, hi_closed = last.hi, last.hi_closed or c.hi_closed
                else:
                    hi, hi_closed = last.hi, last.hi_closed
                lo_closed = last.lo_closed or (c.lo == last.lo and c.lo_closed)
                merged[-1] = Component(last.lo, hi, lo_closed, hi_closed)
                continue
        merged.append(c)
    return tuple(merged)


@dataclass(frozen=True)
class IntervalUnion:
    """A finite union of real intervals, kept sorted, disjoint and non-adjacent."""

    components: tuple[Component, ...]

    def __post_init__(self):
        comps = tuple(Component.parse(c) if isinstance(c, str) else c for c in self.components)
        if not comps:
            raise ValueError("an interval union needs at least one component")
        object.__setattr__(self, "components", _normalize(comps))

    @classmethod
    def of(cls, *items) -> IntervalUnion:
        return cls(tuple(items))

    def contains(self, x) -> bool:
        return any(c.contains(x) for c in self.components)

    @property
    def is_finite(self) -> bool:
        return all(c.is_degenerate for c in self.components)

    def points(self) -> tuple[Fraction, ...]:
        if not self.is_finite:
            raise ValueError(f"{self} is not a finite set")
        return tuple(c.lo for c in self.components)

    def issubset(self, other: PointSet) -> bool:
        if isinstance(other, FiniteSet):
            return self.is_finite and all(other.contains(p) for p in self.points())
        return all(any(c.within(o) for o in other.components) for c in self.components)

    def sample_point(self) -> Fraction:
        """Least element when attained, otherwise an interior point of the first component."""
        first = self.components[0]
        least = first.least()
        return least if least is not None else first.interior_point()

    def breakpoints(self) -> tuple[Fraction, ...]:
        out = []
        for c in self.components:
            for e in (c.lo, c.hi):
                if not math.isinf(e) and e not in out:
                    out.append(e)
        return tuple(out)

    def __str__(self):
        if all(c.is_degenerate for c in self.components):
            return "{" + ", ".join(fmt(c.lo) for c in self.components) + "}"
        return " ∪ ".join(str(c) for c in self.components)


@dataclass(frozen=True)
class FiniteSet:
    pts: tuple[Fraction, ...]

    def __post_init__(self):
        pts = tuple(sorted({finite_point(p) for p in self.pts}))
        if not pts:
            raise ValueError("a finite carrier needs at least one point")
        object.__setattr__(self, "pts", pts)

    @classmethod
    def of(cls, *items) -> FiniteSet:
        return cls(tuple(items))

    is_finite = True

    def contains(self, x) -> bool:
        return x in self.pts

    def points(self) -> tuple[Fraction, ...]:
        return self.pts

    def issubset(self, other: PointSet) -> bool:
        return all(other.contains(p) for p in self.pts)

    def sample_point(self) -> Fraction:
        return self.pts[0]

    def breakpoints(self) -> tuple[Fraction, ...]:
        return ()

    def __str__(self):
        return "{" + ", ".join(fmt(p) for p in self.pts) + "}"


PointSet = Union[FiniteSet, IntervalUnion]


def point_set(points: Iterable) -> FiniteSet:
    return FiniteSet(tuple(points))


@dataclass(frozen=True)
class MetricSpace:
    """Carrier plus metric: the usual |x - y|, or an explicit matrix on a finite carrier."""

    carrier: PointSet
    matrix: tuple[tuple[Fraction, ...], ...] | None = None
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.matrix is None:
            return
        if not isinstance(self.carrier, FiniteSet):
            raise ValueError("matrix metrics are only allowed on finite carriers")
        n = len(self.carrier.pts)
        rows = tuple(tuple(exact(v) for v in row) for row in self.matrix)
        if len(rows) != n or any(len(row) != n for row in rows):
            raise ValueError(f"metric matrix must be {n}x{n} to match the carrier")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"metric matrix is not stored symmetrically at ({i}, {j})")
        if any(isinstance(v, float) for row in rows for v in row):
            raise ValueError("metric matrix entries must be finite")
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.carrier.pts)})

    @classmethod
    def finite(cls, points: Iterable, matrix=None) -> MetricSpace:
        return cls(FiniteSet(tuple(points)), matrix)

    @classmethod
    def intervals(cls, *components) -> MetricSpace:
        return cls(IntervalUnion(tuple(components)))

    @property
    def is_finite(self) -> bool:
        return self.carrier.is_finite

    @property
    def is_usual(self) -> bool:
        return self.matrix is None

    def points(self) -> tuple[Fraction, ...]:
        return self.carrier.points()

    def contains(self, x) -> bool:
        return self.carrier.contains(x)

    def distance(self, x, y):
        if not self.contains(x) or not self.contains(y):
            bad = x if not self.contains(x) else y
            raise ValueError(f"point {fmt(bad) if isinstance(bad, Fraction) else bad} is outside the carrier")
        if self.matrix is None:
            return abs(x - y)
        return self.matrix[self._index[x]][self._index[y]]

    def with_carrier(self, carrier: PointSet) -> MetricSpace:
        """Subspace with the restricted metric."""
        if self.matrix is None:
            return MetricSpace(carrier)
        if not isinstance(carrier, FiniteSet) or not carrier.issubset(self.carrier):
            raise ValueError("a matrix-metric subspace must be a finite subset of the carrier")
        idx = [self._index[p] for p in carrier.pts]
        return MetricSpace(carrier, tuple(tuple(self.matrix[i][j] for j in idx) for i in idx))

    def __str__(self):
        return f"{self.carrier}" + ("" if self.matrix is None else " (matrix metric)")


@dataclass(frozen=True)
class SequenceWitness:
    """A monotone Cauchy sequence inside one component that converges to a point outside the space."""

    limit: Fraction
    start: Fraction
    increasing: bool

    def terms(self, n: int) -> list[Fraction]:
        gap = self.limit - self.start
        return [self.limit - gap / (k + 1) for k in range(n)]

    def describe(self) -> str:
        side = "below" if self.increasing else "above"
        gap = self.limit - self.start
        sign = "-" if gap > 0 else "+"
        return f"x_n = {fmt(self.limit)} {sign} {fmt(abs(gap))}/(n+1), approaching {fmt(self.limit)} from {side}"

    def replays(self, space: MetricSpace, n: int = 50) -> bool:
        """True when the first ``n`` terms lie in ``space``, are monotone and Cauchy, and the limit is missing."""
        xs = self.terms(n)
        inside = all(space.contains(x) for x in xs)
        monotone = all((b > a) if self.increasing else (b < a) for a, b in zip(xs, xs[1:]))
        shrinking = abs(xs[-1] - self.limit) <= abs(self.start - self.limit) / n
        return inside and monotone and shrinking and not space.contains(self.limit)


def _open_end_witness(c: Component, upper: bool) -> SequenceWitness:
    if upper:
        start = c.interior_point() if not c.lo_closed or math.isinf(c.lo) else c.lo
        return SequenceWitness(c.hi, start, increasing=True)
    start = c.interior_point() if not c.hi_closed or math.isinf(c.hi) else c.hi
    return SequenceWitness(c.lo, start, increasing=False)


def verify_metric_axioms(space: MetricSpace) -> Verdict:
    if space.matrix is None:
        return holds("usual metric |x - y| on reals")
    pts = space.points()
    d = space.distance
    for x in pts:
        if d(x, x) != 0:
            return fails(f"d({fmt(x)}, {fmt(x)}) = {fmt(d(x, x))} is not zero", (x,))
    for x in pts:
        for y in pts:
            if x != y and d(x, y) <= 0:
                return fails(f"d({fmt(x)}, {fmt(y)}) = {fmt(d(x, y))} is not positive", (x, y))
    for x in pts:
        for y in pts:
            for z in pts:
                if d(x, z) > d(x, y) + d(y, z):
                    return fails(
                        f"triangle inequality: d({fmt(x)},{fmt(z)}) = {fmt(d(x, z))} > "
                        f"d({fmt(x)},{fmt(y)}) + d({fmt(y)},{fmt(z)}) = {fmt(d(x, y) + d(y, z))}",
                        (x, y, z),
                    )
    n = len(pts)
    return holds(f"exhaustive check of {n**3} triples")


def is_complete(space: MetricSpace) -> Verdict:
    if space.is_finite:
        return holds("finite space: every Cauchy sequence is eventually constant")
    for c in space.carrier.components:
        if not c.hi_closed and not math.isinf(c.hi):
            w = _open_end_witness(c, upper=True)
            return fails(f"open endpoint {fmt(c.hi)} of {c}: {w.describe()}", w)
        if not c.lo_closed and not math.isinf(c.lo):
            w = _open_end_witness(c, upper=False)
            return fails(f"open endpoint {fmt(c.lo)} of {c}: {w.describe()}", w)
    return holds("every component is closed at its finite endpoints")


def is_r_complete(space: MetricSpace, relation) -> Verdict:
    from .relation import RelKind

    kind = relation.kind
    if kind is RelKind.UNIVERSAL:
        v = is_complete(space)
        return Verdict(v.kind, f"universal relation: R-completeness is completeness; {v.note}", v.witness)
    if space.is_finite:
        return holds("finite space: every Cauchy sequence is eventually constant")
    if kind is RelKind.PAIRS:
        return holds(
            "pair-list relation: R-preserving sequences range over the finite support, "
            "so Cauchy ones are eventually constant"
        )
    for c in space.carrier.components:
        if kind is RelKind.GEQ and not c.lo_closed and not math.isinf(c.lo):
            w = _open_end_witness(c, upper=False)
            return fails(f"non-increasing sequence leaves through open endpoint {fmt(c.lo)}: {w.describe()}", w)
        if kind is RelKind.LEQ and not c.hi_closed and not math.isinf(c.hi):
            w = _open_end_witness(c, upper=True)
            return fails(f"non-decreasing sequence leaves through open endpoint {fmt(c.hi)}: {w.describe()}", w)
    if kind is RelKind.GEQ:
        return holds("every component contains its finite left endpoint (non-increasing Cauchy sequences converge to an infimum in it)")
    return holds("every component contains its finite right endpoint (non-decreasing Cauchy sequences converge to a supremum in it)")
