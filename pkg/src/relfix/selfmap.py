"""Piecewise-affine self-maps of a carrier, with finite lookup tables as a special case."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .space import Component, FiniteSet, IntervalUnion, MetricSpace, exact, finite_point, fmt


@dataclass(frozen=True)
class Piece:
    domain: Component
    slope: Fraction
    intercept: Fraction

    def __post_init__(self):
        if isinstance(self.domain, str):
            object.__setattr__(self, "domain", Component.parse(self.domain))
        object.__setattr__(self, "slope", finite_point(self.slope))
        object.__setattr__(self, "intercept", finite_point(self.intercept))

    def law(self, x):
        return self.slope * x + self.intercept

    def image(self) -> Component:
        c = self.domain
        if self.slope == 0:
            return Component.point(self.intercept)
        if c.is_degenerate:
            return Component.point(self.law(c.lo))
        lo, hi = self.law(c.lo), self.law(c.hi)
        if self.slope > 0:
            return Component(lo, hi, c.lo_closed, c.hi_closed)
        return Component(hi, lo, c.hi_closed, c.lo_closed)

    def __str__(self):
        return f"{fmt(self.slope)}*x + {fmt(self.intercept)} on {self.domain}"



@dataclass(frozen=True)
class SelfMap:
    """Either ``pieces`` (sorted, pairwise disjoint affine pieces) or ``table`` (explicit ``x -> f(x)`` pairs)."""

    pieces: tuple[Piece, ...] = ()
    table: tuple[tuple[Fraction, Fraction], ...] = ()
    _lookup: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if bool(self.pieces) == bool(self.table):
            raise ValueError("a self-map needs exactly one of pieces or table")
        if self.table:
            rows = tuple(sorted((finite_point(x), finite_point(y)) for x, y in self.table))
            xs = [x for x, _ in rows]
            if len(set(xs)) != len(xs):
                raise ValueError("table assigns two values to one point")
            object.__setattr__(self, "table", rows)
            object.__setattr__(self, "_lookup", dict(rows))
            return
        pieces = tuple(sorted(self.pieces, key=lambda p: (p.domain.lo, not p.domain.lo_closed)))
        for a, b in zip(pieces, pieces[1:]):
            if b.domain.lo < a.domain.hi or (b.domain.lo == a.domain.hi and a.domain.hi_closed and b.domain.lo_closed):
                raise ValueError(f"pieces overlap: {a.domain} and {b.domain}")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def from_table(cls, mapping) -> SelfMap:
        items = mapping.items() if isinstance(mapping, dict) else mapping
        return cls(table=tuple((exact(x), exact(y)) for x, y in items))

    @classmethod
    def affine(cls, *specs) -> SelfMap:
        """``SelfMap.affine(("(-1, 2]", "1/2", 0), ("(2, 4)", 0, 1))``."""
        return cls(pieces=tuple(Piece(Component.parse(d) if isinstance(d, str) else d, exact(a), exact(b)) for d, a, b in specs))

    def piece_at(self, x) -> Piece | None:
        for p in self.pieces:
            if p.domain.contains(x):
                return p
        return None

    def apply(self, x):
        if self.table:
            try:
                return self._lookup[x]
            except KeyError:
                raise ValueError(f"{x} is outside the domain of the map") from None
        p = self.piece_at(x)
        if p is None:
            raise ValueError(f"{x} is outside every piece of the map")
        return p.law(x)

    __call__ = apply

    def domain(self):
        if self.table:
            return FiniteSet(tuple(x for x, _ in self.table))
        return IntervalUnion(tuple(p.domain for p in self.pieces))

    def breakpoints(self) -> tuple[Fraction, ...]:
        if self.table:
            return ()
        out = set()
        for p in self.pieces:
            for e in (p.domain.lo, p.domain.hi):
                if not math.isinf(e):
                    out.add(e)
        return tuple(sorted(out))

    def image(self, space: MetricSpace):
        """Exact image ``fX`` of the carrier."""
        if space.is_finite:
            return FiniteSet(tuple(self.apply(x) for x in space.points()))
        return IntervalUnion(tuple(p.image() for p in self.pieces))

    def check_partition(self, space: MetricSpace) -> None:
        """Raise ``ValueError`` unless the map is defined exactly on the carrier and maps it into itself."""
        if space.is_finite:
            for x in space.points():
                if self.table:
                    if x not in self._lookup:
                        raise ValueError(f"map is undefined at {fmt(x)}")
                else:
                    hits = [p for p in self.pieces if p.domain.contains(x)]
                    if len(hits) != 1:
                        raise ValueError(f"map is undefined at {fmt(x)}")
            if self.table and len(self.table) != len(space.points()):
                extra = [x for x, _ in self.table if not space.contains(x)]
                raise ValueError(f"map is defined outside the carrier at {fmt(extra[0])}")
        else:
            if self.table:
                raise ValueError("a lookup table cannot define a map on an interval carrier")
            if self.domain() != space.carrier:
                raise ValueError(f"piece domains {self.domain()} do not partition the carrier {space.carrier}")
        img = self.image(space)
        if not img.issubset(space.carrier):
            raise ValueError(f"image {img} is not inside the carrier {space.carrier}: not a self-map")

    def apply_array(self, xs: np.ndarray) -> np.ndarray:
        """Float evaluation for sampling; points outside every piece give NaN."""
        out = np.full(xs.shape, np.nan)
        for p in self.pieces:
            c = p.domain
            lo, hi = float(c.lo), float(c.hi)
            mask = (xs >= lo) if c.lo_closed else (xs > lo)
            mask &= (xs <= hi) if c.hi_closed else (xs < hi)
            out[mask] = float(p.slope) * xs[mask] + float(p.intercept)
        return out

    def __str__(self):
        if self.table:
            return "{" + ", ".join(f"{fmt(x)}->{fmt(y)}" for x, y in self.table) + "}"
        return "; ".join(str(p) for p in self.pieces)
