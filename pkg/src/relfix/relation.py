"""Binary relations on a carrier and the relation-side hypotheses of the fixed-point theorems.

Four kinds are supported: ``x >= y``, ``x <= y``, the universal relation and an
explicit finite list of pairs.  Order and universal relations are intensional:
membership is decided by comparison, never by enumeration.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .selfmap import SelfMap
from .space import Component, FiniteSet, IntervalUnion, MetricSpace, PointSet, finite_point, fmt
from .verdict import Verdict, fails, holds, unknown


class RelKind(enum.Enum):
    GEQ = "geq"
    LEQ = "leq"
    UNIVERSAL = "universal"
    PAIRS = "pairs"


@dataclass(frozen=True)
class Relation:
    kind: RelKind
    carrier: MetricSpace
    pairs: frozenset = frozenset()

    def __post_init__(self):
        if self.kind is not RelKind.PAIRS:
            if self.pairs:
                raise ValueError(f"{self.kind.value} relation takes no pair list")
            return
        pairs = frozenset((finite_point(x), finite_point(y)) for x, y in self.pairs)
        for x, y in sorted(pairs):
            for p in (x, y):
                if not self.carrier.contains(p):
                    raise ValueError(f"pair ({fmt(x)}, {fmt(y)}) leaves the carrier at {fmt(p)}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def geq(cls, space: MetricSpace) -> Relation:
        return cls(RelKind.GEQ, space)

    @classmethod
    def leq(cls, space: MetricSpace) -> Relation:
        return cls(RelKind.LEQ, space)

    @classmethod
    def universal(cls, space: MetricSpace) -> Relation:
        return cls(RelKind.UNIVERSAL, space)

    @classmethod
    def of_pairs(cls, space: MetricSpace, pairs: Iterable) -> Relation:
        return cls(RelKind.PAIRS, space, frozenset(pairs))

    @property
    def intensional(self) -> bool:
        return self.kind is not RelKind.PAIRS

    def support(self) -> tuple[Fraction, ...] | None:
        if self.intensional:
            return None
        return tuple(sorted({p for pair in self.pairs for p in pair}))

    def sorted_pairs(self) -> list[tuple[Fraction, Fraction]]:
        return sorted(self.pairs)

    def holds_for(self, x, y) -> bool:
        """Membership without the carrier check (used on sampled and exact points alike)."""
        if self.kind is RelKind.GEQ:
            return x >= y
        if self.kind is RelKind.LEQ:
            return x <= y
        if self.kind is RelKind.UNIVERSAL:
            return True
        return (x, y) in self.pairs

    def __str__(self):
        if self.kind is RelKind.PAIRS:
            return "{" + ", ".join(f"({fmt(x)},{fmt(y)})" for x, y in self.sorted_pairs()) + "}"
        return {"geq": "x >= y", "leq": "x <= y", "universal": "X x X"}[self.kind.value]


@dataclass(frozen=True)
class Path:
    nodes: tuple

    @property
    def length(self) -> int:
        return len(self.nodes) - 1

    def __str__(self):
        return "[" + ", ".join(fmt(p) for p in self.nodes) + "]"


def _check_in(relation: Relation, *points) -> None:
    for p in points:
        if not relation.carrier.contains(p):
            raise ValueError(f"point {p} is outside the carrier {relation.carrier.carrier}")


def related(relation: Relation, x, y) -> bool:
    _check_in(relation, x, y)
    return relation.holds_for(x, y)


def sym_related(relation: Relation, x, y) -> bool:
    """``[x, y] in R``: related in either direction."""
    _check_in(relation, x, y)
    return relation.holds_for(x, y) or relation.holds_for(y, x)


def inverse(relation: Relation) -> Relation:
    if relation.kind is RelKind.GEQ:
        return Relation(RelKind.LEQ, relation.carrier)
    if relation.kind is RelKind.LEQ:
        return Relation(RelKind.GEQ, relation.carrier)
    if relation.kind is RelKind.UNIVERSAL:
        return relation
    return Relation(RelKind.PAIRS, relation.carrier, frozenset((y, x) for x, y in relation.pairs))


def symmetric_closure(relation: Relation) -> Relation:
    if relation.kind in (RelKind.GEQ, RelKind.LEQ, RelKind.UNIVERSAL):
        # x >= y or y >= x holds for every pair of reals
        return Relation(RelKind.UNIVERSAL, relation.carrier)
    return Relation(RelKind.PAIRS, relation.carrier, relation.pairs | inverse(relation).pairs)


def restrict(relation: Relation, subspace: MetricSpace) -> Relation:
    """``R|_Y`` as a relation on the subspace ``Y``."""
    if relation.intensional:
        return Relation(relation.kind, subspace)
    keep = frozenset((x, y) for x, y in relation.pairs if subspace.contains(x) and subspace.contains(y))
    return Relation(RelKind.PAIRS, subspace, keep)


def is_preserving(relation: Relation, seq: Sequence) -> bool:
    _check_in(relation, *seq)
    return all(relation.holds_for(a, b) for a, b in zip(seq, seq[1:]))


def _outside_support(points: PointSet, support: Sequence) -> Fraction:
    """A point of an infinite point set that is not in the finite ``support``."""
    taken = set(support)
    for c in points.components:
        if c.is_degenerate:
            if c.lo not in taken:
                return c.lo
            continue
        n = len(taken) + 1
        if math.isinf(c.lo) or math.isinf(c.hi):
            m = c.interior_point()
            step = -1 if math.isinf(c.lo) else 1
            cands = [m + step * i for i in range(n)]
        else:
            cands = [c.lo + (c.hi - c.lo) * Fraction(i, n + 1) for i in range(1, n + 1)]
        return next(x for x in cands if x not in taken)
    raise ValueError("point set lies inside the support")


def _unordered_pairs(points: Sequence):
    for i, x in enumerate(points):
        for y in points[i:]:
            yield x, y


def is_complete_relation(relation: Relation, subset: PointSet) -> Verdict:
    """``[x, y] in R`` for every ``x, y`` in ``subset`` (completeness of ``R`` restricted there)."""
    if relation.intensional:
        return holds(f"{relation.kind.value} relation is total: x >= y or y >= x always")
    support = relation.support()
    if not subset.is_finite:
        p = _outside_support(subset, support)
        return fails(f"{fmt(p)} is not in the support of R, so [{fmt(p)}, {fmt(p)}] is not in R", (p, p))
    pts = subset.points()
    for x, y in _unordered_pairs(pts):
        if not (relation.holds_for(x, y) or relation.holds_for(y, x)):
            return fails(f"neither ({fmt(x)}, {fmt(y)}) nor ({fmt(y)}, {fmt(x)}) is in R", (x, y))
    return holds(f"exhaustive over {len(pts) * (len(pts) + 1) // 2} unordered pairs")


def _two_points(c: Component) -> tuple[Fraction, Fraction]:
    """Two points ``p < q`` inside a non-degenerate component."""
    m = c.interior_point()
    if math.isinf(c.lo):
        p = m - 1
    else:
        p = c.lo if c.lo_closed else (c.lo + m) / 2
    if math.isinf(c.hi):
        q = m + 1
    else:
        q = c.hi if c.hi_closed else (c.hi + m) / 2
    return p, q


def _near(c: Component, upper: bool, t: Fraction) -> Fraction:
    """A point of ``c`` at relative distance ``t`` from its upper (or lower) end."""
    if upper:
        if c.hi_closed:
            return c.hi
        base = c.interior_point()
        return c.hi - (c.hi - base) * t
    if c.lo_closed:
        return c.lo
    base = c.interior_point()
    return c.lo + (base - c.lo) * t


def _monotone_violation(f: SelfMap) -> tuple[Fraction, Fraction] | None:
    """``(p, q)`` with ``p < q`` and ``f(p) > f(q)``, or None when f is non-decreasing."""
    for piece in f.pieces:
        if piece.slope < 0 and not piece.domain.is_degenerate:
            return _two_points(piece.domain)
    for a, b in zip(f.pieces, f.pieces[1:]):
        left_sup = a.law(a.domain.hi)
        right_inf = b.law(b.domain.lo)
        if left_sup > right_inf:
            t = Fraction(1, 2)
            for _ in range(200):
                p, q = _near(a.domain, True, t), _near(b.domain, False, t)
                if f.apply(p) > f.apply(q):
                    return p, q
                t /= 2
            raise AssertionError("monotonicity witness search did not terminate")
    return None


def is_f_closed(relation: Relation, f: SelfMap) -> Verdict:
    """``(x, y) in R`` implies ``(fx, fy) in R``."""
    kind = relation.kind
    if kind is RelKind.UNIVERSAL:
        return holds("universal relation is closed under every map")
    space = relation.carrier
    if kind is RelKind.PAIRS:
        for x, y in relation.sorted_pairs():
            fx, fy = f.apply(x), f.apply(y)
            if not relation.holds_for(fx, fy):
                return fails(f"({fmt(x)}, {fmt(y)}) in R but (f{fmt(x)}, f{fmt(y)}) = ({fmt(fx)}, {fmt(fy)}) is not", (x, y))
        return holds(f"exhaustive over {len(relation.pairs)} pairs")
    if space.is_finite:
        pts = space.points()
        for x in pts:
            for y in pts:
                if relation.holds_for(x, y) and not relation.holds_for(f.apply(x), f.apply(y)):
                    return fails(f"({fmt(x)}, {fmt(y)}) in R but ({fmt(f.apply(x))}, {fmt(f.apply(y))}) is not", (x, y))
        return holds(f"exhaustive over {len(pts) ** 2} carrier pairs")
    bad = _monotone_violation(f)
    if bad is None:
        return holds("f is non-decreasing: every piece has slope >= 0 and piece images are ordered at junctions")
    p, q = bad
    witness = (q, p) if kind is RelKind.GEQ else (p, q)
    x, y = witness
    return fails(f"f is not non-decreasing: ({fmt(x)}, {fmt(y)}) in R but f{fmt(x)} = {fmt(f.apply(x))}, f{fmt(y)} = {fmt(f.apply(y))}", witness)


def is_d_self_closed(relation: Relation, subspace: MetricSpace | None = None) -> Verdict:
    """Decided by rule for every supported kind; the note records which argument applied."""
    kind = relation.kind
    if kind is RelKind.UNIVERSAL:
        return holds("universal relation: [x_n, x] in R trivially")
    if kind is RelKind.GEQ:
        return holds("non-increasing convergent sequences stay >= their limit, so (x_n, x) in R")
    if kind is RelKind.LEQ:
        return holds("non-decreasing convergent sequences stay <= their limit, so (x_n, x) in R")
    return holds(
        "pair-list relation: preserving sequences take finitely many values, so a convergent one is "
        "eventually constant at its limit x with (x, x) in R"
    )


def is_r_continuous(relation: Relation, f: SelfMap) -> Verdict:
    """f maps R-preserving convergent sequences to convergent sequences with the right limit."""
    space = relation.carrier
    kind = relation.kind
    if space.is_finite:
        return holds("finite carrier: convergent sequences are eventually constant")
    if kind is RelKind.PAIRS:
        return holds("pair-list relation: preserving sequences live on the finite support and are eventually constant")
    right = kind in (RelKind.GEQ, RelKind.UNIVERSAL)
    left = kind in (RelKind.LEQ, RelKind.UNIVERSAL)
    for a, b in zip(f.pieces, f.pieces[1:]):
        if a.domain.hi != b.domain.lo:
            continue
        p = a.domain.hi
        if right and a.domain.hi_closed and b.law(p) != a.law(p):
            return fails(
                f"right limit of f at {fmt(p)} is {fmt(b.law(p))} but f({fmt(p)}) = {fmt(a.law(p))}",
                {"point": p, "side": "right", "limit": b.law(p), "value": a.law(p)},
            )
        if left and b.domain.lo_closed and a.law(p) != b.law(p):
            return fails(
                f"left limit of f at {fmt(p)} is {fmt(a.law(p))} but f({fmt(p)}) = {fmt(b.law(p))}",
                {"point": p, "side": "left", "limit": a.law(p), "value": b.law(p)},
            )
    which = {RelKind.GEQ: "right-continuous", RelKind.LEQ: "left-continuous", RelKind.UNIVERSAL: "continuous"}[kind]
    return holds(f"f is {which} at every junction of its affine pieces")


def _candidates(relation: Relation, pool: Iterable) -> list:
    pts = set(relation.support() or ())
    pts.update(p for p in pool if relation.carrier.contains(p))
    return sorted(pts)


def find_bridge(relation: Relation, x, y, pool: Iterable = (), use_symmetric: bool = False):
    """A point ``z`` with ``(x, z)`` and ``(y, z)`` related, or None."""
    rel = symmetric_closure(relation) if use_symmetric else relation
    if rel.kind is RelKind.UNIVERSAL:
        return x
    if rel.kind is RelKind.GEQ:
        return min(x, y)
    if rel.kind is RelKind.LEQ:
        return max(x, y)
    for z in _candidates(rel, pool):
        if rel.holds_for(x, z) and rel.holds_for(y, z):
            return z
    return None


def is_directed(relation: Relation, subset: PointSet, use_symmetric: bool = False, candidate_pool: Iterable = ()) -> Verdict:
    rel = symmetric_closure(relation) if use_symmetric else relation
    name = "R^s" if use_symmetric else "R"
    if rel.intensional:
        how = {"geq": "z = min(x, y)", "leq": "z = max(x, y)", "universal": "any z"}[rel.kind.value]
        return holds(f"{name} is an order or universal relation: {how}")
    support = rel.support()
    if not subset.is_finite:
        p = _outside_support(subset, support)
        return fails(f"{fmt(p)} is outside the support of {name}, so nothing is {name}-related to it", (p, p))
    pool = list(candidate_pool)
    pts = subset.points()
    for x, y in _unordered_pairs(pts):
        if find_bridge(rel, x, y, pool) is None:
            # z must lie in the support for (x, z) to be in a pair-list relation, so this is exhaustive
            return fails(f"no z with ({fmt(x)}, z) and ({fmt(y)}, z) in {name}; searched the whole support", (x, y))
    return holds(f"every pair of {len(pts)} points has a common {name}-successor in the support")


def find_path(relation: Relation, x, y, max_len: int | None = None) -> Path | None:
    """Shortest path ``x = z_0, ..., z_l = y`` with every consecutive pair related, or None."""
    if max_len is not None and max_len < 1:
        raise ValueError("max_len must be at least 1")
    _check_in(relation, x, y)
    if relation.intensional:
        # orders and the universal relation are transitive, so a direct edge decides reachability
        return Path((x, y)) if relation.holds_for(x, y) else None
    support = relation.support()
    if max_len is None:
        max_len = 2 * len(support) + 1
    adj: dict = {}
    for a, b in relation.sorted_pairs():
        adj.setdefault(a, []).append(b)
    queue = deque((n, (x, n)) for n in adj.get(x, ()))
    seen = {n for n, _ in queue}
    while queue:
        node, path = queue.popleft()
        if node == y:
            return Path(path)
        if len(path) - 1 >= max_len:
            continue
        for n in adj.get(node, ()):
            if n not in seen:
                seen.add(n)
                queue.append((n, path + (n,)))
    return None
