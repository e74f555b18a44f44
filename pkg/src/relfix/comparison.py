"""Comparison functions (the Φ and Λ classes) and numerical checks of their defining properties.

Three families are built in:

* ``Linear(k)``: ``t -> k t`` with ``0 <= k < 1``;
* ``Rational(c, a)``: ``t -> a t / (c + t)`` with ``0 < a <= c`` (``a`` defaults to ``c``);
* ``OrderedTable``: linear interpolation through ``(0, 0)`` and user breakpoints,
  extended past the last breakpoint with the slope of the last segment.

Tables are not required to be increasing or below the diagonal, so that
counterexamples (e.g. the identity) are expressible and rejected by the checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .space import exact, finite_point, fmt
from .verdict import EPS, Kind, Verdict, fails, holds, sampled, unknown

DEFAULT_TERMS = 10_000
# exact replay of a float stagnation witness is capped; beyond it the float run is reported as is
_EXACT_REPLAY_CAP = 2_000


@dataclass(frozen=True)
class Linear:
    k: Fraction

    def __post_init__(self):
        k = finite_point(self.k)
        if not 0 <= k < 1:
            raise ValueError("k must lie in [0,1)")
        object.__setattr__(self, "k", k)

    def __call__(self, t):
        return self.k * t

    def array(self, ts: np.ndarray) -> np.ndarray:
        return float(self.k) * ts

    def __str__(self):
        return f"t -> {fmt(self.k)} t"


@dataclass(frozen=True)
class Rational:
    c: Fraction
    a: Fraction | None = None

    def __post_init__(self):
        c = finite_point(self.c)
        a = c if self.a is None else finite_point(self.a)
        if c <= 0:
            raise ValueError("c must be positive")
        if not 0 < a <= c:
            raise ValueError("a must lie in (0, c]")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "a", a)

    def __call__(self, t):
        return self.a * t / (self.c + t)

    def array(self, ts: np.ndarray) -> np.ndarray:
        return float(self.a) * ts / (float(self.c) + ts)

    def __str__(self):
        return f"t -> {fmt(self.a)} t / ({fmt(self.c)} + t)"


@dataclass(frozen=True)
class OrderedTable:
    points: tuple[tuple[Fraction, Fraction], ...]
    _ts: tuple = field(default=(), init=False, repr=False, compare=False, hash=False)
    _vs: tuple = field(default=(), init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        pts = tuple((finite_point(t), finite_point(v)) for t, v in self.points)
        if not pts:
            raise ValueError("a table needs at least one breakpoint")
        ts = [t for t, _ in pts]
        if ts[0] <= 0 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("table breakpoints must be positive and strictly increasing")
        if any(v < 0 for _, v in pts):
            raise ValueError("table values must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_ts", (Fraction(0),) + tuple(ts))
        object.__setattr__(self, "_vs", (Fraction(0),) + tuple(v for _, v in pts))

    def segment_slope(self, i: int) -> Fraction:
        ts, vs = self._ts, self._vs
        return (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i])

    def __call__(self, t):
        ts, vs = self._ts, self._vs
        last = len(ts) - 2
        for i in range(last + 1):
            if t <= ts[i + 1] or i == last:
                return vs[i] + self.segment_slope(i) * (t - ts[i])
        raise AssertionError("unreachable")

    def array(self, ts: np.ndarray) -> np.ndarray:
        xp = np.array([float(t) for t in self._ts])
        fp = np.array([float(v) for v in self._vs])
        out = np.interp(ts, xp, fp)
        tail = ts > xp[-1]
        out[tail] = fp[-1] + float(self.segment_slope(len(xp) - 2)) * (ts[tail] - xp[-1])
        return out

    def __str__(self):
        return "table " + ", ".join(f"({fmt(t)}, {fmt(v)})" for t, v in self.points)


ComparisonFunction = Union[Linear, Rational, OrderedTable]


def evaluate(phi, t):
    if t < 0:
        raise ValueError("comparison functions are defined on [0, inf)")
    return phi(t)


def iterate(phi, n: int, t):
    """``phi^n(t)`` with ``phi^0`` the identity."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    for _ in range(n):
        t = phi(t)
    return t


def default_grid(scale=None) -> list[Fraction]:
    """``{10^k : k = -3..1}`` plus an instance-derived scale when positive."""
    grid = [Fraction(10) ** k for k in range(-3, 2)]
    if scale is not None and scale > 0 and exact(scale) not in grid:
        grid.append(exact(scale))
    return sorted(grid)


@dataclass(frozen=True)
class PhiReport:
    phi1: Verdict
    phi2: Verdict
    below_diagonal: Verdict
    sample_grid: tuple
    lambda1: Verdict | None = None
    lambda2: Verdict | None = None
    lambda3: Verdict | None = None
    phi_cross_check: Verdict | None = None

    @property
    def in_phi(self) -> bool:
        return self.phi1.passed and self.phi2.passed

    @property
    def in_lambda(self) -> bool:
        return all(v is not None and v.passed for v in (self.lambda1, self.lambda2, self.lambda3))


def _check_increasing(phi) -> Verdict:
    if isinstance(phi, Linear):
        return holds("t -> kt with k >= 0 is non-decreasing")
    if isinstance(phi, Rational):
        return holds("derivative a c / (c + t)^2 > 0")
    ts, vs = phi._ts, phi._vs
    for i in range(len(ts) - 1):
        if vs[i + 1] < vs[i]:
            return fails(f"table decreases between t = {fmt(ts[i])} and t = {fmt(ts[i + 1])}", (ts[i], ts[i + 1]))
    return holds(f"exact: {len(ts) - 1} table segments all have slope >= 0")


def _table_crossing(phi: OrderedTable) -> Fraction | None:
    """Least ``s > 0`` with ``phi(s) >= s`` for a table, computed exactly, or None."""
    ts, vs = phi._ts, phi._vs
    h = [v - t for t, v in zip(ts, vs)]
    if phi.segment_slope(0) >= 1:
        return ts[1] if h[1] >= 0 else ts[1] / 2
    for i in range(1, len(ts) - 1):
        if h[i] >= 0:
            return ts[i]
        if h[i + 1] >= 0:
            return ts[i] + (-h[i]) / (h[i + 1] - h[i]) * (ts[i + 1] - ts[i])
    if h[-1] >= 0:
        return ts[-1]
    slope = phi.segment_slope(len(ts) - 2)
    if slope > 1:
        return ts[-1] + (-h[-1]) / (slope - 1)
    return None


def _check_below_diagonal(phi, grid: Sequence) -> Verdict:
    if isinstance(phi, Linear):
        return holds("k < 1 gives kt < t for t > 0")
    if isinstance(phi, Rational):
        return holds("a <= c gives a t / (c + t) < t for t > 0")
    for t in grid:
        if phi(t) >= t:
            return fails(f"phi({fmt(t)}) = {fmt(phi(t))} >= t", t)
    s = _table_crossing(phi)
    if s is not None:
        return fails(f"phi({fmt(s)}) = {fmt(phi(s))} >= t off the grid", s)
    return holds("exact: phi(t) - t is piecewise linear and negative at every breakpoint and beyond")


def _exact_stagnation(phi, t: Fraction, n: int) -> bool:
    if n > _EXACT_REPLAY_CAP:
        return True
    s = iterate(phi, n, t)
    return s > 0 and phi(s) >= s


def _series_probe(phi, t: Fraction, terms: int) -> Verdict:
    """Numerical test of ``sum_n phi^n(t) < inf`` at one ``t``."""
    a = float(t)
    total = 0.0
    checkpoints = {terms: None, 2 * terms: None, 4 * terms: None}
    prev = a
    for n in range(1, 4 * terms + 1):
        a = float(phi(a))
        if a > 0 and a >= prev:
            if _exact_stagnation(phi, t, n - 1):
                return fails(
                    f"at t = {fmt(t)}: phi^{n}(t) >= phi^{n - 1}(t) > 0, so the terms never decrease to 0",
                    {"t": t, "n": n, "term": a},
                )
            return unknown(f"at t = {fmt(t)}: float iterates stagnate at n = {n} but exact replay does not")
        total += a
        prev = a
        if n in checkpoints:
            checkpoints[n] = (a, total)
            if a < EPS:
                prior = float(iterate(phi, 1, a)) if a > 0 else 0.0
                ratio = prior / a if a > 0 else 0.0
                tail = a * ratio / (1 - ratio) if ratio < 1 else math.inf
                if tail < EPS:
                    return sampled(f"at t = {fmt(t)}: term {a:.3g} and geometric tail {tail:.3g} below {EPS:g} after {n} terms")
            if n == 4 * terms:
                break
    (a1, s1), (a2, s2), (a4, s4) = (checkpoints[k] for k in sorted(checkpoints))
    n1, n4 = terms, 4 * terms
    if n4 * a4 >= 0.5 * n1 * a1 or s4 > 2 * s1:
        return fails(
            f"at t = {fmt(t)}: n*phi^n(t) = {n1 * a1:.4g}, {2 * n1 * a2:.4g}, {n4 * a4:.4g} at n = {n1}, {2 * n1}, {n4}; "
            "terms decay no faster than c/n, so the series diverges by comparison with the harmonic series",
            {"t": t, "n": n4, "n_times_term": n4 * a4, "partial_sums": (s1, s2, s4)},
        )
    return unknown(f"at t = {fmt(t)}: tail term {a4:.3g} still above {EPS:g} after {n4} terms")


def _check_summable(phi, grid: Sequence, terms: int, increasing: Verdict) -> Verdict:
    if isinstance(phi, Linear):
        return holds("geometric series: sum_n k^n t = k t / (1 - k) < inf")
    if isinstance(phi, OrderedTable):
        s = _table_crossing(phi)
        if s is not None and increasing.passed:
            return fails(f"phi({fmt(s)}) >= {fmt(s)}: iterates from t = {fmt(s)} never drop below it", {"t": s, "n": 1})
    verdicts = []
    for t in grid:
        v = _series_probe(phi, exact(t), terms)
        if v.kind is Kind.FAILS and not increasing.passed:
            v = unknown(f"{v.note} (phi is not increasing, so this is not a proof)", v.witness)
        if v.kind in (Kind.FAILS, Kind.UNKNOWN):
            return v
        verdicts.append(v)
    return sampled(f"series converge numerically at all {len(grid)} grid points")


def check_phi_membership(phi, grid: Sequence | None = None, terms: int = DEFAULT_TERMS) -> PhiReport:
    grid = sorted(exact(t) for t in (grid if grid is not None else default_grid()))
    if not grid or any(t <= 0 or isinstance(t, float) for t in grid):
        raise ValueError("grid must be nonempty, positive and finite")
    if terms < 1:
        raise ValueError("terms must be at least 1")
    phi1 = _check_increasing(phi)
    phi2 = _check_summable(phi, grid, terms, phi1)
    lemma = _check_below_diagonal(phi, grid)
    return PhiReport(phi1, phi2, lemma, tuple(grid))


def _g(psi, t):
    return t / (t - psi(t))


def _trapezoid(fn, a: float, b: float, n0: int, rtol: float = 1e-12, max_doublings: int = 24) -> float:
    """Composite trapezoid rule, doubling the panel count until successive estimates agree."""
    n = max(n0, 2)
    xs = np.linspace(a, b, n + 1)
    ys = fn(xs)
    h = (b - a) / n
    est = h * (ys.sum() - 0.5 * (ys[0] + ys[-1]))
    for _ in range(max_doublings):
        mids = a + h * (np.arange(n) + 0.5)
        new = 0.5 * est + 0.5 * h * fn(mids).sum()
        n *= 2
        h /= 2
        if abs(new - est) <= rtol * abs(new):
            return new
        est = new
    return est


def _integral_verdict(psi, T: float, quad_points: int, rungs: int = 20) -> Verdict:
    def g(ts):
        return ts / (ts - psi.array(ts))

    segs = []
    hi = T
    for _ in range(rungs):
        lo = hi / 2
        segs.append(_trapezoid(g, lo, hi, quad_points))
        hi = lo
    partial = np.cumsum(segs)
    ratios = [segs[j] / segs[j - 1] for j in range(1, rungs)]
    extrapolated = [
        partial[j] + segs[j] * r / (1 - r) if r < 1 else math.inf for j, r in zip(range(1, rungs), ratios)
    ]
    last, before = extrapolated[-1], extrapolated[-2]
    if math.isfinite(last) and math.isfinite(before) and abs(last - before) <= 1e-6 * abs(last):
        return sampled(
            f"int_eps^T g over eps = T 2^-j, j = 1..{rungs}: extrapolated integral {last:.10g} "
            f"stable to {abs(last - before) / abs(last):.2g} relative"
        )
    if all(r >= 0.999 for r in ratios[-3:]):
        return fails(
            f"partial integrals keep growing by about {segs[-1]:.4g} per halving of eps "
            f"(last values {partial[-3]:.6g}, {partial[-2]:.6g}, {partial[-1]:.6g}): the integral diverges at 0",
            {"partial_integrals": tuple(float(p) for p in partial)},
        )
    return unknown(f"extrapolated integrals {before:.10g}, {last:.10g} did not stabilize")


def check_lambda_membership(psi, T=1, quad_points: int = 64, grid: Sequence | None = None) -> PhiReport:
    """(Λ1)-(Λ3) sampled on a log grid in (0, T], plus the Φ cross-check when all three pass."""
    T = exact(T)
    if T <= 0:
        raise ValueError("T must be positive")
    n = max(quad_points, 2)
    log_grid = sorted({Fraction(float(T) * 10 ** (-6 * (n - 1 - i) / (n - 1))) for i in range(n)} | {T})
    bad = next((t for t in log_grid if not 0 < psi(t) < t), None)
    if bad is None:
        lam1 = sampled(f"0 < psi(t) < t at {len(log_grid)} log-spaced points in (0, {fmt(T)}]")
        gs = [_g(psi, t) for t in log_grid]
        pair = next(((a, b) for a, b, ga, gb in zip(log_grid, log_grid[1:], gs, gs[1:]) if gb >= ga), None)
        if pair is None:
            lam2 = sampled(f"g(t) = t / (t - psi(t)) strictly decreasing across {len(log_grid)} grid points")
        else:
            a, b = pair
            lam2 = fails(f"g({float(a):.6g}) = {float(_g(psi, a)):.10g} <= g({float(b):.6g}) = {float(_g(psi, b)):.10g}", pair)
        lam3 = _integral_verdict(psi, float(T), n)
    else:
        lam1 = fails(f"psi({float(bad):.6g}) = {float(psi(bad)):.6g} is not in (0, t)", bad)
        lam2 = unknown("g is undefined where psi(t) >= t")
        lam3 = unknown("g is undefined where psi(t) >= t")
    phi_report = check_phi_membership(psi, grid)
    lemma = None
    if all(v.passed for v in (lam1, lam2, lam3)):
        if phi_report.in_phi and phi_report.below_diagonal.passed:
            lemma = sampled("Lambda membership passed and the Phi checks agree")
        else:
            bad_phi = next(v for v in (phi_report.phi1, phi_report.phi2, phi_report.below_diagonal) if not v.passed)
            lemma = fails(f"inconsistent: Lambda checks passed but a Phi check did not ({bad_phi})", bad_phi)
    return PhiReport(
        phi_report.phi1,
        phi_report.phi2,
        phi_report.below_diagonal,
        phi_report.sample_grid,
        lam1,
        lam2,
        lam3,
        lemma,
    )

