"""Cover-based upper bounds for gauge (h-Hausdorff) premeasures on the line.

Balls are open intervals ``(c - r, c + r)``. The bound at scale ``eps`` is
``N(E, eps-) * h(eps)``, where ``N(E, eps-)`` is the fewest open balls of a
common radius ``r < eps`` (taken as ``r -> eps``) that cover ``E``. On the
line the left-to-right greedy sweep attains that count, and for small finite
sets an exhaustive set-cover solver checks it.

With ``scan=True`` the bound is minimised over all common radii
``r <= eps``; the count only changes at finitely many critical radii, so
the scan is exact for finite sets. Sets are handled in exact rationals.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np
from mpmath import iv

from . import kernels
from .intervals import endpoints, to_iv, working_bits

LOG_POWER = "LOG_POWER"
POWER = "POWER"
_GAUGE_BITS = 96


class GaugeDomainError(ValueError):
    pass


@dataclass(frozen=True)
class GaugeFunction:
    """``ln^-delta(1/t)`` (LOG_POWER) or ``t^delta`` (POWER) on ``(0, r0]``."""

    kind: str
    delta: float
    r0: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (LOG_POWER, POWER):
            raise ValueError(f"unknown gauge kind {self.kind!r}")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.r0 is None:
            object.__setattr__(self, "r0", math.exp(-1) if self.kind == LOG_POWER else 1.0)
        if not self.r0 > 0 or (self.kind == LOG_POWER and not self.r0 < 1):
            raise ValueError("r0 must lie in (0, 1) for LOG_POWER and be positive for POWER")

    def __call__(self, t) -> float:
        return gauge_eval(self, t)


def _float_up(x) -> float:
    hi = endpoints(x)[1]
    f = float(hi)
    return math.nextafter(f, math.inf) if Fraction(f) < hi else f


def gauge_enclosure(h: GaugeFunction, t):
    """Interval enclosure of ``h(t)``; ``t`` is taken exactly (float or rational)."""
    tt = Fraction(t)
    if not 0 < tt <= Fraction(h.r0):
        raise GaugeDomainError(f"t={t} outside (0, {h.r0}]")
    x = to_iv(tt)
    d = to_iv(Fraction(h.delta))
    if h.kind == POWER:
        return iv.exp(d * iv.log(x))
    return iv.exp(-d * iv.log(-iv.log(x)))


def gauge_eval(h: GaugeFunction, t) -> float:
    """``h(t)`` rounded upward to a float."""
    with working_bits(_GAUGE_BITS):
        return _float_up(gauge_enclosure(h, t))


# ---------------------------------------------------------------------------
# sets


@dataclass(frozen=True)
class LineSet:
    """Finite union of disjoint closed intervals (points are zero-length intervals)."""

    parts: tuple

    @classmethod
    def points(cls, pts: Sequence) -> "LineSet":
        return cls(tuple((p, p) for p in sorted(set(Fraction(x) for x in pts))))

    @classmethod
    def intervals(cls, ivs: Sequence) -> "LineSet":
        parts = sorted((Fraction(a), Fraction(b)) for a, b in ivs)
        for a, b in parts:
            if b < a:
                raise ValueError("reversed interval")
        for (_, b0), (a1, _) in zip(parts, parts[1:]):
            if a1 <= b0:
                raise ValueError("intervals must be disjoint")
        return cls(tuple(parts))

    @property
    def is_finite(self) -> bool:
        return all(a == b for a, b in self.parts)

    def __len__(self) -> int:
        return len(self.parts)


def cantor_set(depth: int, ratio: Fraction = Fraction(1, 3)) -> LineSet:
    """Depth-k stage of the symmetric Cantor construction on [0, 1]."""
    ratio = Fraction(ratio)
    if depth < 0 or not 0 < ratio < Fraction(1, 2):
        raise ValueError("need depth >= 0 and 0 < ratio < 1/2")
    parts = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        nxt = []
        for a, b in parts:
            L = (b - a) * ratio
            nxt.extend([(a, a + L), (b - L, b)])
        parts = nxt
    return LineSet(tuple(parts))


def parse_line_set(text: str) -> LineSet:
    """``cantor:depth=k,ratio=1/3``, ``points:x1,x2,...``, ``intervals:a,b;c,d`` or ``empty``."""
    text = text.strip()
    if text == "empty":
        return LineSet(())
    kind, sep, body = text.partition(":")
    if not sep:
        raise ValueError(f"malformed set spec {text!r}")
    try:
        if kind == "cantor":
            opts = dict(kv.split("=", 1) for kv in body.split(",") if kv.strip())
            unknown = set(opts) - {"depth", "ratio"}
            if unknown or "depth" not in opts:
                raise ValueError(f"cantor spec needs depth (and optionally ratio), got {sorted(opts)}")
            return cantor_set(int(opts["depth"]), Fraction(opts.get("ratio", "1/3")))
        if kind == "points":
            return LineSet.points([Fraction(t.strip()) for t in body.split(",") if t.strip()])
        if kind == "intervals":
            return LineSet.intervals([tuple(Fraction(t.strip()) for t in part.split(","))
                                      for part in body.split(";") if part.strip()])
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed set spec {text!r}: {exc}") from exc
    raise ValueError(f"unknown set kind {kind!r}")


# ---------------------------------------------------------------------------
# covers


@dataclass(frozen=True)
class Cover:
    balls: tuple  # (center, radius) pairs, exact rationals
    eps: Fraction

    def covers(self, E: LineSet) -> bool:
        """Every point of ``E`` lies in some open ball (sweep over the ball union)."""
        spans = sorted((c - r, c + r) for c, r in self.balls)
        merged: list = []
        for a, b in spans:
            # open intervals only join when they overlap, touching leaves a gap point
            if merged and a < merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        for lo, hi in E.parts:
            if not any(a < lo and hi < b for a, b in merged):
                return False
        return True

    def radii_ok(self) -> bool:
        return all(0 < r < self.eps for _, r in self.balls)


def _sweep(E: LineSet, reach: Fraction, closed: bool) -> list:
    """Greedy left ends: each ball covers ``[x, x + reach)`` (``[x, x + reach]`` when closed)."""
    if closed and not E.is_finite:
        raise ValueError("closed reach is defined for finite sets only")
    starts = []
    i, n = 0, len(E.parts)
    x = E.parts[0][0] if n else None
    while x is not None:
        starts.append(x)
        end = x + reach
        while i < n and (E.parts[i][1] < end or (closed and E.parts[i][1] == end)):
            i += 1
        if i == n:
            break
        # first uncovered point: an interval start beyond the ball, or the ball's open end
        x = max(E.parts[i][0], end)
    return starts


def greedy_count(E: LineSet, r: Fraction, closed: bool = False) -> int:
    """Fewest open balls of radius ``r -> r-`` (or ``r -> r+`` when ``closed``) covering E."""
    if not len(E):
        return 0
    return len(_sweep(E, 2 * Fraction(r), closed))


def _explicit_cover(E: LineSet, eps: Fraction, count: int) -> Cover:
    """A concrete cover with a common radius below ``eps`` using ``count`` balls."""
    if count == 0:
        return Cover((), eps)
    for k in range(2, 400):
        r = eps * (1 - Fraction(1, 2**k))
        lam = (eps - r) / 2
        # a ball centred at x + r - lam covers [x, x + 2r - lam)
        starts = _sweep(E, 2 * r - lam, False)
        if len(starts) == count:
            cover = Cover(tuple((x + r - lam, r) for x in starts), eps)
            if cover.covers(E):
                return cover
    raise RuntimeError("could not realise the limiting cover count")


@dataclass
class PremeasureBound:
    eps: Fraction
    bound: float
    balls_used: int
    radius: Fraction
    cover: Optional[Cover]


def critical_radii(E: LineSet, eps: Fraction) -> list:
    """Radii in ``(0, eps)`` at which the limiting cover count of a finite set can change."""
    if not E.is_finite:
        raise ValueError("radius scan is available for finite sets only")
    pts = [a for a, _ in E.parts]
    out = {(q - p) / 2 for p, q in combinations(pts, 2)}
    return sorted(r for r in out if 0 < r < eps)


def premeasure(E: Union[LineSet, str], eps, h: GaugeFunction, scan: bool = False,
               with_cover: bool = True) -> PremeasureBound:
    """Upper bound on ``H^h(E, eps)`` from covers by balls of one common radius."""
    if isinstance(E, str):
        E = parse_line_set(E)
    eps = Fraction(eps)
    if not 0 < eps <= Fraction(h.r0):
        raise GaugeDomainError(f"eps={float(eps)} outside (0, r0]")
    n = greedy_count(E, eps)
    best = (n * gauge_eval(h, eps) if n else 0.0, n, eps)
    if scan and n:
        for r in critical_radii(E, eps):
            m = greedy_count(E, r, closed=True)
            val = m * gauge_eval(h, r)
            if val < best[0]:
                best = (val, m, r)
    bound, count, radius = best
    cover = None
    if with_cover and count and radius == eps:
        cover = _explicit_cover(E, eps, count)
    return PremeasureBound(eps, bound, count, radius, cover)


def exhaustive_count(points: Sequence, r, closed: bool = False) -> int:
    """Minimum number of open balls of radius ``r -> r-`` (``r+`` if closed) by set cover.

    Every subset whose span is below ``2r`` (at most ``2r`` when ``closed``)
    fits in one ball; the minimum is found by dynamic programming over
    bitmasks. Intended for at most ~16 points.
    """
    pts = sorted(set(Fraction(p) for p in points))
    n = len(pts)
    if n == 0:
        return 0
    if n > 18:
        raise ValueError("exhaustive solver limited to 18 points")
    two_r = 2 * Fraction(r)
    fits = np.array([[(q - p <= two_r) if closed else (q - p < two_r) for q in pts] for p in pts])
    # a subset fits in one ball iff its extreme points do
    masks = np.arange(1, 1 << n, dtype=np.int64)
    high = np.frexp(masks.astype(np.float64))[1] - 1
    low = np.frexp((masks & -masks).astype(np.float64))[1] - 1
    feasible = np.zeros(1 << n, dtype=np.bool_)
    feasible[1:] = fits[low, high]
    return kernels.min_cover_count(feasible)


def exhaustive_premeasure(points: Sequence, eps, h: GaugeFunction, scan: bool = False) -> float:
    E = LineSet.points(points)
    eps = Fraction(eps)
    n = exhaustive_count(points, eps)
    best = n * gauge_eval(h, eps) if n else 0.0
    if scan and n:
        for r in critical_radii(E, eps):
            best = min(best, exhaustive_count(points, r, closed=True) * gauge_eval(h, r))
    return best


def hausdorff_trend(E: Union[LineSet, str], h: GaugeFunction, schedule: Sequence, scan: bool = False) -> list:
    sched = [Fraction(e) for e in schedule]
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise ValueError("schedule must be strictly decreasing")
    if isinstance(E, str):
        E = parse_line_set(E)
    return [premeasure(E, e, h, scan=scan, with_cover=False) for e in sched]


def trend_csv(rows: Sequence[PremeasureBound]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "bound", "balls_used"])
    for r in rows:
        w.writerow([f"{float(r.eps):.6e}", f"{r.bound:.15e}", r.balls_used])
    return buf.getvalue()
