"""Exact continued-fraction engine.

Partial quotients, big-integer convergents, certified expansion of interval
enclosures, and runtime checks of the two classical convergent estimates:

* ``Q_n > (1/2) * phi**(n-1)`` (exponential growth of denominators), and
* ``1/(2 Q_n Q_{n+1}) < |nu - P_n/Q_n| < 1/(Q_n Q_{n+1})``.

Irrationals never appear as floats here. They are carried as
:class:`CertifiedReal` enclosures with exact rational endpoints, so every
comparison is either proven or reported as undecidable.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence, Union

from .intervals import DEFAULT_BITS, Undecidable


class CFDepthError(ValueError):
    """A partial quotient could not be produced; ``index`` is the failing n."""

    def __init__(self, index: int, reason: str = ""):
        self.index = index
        super().__init__(f"partial quotient v_{index} unavailable{': ' + reason if reason else ''}")


class NumberSpecError(ValueError):
    pass


# ---------------------------------------------------------------------------
# partial quotients and convergents


@dataclass(frozen=True)
class PartialQuotients:
    """Digits ``[v0; v1, v2, ...]``.

    ``head`` lists v1, v2, ... explicitly. An infinite tail is given either by
    ``period`` (repeated forever after ``head``) or by ``rule``, a
    deterministic map ``n -> v_n`` used for every index beyond ``head``.
    With neither, the expansion is known only up to ``len(head)``.
    """

    v0: int
    head: tuple = ()
    period: tuple = ()
    rule: Optional[Callable[[int], int]] = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        if any(int(v) < 1 for v in self.head) or any(int(v) < 1 for v in self.period):
            raise ValueError("partial quotients v_n (n >= 1) must be positive")
        if self.period and self.rule is not None:
            raise ValueError("give either a period or a rule, not both")
        if self.rule is not None:
            object.__setattr__(self, "_cached_rule", lru_cache(maxsize=None)(self.rule))

    @property
    def known_depth(self) -> Optional[int]:
        """Largest available index, or None for an infinite expansion."""
        if self.period or self.rule is not None:
            return None
        return len(self.head)

    def digit(self, n: int) -> int:
        if n < 0:
            raise IndexError(n)
        if n == 0:
            return int(self.v0)
        if n <= len(self.head):
            return int(self.head[n - 1])
        if self.period:
            return int(self.period[(n - 1 - len(self.head)) % len(self.period)])
        if self.rule is not None:
            try:
                v = self._cached_rule(n)
            except (OverflowError, MemoryError, ValueError) as exc:
                raise CFDepthError(n, str(exc)) from exc
            if v is None:
                raise CFDepthError(n, "generator rule exhausted")
            v = int(v)
            if v < 1:
                raise CFDepthError(n, f"generator produced {v} < 1")
            return v
        raise CFDepthError(n, "finite expansion")

    def take(self, depth: int) -> list[int]:
        """``[v0, ..., v_depth]``."""
        return [self.digit(n) for n in range(depth + 1)]

    def available(self, limit: int) -> int:
        """Largest n <= limit for which v_n can be produced."""
        n = 0
        while n < limit:
            try:
                self.digit(n + 1)
            except CFDepthError:
                break
            n += 1
        return n


@dataclass(frozen=True)
class Convergent:
    n: int
    P: int
    Q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.P, self.Q)


def _as_digits(pq: Union[PartialQuotients, Sequence[int]], depth: int) -> list[int]:
    if isinstance(pq, PartialQuotients):
        return pq.take(depth)
    digits = [int(v) for v in pq]
    if len(digits) < depth + 1:
        raise CFDepthError(len(digits), "sequence too short")
    return digits[: depth + 1]


def convergents(pq: Union[PartialQuotients, Sequence[int]], depth: int) -> list[Convergent]:
    """Convergents ``P_0/Q_0 .. P_depth/Q_depth`` by the three-term recurrence.

    Seeds are ``P_{-1}=1, Q_{-1}=0, P_0=v0, Q_0=1``.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    digits = _as_digits(pq, depth)
    out = []
    p_prev, q_prev = 1, 0
    p, q = digits[0], 1
    out.append(Convergent(0, p, q))
    for n in range(1, depth + 1):
        v = digits[n]
        p, p_prev = v * p + p_prev, p
        q, q_prev = v * q + q_prev, q
        out.append(Convergent(n, p, q))
    return out


def evaluate_finite(digits: Sequence[int]) -> Fraction:
    """Value of the finite fraction ``[v0; v1, ..., vn]`` evaluated bottom-up."""
    x = Fraction(digits[-1])
    for v in reversed(digits[:-1]):
        x = v + 1 / x
    return x


def convergents_csv(convs: Iterable[Convergent]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "P", "Q"])
    for c in convs:
        w.writerow([c.n, c.P, c.Q])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# certified reals


@dataclass(frozen=True)
class CertifiedReal:
    """Open enclosure ``lo < nu < hi`` of an irrational with exact endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if not lo < hi:
            raise ValueError("CertifiedReal needs lo < hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def to_iv(self):
        from .intervals import iv_hull

        return iv_hull(self.lo, self.hi)

    def shift(self, k: int) -> "CertifiedReal":
        return CertifiedReal(self.lo + k, self.hi + k)

    def abs_diff(self, x: Fraction) -> tuple[Fraction, Fraction]:
        """Open enclosure ``(a, b)`` of ``|nu - x|``; raises if ``x`` is inside ``(lo, hi)``."""
        if x <= self.lo:
            return self.lo - x, self.hi - x
        if x >= self.hi:
            return x - self.hi, x - self.lo
        raise Undecidable(f"{x} lies inside the enclosure; refine it")

    def float_with_error(self) -> tuple[float, float]:
        """Nearest float to the midpoint and a rigorous bound on ``|float - nu|``."""
        m = float(self.mid)
        err = max(abs(Fraction(m) - self.lo), abs(self.hi - Fraction(m)))
        e = float(err)
        if Fraction(e) < err:
            e = math.nextafter(e, math.inf)
        return m, e

    @classmethod
    def from_iv(cls, x) -> "CertifiedReal":
        from .intervals import endpoints

        lo, hi = endpoints(x)
        return cls(lo, hi)


def expand_cf(x: CertifiedReal, max_depth: int) -> tuple[PartialQuotients, int]:
    """Longest partial-quotient prefix shared by every number in ``(lo, hi)``.

    Returns the prefix and ``certified_depth``, the number of certified
    digits (``v0`` included). Zero means even ``v0`` is ambiguous.
    """
    lo, hi = x.lo, x.hi
    digits: list[int] = []
    while len(digits) < max_depth:
        a = math.floor(lo)
        if a != math.ceil(hi) - 1:
            break
        if digits and a < 1:
            break
        digits.append(a)
        if lo == a:
            # nu - a ranges down to 0, so the next complete quotient is unbounded
            break
        lo, hi = 1 / (hi - a), 1 / (lo - a)
    if not digits:
        return PartialQuotients(0, ()), 0
    return PartialQuotients(digits[0], tuple(digits[1:])), len(digits)


# ---------------------------------------------------------------------------
# quadratic irrationals


@dataclass(frozen=True)
class QuadraticIrrational:
    """``nu = (a + sqrt(b)) / c``."""

    a: int
    b: int
    c: int
    name: str = ""

    def __post_init__(self):
        if self.c == 0:
            raise NumberSpecError("denominator c must be nonzero")
        if self.b < 2:
            raise NumberSpecError("b must be >= 2")
        r = math.isqrt(self.b)
        if r * r == self.b:
            raise NumberSpecError(f"b={self.b} is a perfect square")

    @property
    def label(self) -> str:
        return self.name or f"quad:{self.a},{self.b},{self.c}"

    def enclosure(self, bits: int = DEFAULT_BITS) -> CertifiedReal:
        k = max(int(bits), 8)
        s = math.isqrt(self.b << (2 * k))
        lo_root, hi_root = Fraction(s, 1 << k), Fraction(s + 1, 1 << k)
        lo = (self.a + lo_root) / self.c
        hi = (self.a + hi_root) / self.c
        if lo > hi:
            lo, hi = hi, lo
        return CertifiedReal(lo, hi)

    def partial_quotients(self, depth: int) -> list[int]:
        return quadratic_cf(self, depth).take(depth)


def _periodic_cf(a: int, b: int, c: int, limit: int = 100000):
    """Pre-period and period of ``(a + sqrt(b))/c`` by the exact (m, d) recursion."""
    # normalise so that c divides b - a^2
    if (b - a * a) % c != 0:
        a, b, c = a * abs(c), b * c * c, c * abs(c)
    r = math.isqrt(b)
    m, d = a, c
    seen: dict[tuple[int, int], int] = {}
    digits: list[int] = []
    for i in range(limit):
        key = (m, d)
        if key in seen and i > 0:
            start = seen[key]
            return digits[:start], digits[start:]
        seen[key] = i
        if d > 0:
            v = (m + r) // d
        else:
            v = -((m + r) // -d) - 1
        digits.append(v)
        m = v * d - m
        d = (b - m * m) // d
    raise RuntimeError("period not found")  # pragma: no cover


def quadratic_cf(spec: QuadraticIrrational, depth: Optional[int] = None) -> PartialQuotients:
    """Exact periodic expansion of a quadratic irrational (integer arithmetic only)."""
    pre, per = _periodic_cf(spec.a, spec.b, spec.c)
    v0 = pre[0] if pre else per[0]
    rest_pre = pre[1:] if pre else []
    if pre:
        return PartialQuotients(v0, tuple(rest_pre), tuple(per), name=spec.label)
    # purely periodic: v0 is part of the period
    head = tuple(per[1:])
    return PartialQuotients(v0, head, tuple(per), name=spec.label)


# ---------------------------------------------------------------------------
# explicit expansions and interval inputs


def _e_rule(n: int) -> int:
    return 2 * (n + 1) // 3 if n % 3 == 2 else 1


def e_pattern() -> PartialQuotients:
    """``e = [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]``."""
    return PartialQuotients(2, (), (), rule=_e_rule, name="e")


@dataclass(frozen=True)
class ExplicitCF:
    pq: PartialQuotients
    name: str = ""

    @property
    def label(self) -> str:
        return self.name or self.pq.name or "cf"

    def partial_quotients(self, depth: int) -> list[int]:
        return self.pq.take(depth)

    def enclosure(self, bits: int = DEFAULT_BITS) -> CertifiedReal:
        """Enclosure from consecutive convergents.

        The true value sits strictly between ``P_D/Q_D`` and
        ``(P_D + P_{D-1})/(Q_D + Q_{D-1})`` whatever the unknown tail is, so a
        finite or failing expansion still yields a valid (possibly wide)
        enclosure.
        """
        target = Fraction(1, 1 << int(bits))
        p_prev, q_prev = 1, 0
        p, q = self.pq.digit(0), 1
        n = 0
        limit = self.pq.known_depth
        while True:
            width = Fraction(1, q * (q + q_prev))
            if width < target:
                break
            if limit is not None and n >= limit:
                break
            try:
                v = self.pq.digit(n + 1)
            except CFDepthError:
                break
            p, p_prev = v * p + p_prev, p
            q, q_prev = v * q + q_prev, q
            n += 1
        a, b = Fraction(p, q), Fraction(p + p_prev, q + q_prev)
        return CertifiedReal(min(a, b), max(a, b))


@dataclass(frozen=True)
class IntervalApprox:
    x: CertifiedReal
    name: str = ""

    @property
    def label(self) -> str:
        return self.name or f"interval:{self.x.lo},{self.x.hi}"

    def enclosure(self, bits: int = DEFAULT_BITS) -> CertifiedReal:
        return self.x

    def partial_quotients(self, depth: int) -> list[int]:
        pq, got = expand_cf(self.x, depth + 1)
        if got < depth + 1:
            raise CFDepthError(got, "enclosure too wide")
        return pq.take(depth)


NumberSpec = Union[QuadraticIrrational, ExplicitCF, IntervalApprox]


def number_convergents(nu: NumberSpec, depth: int) -> list[Convergent]:
    if isinstance(nu, QuadraticIrrational):
        return convergents(quadratic_cf(nu), depth)
    if isinstance(nu, ExplicitCF):
        return convergents(nu.pq, depth)
    return convergents(nu.partial_quotients(depth), depth)


NAMED = {
    "golden": "quad:1,5,2",
    "sqrt2": "quad:0,2,1",
    "sqrt3": "quad:0,3,1",
    "sqrt7": "quad:0,7,1",
}


def parse_number(text: str) -> NumberSpec:
    """Parse ``quad:a,b,c``, ``cf:v0;v1,v2,...[;repeat:w1,...]``,
    ``interval:lo,hi`` or a named constant (``golden``, ``sqrt2``, ``e``, ...).
    """
    text = text.strip()
    if text in NAMED:
        spec = parse_number(NAMED[text])
        return QuadraticIrrational(spec.a, spec.b, spec.c, name=text)
    if text == "e":
        return ExplicitCF(e_pattern(), name="e")
    kind, sep, body = text.partition(":")
    if not sep:
        raise NumberSpecError(f"malformed number spec {text!r}")
    try:
        if kind == "quad":
            a, b, c = (int(t) for t in body.split(","))
            return QuadraticIrrational(a, b, c)
        if kind == "cf":
            parts = body.split(";")
            v0 = int(parts[0])
            head: tuple = ()
            period: tuple = ()
            for part in parts[1:]:
                part = part.strip()
                if not part:
                    continue
                if part.startswith("repeat:"):
                    period = tuple(int(t) for t in part[len("repeat:"):].split(","))
                else:
                    head = tuple(int(t) for t in part.split(","))
            return ExplicitCF(PartialQuotients(v0, head, period), name=text)
        if kind == "interval":
            lo, hi = (Fraction(t.strip()) for t in body.split(","))
            return IntervalApprox(CertifiedReal(lo, hi), name=text)
        if kind == "liouville":
            from .diophantine import ConditionParams, liouville_constructor

            beta, gamma = (float(t) for t in body.split(","))
            pq, _ = liouville_constructor(ConditionParams(beta, gamma), "DIVERGE", 8)
            return ExplicitCF(pq, name=text)
    except (ValueError, ZeroDivisionError) as exc:
        raise NumberSpecError(f"malformed number spec {text!r}: {exc}") from exc
    raise NumberSpecError(f"unknown number kind {kind!r} in {text!r}")


# ---------------------------------------------------------------------------
# property checks


def _fib_lucas(m: int) -> tuple[int, int]:
    f0, f1 = 0, 1
    for _ in range(m):
        f0, f1 = f1, f0 + f1
    # L_m = F_{m-1} + F_{m+1} = 2 F_{m+1} - F_m
    return f0, 2 * f1 - f0


def growth_bound_holds(n: int, Q: int) -> bool:
    """Exact test of ``Q > (1/2) phi**(n-1)`` for n >= 1.

    With ``phi**m = (L_m + F_m sqrt5)/2`` the claim is
    ``4Q - L_m > F_m sqrt5``, decided in integers.
    """
    m = n - 1
    F, L = _fib_lucas(m)
    lhs = 4 * Q - L
    return lhs > 0 and lhs * lhs > 5 * F * F


def check_growth_bound(convs: Sequence[Convergent]) -> list[bool]:
    if not convs:
        raise ValueError("empty convergent list")
    return [growth_bound_holds(c.n, c.Q) for c in convs if c.n >= 1]


@dataclass(frozen=True)
class GapReport:
    lo: Fraction
    hi: Fraction
    lower_bound: Fraction
    upper_bound: Fraction
    verdict: bool


def approximation_gap(nu: CertifiedReal, c: Convergent, Q_next: int) -> GapReport:
    """Enclose ``|nu - P_n/Q_n|`` and test ``1/(2QQ') < gap < 1/(QQ')``."""
    # the enclosure is open, so glo < gap < ghi strictly
    glo, ghi = nu.abs_diff(c.value)
    lb = Fraction(1, 2 * c.Q * Q_next)
    ub = Fraction(1, c.Q * Q_next)
    if lb <= glo and ghi <= ub:
        return GapReport(glo, ghi, lb, ub, True)
    if ghi <= lb or glo >= ub:
        return GapReport(glo, ghi, lb, ub, False)
    raise Undecidable(
        f"gap enclosure [{float(glo):.3e}, {float(ghi):.3e}] straddles a bound at n={c.n}"
    )
