"""Outward-rounded interval helpers on top of ``mpmath.iv``.

Every certified comparison in the package goes through :func:`certainly_lt`
and friends, which return ``True``/``False`` only when the answer holds for
every point of the enclosures involved, and ``None`` otherwise.
"""
from __future__ import annotations

import contextlib
import numbers
from fractions import Fraction
from typing import Iterator, Optional, Union

from mpmath import iv, mpf
from mpmath.libmp import to_rational

DEFAULT_BITS = 256

Number = Union[int, float, str, Fraction]


class Undecidable(ArithmeticError):
    """Raised when an enclosure is too wide to decide a comparison."""


@contextlib.contextmanager
def working_bits(bits: int) -> Iterator[None]:
    """Temporarily set the interval context precision (mantissa bits)."""
    saved = iv.prec
    iv.prec = int(bits)
    try:
        yield
    finally:
        iv.prec = saved


def to_iv(x):
    """Enclose a number in an ``iv.mpf`` at the current precision.

    Floats are taken as the exact binary value they hold; Fractions are
    enclosed by outward-rounded division.
    """
    if isinstance(x, iv.mpf):
        return x
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return iv.mpf(x.numerator)
        return iv.mpf(x.numerator) / iv.mpf(x.denominator)
    if isinstance(x, numbers.Integral):
        return iv.mpf(int(x))
    if isinstance(x, (float, str)):
        return iv.mpf(x)
    if isinstance(x, mpf):
        return iv.mpf(x)
    raise TypeError(f"cannot enclose {type(x).__name__}")


def iv_hull(lo, hi):
    return iv.mpf([to_iv(lo).a, to_iv(hi).b])


def lower(x) -> Fraction:
    """Exact rational value of the lower endpoint."""
    return endpoints(x)[0]


def upper(x) -> Fraction:
    return endpoints(x)[1]


def endpoints(x) -> tuple[Fraction, Fraction]:
    a, b = x._mpi_
    pa, qa = to_rational(a)
    pb, qb = to_rational(b)
    return Fraction(int(pa), int(qa)), Fraction(int(pb), int(qb))


def _ends(x):
    if isinstance(x, Fraction):
        return x, x
    if isinstance(x, numbers.Integral):
        return Fraction(int(x)), Fraction(int(x))
    return endpoints(to_iv(x))


def certainly_lt(x, y) -> Optional[bool]:
    """Three-valued ``x < y`` over enclosures (intervals, Fractions or ints)."""
    xa, xb = _ends(x)
    ya, yb = _ends(y)
    if xb < ya:
        return True
    if xa >= yb:
        return False
    return None


def certainly_le(x, y) -> Optional[bool]:
    xa, xb = _ends(x)
    ya, yb = _ends(y)
    if xb <= ya:
        return True
    if xa > yb:
        return False
    return None


def require(flag: Optional[bool], what: str) -> bool:
    if flag is None:
        raise Undecidable(f"undecidable at this precision: {what}")
    return flag


def mid_float(x) -> float:
    a, b = endpoints(to_iv(x))
    return float((a + b) / 2)


def fmt(x, digits: int = 20) -> str:
    """Deterministic text for an interval midpoint."""
    from mpmath import mp, nstr

    with mp.workprec(max(iv.prec, 64)):
        a, b = to_iv(x)._mpi_
        m = (mp.make_mpf(a) + mp.make_mpf(b)) / 2
        return nstr(m, digits, strip_zeros=False)
