"""Brjuno-type Diophantine series and the small-denominator function.

Partial sums of ``sum ln^beta(Q_{n+1}) / Q_n^gamma`` (the A(beta, gamma)
condition, Brjuno when beta = gamma = 1), the function
``Psi(Q) = max |k.omega|^{-1}`` both by lattice enumeration and through
convergents, the alpha-Brjuno-Russmann sum ``sum_Q ln Psi(Q) / Q^(1+1/alpha)``,
numeric checks of the comparison chain linking that sum to A(1, 1 + 1/alpha)
and of the Holder splitting used to trade gamma for 2 + eps, and a factory
for numbers with prescribed divergence.

All sums are accumulated as outward-rounded intervals in a fixed order.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from mpmath import iv, mp

from . import kernels
from .cf import (
    CertifiedReal,
    CFDepthError,
    Convergent,
    ExplicitCF,
    NumberSpec,
    PartialQuotients,
    QuadraticIrrational,
    number_convergents,
)
from .intervals import (
    DEFAULT_BITS,
    Undecidable,
    certainly_le,
    certainly_lt,
    endpoints,
    fmt,
    to_iv,
    working_bits,
)

CONVERGENT_TREND = "CONVERGENT-TREND"
DIVERGENT_TREND = "DIVERGENT-TREND"
CERTIFIED_DIVERGENT = "CERTIFIED-DIVERGENT"
INCONCLUSIVE = "INCONCLUSIVE"

# growth diagnostic thresholds on (S_N - S_{N/2}) / S_{N/2}
CONVERGENT_RATIO = 0.05
DIVERGENT_RATIO = 0.5


class ResonanceError(ArithmeticError):
    """Some nonzero lattice vector has ``k.omega`` equal to, or not separable from, 0."""


# ---------------------------------------------------------------------------
# parameters


def max_admissible_delta(epsilon: float) -> Fraction:
    """Largest delta with ``(1 - delta)(2 + eps) >= 2 + eps/4``."""
    e = Fraction(epsilon)
    return (3 * e / 4) / (2 + e)


@dataclass(frozen=True)
class ConditionParams:
    beta: float
    gamma: float
    epsilon: float = 0.1
    delta: Optional[float] = None

    def __post_init__(self):
        if not (self.beta > 0 and self.gamma > 0 and self.epsilon > 0):
            raise ValueError("beta, gamma and epsilon must be positive")
        dmax = max_admissible_delta(self.epsilon)
        if self.delta is None:
            object.__setattr__(self, "delta", float(dmax / 2))
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if Fraction(self.delta) > dmax:
            raise ValueError(
                f"delta={self.delta} violates (1-delta)(2+eps) >= 2+eps/4 (max {float(dmax):.6g})"
            )

    @classmethod
    def br_alpha(cls, alpha: float, epsilon: float = 0.1, delta=None) -> "ConditionParams":
        """beta = 1, gamma = 1 + 1/alpha."""
        if alpha < 1:
            raise ValueError("alpha must be >= 1")
        return cls(1.0, 1.0 + 1.0 / alpha, epsilon, delta)

    def as_dict(self) -> dict:
        return {"beta": self.beta, "gamma": self.gamma, "epsilon": self.epsilon, "delta": self.delta}


# ---------------------------------------------------------------------------
# series reports


@dataclass
class SeriesReport:
    name: str
    indices: list
    terms: list
    partial_sums: list
    tag: str
    growth_ratio: float
    params: dict = field(default_factory=dict)
    certificate: Optional[str] = None
    notes: list = field(default_factory=list)

    @property
    def total(self):
        return self.partial_sums[-1] if self.partial_sums else to_iv(0)

    def to_csv(self, digits: int = 30) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "term", "partial_sum"])
        for n, t, s in zip(self.indices, self.terms, self.partial_sums):
            w.writerow([n, fmt(t, digits), fmt(s, digits)])
        return buf.getvalue()

    def to_json(self, digits: int = 30) -> str:
        def enc(x):
            a, b = x._mpi_
            return [mp.nstr(mp.make_mpf(a), digits), mp.nstr(mp.make_mpf(b), digits)]

        with mp.workprec(max(iv.prec, 64)):
            payload = {
                "name": self.name,
                "classification": self.tag,
                "growth_ratio": round(self.growth_ratio, 12) if math.isfinite(self.growth_ratio) else None,
                "params": self.params,
                "certificate": self.certificate,
                "notes": self.notes,
                "terms": [{"n": n, "term": enc(t), "partial_sum": enc(s)}
                          for n, t, s in zip(self.indices, self.terms, self.partial_sums)],
            }
        return json.dumps(payload, indent=2, sort_keys=True)


def growth_ratio(partial_sums: Sequence) -> float:
    """``(S_N - S_{N//2}) / S_{N//2}`` on interval midpoints."""
    n = len(partial_sums)
    if n < 2:
        return math.nan
    head = float(partial_sums[n // 2 - 1].mid)
    tail = float(partial_sums[-1].mid) - head
    if head <= 0:
        return math.inf if tail > 0 else math.nan
    return tail / head


def classify_trend(ratio: float) -> str:
    if math.isnan(ratio):
        return INCONCLUSIVE
    if ratio < CONVERGENT_RATIO:
        return CONVERGENT_TREND
    if ratio > DIVERGENT_RATIO:
        return DIVERGENT_TREND
    return INCONCLUSIVE


def _accumulate(terms):
    sums = []
    s = to_iv(0)
    for t in terms:
        s = s + t
        sums.append(s)
    return sums


# ---------------------------------------------------------------------------
# A(beta, gamma) and Brjuno


def _a_terms(convs: Sequence[Convergent], beta, gamma, N: int):
    if N < 1:
        raise ValueError("N must be >= 1")
    if len(convs) < N + 2:
        raise CFDepthError(N + 1, f"need convergents through Q_{N + 1}, have depth {len(convs) - 1}")
    b, g = to_iv(beta), to_iv(gamma)
    out = []
    for n in range(1, N + 1):
        Qn, Qn1 = convs[n].Q, convs[n + 1].Q
        if Qn < 1:
            raise ValueError("denominators must be >= 1")
        out.append(iv.log(to_iv(Qn1)) ** b / to_iv(Qn) ** g)
    return out


def a_series_partial(
    convs: Sequence[Convergent],
    params: ConditionParams,
    N: int,
    bits: int = DEFAULT_BITS,
    certificate: Optional["LiouvilleCertificate"] = None,
) -> SeriesReport:
    """Partial sums ``S_N = sum_{n=1}^N ln^beta(Q_{n+1}) / Q_n^gamma``.

    A ``certificate`` from :func:`liouville_constructor` (DIVERGE mode, same
    beta and gamma) upgrades the tag to CERTIFIED-DIVERGENT once every term is
    verified to be at least 1.
    """
    with working_bits(bits):
        terms = _a_terms(convs, params.beta, params.gamma, N)
        sums = _accumulate(terms)
        ratio = growth_ratio(sums)
        tag = classify_trend(ratio)
        cert_text = None
        if certificate is not None and certificate.mode == "DIVERGE":
            if (certificate.beta, certificate.gamma) == (params.beta, params.gamma):
                if all(certainly_le(1, t) for t in terms):
                    tag = CERTIFIED_DIVERGENT
                    cert_text = certificate.claim
        return SeriesReport(
            name="A(beta,gamma)",
            indices=list(range(1, N + 1)),
            terms=terms,
            partial_sums=sums,
            tag=tag,
            growth_ratio=ratio,
            params=params.as_dict(),
            certificate=cert_text,
        )


def brjuno_partial(convs: Sequence[Convergent], N: int, bits: int = DEFAULT_BITS,
                   certificate=None) -> SeriesReport:
    rep = a_series_partial(convs, ConditionParams(1.0, 1.0), N, bits, certificate)
    rep.name = "Brjuno"
    return rep


# ---------------------------------------------------------------------------
# Psi through convergents


@dataclass(frozen=True)
class PsiValue:
    lo: Fraction
    hi: Fraction
    n: int
    k: tuple

    def to_iv(self):
        return iv.mpf([to_iv(self.lo).a, to_iv(self.hi).b])


class _PsiTable:
    """Convergents and per-segment Psi enclosures of one number, grown on demand."""

    def __init__(self, nu: NumberSpec, bits: int):
        self.nu = nu
        self.bits = bits
        self.x = nu.enclosure(bits)
        self.convs: list[Convergent] = []
        self._psi: dict[int, PsiValue] = {}
        self._pq = _partial_quotient_source(nu)

    def ensure(self, Q: int) -> None:
        """Extend convergents until the last denominator exceeds Q, or digits run out."""
        if not self.convs:
            self.convs.append(Convergent(0, self._pq(0), 1))
            self._prev = (1, 0)
        while self.convs[-1].Q <= Q:
            n = len(self.convs)
            try:
                v = self._pq(n)
            except CFDepthError:
                break
            c = self.convs[-1]
            p_prev, q_prev = self._prev
            self.convs.append(Convergent(n, v * c.P + p_prev, v * c.Q + q_prev))
            self._prev = (c.P, c.Q)

    def segment(self, Q: int, boundary: str) -> int:
        self.ensure(Q)
        qs = [c.Q for c in self.convs]
        if boundary == "strict":
            if Q == 1:
                return 0
            return max(i for i, q in enumerate(qs) if q < Q)
        if boundary == "closed":
            return max(i for i, q in enumerate(qs) if q <= Q)
        raise ValueError("boundary must be 'strict' or 'closed'")

    def psi_n(self, n: int) -> PsiValue:
        if n not in self._psi:
            c = self.convs[n]
            glo, ghi = self.x.abs_diff(c.value)
            self._psi[n] = PsiValue(1 / (c.Q * ghi), 1 / (c.Q * glo), n, (-c.P, c.Q))
        return self._psi[n]


def _partial_quotient_source(nu: NumberSpec):
    if isinstance(nu, QuadraticIrrational):
        from .cf import quadratic_cf

        return quadratic_cf(nu).digit
    if isinstance(nu, ExplicitCF):
        return nu.pq.digit
    cache: dict = {}

    def digit(n):
        if "pq" not in cache or cache["depth"] <= n:
            from .cf import expand_cf

            pq, got = expand_cf(nu.x, 10_000)
            cache["pq"], cache["depth"] = pq, got
        if n >= cache["depth"]:
            raise CFDepthError(n, "enclosure too wide")
        return cache["pq"].digit(n)

    return digit


@lru_cache(maxsize=64)
def _psi_table(nu: NumberSpec, bits: int) -> _PsiTable:
    return _PsiTable(nu, bits)


def psi_cf(nu: NumberSpec, Q: int, boundary: str = "strict", bits: int = DEFAULT_BITS) -> PsiValue:
    """Enclosure of ``Psi(Q) = |nu Q_n - P_n|^{-1}`` for the segment holding Q.

    ``boundary="strict"`` takes the largest n with ``Q_n < Q`` (Q = 1 maps to
    n = 0). This is what the lattice definition with ``0 < |k| < Q`` gives.
    ``boundary="closed"`` takes the largest n with ``Q_n <= Q``, so that
    ``Psi(Q_n) = |nu Q_n - P_n|^{-1}``.
    """
    if Q < 1:
        raise ValueError("Q must be a positive integer")
    table = _psi_table(nu, int(bits))
    n = table.segment(Q, boundary)
    return table.psi_n(n)


# ---------------------------------------------------------------------------
# Psi by lattice enumeration


@dataclass(frozen=True)
class VectorSpec:
    """Frequency vector; each component is an exact Fraction or a CertifiedReal."""

    components: tuple

    def __post_init__(self):
        if len(self.components) < 2:
            raise ValueError("dimension must be >= 2")
        comps = tuple(c if isinstance(c, CertifiedReal) else Fraction(c) for c in self.components)
        object.__setattr__(self, "components", comps)

    @classmethod
    def one_nu(cls, nu: NumberSpec, bits: int = DEFAULT_BITS) -> "VectorSpec":
        """``omega = (1, nu)``."""
        return cls((Fraction(1), nu.enclosure(bits)))

    def floats(self) -> tuple[list[float], list[float]]:
        vals, errs = [], []
        for c in self.components:
            if isinstance(c, CertifiedReal):
                m, e = c.float_with_error()
            else:
                m = float(c)
                e = abs(float(Fraction(m) - c))
                e = math.nextafter(e, math.inf) if e else 0.0
            vals.append(m)
            errs.append(e)
        return vals, errs

    def dot_enclosure(self, k: Sequence[int]) -> tuple[Fraction, Fraction]:
        """Exact rational enclosure of ``k.omega``."""
        lo = hi = Fraction(0)
        for ki, c in zip(k, self.components):
            if isinstance(c, CertifiedReal):
                a, b = ki * c.lo, ki * c.hi
                lo += min(a, b)
                hi += max(a, b)
            else:
                lo += ki * c
                hi += ki * c
        return lo, hi


@dataclass(frozen=True)
class PsiBrute:
    lo: Fraction
    hi: Fraction
    k: tuple
    norm: str

    def to_iv(self):
        return iv.mpf([to_iv(self.lo).a, to_iv(self.hi).b])


_NORMS = {"sup": kernels.NORM_SUP, "l1": kernels.NORM_L1, "tail": kernels.NORM_TAIL}


def _abs_enclosure(lo: Fraction, hi: Fraction):
    if lo > 0:
        return lo, hi
    if hi < 0:
        return -hi, -lo
    return None


def _candidates_nd(vals, kmax, norm, slack):
    import itertools

    import numpy as np

    n = len(vals)
    rng = range(-kmax, kmax + 1)
    ks = np.array(list(itertools.product(rng, repeat=n)), dtype=np.int64)
    if norm == "sup":
        mask = np.ones(len(ks), dtype=bool)
    elif norm == "l1":
        mask = np.abs(ks).sum(axis=1) <= kmax
    else:
        raise ValueError("the 'tail' norm is only enumerated for dimension 2")
    # canonical sign: first nonzero component positive
    nz = ks != 0
    first = np.argmax(nz, axis=1)
    lead = ks[np.arange(len(ks)), first]
    mask &= nz.any(axis=1) & (lead > 0)
    ks = ks[mask]
    v = np.abs(ks @ np.asarray(vals, dtype=np.float64))
    best = float(v.min())
    keep = ks[v <= best + slack]
    return best, keep


def psi_bruteforce(omega: VectorSpec, Q: int, norm: str = "sup", bits: int = DEFAULT_BITS) -> PsiBrute:
    """``max{|k.omega|^{-1} : k in Z^n, 0 < |k| < Q}`` by exhaustive enumeration.

    ``norm`` is ``"sup"`` (default), ``"l1"``, or ``"tail"``; the last
    measures only components 2..n (``max_i>=2 |k_i|``), leaving ``k_1`` free,
    which for ``omega = (1, nu)`` bounds the denominator of ``k_1 + k_2 nu``.
    Returns the enclosure and a maximising ``k`` normalised up to sign.
    """
    if norm not in _NORMS:
        raise ValueError(f"unknown norm {norm!r}")
    n = len(omega.components)
    if n > 4 or Q > 10_000:
        raise ValueError("enumeration budget is n <= 4 and Q <= 10^4")
    if Q < 2:
        raise ValueError("Psi(1) is a maximum over the empty set")
    kmax = Q - 1
    vals, errs = omega.floats()
    # uniform float error bound over the search box
    if norm == "tail":
        reach = [abs(vals[1]) * kmax / abs(vals[0]) + 2] + [kmax] * (n - 1)
    else:
        reach = [kmax] * n
    bound = sum(r * (e + 4 * kernels.UNIT * abs(v)) for r, e, v in zip(reach, errs, vals))
    bound += (n + 2) * kernels.UNIT * sum(r * abs(v) for r, v in zip(reach, vals))
    slack = 2.0 * bound
    if n == 2:
        _, cands = kernels.lattice_candidates_2d(vals[0], vals[1], kmax, _NORMS[norm], slack)
    else:
        _, cands = _candidates_nd(vals, kmax, norm, slack)
    best = None
    for k in cands:
        k = tuple(int(t) for t in k)
        enc = _abs_enclosure(*omega.dot_enclosure(k))
        if enc is None:
            raise ResonanceError(f"k={k} gives k.omega = 0 within precision")
        key = (enc[1], enc[0], k)
        if best is None or key < best[0]:
            best = (key, enc, k)
    assert best is not None
    (_, (alo, ahi), k) = best
    # the minimum of |k.omega| lies in [min lower, min upper] over candidates
    min_lo = min(_abs_enclosure(*omega.dot_enclosure(tuple(int(t) for t in c)))[0] for c in cands)
    return PsiBrute(1 / ahi, 1 / min_lo, k, norm)


# ---------------------------------------------------------------------------
# alpha-Brjuno-Russmann sum


def _power_sum(a: int, b: int, s, bits: int):
    """Enclosure of ``sum_{Q=a}^{b} Q^{-s}``."""
    if b < a:
        return to_iv(0)
    si = to_iv(s)
    if b - a < 4000:
        tot = to_iv(0)
        for Q in range(a, b + 1):
            tot = tot + to_iv(Q) ** (-si)
        return tot
    # Hurwitz zeta difference at higher working precision, widened by its accuracy
    with mp.workprec(bits + 64):
        sm = mp.mpf(s) if not isinstance(s, Fraction) else mp.mpf(s.numerator) / s.denominator
        val = mp.zeta(sm, a) - mp.zeta(sm, b + 1)
        rad = abs(val) * mp.mpf(2) ** (-(bits + 16))
        lo, hi = val - rad, val + rad
    return iv.mpf([lo, hi])


def br_alpha_partial(
    nu: NumberSpec,
    alpha: float,
    Qmax: int,
    bits: int = DEFAULT_BITS,
    boundary: str = "strict",
) -> SeriesReport:
    """``sum_{Q=1}^{Qmax} ln Psi(Q) / Q^(1 + 1/alpha)`` via Psi through convergents.

    Psi is constant on each convergent segment, so the sum is accumulated per
    segment: term n is ``ln Psi_n * sum_{Q in segment n} Q^-s``. Signed log
    values are kept as they are.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    s = 1 + Fraction(1) / Fraction(alpha)
    table = _psi_table(nu, int(bits))
    table.ensure(Qmax)
    qs = [c.Q for c in table.convs]
    with working_bits(bits):
        terms, indices, ranges = [], [], []
        for n in range(len(qs)):
            if boundary == "strict":
                a = 1 if n == 0 else qs[n] + 1
                b = qs[n + 1] if n + 1 < len(qs) else Qmax
            else:
                a = qs[n]
                b = qs[n + 1] - 1 if n + 1 < len(qs) else Qmax
            b = min(b, Qmax)
            if a > b:
                continue
            psi = table.psi_n(n)
            lnpsi = iv.log(psi.to_iv())
            terms.append(lnpsi * _power_sum(a, b, s, bits))
            indices.append(n)
            ranges.append((a, b))
        sums = _accumulate(terms)
        ratio = growth_ratio(sums)
        return SeriesReport(
            name="alpha-Brjuno-Russmann",
            indices=indices,
            terms=terms,
            partial_sums=sums,
            tag=classify_trend(ratio),
            growth_ratio=ratio,
            params={"alpha": alpha, "Qmax": Qmax, "boundary": boundary, "number": nu.label},
            notes=[f"segment {n}: Q in [{a}, {b}]" for n, (a, b) in zip(indices, ranges)],
        )


@dataclass
class ChainResult:
    verified: bool
    lhs: object
    rhs: object
    N: int
    alpha: float
    Qmax: int


def proposition_chain_check(nu: NumberSpec, alpha: float, N: int, bits: int = DEFAULT_BITS) -> ChainResult:
    """Check ``sum_{Q<=Q_N} ln Psi(Q)/Q^s > sum_{n=1}^N ln Q_{n+1}/Q_n^s``, s = 1 + 1/alpha.

    Psi uses the closed segment convention so that the Q = Q_n term of the
    left side dominates the n-th term on the right.
    """
    convs = number_convergents(nu, N + 1)
    Qmax = convs[N].Q
    lhs = br_alpha_partial(nu, alpha, Qmax, bits, boundary="closed").total
    with working_bits(bits):
        rhs = _accumulate(_a_terms(convs, 1, 1 + Fraction(1) / Fraction(alpha), N))[-1]
        verdict = certainly_lt(rhs, lhs)
    if verdict is None:
        raise Undecidable(f"proposition chain for {nu.label}, alpha={alpha}, N={N}")
    return ChainResult(verdict, lhs, rhs, N, alpha, Qmax)


# ---------------------------------------------------------------------------
# Holder splitting


@dataclass
class HolderResult:
    verified: bool
    tight: bool
    lhs: object
    rhs: object
    first_factor: object
    second_factor: object


def holder_check(convs: Sequence[Convergent], params: ConditionParams, N: int,
                 bits: int = DEFAULT_BITS) -> HolderResult:
    """Both sides of the Holder bound that trades gamma for 2 + eps.

    ``LHS = sum ln^b Q_{n+1}/Q_n^g`` and
    ``RHS = (sum ln^{b(2+e)/g} Q_{n+1} / Q_n^{(1-d)(2+e)})^{g/(2+e)}
            * (sum Q_n^{-d g (2+e)/(2+e-g)})^{(2+e-g)/(2+e)}``.

    ``tight`` marks the case where the enclosures overlap within working
    precision (a single-term sum is always an exact equality).
    """
    b, g = params.beta, params.gamma
    e, d = params.epsilon, params.delta
    if not g < 2 + e:
        raise ValueError("the Holder split needs gamma < 2 + eps")
    if Fraction(d) > max_admissible_delta(e):
        raise ValueError("delta violates (1-delta)(2+eps) >= 2+eps/4")
    if len(convs) < N + 2:
        raise CFDepthError(N + 1, "need convergents through Q_{N+1}")
    with working_bits(bits):
        B, G, E, D = to_iv(b), to_iv(g), to_iv(e), to_iv(d)
        two_e = 2 + E
        p_exp = B * two_e / G
        q1_exp = (1 - D) * two_e
        q2_exp = D * G * two_e / (two_e - G)
        lhs = to_iv(0)
        s1 = to_iv(0)
        s2 = to_iv(0)
        for n in range(1, N + 1):
            Qn, Qn1 = to_iv(convs[n].Q), to_iv(convs[n + 1].Q)
            ln1 = iv.log(Qn1)
            lhs = lhs + ln1**B / Qn**G
            s1 = s1 + ln1**p_exp / Qn**q1_exp
            s2 = s2 + Qn ** (-q2_exp)
        f1 = s1 ** (G / two_e)
        f2 = s2 ** ((two_e - G) / two_e)
        rhs = f1 * f2
        verdict = certainly_le(lhs, rhs)
        tight = False
        if verdict is None:
            diff = rhs - lhs
            width = to_iv(2) ** (-(bits - 16))
            lo_d, hi_d = endpoints(diff)
            tol = endpoints(width * abs(rhs))[1]
            if -tol <= lo_d and hi_d <= tol:
                verdict, tight = True, True
            else:
                raise Undecidable("Holder sides overlap beyond working precision")
    return HolderResult(verdict, tight, lhs, rhs, f1, f2)


# ---------------------------------------------------------------------------
# test numbers with prescribed behaviour


@dataclass(frozen=True)
class LiouvilleCertificate:
    mode: str
    beta: float
    gamma: float
    depth: int
    claim: str
    requested_depth: int


def _growth_quotient(Q: int, beta: float, gamma: float, max_bits: int) -> Optional[int]:
    """``ceil(exp(Q^(gamma/beta)) / Q)`` rounded up safely, or None if too large."""
    ratio = Fraction(gamma) / Fraction(beta)
    # exponent estimate in bits; refuse before allocating
    est = (Q ** float(ratio)) / math.log(2)
    if est > max_bits:
        return None
    prec = int(est) + 64
    with working_bits(prec):
        x = to_iv(Q) ** (to_iv(ratio.numerator) / to_iv(ratio.denominator))
        val = iv.exp(x) / to_iv(Q)
        _, hi = endpoints(val)
    return max(1, math.ceil(hi))


def liouville_constructor(params: ConditionParams, mode: str = "DIVERGE", depth: int = 6,
                          max_bits: int = 1 << 22) -> tuple[PartialQuotients, LiouvilleCertificate]:
    """Partial quotients violating (DIVERGE) or satisfying (CONVERGE) the A(beta, gamma) series.

    DIVERGE starts from ``[0; 1, ...]`` (Q_1 = 1) and picks
    ``v_{n+1} = ceil(exp(Q_n^(gamma/beta)) / Q_n)`` so that
    ``Q_{n+1} >= v_{n+1} Q_n >= exp(Q_n^(gamma/beta))``, hence every term
    ``ln^beta(Q_{n+1}) / Q_n^gamma >= 1``. Construction stops when the next
    quotient would need more than ``max_bits`` bits; the certificate records
    the depth actually reached. Digits past that depth raise CFDepthError.
    """
    mode = mode.upper()
    if mode == "CONVERGE":
        pq = PartialQuotients(0, (), (1,), name="converge")
        cert = LiouvilleCertificate(mode, params.beta, params.gamma, depth,
                                    "bounded partial quotients (all 1): Q_n >= phi^(n-1)/2, terms decay geometrically",
                                    depth)
        return pq, cert
    if mode != "DIVERGE":
        raise ValueError("mode must be DIVERGE or CONVERGE")
    digits = [1]
    q_prev, q = 1, 1
    n = 1
    while n < depth:
        v = _growth_quotient(q, params.beta, params.gamma, max_bits)
        if v is None:
            break
        digits.append(v)
        q, q_prev = v * q + q_prev, q
        n += 1
    reached = n

    def beyond(k: int, _reached=reached):
        raise CFDepthError(k, f"growth rule exceeds {max_bits} bits past depth {_reached}")

    pq = PartialQuotients(0, tuple(digits), (), rule=beyond,
                          name=f"liouville(beta={params.beta},gamma={params.gamma})")
    claim = (f"ln^{params.beta} Q_(n+1) >= Q_n^{params.gamma} for 1 <= n <= {reached - 1}"
             f" since Q_(n+1) >= v_(n+1) Q_n >= exp(Q_n^(gamma/beta))")
    return pq, LiouvilleCertificate(mode, params.beta, params.gamma, reached, claim, depth)
