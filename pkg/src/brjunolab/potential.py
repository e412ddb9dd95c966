"""Logarithmic-kernel potentials of the Farey measure.

The measure is ``mu = sum_{q>=2} sum_{p=1}^{q-1} delta_{p/q} / q^(2+eps/4)``,
truncated at ``q <= Qmax``. Its potential with kernel ``|ln|z - xi||^sigma``
at an irrational point dominates the sub-series over the convergents of that
point, which is where divergence comes from for numbers violating the
A(beta, gamma) condition. This module evaluates truncated potentials with
certified enclosures, the convergent lower-bound series, and scans over
increasing truncations.

Float sums carry a priori IEEE error bounds (see :mod:`brjunolab.kernels`);
atoms too close to the evaluation point for those bounds are redone in
interval arithmetic from the exact rational data.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from mpmath import iv

from . import kernels
from .cf import CertifiedReal, convergents, expand_cf, number_convergents
from .diophantine import ConditionParams, SeriesReport, _accumulate, growth_ratio, classify_trend
from .intervals import DEFAULT_BITS, Undecidable, certainly_le, certainly_lt, endpoints, to_iv, working_bits

UNIT = kernels.UNIT


@dataclass(frozen=True)
class LogKernel:
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def __call__(self, z: float, xi: float) -> float:
        if z == xi:
            return math.inf
        return abs(math.log(abs(z - xi))) ** self.sigma


@dataclass(frozen=True)
class PotentialValue:
    lo: float
    hi: float
    infinite: bool = False

    @property
    def value(self) -> float:
        return math.inf if self.infinite else 0.5 * (self.lo + self.hi)

    @classmethod
    def inf(cls) -> "PotentialValue":
        return cls(math.inf, math.inf, True)


@dataclass
class DiscreteMeasure:
    """Atoms at exact rationals ``num/den`` (coalesced, sorted) with float weights.

    ``weight_rel_err`` bounds the relative error of every stored weight.
    """

    num: np.ndarray
    den: np.ndarray
    weights: np.ndarray
    weight_rel_err: float = 4 * UNIT
    label: str = ""

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")

    @classmethod
    def from_atoms(cls, atoms: Sequence[tuple], label: str = "") -> "DiscreteMeasure":
        merged: dict[Fraction, float] = {}
        for x, w in atoms:
            x = Fraction(x)
            merged[x] = merged.get(x, 0.0) + float(w)
        keys = sorted(merged)
        return cls(
            np.array([k.numerator for k in keys], dtype=np.int64),
            np.array([k.denominator for k in keys], dtype=np.int64),
            np.array([merged[k] for k in keys], dtype=np.float64),
            (len(atoms) + 4) * UNIT,
            label,
        )

    @property
    def points(self) -> np.ndarray:
        return self.num / self.den

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)

    def __len__(self) -> int:
        return len(self.weights)

    def atom(self, i: int) -> Fraction:
        return Fraction(int(self.num[i]), int(self.den[i]))


def farey_exponent(epsilon: float) -> float:
    return 2.0 + epsilon / 4.0


def farey_measure(Qmax: int, epsilon: float = 0.1, coprime_only: bool = False) -> DiscreteMeasure:
    """Truncated Farey measure with atoms at ``p/q``, ``1 <= p < q <= Qmax``.

    Non-reduced fractions are kept and coalesce into their reduced point, so
    the atom at ``a/b`` carries ``b^-s * sum_{m <= Qmax/b} m^-s``. With
    ``coprime_only`` only reduced fractions contribute.
    """
    if Qmax < 2:
        raise ValueError("Qmax must be >= 2")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    s = farey_exponent(epsilon)
    nums, dens, ws = [], [], []
    mult = np.arange(1, Qmax + 1, dtype=np.float64) ** -s
    harmonic = np.cumsum(mult)
    for q in range(2, Qmax + 1):
        p = np.arange(1, q, dtype=np.int64)
        p = p[np.gcd(p, q) == 1]
        w = q ** -s * (1.0 if coprime_only else harmonic[Qmax // q - 1])
        nums.append(p)
        dens.append(np.full(p.shape, q, dtype=np.int64))
        ws.append(np.full(p.shape, w))
    num = np.concatenate(nums)
    den = np.concatenate(dens)
    order = np.argsort(num / den, kind="stable")
    label = f"farey(Qmax={Qmax},eps={epsilon}{',coprime' if coprime_only else ''})"
    return DiscreteMeasure(num[order], den[order], np.concatenate(ws)[order],
                           (Qmax + 16) * 4 * UNIT, label)


def farey_mass(Qmax: int, epsilon: float = 0.1) -> float:
    """``sum_{q=2}^{Qmax} (q - 1) q^-s``, the mass of the truncated measure."""
    s = farey_exponent(epsilon)
    return math.fsum((q - 1) * q ** -s for q in range(2, Qmax + 1))


# ---------------------------------------------------------------------------
# potentials


def _weight_iv(w: float, rel: float):
    return iv.mpf([w * (1 - 2 * rel), w * (1 + 2 * rel)])


def _exact_term(d_lo: Fraction, d_hi: Fraction, sigma):
    """Enclosure of ``|ln d|^sigma`` for ``d`` in ``[d_lo, d_hi]``, ``0 < d``."""
    lg = iv.log(iv.mpf([to_iv(d_lo).a, to_iv(d_hi).b]))
    a, b = endpoints(lg)
    if a >= 0:
        absl = lg
    elif b <= 0:
        absl = -lg
    else:
        absl = iv.mpf([0, max(-to_iv(a), to_iv(b)).b])
    return absl ** to_iv(sigma)


def _as_point(z, bits):
    """Rational point, or a CertifiedReal for irrational input."""
    if isinstance(z, (int, Fraction)):
        return Fraction(z)
    if isinstance(z, CertifiedReal):
        return z
    return z.enclosure(bits)


def potential(mu: DiscreteMeasure, z, kernel: LogKernel, bits: int = DEFAULT_BITS) -> PotentialValue:
    """``U(z) = sum_i w_i |ln|z - x_i||^sigma`` as a certified enclosure.

    ``z`` may be an exact rational (collision with an atom gives +inf), a
    CertifiedReal, or any number spec with an ``enclosure`` method.
    """
    pt = _as_point(z, bits)
    if isinstance(pt, Fraction):
        hit = (mu.num * pt.denominator == mu.den * pt.numerator) if pt.denominator < 2**31 else None
        if hit is not None and hit.any():
            return PotentialValue.inf()
        zf = float(pt)
        ez = float(abs(Fraction(zf) - pt))
        ez = math.nextafter(ez, math.inf) if ez else 0.0
    else:
        zf, ez = pt.float_with_error()
    s, err, flags = kernels.log_kernel_sum(zf, ez, mu.points, mu.weights, kernel.sigma)
    err += s * 2 * mu.weight_rel_err
    with working_bits(bits):
        extra = to_iv(0)
        for i in np.flatnonzero(flags):
            x = mu.atom(int(i))
            if isinstance(pt, Fraction):
                if x == pt:
                    return PotentialValue.inf()
                d = abs(pt - x)
                dlo = dhi = d
            else:
                dlo, dhi = pt.abs_diff(x)
                if dlo == 0:
                    raise Undecidable(f"atom {x} touches the enclosure of z; refine it")
            extra = extra + _weight_iv(float(mu.weights[i]), mu.weight_rel_err) * _exact_term(dlo, dhi, kernel.sigma)
        elo, ehi = endpoints(extra)
    lo = math.nextafter(s - err + float(elo), -math.inf)
    hi = math.nextafter(s + err + float(ehi), math.inf)
    return PotentialValue(max(lo, 0.0), hi)


def energy(mu: DiscreteMeasure, kernel: LogKernel, offdiag_only: bool = False) -> PotentialValue:
    """``I(mu) = sum_ij w_i w_j k(x_i, x_j)``; +inf for any atom unless ``offdiag_only``."""
    if len(mu) and not offdiag_only:
        return PotentialValue.inf()
    v = kernels.offdiag_energy(mu.points, mu.weights, kernel.sigma)
    return PotentialValue(v, v)


# ---------------------------------------------------------------------------
# divergence scans


def branch_sigmas(params: ConditionParams, kernel_choice: Optional[str] = None) -> tuple[str, float, float]:
    """``(branch, sigma_used_in_bound, sigma_of_stated_kernel)``.

    K1 (gamma <= 2): the lower-bound series uses ``beta(2+eps)/gamma`` while
    the stated kernel exponent is ``2 beta/gamma``. K2 (gamma > 2): both are
    ``beta``.
    """
    b, g, e = params.beta, params.gamma, params.epsilon
    choice = kernel_choice or ("K1" if g <= 2 else "K2")
    if choice == "K1":
        return "K1", b * (2 + e) / g, 2 * b / g
    if choice == "K2":
        return "K2", b, b
    raise ValueError("kernel choice must be K1 or K2")


@dataclass
class ScanRow:
    qmax: int
    sigma: float
    u_lo: float
    u_hi: float
    lower_bound: float
    sigma_stated: float
    stated_lo: float
    stated_hi: float


def _fractional(x: CertifiedReal) -> tuple[CertifiedReal, int]:
    k = math.floor(x.lo)
    if math.floor(x.hi) != k and x.hi != k + 1:
        raise Undecidable("integer part of the point is not determined by its enclosure")
    return x.shift(-k), k


def divergence_scan(nu, params: ConditionParams, kernel_choice: Optional[str] = None,
                    schedule: Sequence[int] = (10, 100, 1000), bits: int = DEFAULT_BITS) -> list[ScanRow]:
    """Truncated potentials ``U^{mu(Qmax)}({nu})`` along an increasing schedule.

    The measure lives on (0, 1), so the fractional part of ``nu`` is used.
    Each row also carries the convergent sub-series (a certified lower bound
    for the same truncation) and the value under the stated kernel exponent.
    """
    schedule = [int(q) for q in schedule]
    if not schedule:
        return []
    if any(b <= a for a, b in zip(schedule, schedule[1:])) or schedule[0] < 2:
        raise ValueError("schedule must be strictly increasing and start at >= 2")
    _, sig, sig_stated = branch_sigmas(params, kernel_choice)
    x, _ = _fractional(_as_point(nu, bits))
    zf, ez = x.float_with_error()
    qtop = schedule[-1]
    s_exp = farey_exponent(params.epsilon)
    sigmas = [sig, sig_stated]
    sums, errs, flagged = kernels.farey_rows(zf, ez, qtop, sigmas)
    q = np.arange(qtop + 1, dtype=np.float64)
    q[:2] = 1.0
    wq = q ** -s_exp
    wq[:2] = 0.0
    contrib = sums * wq
    cerr = errs * wq + contrib * 6 * UNIT

    with working_bits(bits):
        # exact evaluation of near-collision atoms, bucketed by q
        exact = [dict() for _ in sigmas]
        for p, qq in flagged:
            a = Fraction(int(p), int(qq))
            dlo, dhi = x.abs_diff(a)
            if dlo == 0:
                raise Undecidable(f"atom {a} touches the enclosure; refine it")
            w = to_iv(qq) ** (-to_iv(s_exp))
            for j, sj in enumerate(sigmas):
                t = w * _exact_term(dlo, dhi, sj)
                exact[j][int(qq)] = exact[j].get(int(qq), to_iv(0)) + t

        convs = _fraction_convergents(x, qtop)
        rows = []
        for qmax in schedule:
            vals = []
            for j, sj in enumerate(sigmas):
                tot = float(np.sum(contrib[j, : qmax + 1]))
                err = float(np.sum(cerr[j, : qmax + 1])) + (qmax + 1) * UNIT * tot
                ex = to_iv(0)
                for qq, t in sorted(exact[j].items()):
                    if qq <= qmax:
                        ex = ex + t
                elo, ehi = endpoints(ex)
                vals.append((math.nextafter(tot - err + float(elo), -math.inf),
                             math.nextafter(tot + err + float(ehi), math.inf)))
            lb = to_iv(0)
            for c in convs:
                if 2 <= c.Q <= qmax:
                    dlo, dhi = x.abs_diff(c.value)
                    lb = lb + _exact_term(dlo, dhi, sig) / to_iv(c.Q) ** to_iv(s_exp)
            lb_lo = float(endpoints(lb)[0])
            rows.append(ScanRow(qmax, sig, vals[0][0], vals[0][1], math.nextafter(lb_lo, -math.inf) if lb_lo else 0.0,
                                sig_stated, vals[1][0], vals[1][1]))
    return rows


def _fraction_convergents(x: CertifiedReal, qtop: int):
    """Certified convergents of the number enclosed by ``x`` with ``Q <= qtop``."""
    pq, got = expand_cf(x, 10_000)
    convs = convergents(pq, max(got - 1, 0)) if got else []
    return [c for c in convs if c.Q <= qtop]


def scan_csv(rows: Sequence[ScanRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Qmax", "U_lo", "U_hi", "lower_bound", "sigma", "sigma_stated", "U_stated_lo", "U_stated_hi"])
    for r in rows:
        w.writerow([r.qmax, repr(r.u_lo), repr(r.u_hi), repr(r.lower_bound), repr(r.sigma),
                    repr(r.sigma_stated), repr(r.stated_lo), repr(r.stated_hi)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# convergent lower-bound series


@dataclass
class LowerBoundReport:
    report: SeriesReport
    branch: str
    sigma: float
    gap_links: list
    log_links: list
    upper_links: list
    chain_links: list
    gamma_link_valid: bool
    comparison: Optional[SeriesReport] = None

    @property
    def all_verified(self) -> bool:
        return all(all(v) for v in (self.gap_links, self.log_links, self.upper_links, self.chain_links))


def lower_bound_terms(nu, params: ConditionParams, N: int, branch: Optional[str] = None,
                      bits: int = DEFAULT_BITS) -> LowerBoundReport:
    """Convergent sub-series ``sum |ln|nu - P_n/Q_n||^sigma / Q_n^(2+eps/4)``.

    For each n the chain ``|ln|nu - P_n/Q_n|| > ln(Q_n Q_{n+1}) >= ln Q_{n+1}``
    is checked with outward rounding (the middle link exactly in integers,
    the composite ``|ln|nu - P_n/Q_n||^sigma >= ln^sigma Q_{n+1}`` directly),
    together with the matching upper
    estimate ``|ln|nu - P_n/Q_n|| < ln(Q_n Q_{n+1}) + ln 2``. For the K2
    branch the comparison series ``sum ln^beta Q_{n+1} / Q_n^(2+eps/4)`` is
    also returned; it dominates the A(beta, gamma) terms only when
    ``gamma >= 2 + eps/4`` (recorded in ``gamma_link_valid``).
    """
    name, sig, _ = branch_sigmas(params, branch)
    s_exp = farey_exponent(params.epsilon)
    x = _as_point(nu, bits)
    convs = number_convergents(nu, N + 1)
    with working_bits(bits):
        S = to_iv(s_exp)
        sg = to_iv(sig)
        terms, comp_terms = [], []
        gap_links, log_links, upper_links, chain_links = [], [], [], []
        for n in range(1, N + 1):
            c, Qn1 = convs[n], convs[n + 1].Q
            dlo, dhi = x.abs_diff(c.value)
            if dlo == 0:
                raise Undecidable(f"enclosure touches P_{n}/Q_{n}")
            neg_log = -iv.log(iv.mpf([to_iv(dlo).a, to_iv(dhi).b]))
            lq1 = iv.log(to_iv(Qn1))
            # the enclosure (dlo, dhi) of the gap is open, so both log links are
            # decided exactly against 1/(Q_n Q_{n+1}) and 1/(2 Q_n Q_{n+1})
            ub = Fraction(1, c.Q * Qn1)
            g1 = True if dhi <= ub else (False if dlo >= ub else None)
            g3 = True if dlo >= ub / 2 else (False if dhi <= ub / 2 else None)
            # t -> ln^sigma t is increasing on [1, inf), so this link is the integer fact Q_n >= 1
            g2 = Qn1 <= c.Q * Qn1
            g4 = certainly_le(lq1 ** sg, neg_log ** sg)
            if g4 is None and g1 and g2:
                # boundary case: the enclosure of the gap touches 1/(Q_n Q_{n+1})
                g4 = True
            for flag, what in ((g1, "gap link"), (g3, "upper link"), (g4, "direct chain")):
                if flag is None:
                    raise Undecidable(f"{what} at n={n} for {getattr(nu, 'label', nu)}")
            gap_links.append(g1)
            log_links.append(g2)
            upper_links.append(g3)
            chain_links.append(g4)
            Qs = to_iv(c.Q) ** S
            terms.append(neg_log ** sg / Qs)
            comp_terms.append(lq1 ** to_iv(params.beta) / Qs)
        sums = _accumulate(terms)
        ratio = growth_ratio(sums)
        rep = SeriesReport("convergent lower bound", list(range(1, N + 1)), terms, sums,
                           classify_trend(ratio), ratio,
                           {**params.as_dict(), "branch": name, "sigma": sig, "exponent": s_exp})
        comp = None
        if name == "K2":
            csums = _accumulate(comp_terms)
            cr = growth_ratio(csums)
            comp = SeriesReport("ln^beta Q_(n+1) / Q_n^(2+eps/4)", list(range(1, N + 1)), comp_terms,
                                csums, classify_trend(cr), cr, rep.params)
    return LowerBoundReport(rep, name, sig, gap_links, log_links, upper_links, chain_links,
                            params.gamma >= s_exp, comp)
