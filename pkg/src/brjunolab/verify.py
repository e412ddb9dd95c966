"""Invariant suite behind ``brjunolab verify``.

Each check runs at a starting precision and is retried at doubled precision
whenever a comparison is undecidable, up to a cap. A check fails on any
certified violation or on an undecidable result at the cap.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cf import (approximation_gap, check_growth_bound, convergents, evaluate_finite,
                 number_convergents, parse_number)
from .diophantine import (ConditionParams, VectorSpec, holder_check, max_admissible_delta,
                          proposition_chain_check, psi_bruteforce, psi_cf)
from .intervals import DEFAULT_BITS, Undecidable
from .potential import lower_bound_terms

TEST_NUMBERS = ("golden", "sqrt2", "sqrt3", "sqrt7", "e")


@dataclass
class CheckResult:
    name: str
    cases: int
    violations: int
    undecidable: int
    bits: int
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.undecidable == 0


def escalate(fn: Callable[[int], bool], bits: int, cap: int) -> tuple[bool | None, int]:
    """Run ``fn(bits)`` doubling ``bits`` on Undecidable; ``None`` if still undecidable at ``cap``."""
    b = bits
    while True:
        try:
            return fn(b), b
        except Undecidable:
            if b >= cap:
                return None, b
            b = min(2 * b, cap)


class _Tally:
    def __init__(self, name: str):
        self.name = name
        self.cases = self.bad = self.undec = self.bits = 0
        self.first = ""

    def add(self, label: str, outcome, bits: int) -> None:
        self.cases += 1
        self.bits = max(self.bits, bits)
        if outcome is None:
            self.undec += 1
            self.first = self.first or f"undecidable: {label}"
        elif not outcome:
            self.bad += 1
            self.first = self.first or f"violation: {label}"

    def result(self) -> CheckResult:
        return CheckResult(self.name, self.cases, self.bad, self.undec, self.bits, self.first)


def random_digit_sequences(count: int, max_depth: int, vmax: int = 100, seed: int = 0) -> list[list[int]]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        depth = int(rng.integers(1, max_depth + 1))
        out.append([int(v) for v in rng.integers(1, vmax + 1, size=depth + 1)])
    return out


def check_convergent_oracle(count: int = 200, max_depth: int = 50) -> CheckResult:
    t = _Tally("convergent recurrence vs exact evaluation")
    for digits in random_digit_sequences(count, max_depth):
        cs = convergents(digits, len(digits) - 1)
        ok = all(c.value == evaluate_finite(digits[: c.n + 1]) for c in cs)
        ok &= all(a.P * b.Q - b.P * a.Q == (-1) ** b.n for a, b in zip(cs, cs[1:]))
        t.add(str(digits[:4]), ok, 0)
    return t.result()


def check_growth(count: int = 200, depth: int = 200) -> CheckResult:
    t = _Tally("Q_n > phi^(n-1)/2")
    seqs = random_digit_sequences(count, depth, vmax=3, seed=1)
    seqs.append([1] * (depth + 1))
    for digits in seqs:
        cs = convergents(digits, len(digits) - 1)
        t.add(str(digits[:4]), all(check_growth_bound(cs)), 0)
    return t.result()


def check_gap(bits: int, cap: int, depth: int = 50) -> CheckResult:
    t = _Tally("1/(2 Q_n Q_n+1) < |nu - P_n/Q_n| < 1/(Q_n Q_n+1)")
    for name in ("golden", "sqrt2", "e"):
        nu = parse_number(name)
        cs = number_convergents(nu, depth + 1)
        for n in range(depth + 1):
            def run(b, n=n):
                return approximation_gap(nu.enclosure(b), cs[n], cs[n + 1].Q).verdict
            t.add(f"{name} n={n}", *escalate(run, bits, cap))
    return t.result()


def holder_grid():
    for beta in (0.5, 1.0, 2.0):
        for gamma in (0.5, 1.0, 1.5, 2.0):
            for eps in (0.5, 1.0):
                dmax = max_admissible_delta(eps)
                for delta in (dmax / 2, dmax):
                    yield ConditionParams(beta, gamma, eps, delta)


def check_holder(bits: int, cap: int, N: int = 50) -> CheckResult:
    t = _Tally("Holder split of the A(beta,gamma) series")
    convs = {name: number_convergents(parse_number(name), N + 1) for name in TEST_NUMBERS}
    for p in holder_grid():
        for name, cs in convs.items():
            def run(b, cs=cs, p=p):
                return holder_check(cs, p, N, b).verified
            t.add(f"{name} {p.as_dict()}", *escalate(run, bits, cap))
    return t.result()


def check_chain(bits: int, cap: int, N: int = 10) -> CheckResult:
    t = _Tally("alpha-BR sum dominates the convergent series")
    for name in ("sqrt2", "golden", "e"):
        for alpha in (1, 2, 4):
            def run(b, name=name, alpha=alpha):
                return proposition_chain_check(parse_number(name), alpha, N, b).verified
            t.add(f"{name} alpha={alpha}", *escalate(run, bits, cap))
    return t.result()


def check_psi(bits: int, cap: int, qmax: int = 200) -> CheckResult:
    t = _Tally("Psi through convergents vs lattice search")
    nu = parse_number("sqrt2")
    for Q in range(2, qmax + 1):
        def run(b, Q=Q):
            a = psi_cf(nu, Q, bits=b)
            c = psi_bruteforce(VectorSpec.one_nu(nu, b), Q, norm="tail", bits=b)
            overlap = a.lo <= c.hi and c.lo <= a.hi
            k_match = tuple(c.k) in (tuple(a.k), tuple(-x for x in a.k))
            return overlap and k_match
        t.add(f"Q={Q}", *escalate(run, bits, cap))
    return t.result()


def check_lower_bound(bits: int, cap: int, N: int = 20) -> CheckResult:
    t = _Tally("|ln|nu - P_n/Q_n||^sigma >= ln^sigma Q_n+1")
    params = (ConditionParams(1.0, 1.0, 0.1), ConditionParams(2.0, 1.5, 0.5),
              ConditionParams(1.0, 3.0, 0.1), ConditionParams(0.5, 2.5, 1.0))
    for name in TEST_NUMBERS:
        nu = parse_number(name)
        for p in params:
            def run(b, nu=nu, p=p):
                return lower_bound_terms(nu, p, N, bits=b).all_verified
            t.add(f"{name} beta={p.beta} gamma={p.gamma}", *escalate(run, bits, cap))
    return t.result()


def run_suite(bits: int = DEFAULT_BITS, cap: int = 4096) -> list[CheckResult]:
    return [
        check_convergent_oracle(),
        check_growth(),
        check_gap(max(bits, 512), max(cap, 512)),
        check_holder(bits, cap),
        check_chain(bits, cap),
        check_psi(bits, cap),
        check_lower_bound(bits, cap),
    ]


def summary_table(results: list[CheckResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "cases", "violations", "undecidable", "max_bits", "status", "detail"])
    for r in results:
        w.writerow([r.name, r.cases, r.violations, r.undecidable, r.bits, "PASS" if r.passed else "FAIL", r.detail])
    return buf.getvalue()
