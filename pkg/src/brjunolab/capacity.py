"""Discretised energy minimisation for ``C_sigma = 1/W_sigma`` on the line.

A compact set is replaced by a grid of cells; the kernel ``|ln|x - y||^sigma``
is used between distinct points and a self-energy rule on the diagonal. The
minimal quadratic energy over the probability simplex is found by
Frank-Wolfe, whose duality gap bounds the distance to the discrete optimum.

Capacity here is the reciprocal ``1/W``, not the classical ``exp(-W)``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from . import kernels

DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITER = 2_000_000


class SetSpecError(ValueError):
    pass


@dataclass(frozen=True)
class CompactSetGrid:
    """Grid points ``origin + offsets[i]`` with per-point cell widths.

    Offsets are computed from exact rationals relative to ``origin``, so a
    translated copy of the set yields bit-identical offsets and kernels.
    """

    origin: Fraction
    offsets: np.ndarray
    spacing: np.ndarray
    label: str = ""

    def __post_init__(self):
        if len(self.offsets) == 0:
            raise ValueError("empty grid")
        if len(self.offsets) != len(self.spacing):
            raise ValueError("one spacing per point is required")
        if np.any(np.diff(self.offsets) <= 0):
            raise ValueError("grid points must be sorted and distinct")
        if np.any(self.spacing <= 0):
            raise ValueError("spacing must be positive")
        if self.offsets[-1] - self.offsets[0] >= 1:
            raise ValueError("grid diameter must be < 1")

    def __len__(self) -> int:
        return len(self.offsets)

    @property
    def points(self) -> np.ndarray:
        return float(self.origin) + self.offsets

    @classmethod
    def from_points(cls, pts: Sequence, spacing: Union[float, Sequence[float]], label: str = "") -> "CompactSetGrid":
        exact = sorted(set(Fraction(p) for p in pts))
        if not exact:
            raise ValueError("empty grid")
        origin = exact[0]
        offs = np.array([float(p - origin) for p in exact])
        sp = np.broadcast_to(np.asarray(spacing, dtype=np.float64), offs.shape).copy()
        return cls(origin, offs, sp, label)

    def translate(self, shift) -> "CompactSetGrid":
        return CompactSetGrid(self.origin + Fraction(shift), self.offsets, self.spacing, self.label)

    def subset(self, idx: Sequence[int]) -> "CompactSetGrid":
        idx = np.asarray(sorted(idx))
        base = self.offsets[idx[0]]
        origin = self.origin + Fraction(base)
        return CompactSetGrid(origin, self.offsets[idx] - base, self.spacing[idx], self.label)


def parse_set_spec(text: str) -> list[tuple[Fraction, Fraction]]:
    """``"intervals:a1,b1;a2,b2"`` -> sorted disjoint closed intervals."""
    kind, sep, body = text.strip().partition(":")
    if kind != "intervals" or not sep:
        raise SetSpecError(f"expected 'intervals:a,b;...', got {text!r}")
    out = []
    try:
        for part in body.split(";"):
            if not part.strip():
                continue
            a, b = (Fraction(t.strip()) for t in part.split(","))
            if b < a:
                raise SetSpecError(f"interval [{a}, {b}] is reversed")
            out.append((a, b))
    except (ValueError, ZeroDivisionError) as exc:
        raise SetSpecError(f"malformed set spec {text!r}: {exc}") from exc
    if not out:
        raise SetSpecError("no intervals given")
    out.sort()
    for (a0, b0), (a1, b1) in zip(out, out[1:]):
        if a1 <= b0:
            raise SetSpecError("intervals must be disjoint")
    if out[-1][1] - out[0][0] >= 1:
        raise SetSpecError("set diameter must be < 1")
    return out


def interval_grid(intervals, resolution: int, label: str = "") -> CompactSetGrid:
    """Uniform grid with ``round(resolution * length) + 1`` points per interval.

    A zero-length interval becomes one point with cell width ``1/resolution``.
    """
    if isinstance(intervals, str):
        label = label or intervals
        intervals = parse_set_spec(intervals)
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    origin = intervals[0][0]
    offs, sp = [], []
    for a, b in intervals:
        L = b - a
        m = round(resolution * L)
        if m == 0:
            offs.append(float(a - origin))
            sp.append(1.0 / resolution)
            continue
        h = L / m
        offs.extend(float(a - origin + k * h) for k in range(m + 1))
        sp.extend([float(h)] * (m + 1))
    return CompactSetGrid(origin, np.array(offs), np.array(sp), label)


# ---------------------------------------------------------------------------
# self-energy rules


def cell_rule(spacing: np.ndarray, offsets: np.ndarray, sigma: float) -> np.ndarray:
    """``|ln(delta/2)|^sigma``: kernel at the mean half-width of a cell."""
    return np.abs(np.log(spacing / 2.0)) ** sigma


def nearest_rule(spacing: np.ndarray, offsets: np.ndarray, sigma: float) -> np.ndarray:
    """Kernel at the nearest-neighbour distance (cell width for isolated points)."""
    d = spacing.copy()
    if len(offsets) > 1:
        gaps = np.diff(offsets)
        nn = np.minimum(np.r_[np.inf, gaps], np.r_[gaps, np.inf])
        d = np.minimum(d, nn)
    return np.abs(np.log(d)) ** sigma


def exact_cell_rule(spacing: np.ndarray, offsets: np.ndarray, sigma: float) -> np.ndarray:
    """Mean of ``-ln|x - y|`` over a cell of width delta, ``3/2 - ln delta`` (sigma = 1 only)."""
    if sigma != 1:
        raise ValueError("the exact cell rule is available for sigma = 1 only")
    if np.any(spacing >= 1):
        raise ValueError("cell widths must be < 1")
    return 1.5 - np.log(spacing)


SELF_ENERGY_RULES: dict[str, Callable] = {
    "cell": cell_rule,
    "nearest": nearest_rule,
    "exact": exact_cell_rule,
}


def kernel_matrix(grid: CompactSetGrid, sigma: float, rule: str = "cell") -> np.ndarray:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    diag = SELF_ENERGY_RULES[rule](grid.spacing, grid.offsets, sigma)
    return kernels.log_kernel_matrix(grid.offsets, diag, sigma)


# ---------------------------------------------------------------------------
# solver


@dataclass
class EquilibriumResult:
    weights: np.ndarray
    energy: float
    iterations: int
    duality_gap: float
    converged: bool
    trace: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))

    @property
    def capacity(self) -> float:
        return 1.0 / self.energy

    @property
    def flag(self) -> str:
        return "CONVERGED" if self.converged else "NON-CONVERGED"


def minimize_energy(M: np.ndarray, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> EquilibriumResult:
    """Frank-Wolfe from the uniform measure; stops once the duality gap is below ``tol``."""
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    if M.shape != (n, n) or n == 0:
        raise ValueError("square non-empty matrix required")
    if not np.all(np.isfinite(M)):
        raise ValueError("kernel matrix has non-finite entries")
    if not np.array_equal(M, M.T):
        raise ValueError("kernel matrix must be symmetric")
    w0 = np.full(n, 1.0 / n)
    w, _, gap, it, trace = kernels.frank_wolfe(M, w0, tol, max_iter)
    w = np.maximum(w, 0.0)
    w /= math.fsum(w)
    Mw = M @ w
    f = float(w @ Mw)
    gap = max(2.0 * (f - float(Mw.min())), 0.0)
    return EquilibriumResult(w, f, int(it), gap, gap < tol, np.asarray(trace))


@dataclass
class RefinementRow:
    resolution: int
    points: int
    energy: float
    capacity: float
    gap: float
    iterations: int
    flag: str


def capacity(set_spec, sigma: float = 1.0, resolutions: Sequence[int] = (250, 500, 1000),
             rule: str = "cell", tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> list[RefinementRow]:
    rows = []
    for r in resolutions:
        grid = interval_grid(set_spec, int(r))
        res = minimize_energy(kernel_matrix(grid, sigma, rule), tol, max_iter)
        rows.append(RefinementRow(int(r), len(grid), res.energy, res.capacity, res.duality_gap,
                                  res.iterations, res.flag))
    return rows


def refinement_csv(rows: Sequence[RefinementRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["resolution", "W", "C", "gap", "iters", "points", "status"])
    for r in rows:
        w.writerow([r.resolution, f"{r.energy:.12e}", f"{r.capacity:.12e}", f"{r.gap:.6e}",
                    r.iterations, r.points, r.flag])
    return buf.getvalue()


def robin_energy(length: float) -> float:
    """Minimal ``-ln`` energy of an interval of the given length, ``ln(4/length)``."""
    return math.log(4.0 / length)


@dataclass
class ZeroCapacityReport:
    deltas: list
    energies: list
    slopes: list
    results: list = field(repr=False, default_factory=list)

    @property
    def increasing(self) -> bool:
        return all(b > a for a, b in zip(self.energies, self.energies[1:]))


def zero_capacity_evidence(cloud: Sequence, sigma: float = 1.0,
                           deltas: Sequence[float] = (1e-2, 1e-4, 1e-6),
                           tol: float = 1e-10, max_iter: int = DEFAULT_MAX_ITER) -> ZeroCapacityReport:
    """Minimal energy of a finite cloud whose points are cells of shrinking width.

    ``slopes[i]`` is ``dW / d ln(1/delta)`` between consecutive levels; an
    unbounded W means the cloud carries no probability measure of finite
    energy in the limit.
    """
    deltas = [float(d) for d in deltas]
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly decreasing")
    energies, results = [], []
    for d in deltas:
        grid = CompactSetGrid.from_points(cloud, d)
        if len(grid) > 1 and d >= float(np.diff(grid.offsets).min()):
            raise ValueError(f"cell width {d} exceeds the minimum point gap")
        res = minimize_energy(kernel_matrix(grid, sigma), tol, max_iter)
        energies.append(res.energy)
        results.append(res)
    slopes = [(e1 - e0) / math.log(d0 / d1)
              for (d0, e0), (d1, e1) in zip(zip(deltas, energies), zip(deltas[1:], energies[1:]))]
    return ZeroCapacityReport(deltas, energies, slopes, results)
