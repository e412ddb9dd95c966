"""Hot numeric loops, each with a numba kernel and a numpy fallback.

The public wrappers at the bottom pick the numba version when
:mod:`brjunolab._accel` reports numba as active. Both versions follow the
same arithmetic so results agree to rounding, and the error bounds they
return are valid for either path.
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import HAVE_NUMBA, njit

UNIT = 2.0**-53
# relative error allowed for a near-collision before a term is handed to
# the exact interval path
FLAG_RATIO = 1e-6

NORM_SUP, NORM_L1, NORM_TAIL = 0, 1, 2


# ---------------------------------------------------------------------------
# lattice search for small denominators |k1*w1 + k2*w2|


def _lattice_2d_loop(w1, w2, kmax, norm, slack):
    # pass 1: float minimum of |k.w| over canonical k (k2 > 0, or k2 == 0 and k1 > 0)
    fmin = np.inf
    k2_start = 1 if norm == NORM_TAIL else 0
    for k2 in range(k2_start, kmax + 1):
        if norm == NORM_TAIL:
            c = -(k2 * w2) / w1
            lo = int(math.floor(c)) - 1
            hi = lo + 3
        elif norm == NORM_SUP:
            lo, hi = -kmax, kmax
        else:
            lo, hi = -(kmax - k2), kmax - k2
        if k2 == 0:
            lo = 1
        for k1 in range(lo, hi + 1):
            v = abs(k1 * w1 + k2 * w2)
            if v < fmin:
                fmin = v
    # pass 2: everything within the float error slack of the minimum
    thresh = fmin + slack
    count = 0
    for k2 in range(k2_start, kmax + 1):
        if norm == NORM_TAIL:
            c = -(k2 * w2) / w1
            lo = int(math.floor(c)) - 1
            hi = lo + 3
        elif norm == NORM_SUP:
            lo, hi = -kmax, kmax
        else:
            lo, hi = -(kmax - k2), kmax - k2
        if k2 == 0:
            lo = 1
        for k1 in range(lo, hi + 1):
            v = abs(k1 * w1 + k2 * w2)
            if v <= thresh:
                count += 1
    out = np.empty((count, 2), dtype=np.int64)
    i = 0
    for k2 in range(k2_start, kmax + 1):
        if norm == NORM_TAIL:
            c = -(k2 * w2) / w1
            lo = int(math.floor(c)) - 1
            hi = lo + 3
        elif norm == NORM_SUP:
            lo, hi = -kmax, kmax
        else:
            lo, hi = -(kmax - k2), kmax - k2
        if k2 == 0:
            lo = 1
        for k1 in range(lo, hi + 1):
            v = abs(k1 * w1 + k2 * w2)
            if v <= thresh:
                out[i, 0] = k1
                out[i, 1] = k2
                i += 1
    return fmin, out


def _lattice_2d_numpy(w1, w2, kmax, norm, slack):
    k2_start = 1 if norm == NORM_TAIL else 0
    k2 = np.arange(k2_start, kmax + 1, dtype=np.int64)
    if norm == NORM_TAIL:
        base = np.floor(-(k2 * w2) / w1).astype(np.int64) - 1
        K1 = base[:, None] + np.arange(4, dtype=np.int64)[None, :]
        K2 = np.broadcast_to(k2[:, None], K1.shape)
        valid = np.ones(K1.shape, dtype=bool)
    else:
        k1 = np.arange(-kmax, kmax + 1, dtype=np.int64)
        K1, K2 = np.meshgrid(k1, k2)
        if norm == NORM_SUP:
            valid = np.ones(K1.shape, dtype=bool)
        else:
            valid = np.abs(K1) + np.abs(K2) <= kmax
    valid &= (K2 > 0) | (K1 > 0)
    vals = np.abs(K1 * w1 + K2 * w2)
    vals = np.where(valid, vals, np.inf)
    fmin = float(vals.min())
    sel = valid & (vals <= fmin + slack)
    return fmin, np.stack([K1[sel], K2[sel]], axis=1).astype(np.int64)


_lattice_2d_jit = njit(_lattice_2d_loop)


def lattice_candidates_2d(w1: float, w2: float, kmax: int, norm: int, slack: float):
    """Float minimum of ``|k1 w1 + k2 w2|`` and all k within ``slack`` of it."""
    if HAVE_NUMBA:
        return _lattice_2d_jit(float(w1), float(w2), int(kmax), int(norm), float(slack))
    return _lattice_2d_numpy(float(w1), float(w2), int(kmax), int(norm), float(slack))


# ---------------------------------------------------------------------------
# logarithmic-kernel sums with a priori float error bounds
#
# For a term w * |ln|z - x||**sigma the float evaluation is bounded as
# follows, assuming IEEE round-to-nearest and <= 1 ulp libm log/pow:
#   |d_f - d| <= ez + 3u                                        (Ed)
#   |ln d - ln d_f| <= (Ed/d_f)/(1 - Ed/d_f), plus 2u|L| from log (eL)
#   relative error of L**sigma <= expm1(sigma*log1p(2 eL/L)) + 4u
# Terms whose relative error would exceed FLAG_RATIO are flagged and left
# to the exact path.


def _atom_sum_loop(z, ez, xs, ws, sigma):
    n = xs.shape[0]
    s = 0.0
    err = 0.0
    flags = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        d = abs(z - xs[i])
        Ed = ez + 3.0 * UNIT
        if d <= Ed / FLAG_RATIO:
            flags[i] = True
            continue
        L = abs(math.log(d))
        rd = Ed / d
        eL = rd / (1.0 - rd) + 2.0 * UNIT * L
        if L <= eL / FLAG_RATIO:
            flags[i] = True
            continue
        t = L**sigma
        rel = math.expm1(sigma * math.log1p(2.0 * eL / L)) + 4.0 * UNIT
        c = ws[i] * t
        s += c
        err += c * (rel + 2.0 * UNIT)
    err += n * UNIT * s
    return s, err, flags


def _atom_sum_numpy(z, ez, xs, ws, sigma):
    d = np.abs(z - xs)
    Ed = ez + 3.0 * UNIT
    flags = d <= Ed / FLAG_RATIO
    with np.errstate(divide="ignore", invalid="ignore"):
        L = np.abs(np.log(np.where(flags, 0.5, d)))
        rd = Ed / np.where(flags, 1.0, d)
        eL = rd / (1.0 - rd) + 2.0 * UNIT * L
        flags |= L <= eL / FLAG_RATIO
        safeL = np.where(flags, 1.0, L)
        t = safeL**sigma
        rel = np.expm1(sigma * np.log1p(2.0 * eL / safeL)) + 4.0 * UNIT
    c = np.where(flags, 0.0, ws * t)
    s = float(c.sum())
    err = float((c * (rel + 2.0 * UNIT)).sum()) + xs.shape[0] * UNIT * s
    return s, err, flags


_atom_sum_jit = njit(_atom_sum_loop)


def log_kernel_sum(z: float, ez: float, xs: np.ndarray, ws: np.ndarray, sigma: float):
    """``sum_i ws[i] |ln|z - xs[i]||**sigma`` over unflagged atoms.

    Returns ``(sum, error_bound, flags)``; flagged atoms are excluded from the
    sum and must be evaluated exactly by the caller.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ws = np.ascontiguousarray(ws, dtype=np.float64)
    if HAVE_NUMBA:
        return _atom_sum_jit(float(z), float(ez), xs, ws, float(sigma))
    return _atom_sum_numpy(float(z), float(ez), xs, ws, float(sigma))


def _farey_rows_loop(z, ez, qmax, sigmas):
    # per-q sums of |ln|z - p/q||**sigma over p = 1..q-1, for several sigmas
    ns = sigmas.shape[0]
    sums = np.zeros((ns, qmax + 1))
    errs = np.zeros((ns, qmax + 1))
    nflag = 0
    cap = 64
    flagged = np.empty((cap, 2), dtype=np.int64)
    Ed = ez + 3.0 * UNIT
    for q in range(2, qmax + 1):
        for p in range(1, q):
            x = p / q
            d = abs(z - x)
            bad = d <= Ed / FLAG_RATIO
            L = 0.0
            eL = 0.0
            if not bad:
                L = abs(math.log(d))
                rd = Ed / d
                eL = rd / (1.0 - rd) + 2.0 * UNIT * L
                bad = L <= eL / FLAG_RATIO
            if bad:
                if nflag == cap:
                    bigger = np.empty((2 * cap, 2), dtype=np.int64)
                    bigger[:cap] = flagged
                    flagged = bigger
                    cap *= 2
                flagged[nflag, 0] = p
                flagged[nflag, 1] = q
                nflag += 1
                continue
            lr = math.log1p(2.0 * eL / L)
            for j in range(ns):
                t = L ** sigmas[j]
                rel = math.expm1(sigmas[j] * lr) + 4.0 * UNIT
                sums[j, q] += t
                errs[j, q] += t * rel
        for j in range(ns):
            errs[j, q] += (q - 1) * UNIT * sums[j, q]
    return sums, errs, flagged[:nflag]


def _farey_rows_numpy(z, ez, qmax, sigmas):
    ns = sigmas.shape[0]
    sums = np.zeros((ns, qmax + 1))
    errs = np.zeros((ns, qmax + 1))
    Ed = ez + 3.0 * UNIT
    flagged = []
    for q in range(2, qmax + 1):
        p = np.arange(1, q, dtype=np.int64)
        d = np.abs(z - p / q)
        bad = d <= Ed / FLAG_RATIO
        with np.errstate(divide="ignore", invalid="ignore"):
            L = np.abs(np.log(np.where(bad, 0.5, d)))
            rd = Ed / np.where(bad, 1.0, d)
            eL = rd / (1.0 - rd) + 2.0 * UNIT * L
            bad |= L <= eL / FLAG_RATIO
            L = np.where(bad, 1.0, L)
            lr = np.log1p(2.0 * eL / L)
        good = ~bad
        for j in range(ns):
            t = np.where(good, L ** sigmas[j], 0.0)
            rel = np.expm1(sigmas[j] * lr) + 4.0 * UNIT
            sums[j, q] = t.sum()
            errs[j, q] = (t * rel).sum() + (q - 1) * UNIT * sums[j, q]
        for pp in p[bad]:
            flagged.append((int(pp), q))
    return sums, errs, np.array(flagged, dtype=np.int64).reshape(-1, 2)


_farey_rows_jit = njit(_farey_rows_loop)


def farey_rows(z: float, ez: float, qmax: int, sigmas):
    """Row sums ``S[j, q] = sum_{p=1}^{q-1} |ln|z - p/q||**sigmas[j]`` with bounds."""
    sig = np.ascontiguousarray(np.atleast_1d(np.asarray(sigmas, dtype=np.float64)))
    if HAVE_NUMBA:
        return _farey_rows_jit(float(z), float(ez), int(qmax), sig)
    return _farey_rows_numpy(float(z), float(ez), int(qmax), sig)


def _offdiag_energy_loop(xs, ws, sigma):
    n = xs.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += ws[i] * ws[j] * abs(math.log(abs(xs[i] - xs[j]))) ** sigma
    return s


def _offdiag_energy_numpy(xs, ws, sigma):
    D = np.abs(xs[:, None] - xs[None, :])
    np.fill_diagonal(D, 0.5)
    K = np.abs(np.log(D)) ** sigma
    np.fill_diagonal(K, 0.0)
    return float(ws @ K @ ws)


_offdiag_energy_jit = njit(_offdiag_energy_loop)


def offdiag_energy(xs, ws, sigma: float) -> float:
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ws = np.ascontiguousarray(ws, dtype=np.float64)
    if HAVE_NUMBA:
        return _offdiag_energy_jit(xs, ws, float(sigma))
    return _offdiag_energy_numpy(xs, ws, float(sigma))


# ---------------------------------------------------------------------------
# discretised energy minimisation


def _kernel_matrix_loop(offsets, diag, sigma):
    n = offsets.shape[0]
    M = np.empty((n, n))
    for i in range(n):
        M[i, i] = diag[i]
        for j in range(i + 1, n):
            v = abs(math.log(abs(offsets[i] - offsets[j]))) ** sigma
            M[i, j] = v
            M[j, i] = v
    return M


def _kernel_matrix_numpy(offsets, diag, sigma):
    D = np.abs(offsets[:, None] - offsets[None, :])
    np.fill_diagonal(D, 0.5)
    M = np.abs(np.log(D)) ** sigma
    np.fill_diagonal(M, diag)
    return M


_kernel_matrix_jit = njit(_kernel_matrix_loop)


def log_kernel_matrix(offsets, diag, sigma: float) -> np.ndarray:
    offsets = np.ascontiguousarray(offsets, dtype=np.float64)
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    if HAVE_NUMBA:
        return _kernel_matrix_jit(offsets, diag, float(sigma))
    return _kernel_matrix_numpy(offsets, diag, float(sigma))


def _frank_wolfe_loop(M, w, tol, max_iter):
    n = w.shape[0]
    Mw = M @ w
    f = w @ Mw
    trace = np.empty(max_iter + 1)
    trace[0] = f
    gap = np.inf
    it = 0
    while it < max_iter:
        # gradient is 2 Mw; the best vertex minimises (Mw)_i, lowest index on ties
        i = 0
        best = Mw[0]
        for k in range(1, n):
            if Mw[k] < best:
                best = Mw[k]
                i = k
        gap = 2.0 * (f - best)
        if gap < tol:
            break
        curv = M[i, i] - 2.0 * best + f
        t = 1.0
        if curv > 0.0:
            t = min(1.0, 0.5 * gap / curv)
        for k in range(n):
            w[k] *= 1.0 - t
            Mw[k] = (1.0 - t) * Mw[k] + t * M[k, i]
        w[i] += t
        f_new = (1.0 - t) * (1.0 - t) * f + 2.0 * t * (1.0 - t) * best + t * t * M[i, i]
        f = f_new
        it += 1
        trace[it] = f
    if it == max_iter:
        best = Mw.min()
        gap = 2.0 * (f - best)
    return w, f, gap, it, trace[: it + 1]


def _frank_wolfe_numpy(M, w, tol, max_iter):
    Mw = M @ w
    f = float(w @ Mw)
    trace = [f]
    gap = np.inf
    it = 0
    while it < max_iter:
        i = int(np.argmin(Mw))
        best = Mw[i]
        gap = 2.0 * (f - best)
        if gap < tol:
            break
        curv = M[i, i] - 2.0 * best + f
        t = min(1.0, 0.5 * gap / curv) if curv > 0.0 else 1.0
        w *= 1.0 - t
        w[i] += t
        Mw = (1.0 - t) * Mw + t * M[:, i]
        f = (1.0 - t) * (1.0 - t) * f + 2.0 * t * (1.0 - t) * best + t * t * M[i, i]
        it += 1
        trace.append(f)
    if it == max_iter:
        gap = 2.0 * (f - float(Mw.min()))
    return w, f, gap, it, np.asarray(trace)


_frank_wolfe_jit = njit(_frank_wolfe_loop)


def frank_wolfe(M: np.ndarray, w0: np.ndarray, tol: float, max_iter: int):
    """Frank-Wolfe with exact line search for ``min w^T M w`` on the simplex.

    Returns ``(weights, energy, gap, iterations, energy_trace)``.
    """
    M = np.ascontiguousarray(M, dtype=np.float64)
    w = np.array(w0, dtype=np.float64, copy=True)
    if HAVE_NUMBA:
        return _frank_wolfe_jit(M, w, float(tol), int(max_iter))
    return _frank_wolfe_numpy(M, w, float(tol), int(max_iter))


# ---------------------------------------------------------------------------
# exhaustive minimum cover (set cover over <= ~16 points by bitmask DP)


def _min_cover_loop(feasible):
    nmask = feasible.shape[0]
    full = nmask - 1
    big = 1 << 30
    dp = np.full(nmask, big, dtype=np.int64)
    dp[0] = 0
    for mask in range(1, nmask):
        low = mask & (-mask)
        # enumerate submasks of mask that contain the lowest set bit
        rest = mask ^ low
        sub = rest
        while True:
            s = sub | low
            if feasible[s]:
                cand = dp[mask ^ s] + 1
                if cand < dp[mask]:
                    dp[mask] = cand
            if sub == 0:
                break
            sub = (sub - 1) & rest
    return dp[full]


_min_cover_jit = njit(_min_cover_loop)


def min_cover_count(feasible: np.ndarray) -> int:
    """Fewest feasible subsets whose union is everything (``feasible`` indexed by bitmask)."""
    feasible = np.ascontiguousarray(feasible, dtype=np.bool_)
    if HAVE_NUMBA:
        return int(_min_cover_jit(feasible))
    return int(_min_cover_loop(feasible))
