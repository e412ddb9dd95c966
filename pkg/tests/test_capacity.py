import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brjunolab.capacity import (CompactSetGrid, SetSpecError, capacity, interval_grid, kernel_matrix,
                                minimize_energy, parse_set_spec, refinement_csv, robin_energy,
                                zero_capacity_evidence)


def arcsine_cell_weights(a, b, pts):
    # oracle: arcsine law mass of the cell around each grid point
    F = lambda x: 2 / math.pi * math.asin(math.sqrt(min(max((x - a) / (b - a), 0.0), 1.0)))
    edges = [a] + [(pts[i] + pts[i + 1]) / 2 for i in range(len(pts) - 1)] + [b]
    return np.array([F(edges[i + 1]) - F(edges[i]) for i in range(len(pts))])


class TestGrid:
    def test_parse(self):
        assert parse_set_spec("intervals:0.1,0.2;0.4,0.5") == [(Fraction(1, 10), Fraction(1, 5)),
                                                               (Fraction(2, 5), Fraction(1, 2))]

    @pytest.mark.parametrize("bad", ["0.1,0.2", "intervals:", "intervals:0.3,0.1", "intervals:0,0.5;0.4,0.6",
                                     "intervals:0,1", "intervals:a,b"])
    def test_parse_errors(self, bad):
        with pytest.raises(SetSpecError):
            parse_set_spec(bad)

    def test_grid_counts(self):
        g = interval_grid("intervals:0.1,0.6", 4000)
        assert len(g) == 2001
        assert g.spacing[0] == pytest.approx(2.5e-4)

    def test_zero_length_interval(self):
        g = interval_grid("intervals:0.3,0.3", 1000)
        assert len(g) == 1 and g.spacing[0] == 1e-3

    def test_invalid_grids(self):
        with pytest.raises(ValueError):
            CompactSetGrid.from_points([0.0, 1.0], 0.1)
        with pytest.raises(ValueError):
            CompactSetGrid(Fraction(0), np.array([0.2, 0.1]), np.array([0.1, 0.1]))


class TestKernelMatrix:
    def test_two_points(self):
        M = kernel_matrix(CompactSetGrid.from_points([Fraction(1, 4), Fraction(3, 4)], 0.1), 1.0)
        assert M[0, 1] == M[1, 0] == pytest.approx(math.log(2), rel=1e-15)

    def test_diagonal_rule(self):
        M = kernel_matrix(CompactSetGrid.from_points([0.5], 1e-3), 1.0)
        assert M[0, 0] == pytest.approx(7.6009024595, rel=1e-10)

    def test_exponent_law(self):
        g = interval_grid("intervals:0.2,0.3", 200)
        assert np.allclose(kernel_matrix(g, 2.0), kernel_matrix(g, 1.0) ** 2, rtol=1e-14)

    def test_rules(self):
        g = interval_grid("intervals:0.2,0.3", 200)
        for rule in ("cell", "nearest", "exact"):
            M = kernel_matrix(g, 1.0, rule)
            assert np.array_equal(M, M.T)
        with pytest.raises(ValueError):
            kernel_matrix(g, 2.0, "exact")

    @given(st.fractions(Fraction(-1, 10), Fraction(1, 10)))
    @settings(max_examples=25, deadline=None)
    def test_translation_invariance_exact(self, shift):
        base = "intervals:{},{};{},{}"
        a = interval_grid(base.format(*(Fraction(x) + Fraction(1, 5) for x in ("0", "1/10", "3/10", "2/5"))), 300)
        b = interval_grid(base.format(*(Fraction(x) + Fraction(1, 5) + shift for x in ("0", "1/10", "3/10", "2/5"))),
                          300)
        assert np.array_equal(kernel_matrix(a, 1.0), kernel_matrix(b, 1.0))


class TestSolver:
    def test_one_point(self):
        r = minimize_energy(np.array([[3.5]]))
        assert r.weights.tolist() == [1.0] and r.energy == 3.5

    def test_symmetric_pair(self):
        r = minimize_energy(np.array([[2.0, 0.5], [0.5, 2.0]]), tol=1e-12)
        assert r.weights == pytest.approx([0.5, 0.5])

    def test_non_converged_flag(self):
        g = interval_grid("intervals:0.1,0.6", 400)
        r = minimize_energy(kernel_matrix(g, 1.0), tol=1e-12, max_iter=5)
        assert not r.converged and r.flag == "NON-CONVERGED" and r.iterations == 5

    def test_rejects_bad_matrix(self):
        with pytest.raises(ValueError):
            minimize_energy(np.array([[1.0, 2.0], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            minimize_energy(np.array([[np.inf]]))

    @given(st.integers(2, 30), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_invariants_on_random_clouds(self, n, seed):
        rng = np.random.default_rng(seed)
        pts = np.unique(np.round(rng.uniform(0.05, 0.9, n), 6))
        g = CompactSetGrid.from_points([Fraction(float(p)) for p in pts], 1e-4)
        M = kernel_matrix(g, 1.0)
        r = minimize_energy(M, tol=1e-9)
        assert abs(r.weights.sum() - 1) < 1e-12 and np.all(r.weights >= 0)
        assert np.all(np.diff(r.trace) <= 1e-12 * np.abs(r.trace[:-1]))
        assert r.duality_gap >= 0
        assert r.energy == pytest.approx(float(r.weights @ M @ r.weights), rel=1e-12)
        # the gap bounds the distance to the discrete optimum: no vertex mixture does better
        for i in range(len(pts)):
            assert r.energy - r.duality_gap <= M[i, i] + 1e-12

    def test_subset_monotonicity(self):
        g = interval_grid("intervals:0.1,0.5", 200)
        M = kernel_matrix(g, 1.0)
        full = minimize_energy(M, tol=1e-8)
        idx = np.arange(0, len(g), 3)
        sub = minimize_energy(M[np.ix_(idx, idx)], tol=1e-8)
        assert sub.energy >= full.energy - full.duality_gap - sub.duality_gap


class TestCapacity:
    def test_robin_constant(self):
        g = interval_grid("intervals:0.1,0.6", 4000)
        M = kernel_matrix(g, 1.0)
        r = minimize_energy(M)
        assert abs(r.energy - math.log(8)) / math.log(8) < 0.02
        assert r.duality_gap < 1e-4
        w = arcsine_cell_weights(0.1, 0.6, g.points)
        e_arc = float(w @ M @ w)
        assert abs(e_arc - math.log(8)) / math.log(8) < 0.02
        assert r.energy <= e_arc + r.duality_gap

    def test_refinement_table(self):
        rows = capacity("intervals:0.1,0.6", 1.0, (200, 400))
        assert [r.points for r in rows] == [101, 201]
        assert rows[-1].capacity == pytest.approx(1 / math.log(8), rel=0.03)
        text = refinement_csv(rows)
        assert text.splitlines()[0].startswith("resolution,W,C,gap,iters")

    @pytest.mark.parametrize("a,b", [("0.1,0.25", "0.35,0.5"), ("0.1,0.2", "0.6,0.8"), ("0.05,0.1", "0.12,0.5")])
    def test_subadditivity(self, a, b):
        def C(spec):
            return capacity(spec, 1.0, (2000,))[0].capacity
        assert C(f"intervals:{a};{b}") <= (C(f"intervals:{a}") + C(f"intervals:{b}")) * 1.05

    def test_degenerate_interval(self):
        Ws = [capacity("intervals:0.3,0.3", 1.0, (r,))[0].energy for r in (10, 1000, 100000)]
        assert Ws == sorted(Ws) and Ws[-1] == pytest.approx(abs(math.log(0.5e-5)))

    def test_robin_helper(self):
        assert robin_energy(0.5) == math.log(8)


class TestZeroCapacity:
    def test_single_point_exact(self):
        rep = zero_capacity_evidence([Fraction(1, 2)], 1.0, (1e-2, 1e-4, 1e-6))
        assert rep.energies == [abs(math.log(d / 2)) for d in (1e-2, 1e-4, 1e-6)]

    def test_cloud_grows(self):
        cloud = [Fraction(k, 11) for k in range(1, 11)]
        rep = zero_capacity_evidence(cloud, 1.0, (1e-2, 1e-3, 1e-4, 1e-5, 1e-6))
        assert rep.increasing and all(s > 0 for s in rep.slopes)

    def test_sigma2_faster(self):
        cloud = [Fraction(k, 11) for k in range(1, 11)]
        d = (1e-2, 1e-4, 1e-6)
        r1 = zero_capacity_evidence(cloud, 1.0, d)
        r2 = zero_capacity_evidence(cloud, 2.0, d)
        assert r2.increasing and r2.energies[-1] - r2.energies[0] > r1.energies[-1] - r1.energies[0]

    def test_cell_too_large(self):
        with pytest.raises(ValueError):
            zero_capacity_evidence([0.1, 0.1001], 1.0, (1e-2,))
