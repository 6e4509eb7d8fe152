"""Lower convex hulls and composed-hazard minorants."""
from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from mhrfit.gcm import (ConvexMinorantFit, PlanePoint, gcm_of_composed_hazards,
                        left_slope_at, lower_convex_hull)
from mhrfit.survival_core import StepFunction
from oracles import (composed_values_on_grid, gcm_on_grid_pava,
                     gcm_values_exact, gcm_vertices_exact)


def hull_of(coords):
    return lower_convex_hull([PlanePoint(u, v) for u, v in coords])


class TestLowerConvexHull:
    def test_four_point_example(self):
        fit = hull_of([(0, 0), (1, 2), (2, 2.5), (3, 4.5)])
        assert [(p.u, p.v) for p in fit.vertices] == [(0, 0), (2, 2.5), (3, 4.5)]
        assert list(fit.slopes) == [1.25, 2.0]

    def test_collinear_points_stay_vertices(self):
        fit = hull_of([(0, 0), (1, 1), (2, 2)])
        assert [(p.u, p.v) for p in fit.vertices] == [(0, 0), (1, 1), (2, 2)]
        assert list(fit.slopes) == [1.0, 1.0]

    def test_single_point(self):
        fit = hull_of([(0, 0)])
        assert len(fit.vertices) == 1
        assert fit.slopes == ()

    def test_empty_input(self):
        with pytest.raises(ValueError, match="empty"):
            lower_convex_hull([])

    def test_duplicate_abscissa_keeps_minimum(self):
        fit = hull_of([(0, 0), (1, 5), (1, 2), (2, 4)])
        assert [(p.u, p.v) for p in fit.vertices] == [(0, 0), (1, 2), (2, 4)]

    def test_value_at_is_plain_float(self):
        fit = hull_of([(0, 0), (2, 2.5), (3, 4.5)])
        out = fit.value_at(1.0)
        assert type(out) is float
        assert out == 1.25
        with pytest.raises(ValueError, match="outside hull domain"):
            fit.value_at(3.5)

    def test_matches_exact_envelope_oracle(self):
        rng = np.random.default_rng(101)
        for _ in range(300):
            size = int(rng.integers(1, 13))
            # eighths in [0, 10]: exact in binary, so hull sweeps are exact
            coords = rng.integers(0, 81, size=(size, 2)) / 8.0
            fit = hull_of(coords.tolist())
            expected = gcm_vertices_exact(coords.tolist())
            got = [(Fraction(p.u), Fraction(p.v)) for p in fit.vertices]
            assert got == expected
            values = dict(gcm_values_exact(coords.tolist()))
            vertex_us = {Fraction(p.u) for p in fit.vertices}
            for u, gv in values.items():
                diff = abs(Fraction(fit.value_at(float(u))) - gv)
                # exact at vertices; interpolation rounding in between
                assert diff == 0 if u in vertex_us else diff < Fraction(1, 10 ** 9)

    def test_minorant_and_convexity_properties(self):
        rng = np.random.default_rng(55)
        for _ in range(200):
            size = int(rng.integers(2, 13))
            coords = rng.uniform(0.0, 10.0, size=(size, 2))
            fit = hull_of(coords.tolist())
            assert np.all(np.diff(fit.slopes) >= -1e-12)
            for u, v in coords.tolist():
                assert fit.value_at(u) <= v + 1e-9
            vertex_set = {(p.u, p.v) for p in fit.vertices}
            assert vertex_set <= {(u, v) for u, v in coords.tolist()}


class TestLeftSlopeAt:
    def test_pinned_slopes(self):
        fit = hull_of([(0, 0), (2, 2.5), (3, 4.5)])
        assert left_slope_at(fit, 1.5) == 1.25
        assert left_slope_at(fit, 2.0) == 1.25
        assert left_slope_at(fit, 2.5) == 2.0

    def test_domain_errors(self):
        fit = hull_of([(0, 0), (2, 2.5)])
        with pytest.raises(ValueError, match="outside hull domain"):
            left_slope_at(fit, 0.0)
        with pytest.raises(ValueError, match="outside hull domain"):
            left_slope_at(fit, 2.5)

    def test_nondecreasing_in_u(self):
        rng = np.random.default_rng(17)
        coords = rng.uniform(0.0, 10.0, size=(10, 2))
        fit = hull_of(coords.tolist())
        us = np.linspace(fit.vertices[0].u + 1e-9, fit.vertices[-1].u, 50)
        slopes = [left_slope_at(fit, float(u)) for u in us]
        assert np.all(np.diff(slopes) >= 0)


class TestComposedHazards:
    def test_hand_traced_example(self):
        lam_S = StepFunction(np.array([1.0, 3.0]), np.array([0.5, 1.5]))
        lam_T = StepFunction(np.array([2.0, 4.0]), np.array([0.5, 1.5]))
        fit = gcm_of_composed_hazards(lam_S, lam_T, eta=1.5)
        assert [(p.u, p.v) for p in fit.vertices] == [(0, 0), (0.5, 0.5),
                                                      (1.5, 1.5)]
        assert list(fit.slopes) == [1.0, 1.0]

    def test_identical_hazards_give_unit_slopes(self):
        lam = StepFunction(np.array([1.0, 2.0, 5.0]), np.array([0.2, 0.9, 2.0]))
        fit = gcm_of_composed_hazards(lam, lam, eta=2.0)
        assert all(s == 1.0 for s in fit.slopes)

    def test_eta_zero_degenerate(self):
        lam = StepFunction(np.array([1.0]), np.array([0.5]))
        fit = gcm_of_composed_hazards(lam, lam, eta=0.0)
        assert [(p.u, p.v) for p in fit.vertices] == [(0.0, 0.0)]

    def test_eta_beyond_support(self):
        lam = StepFunction(np.array([1.0]), np.array([0.5]))
        with pytest.raises(ValueError, match="eta beyond support"):
            gcm_of_composed_hazards(lam, lam, eta=0.6)

    def test_interior_eta_appends_boundary_point(self):
        lam_S = StepFunction(np.array([1.0, 3.0]), np.array([0.5, 1.5]))
        lam_T = StepFunction(np.array([2.0, 4.0]), np.array([0.5, 1.5]))
        fit = gcm_of_composed_hazards(lam_S, lam_T, eta=1.0)
        assert fit.vertices[-1].u == 1.0
        # on (0.5, 1.5] the composition is lambda_S at lambda_T's second knot
        assert fit.vertices[-1].v == 1.5

    def test_matches_dense_grid_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(25):
            k_s = int(rng.integers(1, 8))
            k_t = int(rng.integers(1, 8))
            lam_S = StepFunction(np.sort(rng.uniform(0.1, 5.0, k_s)),
                                 np.cumsum(rng.uniform(0.05, 0.6, k_s)))
            lam_T = StepFunction(np.sort(rng.uniform(0.1, 5.0, k_t)),
                                 np.cumsum(rng.uniform(0.05, 0.6, k_t)))
            eta = float(rng.uniform(0.3, 1.0)) * lam_T.sup
            fit = gcm_of_composed_hazards(lam_S, lam_T, eta)
            spacing = 1e-4 * eta
            grid = np.linspace(0.0, eta, int(np.ceil(eta / spacing)) + 1)
            h_vals = composed_values_on_grid(lam_S, lam_T, grid)
            oracle = gcm_on_grid_pava(grid, h_vals)
            got = fit.value_at(grid)
            tol = 2.0 * spacing * max(fit.slopes, default=0.0) + 1e-9
            assert np.max(np.abs(got - oracle)) <= tol
