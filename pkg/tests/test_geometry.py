#!/usr/bin/env python3
"""
Tests for the rank-one quadric geometry: group generators, Iwasawa
projection, horospheres and the Cauchy kernel.
"""

import sys
import os
import cmath
import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from horokit.errors import (
    BranchCutHit,
    ConfigInvalid,
    NearSingularKernel,
    NonOrthogonalBlock,
    OutsideDenseSet,
    ShapeMismatch,
)
from horokit.geometry import (
    HALF_PI,
    DenseCoordinates,
    GroupElement,
    HoroParam,
    QuadricPoint,
    RankOneModel,
    box,
    cauchy_kernel,
    coset_from_zeta,
    dual_fiber_contains,
    eval_f_lambda,
    h_element,
    horosphere_contains,
    iwasawa_point,
    iwasawa_reconstruct,
    make_generator,
    minkowski_pair,
    n_orbit_points,
    point_invariant,
    random_group_element,
    sample_D,
    sample_Xi,
    sample_Y,
    weyl_element,
    xi_from_coset,
    y_coset,
)

MODEL = RankOneModel(2)
finite = st.floats(-2.0, 2.0)


class TestModel(unittest.TestCase):
    """Test base points and the bilinear pairing."""

    def test_base_points(self):
        self.assertAlmostEqual(box(MODEL.x_o), 1.0)
        self.assertAlmostEqual(box(MODEL.xi_o), 0.0)
        self.assertAlmostEqual(box(MODEL.y_o), 1.0)
        self.assertEqual(MODEL.rho, 0.5)
        self.assertEqual(MODEL.k, 1)
        self.assertIsNone(RankOneModel(3).k)

    def test_small_model_rejected(self):
        with self.assertRaises(ConfigInvalid):
            RankOneModel(1)

    def test_pairing_shape_mismatch(self):
        with self.assertRaises(ShapeMismatch):
            minkowski_pair(np.zeros(3), np.zeros(4))

    def test_pairing_broadcasts(self):
        z = np.ones((4, 1, 3))
        w = np.ones((1, 5, 3))
        self.assertEqual(minkowski_pair(z, w).shape, (4, 5))

    @settings(max_examples=50, deadline=None)
    @given(finite, finite, finite, finite, finite, finite, finite)
    def test_pairing_bilinear(self, a, b, c, d, e, f, s):
        z = np.array([a, b + 1j * c, d])
        w = np.array([e, f, 1j * s])
        v = np.array([1.0, -0.5j, 2.0])
        left = minkowski_pair(z + s * v, w)
        right = minkowski_pair(z, w) + s * minkowski_pair(v, w)
        self.assertAlmostEqual(abs(left - right), 0.0, places=10)
        self.assertAlmostEqual(abs(minkowski_pair(z, w) - minkowski_pair(w, z)), 0.0, places=12)


class TestGroup(unittest.TestCase):
    """Test the generators a_z, n_v and k_R."""

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0), st.floats(-1.0, 1.0))
    def test_a_group_law(self, s, t, x):
        left = make_generator('a_z', complex(s, x)) @ make_generator('a_z', t)
        right = make_generator('a_z', complex(s + t, x))
        np.testing.assert_allclose(left.m, right.m, atol=1e-10 * max(1.0, math.exp(abs(s) + abs(t))))

    @settings(max_examples=40, deadline=None)
    @given(finite, finite)
    def test_n_group_law(self, u, v):
        left = make_generator('n_v', [u]) @ make_generator('n_v', [v])
        np.testing.assert_allclose(left.m, make_generator('n_v', [u + v]).m, atol=1e-11)

    def test_inverse(self):
        rng = np.random.default_rng(7)
        g = random_group_element(rng, MODEL)
        np.testing.assert_allclose((g @ g.inverse()).m, np.eye(3), atol=1e-10)

    def test_real_flags(self):
        self.assertTrue(make_generator('a_z', 0.5).real)
        self.assertFalse(make_generator('a_z', 0.5j).real)

    def test_invalid_generators(self):
        with self.assertRaises(ShapeMismatch):
            make_generator('a_z', [1.0, 2.0])
        with self.assertRaises(ShapeMismatch):
            make_generator('n_v', [1.0, 2.0])
        with self.assertRaises(ShapeMismatch):
            make_generator('k_R', np.eye(3))
        with self.assertRaises(NonOrthogonalBlock):
            make_generator('k_R', np.array([[2.0, 0.0], [0.0, 0.5]]))
        with self.assertRaises(ShapeMismatch):
            make_generator('b_z', 1.0)

    def test_non_lorentz_matrix(self):
        with self.assertRaises(ShapeMismatch):
            GroupElement(np.diag([2.0, 1.0, 1.0]))
        with self.assertRaises(ShapeMismatch):
            GroupElement(np.ones((3, 2)))

    def test_weyl_element_flips_a(self):
        w = weyl_element(MODEL)
        flipped = w @ make_generator('a_z', 0.7) @ w.inverse()
        np.testing.assert_allclose(flipped.m, make_generator('a_z', -0.7).m, atol=1e-14)

    def test_h_fixes_y_o(self):
        for t in (-1.5, 0.0, 0.8):
            np.testing.assert_allclose(h_element(t).act(MODEL.y_o), MODEL.y_o, atol=1e-14)


class TestPoints(unittest.TestCase):
    """Test points, the Iwasawa projection and the invariant u."""

    def test_off_quadric(self):
        with self.assertRaises(ShapeMismatch):
            QuadricPoint([2.0, 0.0, 0.0])

    def test_iwasawa_roundtrip(self):
        for point, X in sample_D(MODEL, 40, 11):
            factors = iwasawa_point(point)
            np.testing.assert_allclose(iwasawa_reconstruct(factors, MODEL), point.z, atol=1e-10)
            self.assertLessEqual(abs(complex(factors.w).imag), abs(X) + 1e-10)

    def test_iwasawa_branch_cut(self):
        with self.assertRaises(BranchCutHit):
            iwasawa_point(QuadricPoint([-1.0, 0.0, 0.0]))

    def test_invariant_is_k_invariant(self):
        rng = np.random.default_rng(3)
        point, _ = sample_D(MODEL, 1, 5)[0]
        k = random_group_element(rng, MODEL, spread=0.0)
        self.assertAlmostEqual(abs(point_invariant(k.act(point.z)) - point.invariant), 0.0, places=12)

    def test_n_orbit_points_on_quadric(self):
        pts = n_orbit_points(MODEL, 0.3 + 0.4j, np.linspace(-3.0, 3.0, 7))
        np.testing.assert_allclose(box(pts), np.ones(7), atol=1e-12)

    def test_n_orbit_points_higher_rank(self):
        model = RankOneModel(3)
        pts = n_orbit_points(model, 0.2 + 0.1j, np.linspace(-2.0, 2.0, 5))
        np.testing.assert_array_equal(pts[..., 2], np.zeros(5))
        np.testing.assert_allclose(box(pts), np.ones(5), atol=1e-12)
        QuadricPoint(pts[3])

    def test_samples_are_deterministic(self):
        first = [p.z for p in sample_Y(MODEL, 5, 42)]
        second = [p.z for p in sample_Y(MODEL, 5, 42)]
        np.testing.assert_array_equal(np.array(first), np.array(second))

    def test_y_coset_roundtrip(self):
        for y in sample_Y(MODEL, 30, 9):
            g = y_coset(y, MODEL)
            np.testing.assert_allclose(g.act(MODEL.y_o), y.z, atol=1e-9 * max(1.0, float(np.max(np.abs(y.z)))))


class TestHorospheres(unittest.TestCase):
    """Test horosphere parameters, incidence and the Cauchy kernel."""

    def test_null_required(self):
        with self.assertRaises(ShapeMismatch):
            HoroParam(np.array([1.0, 0.0, 0.0]))
        with self.assertRaises(ShapeMismatch):
            HoroParam(np.zeros(3))

    def test_coset_must_match(self):
        g = make_generator('a_z', 0.3)
        with self.assertRaises(ShapeMismatch):
            HoroParam(MODEL.xi_o, g=g, t=0.0)
        with self.assertRaises(ShapeMismatch):
            xi_from_coset(g, HALF_PI)

    def test_incidence(self):
        for xi in sample_Xi(MODEL, 1.0, 5, 17):
            for v in (-1.0, 0.0, 2.0):
                g = make_generator('n_v', [v]) @ make_generator('a_z', 1j * xi.t)
                point = QuadricPoint(xi.g.act(g.act(MODEL.x_o)))
                self.assertTrue(horosphere_contains(xi, point))
                self.assertTrue(dual_fiber_contains(point, xi, MODEL))

    def test_not_incident(self):
        xi = xi_from_coset(make_generator('a_z', 0.0), 0.0)
        point = QuadricPoint(make_generator('a_z', 0.5).act(MODEL.x_o))
        self.assertFalse(horosphere_contains(xi, point))

    def test_shifted_point_not_incident(self):
        """Moving off the horosphere along A breaks both incidence tests."""
        for xi in sample_Xi(MODEL, 1.0, 5, 23):
            g = make_generator('n_v', [0.7]) @ make_generator('a_z', 1j * xi.t + 0.5)
            point = QuadricPoint(xi.g.act(g.act(MODEL.x_o)))
            self.assertAlmostEqual(abs(minkowski_pair(xi.zeta, point.z) - math.exp(-0.5)), 0.0, places=9)
            self.assertFalse(horosphere_contains(xi, point))
            self.assertFalse(dual_fiber_contains(point, xi, MODEL))

    def test_coset_from_zeta(self):
        angle = 0.8
        zeta = 1.3 * np.array([1.0, math.cos(angle), math.sin(angle)])
        g = coset_from_zeta(zeta, MODEL)
        np.testing.assert_allclose(g.act(MODEL.xi_o), zeta, atol=1e-12)
        with self.assertRaises(ShapeMismatch):
            coset_from_zeta(1j * zeta, MODEL)

    def test_cauchy_kernel(self):
        xi = HoroParam(MODEL.xi_o)
        y = QuadricPoint(MODEL.y_o)
        self.assertAlmostEqual(abs(cauchy_kernel(xi, y) - 1.0 / (1.0 + 1j)), 0.0, places=14)

    def test_cauchy_kernel_singular(self):
        xi = HoroParam(np.array([1j, 0.0, 1j]))
        with self.assertRaises(NearSingularKernel):
            cauchy_kernel(xi, QuadricPoint(MODEL.y_o))

    def test_separation_on_admissible_set(self):
        xis = sample_Xi(MODEL, HALF_PI - 0.1, 30, 1)
        ys = sample_Y(MODEL, 30, 2)
        zeta = np.array([x.zeta for x in xis])
        y = np.array([p.z for p in ys])
        gap = np.abs(1.0 - minkowski_pair(zeta[:, None, :], y[None, :, :]))
        self.assertGreater(float(np.min(gap)), 0.05)

    def test_pairing_never_real_nonzero(self):
        """On Xi_c x Y, xi.y is either off the real axis or zero."""
        c = HALF_PI - 0.05
        xis = sample_Xi(MODEL, c, 40, 3)
        ys = sample_Y(MODEL, 40, 4)
        zeta = np.array([x.zeta for x in xis])
        y = np.array([p.z for p in ys])
        pairing = minkowski_pair(zeta[:, None, :], y[None, :, :])
        off_axis = np.abs(pairing.imag) > 1e-9
        vanishing = np.abs(pairing) <= 1e-9 / math.cos(c)
        self.assertTrue(np.all(off_axis | vanishing))
        self.assertGreater(float(np.min(np.abs(1.0 - pairing))), 0.0)

    def test_sample_xi_invalid(self):
        with self.assertRaises(ConfigInvalid):
            sample_Xi(MODEL, 0.0, 3, 1)


class TestDenseCoordinates(unittest.TestCase):
    """Test the H-spherical vectors on the dense subset of Xi_+."""

    def test_value(self):
        coords = DenseCoordinates(weyl=1, s=0.2)
        expected = cmath.exp((0.5j * math.pi + 0.2) * (2.0 - 1.0) * 0.5)
        self.assertAlmostEqual(abs(eval_f_lambda(coords, 2.0) - expected), 0.0, places=14)

    def test_outside(self):
        with self.assertRaises(OutsideDenseSet):
            eval_f_lambda(None, 1.0)
        with self.assertRaises(OutsideDenseSet):
            eval_f_lambda(DenseCoordinates(weyl=1, s=2.0j), 1.0)


if __name__ == '__main__':
    unittest.main()
