import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import torus_generator
from ssproj.curve import (
    SmoothCurve,
    adapted_check,
    arc_length_reparametrize,
    circle,
    frenet_frame,
    frenet_residual,
    helix,
    line,
    model_curve_s2,
    nondegeneracy_check,
    one_param_curve,
    osculating_plane,
    planar_circle_3d,
    reversed_curve,
    sphere_curve,
    tabulated,
)
from ssproj.errors import DegenerateOsculation, NotUnitSpeed, VanishingCurvature, ZeroVector
from ssproj.grassmann import orthocomplement, plane_distance, random_orthogonal, span_plane
from ssproj.group import GeneratorSet, cyclic_vector_check, orbit_plane_sample
from ssproj.linalg import expm_skew, plane_rotation, rotation2

GRID = np.linspace(-1.0, 1.0, 9)


class TestOsculating:
    def test_tangent_line_of_sphere_curve(self):
        p = osculating_plane(sphere_curve(), 0.0, 1)
        assert plane_distance(p, span_plane([[0.0, 1.0, 0.0]])) < 1e-12

    def test_osculating_plane_of_sphere_curve(self):
        p = osculating_plane(sphere_curve(), 0.0, 2)
        assert plane_distance(p, span_plane([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])) < 1e-12

    def test_line_degenerate(self):
        with pytest.raises(DegenerateOsculation):
            osculating_plane(line([1.0, 2.0, 0.0]), 0.3, 2)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6), st.floats(-2, 2), st.integers(1, 3))
    def test_equivariance(self, seed, theta, k):
        g = random_orthogonal(3, np.random.default_rng(seed))
        c = model_curve_s2()
        lhs = osculating_plane(c.transformed(g), theta, k)
        rhs = osculating_plane(c, theta, k).transformed(g)
        assert plane_distance(lhs, rhs) < 1e-9


class TestNondegeneracy:
    def test_model_curve_constant_det(self):
        rep = nondegeneracy_check(model_curve_s2(), GRID)
        assert rep["passed"]
        np.testing.assert_allclose(rep["dets"], 2**-1.5, rtol=1e-12)

    def test_planar_circle_fails(self):
        assert not nondegeneracy_check(planar_circle_3d(), GRID)["passed"]

    def test_torus_one_param_passes(self):
        c = one_param_curve(torus_generator(1.0, 2.0), np.array([1.0, 0.0, 1.0, 0.0]) / np.sqrt(2))
        assert nondegeneracy_check(c, GRID)["passed"]


class TestAdapted:
    @pytest.fixture
    def cone_orbit(self):
        # the closure of an irrational z-rotation is the full circle group
        base = span_plane([[1.0, 0.0, 1.0]])
        return [base.transformed(plane_rotation(3, 0, 1, a)) for a in np.linspace(0, 2 * np.pi, 1000, endpoint=False)]

    def test_model_curve_tangents_in_cone_orbit(self, cone_orbit):
        rep = adapted_check(model_curve_s2(), cone_orbit, 1, np.linspace(-3, 3, 25))
        assert rep["passed"] and rep["orbit_size"] == 1000

    def test_sampled_orbit_gap_shrinks_with_word_length(self):
        gen = GeneratorSet((plane_rotation(3, 0, 1, np.pi * (np.sqrt(5) - 1)),))
        base = span_plane([[1.0, 0.0, 1.0]])
        gaps = [
            adapted_check(model_curve_s2(), orbit_plane_sample(gen, base, 500, seed=1, length=L), 1, GRID)["max_gap"]
            for L in (64, 1024)
        ]
        assert gaps[1] < gaps[0]

    def test_planar_circle_not_adapted(self, cone_orbit):
        assert not adapted_check(planar_circle_3d(), cone_orbit, 1, GRID)["passed"]
        with pytest.raises(DegenerateOsculation):
            adapted_check(planar_circle_3d(), cone_orbit, 3, GRID)

    def test_empty_orbit(self):
        with pytest.raises(ValueError):
            adapted_check(model_curve_s2(), [], 1, GRID)


class TestFrenet:
    def test_unit_circle(self):
        for t in GRID:
            f = frenet_frame(circle(), t)
            assert f.curvatures[0] == pytest.approx(1.0, abs=1e-12)
            np.testing.assert_allclose(f.frame[0], circle().derivative(t, 1), atol=1e-12)

    @pytest.mark.parametrize("a, b, kappa", [(1.0, 1.0, (0.5, 0.5)), (0.5**0.5, 0.5**0.5, (0.5**0.5, 0.5**0.5)), (1.0, 0.5, (0.8, 0.4)), (2.0, -1.0, (0.4, -0.2))])
    def test_helix_curvatures(self, a, b, kappa):
        np.testing.assert_allclose(frenet_frame(helix(a, b), 0.7).curvatures, kappa, atol=1e-12)

    def test_frame_orthonormal_and_positive(self):
        rng = np.random.default_rng(0)
        c = helix(1.0, 0.5)
        for t in rng.uniform(-10, 10, 100):
            f = frenet_frame(c, t)
            assert np.abs(f.frame @ f.frame.T - np.eye(3)).max() < 1e-8
            assert np.linalg.det(f.frame) > 0 and f.curvatures[0] > 0

    @pytest.mark.parametrize("c", [circle(), helix(1.0, 1.0), helix(1.0, 0.5)], ids=["circle", "helix11", "helix105"])
    def test_structure_residual(self, c):
        assert max(frenet_residual(c, t) for t in GRID) <= 1e-4

    def test_not_unit_speed(self):
        with pytest.raises(NotUnitSpeed):
            frenet_frame(circle(2.0), 0.0)

    def test_degenerate(self):
        with pytest.raises(DegenerateOsculation):
            frenet_frame(line([0.6, 0.8, 0.0]), 0.0)

    def test_arc_length_reparametrization(self):
        u = arc_length_reparametrize(circle(2.0))
        np.testing.assert_allclose(u(np.pi), [0.0, 2.0], atol=1e-7)
        f = frenet_frame(u, 0.5)
        assert f.curvatures[0] == pytest.approx(0.5, abs=1e-5)


class TestReversed:
    def test_circle_self_dual(self):
        r = reversed_curve(circle(), steps=500)
        for t in (0.1, 0.25, 0.4):
            assert frenet_frame(r, t).curvatures[0] == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("a, b", [(1.0, 0.5), (1.0, 2.0)])
    def test_helix_curvatures_swap(self, a, b):
        c = helix(a, b)
        r = reversed_curve(c, steps=1000)
        kappa = frenet_frame(c, 0.0).curvatures
        for t in (0.2, 0.5, 0.8):
            np.testing.assert_allclose(frenet_frame(r, t).curvatures, kappa[::-1], atol=1e-6)

    def test_negative_torsion_flipped(self):
        r = reversed_curve(helix(1.0, -0.5), steps=500)
        np.testing.assert_allclose(frenet_frame(r, 0.3).curvatures, [0.4, 0.8], atol=1e-6)

    def test_span_is_complement_of_tangent(self):
        c = helix(1.0, 0.5)
        r = reversed_curve(c, steps=1000)
        for t in (0.1, 0.5, 0.9):
            e1 = frenet_frame(c, t).frame[0]
            der = r.derivatives(t, 2)
            assert np.abs(der @ e1).max() <= 1e-4
            # the same plane built as an orthocomplement
            assert plane_distance(osculating_plane(r, t, 2), orthocomplement(span_plane([e1]))) <= 1e-4

    def test_vanishing_curvature(self):
        with pytest.raises(VanishingCurvature):
            reversed_curve(helix(1.0, 0.0), steps=10)


class TestOneParam:
    def test_zero_generator_is_line(self):
        v = np.array([1.0, 2.0, 2.0])
        c = one_param_curve(np.zeros((3, 3)), v)
        np.testing.assert_allclose(c(1.5), 1.5 * v, atol=1e-14)
        assert not nondegeneracy_check(c, GRID)["passed"]

    def test_rotation_generator_gives_unit_circle(self):
        a = np.array([[0.0, -1.0], [1.0, 0.0]])
        c = one_param_curve(a, [1.0, 0.0])
        for t in GRID:
            assert np.linalg.norm(c.derivative(t, 1)) == pytest.approx(1.0)
            np.testing.assert_allclose(c.derivative(t, 1), rotation2(t) @ [1.0, 0.0], atol=1e-14)
        assert nondegeneracy_check(c, GRID)["passed"]

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            one_param_curve(torus_generator(1.0, 2.0), np.zeros(4))

    def test_closed_form_matches_differencing(self):
        a = torus_generator(1.0, 2.0)
        v = np.array([1.0, 0.0, 1.0, 0.0])
        c = one_param_curve(a, v)
        fd = SmoothCurve(c.func)
        for t in (0.0, 0.8, -1.3):
            for j in (1, 2, 3):
                np.testing.assert_allclose(fd.derivative(t, j), c.derivative(t, j), atol=1e-6)
            np.testing.assert_allclose(c.derivative(t, 3), a @ c.derivative(t, 2), atol=1e-12)
            np.testing.assert_allclose(c.derivative(t, 2), expm_skew(t * a) @ a @ v, atol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_nondegenerate_iff_cyclic(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((4, 4))
        a = m - m.T
        v = rng.standard_normal(4)
        if seed % 2:
            a = torus_generator(1.0, float(rng.choice([0.0, 1.0, 2.0])))
            v = np.array([1.0, 0.0, rng.choice([0.0, 1.0]), 0.0])
        c = one_param_curve(a, v)
        dets = [abs(np.linalg.det(np.column_stack([expm_skew(t * a) @ np.linalg.matrix_power(a, j) @ v for j in range(4)]))) for t in GRID]
        assert nondegeneracy_check(c, GRID)["passed"] == cyclic_vector_check(a, v) == (min(dets) > 1e-8)


class TestFiniteDifferences:
    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_second_order_halving_ratio(self, j):
        c = helix(1.0, 0.5)
        t = 0.4
        exact = c.derivative(t, j)
        fd = SmoothCurve(c.func)
        e1 = np.linalg.norm(fd.fd_derivative(t, j, h=4e-2, richardson=False) - exact)
        e2 = np.linalg.norm(fd.fd_derivative(t, j, h=2e-2, richardson=False) - exact)
        assert 3.5 <= e1 / e2 <= 4.5

    @pytest.mark.parametrize("j", [1, 2, 3, 4])
    def test_richardson_default_accuracy(self, j):
        c = model_curve_s2()
        fd = SmoothCurve(c.func)
        np.testing.assert_allclose(fd.derivative(0.3, j), c.derivative(0.3, j), atol=1e-5)

    def test_tabulated_spline_follows_curve(self):
        ts = np.linspace(0, 2, 201)
        c = helix(1.0, 1.0)
        s = tabulated(ts, np.array([c(t) for t in ts]))
        np.testing.assert_allclose(s(1.03), c(1.03), atol=1e-10)
        np.testing.assert_allclose(s.derivative(1.03, 2), c.derivative(1.03, 2), atol=1e-6)
