import numpy as np
import pytest
from scipy import stats

from conftest import torus_generator
from ssproj.errors import ZeroVector
from ssproj.grassmann import plane_distance, span_plane, torus_plane
from ssproj.group import (
    GeneratorSet,
    cyclic_vector_check,
    haar_convergence_check,
    orbit_line_span,
    orbit_plane_sample,
    random_element,
    rotation_angle,
    sample_group,
)
from ssproj.linalg import expm_skew, is_orthogonal, plane_rotation, rotation2

GOLDEN = (np.sqrt(5) - 1) / 2


def ks_2d_uniform(u, v):
    """Largest gap between the empirical joint CDF and u*v over sample corners."""
    below = (u[None, :] <= u[:, None]) & (v[None, :] <= v[:, None])
    return float(np.max(np.abs(below.mean(axis=1) - u * v)))


def test_identity_generator():
    gen = GeneratorSet((np.eye(3),))
    np.testing.assert_array_equal(random_element(gen, 17, seed=3), np.eye(3))
    assert len(gen.alphabet()) == 1


def test_generators_deduplicated():
    r = rotation2(1.0)
    assert len(GeneratorSet((r, r.copy(), np.eye(2))).generators) == 2


def test_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        GeneratorSet((2 * np.eye(2),))


def test_golden_rotation_equidistributes():
    gen = GeneratorSet((rotation2(2 * np.pi * GOLDEN),))
    elems = sample_group(gen, 1000, 1000, seed=0).elements
    angles = np.array([rotation_angle(m) for m in elems]) / (2 * np.pi)
    assert stats.kstest(angles, "uniform").statistic < 0.05


def test_golden_walk_law_close_to_uniform():
    # net exponent of a +-1 walk of length L is 2 Binom(L, 1/2) - L
    length = 1000
    k = np.arange(length + 1)
    w = stats.binom.pmf(k, length, 0.5)
    ang = np.mod((2 * k - length) * GOLDEN, 1.0)
    order = np.argsort(ang)
    assert np.max(np.abs(np.cumsum(w[order]) - ang[order])) < 0.05


def test_torus_elements_block_diagonal_and_equidistributed(torus):
    gen = GeneratorSet.from_ifs(torus)
    elems = sample_group(gen, 1000, seed=2).elements
    assert np.abs(elems[:, :2, 2:]).max() < 1e-12 and np.abs(elems[:, 2:, :2]).max() < 1e-12
    u = np.array([rotation_angle(m[:2, :2]) for m in elems]) / (2 * np.pi)
    v = np.array([rotation_angle(m[2:, 2:]) for m in elems]) / (2 * np.pi)
    assert ks_2d_uniform(u, v) < 0.07


@pytest.mark.parametrize("length", [1, 31, 32, 100, 2000])
def test_samples_orthogonal(tetra, length):
    elems = sample_group(GeneratorSet.from_ifs(tetra), 20, length, seed=0).elements
    assert all(is_orthogonal(m, 1e-8) for m in elems)


def test_prefix_stable_and_reproducible(torus):
    gen = GeneratorSet.from_ifs(torus)
    a = sample_group(gen, 5, seed=4).elements
    b = sample_group(gen, 9, seed=4).elements
    np.testing.assert_array_equal(a, b[:5])
    with pytest.raises(ValueError):
        sample_group(gen, 1, 0)


def test_left_invariance_surrogate(torus):
    gen = GeneratorSet.from_ifs(torus)
    h = gen.generators[1]
    a = sample_group(gen, 600, seed=11).elements
    b = h @ sample_group(gen, 600, seed=12).elements
    pmin = min(stats.ks_2samp(a[:, i, j], b[:, i, j]).pvalue for i in range(4) for j in range(4) if np.ptp(a[:, i, j]) > 0)
    assert pmin > 0.01 / 16


def test_haar_convergence_self_check(torus):
    assert haar_convergence_check(GeneratorSet.from_ifs(torus), count=300)["passed"]


class TestCyclic:
    def test_torus_examples(self):
        a = torus_generator(1.0, 2.0)
        assert cyclic_vector_check(a, [1, 0, 1, 0])
        assert not cyclic_vector_check(a, [1, 0, 0, 0])
        assert not cyclic_vector_check(torus_generator(1.0, 0.0), [1, 0, 1, 0])

    def test_equal_rates_not_cyclic(self):
        # with lambda_1 = lambda_2 the Krylov space of any v has dimension 2
        assert not cyclic_vector_check(torus_generator(1.0, 1.0), [1, 0, 1, 0])

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            cyclic_vector_check(torus_generator(1.0, 2.0), [0, 0, 0, 0])

    @pytest.mark.parametrize("t", [0.3, 1.7])
    @pytest.mark.parametrize("v", [[1, 0, 1, 0], [1, 0, 0, 0], [0.2, -1, 0.5, 3]])
    def test_invariant_under_flow_and_scaling(self, t, v):
        a = torus_generator(1.0, 2.0)
        v = np.array(v, dtype=float)
        base = cyclic_vector_check(a, v)
        assert cyclic_vector_check(a, 37.5 * v) == base
        assert cyclic_vector_check(a, expm_skew(t * a) @ v) == base


class TestOrbitSpan:
    def test_trivial_group(self):
        assert orbit_line_span(GeneratorSet((np.eye(3),)), [1.0, 2.0, 3.0]) == 1

    def test_cone_circle(self):
        gen = GeneratorSet((plane_rotation(3, 0, 1, 2 * np.pi * GOLDEN),))
        assert orbit_line_span(gen, np.array([1.0, 0.0, 1.0]) / np.sqrt(2)) == 3

    def test_fixed_axis(self):
        gen = GeneratorSet((plane_rotation(3, 0, 1, 2 * np.pi * GOLDEN),))
        assert orbit_line_span(gen, [0.0, 0.0, 1.0]) == 1

    def test_monotone_in_samples(self, tetra):
        gen = GeneratorSet.from_ifs(tetra)
        spans = [orbit_line_span(gen, [1.0, 0.0, 1.0], samples=s) for s in (0, 1, 4, 16)]
        assert spans == sorted(spans)

    def test_zero_vector(self, tetra):
        with pytest.raises(ZeroVector):
            orbit_line_span(GeneratorSet.from_ifs(tetra), [0.0, 0.0, 0.0])


class TestOrbitPlanes:
    def test_trivial_group(self):
        p = span_plane([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]])
        for q in orbit_plane_sample(GeneratorSet((np.eye(3),)), p, samples=5):
            assert plane_distance(p, q) < 1e-12

    def test_torus_family_preserved(self, torus):
        p = torus_plane([1.0, 0.0, 1.0, 0.0], 1.0)
        for q in orbit_plane_sample(GeneratorSet.from_ifs(torus), p, samples=32, seed=3):
            pr = q.projector
            assert np.abs(pr @ pr - pr).max() < 1e-9
            # any vector of a family member determines it, so the first basis column is the minimizer
            assert plane_distance(q, torus_plane(q.basis[:, 0], 1.0)) <= 1e-8
