import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ssproj.errors import DegenerateSpan
from ssproj.linalg import (
    block_rotation,
    block_skew,
    expm,
    expm_skew,
    gram_schmidt,
    is_orthogonal,
    krylov_matrix,
    nearest_orthogonal,
    numerical_rank,
    singular_values,
)

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def skew_from(m):
    return m - m.T


class TestGramSchmidt:
    def test_identity_is_fixed(self):
        np.testing.assert_allclose(gram_schmidt([[1, 0], [0, 1]]), np.eye(2))

    def test_hand_example(self):
        out = gram_schmidt([[1, 1, 0], [1, 0, 0]])
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(out, [[s, s, 0], [s, -s, 0]], atol=1e-15)
        np.testing.assert_allclose(out @ out.T, np.eye(2), atol=1e-10)

    def test_dependent_rows(self):
        with pytest.raises(DegenerateSpan):
            gram_schmidt([[1, 0], [2, 0]])

    def test_too_many_vectors(self):
        with pytest.raises(DegenerateSpan):
            gram_schmidt([[1, 0], [0, 1], [1, 1]])

    @settings(max_examples=60, deadline=None)
    @given(arrays(float, (3, 5), elements=finite))
    def test_projector_preserved(self, v):
        if numerical_rank(v, 1e-6) < 3:
            return
        q = gram_schmidt(v)
        np.testing.assert_allclose(q @ q.T, np.eye(3), atol=1e-10)
        # projector onto the row space, computed independently
        p_ref = v.T @ np.linalg.pinv(v @ v.T) @ v
        np.testing.assert_allclose(q.T @ q, p_ref, atol=1e-8)


class TestExpm:
    def test_zero(self):
        np.testing.assert_array_equal(expm_skew(np.zeros((3, 3))), np.eye(3))

    def test_quarter_turn(self):
        a = np.array([[0, -np.pi / 2], [np.pi / 2, 0]])
        np.testing.assert_allclose(expm_skew(a), [[0, -1], [1, 0]], atol=1e-14)

    def test_torus_blocks(self):
        a = block_skew([1.0, np.sqrt(2)]) * 2 * np.pi
        np.testing.assert_allclose(expm_skew(a), block_rotation([2 * np.pi, 2 * np.pi * np.sqrt(2)]), atol=1e-12)

    def test_rejects_non_skew(self):
        with pytest.raises(ValueError):
            expm_skew(np.eye(2))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 8), st.data())
    def test_against_scipy(self, d, data):
        m = data.draw(arrays(float, (d, d), elements=finite))
        a = skew_from(m)
        e = expm_skew(a)
        np.testing.assert_allclose(e, scipy.linalg.expm(a), atol=1e-10)
        assert is_orthogonal(e, 1e-10)
        assert abs(np.linalg.det(e) - 1) < 1e-8
        np.testing.assert_allclose(e @ expm_skew(-a), np.eye(d), atol=1e-9)

    def test_general_matrix_against_scipy(self):
        rng = np.random.default_rng(3)
        for d in (2, 5, 8):
            m = rng.standard_normal((d, d)) * 3
            np.testing.assert_allclose(expm(m), scipy.linalg.expm(m), rtol=1e-9, atol=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(finite, finite, finite, finite)
    def test_commuting_sum(self, a1, a2, b1, b2):
        a, b = block_skew([a1, a2]), block_skew([b1, b2])
        np.testing.assert_allclose(expm_skew(a + b), expm_skew(a) @ expm_skew(b), atol=1e-8)


class TestRank:
    def test_examples(self):
        assert numerical_rank(np.eye(3), 1e-10) == 3
        assert numerical_rank(np.array([[1.0, 2], [2, 4]]), 1e-10) == 1
        a = block_skew([1.0, 2.0])
        k = krylov_matrix(a, np.array([1.0, 0, 1, 0]))
        assert abs(np.linalg.det(k)) > 1e-3
        assert numerical_rank(k, 1e-10) == 4

    def test_zero_matrix(self):
        assert numerical_rank(np.zeros((3, 3))) == 0

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            numerical_rank(np.eye(2), 0)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 8), st.integers(1, 8), st.data())
    def test_singular_values_match_lapack(self, m, n, data):
        a = data.draw(arrays(float, (m, n), elements=finite))
        np.testing.assert_allclose(singular_values(a), np.linalg.svd(a, compute_uv=False), atol=1e-9 * max(1, np.abs(a).max()))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.data())
def test_orthogonal_matrices_are_isometries(d, data):
    q = nearest_orthogonal(data.draw(arrays(float, (d, d), elements=finite)) + 10 * np.eye(d))
    x = data.draw(arrays(float, d, elements=finite))
    assert abs(np.linalg.norm(q @ x) - np.linalg.norm(x)) <= 1e-9 * max(1.0, np.linalg.norm(x))
