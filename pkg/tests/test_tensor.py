import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kronbeam.tensor import (
    fold,
    fold_to_tensor,
    hadamard,
    hosvd_rank_one,
    khatri_rao,
    kron,
    multilinear_form,
    n_mode_product,
    rank_one_svd,
    rank_one_svd_batch,
    unfold,
    unfold_tensor_to_matrix,
)

from conftest import crandn, random_units, unit


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_vectors(self):
        np.testing.assert_array_equal(kron([1, 2], [1, -1]), [1, -1, 2, -2])

    def test_entry_layout(self, rng):
        A, B = crandn(rng, 2, 3), crandn(rng, 4, 2)
        K = kron(A, B)
        assert K.shape == (8, 6)
        for ar, ac, br, bc in itertools.product(range(2), range(3), range(4), range(2)):
            assert K[ar * 4 + br, ac * 2 + bc] == pytest.approx(A[ar, ac] * B[br, bc], rel=1e-15)

    def test_mixed_product(self, rng):
        A, B, C, D = (crandn(rng, 2, 2) for _ in range(4))
        lhs = kron(A, B) @ kron(C, D)
        np.testing.assert_allclose(lhs, kron(A @ C, B @ D), rtol=1e-13, atol=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3),
           st.integers(1, 3), st.integers(0, 2**31))
    def test_mixed_product_matvec(self, p, q, r, s, t, seed):
        rng = np.random.default_rng(seed)
        A, B = crandn(rng, p, q), crandn(rng, r, s)
        C, D = crandn(rng, q, t), crandn(rng, s, 2)
        x = crandn(rng, t * 2)
        lhs = kron(A, B) @ (kron(C, D) @ x)
        rhs = kron(A @ C, B @ D) @ x
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * max(np.linalg.norm(rhs), 1e-300) + 1e-14


class TestKhatriRao:
    def test_single_column(self):
        np.testing.assert_array_equal(khatri_rao([[1], [1]], [[1], [-1]]), [[1], [-1], [1], [-1]])

    def test_single_rows_is_hadamard(self, rng):
        a, b = crandn(rng, 1, 5), crandn(rng, 1, 5)
        np.testing.assert_array_equal(khatri_rao(a, b), a * b)

    def test_columns_are_kron(self, rng):
        A, B = crandn(rng, 3, 2), crandn(rng, 2, 2)
        KR = khatri_rao(A, B)
        assert KR.shape == (6, 2)
        for n in range(2):
            np.testing.assert_array_equal(KR[:, n], np.kron(A[:, n], B[:, n]))

    def test_column_mismatch(self, rng):
        with pytest.raises(ValueError, match="column"):
            khatri_rao(crandn(rng, 2, 3), crandn(rng, 2, 2))


class TestHadamard:
    def test_examples(self):
        np.testing.assert_array_equal(hadamard([1, 1], [3 + 1j, -2]), [3 + 1j, -2])
        np.testing.assert_array_equal(hadamard([1j, -1j], [-1j, 1j]), [1, 1])
        a = np.array([1 + 2j, -3j])
        np.testing.assert_allclose(hadamard(a, a.conj()), np.abs(a) ** 2)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            hadamard([1, 2], [1, 2, 3])


class TestRankOneSVD:
    def test_outer_product(self):
        u0 = np.array([1, 1j]) / np.sqrt(2)
        v0 = np.array([1, 1]) / np.sqrt(2)
        res = rank_one_svd(np.outer(u0, v0.conj()))
        assert res.sigma == pytest.approx(1.0, abs=1e-14)
        assert abs(np.vdot(res.u, u0)) == pytest.approx(1.0, abs=1e-14)
        assert abs(np.vdot(res.v, v0)) == pytest.approx(1.0, abs=1e-14)

    def test_diagonal(self):
        res = rank_one_svd(np.diag([3.0, 1.0]))
        assert res.sigma == pytest.approx(3.0, rel=1e-12)
        np.testing.assert_allclose(res.u, [1, 0], atol=1e-5)
        np.testing.assert_allclose(res.v, [1, 0], atol=1e-5)
        assert res.u[0].imag == 0 and res.u[0].real > 0

    @pytest.mark.parametrize("shape", [(4, 3), (3, 4), (8, 8), (1, 5), (5, 1), (16, 128)])
    def test_against_lapack(self, rng, shape):
        A = crandn(rng, *shape)
        U, s, Vh = np.linalg.svd(A)
        res = rank_one_svd(A)
        assert res.sigma == pytest.approx(s[0], rel=1e-10)
        # vectors agree up to a common phase
        assert abs(np.vdot(U[:, 0], res.u)) == pytest.approx(1.0, abs=1e-6)
        assert abs(np.vdot(Vh[0].conj(), res.v)) == pytest.approx(1.0, abs=1e-6)
        np.testing.assert_allclose(A @ res.v, res.sigma * res.u, atol=1e-6 * s[0])

    def test_invariants(self, rng):
        A = crandn(rng, 6, 5)
        res = rank_one_svd(A)
        assert abs(np.linalg.norm(res.u) - 1) < 1e-12
        assert abs(np.linalg.norm(res.v) - 1) < 1e-12
        assert res.sigma >= 0
        assert res.u[0].imag == 0 and res.u[0].real >= 0

    def test_deterministic(self, rng):
        A = crandn(rng, 7, 9)
        a, b = rank_one_svd(A), rank_one_svd(A.copy())
        assert a.sigma == b.sigma
        np.testing.assert_array_equal(a.u, b.u)
        np.testing.assert_array_equal(a.v, b.v)

    def test_optimal_against_random_rank_one(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            m, n = rng.integers(1, 9, size=2)
            A = crandn(rng, m, n)
            res = rank_one_svd(A)
            best = np.linalg.norm(A - res.sigma * np.outer(res.u, res.v.conj()))
            xs, ys = random_units(rng, 200, m), random_units(rng, 200, n)
            for x, y in zip(xs, ys):
                # optimal scale for the direction pair (x, y)
                c = np.vdot(x, A @ y)
                assert best <= np.linalg.norm(A - c * np.outer(x, y.conj())) + 1e-12

    def test_start_orthogonal_to_row_space(self):
        # the all-ones-plus-e1 start vector (2, 1) is annihilated by this row
        A = np.array([[1.0, -2.0]])
        res = rank_one_svd(A)
        assert res.sigma == pytest.approx(np.sqrt(5), rel=1e-12)

    def test_zero_matrix_raises(self):
        with pytest.raises(ValueError, match="zero"):
            rank_one_svd(np.zeros((3, 2)))

    def test_batch_matches_single(self, rng):
        A = crandn(rng, 5, 4, 6)
        sigma, u, v, _ = rank_one_svd_batch(A)
        for b in range(5):
            res = rank_one_svd(A[b])
            assert sigma[b] == pytest.approx(res.sigma, rel=1e-12)
            np.testing.assert_allclose(u[b], res.u, atol=1e-8)


class TestFolding:
    def test_scalar(self):
        T = fold_to_tensor([[2 + 1j]], 1, 1, 1)
        assert T.shape == (1, 1, 1) and T[0, 0, 0] == 2 + 1j

    def test_index_map(self, rng):
        K, M, N = 2, 3, 2
        F = crandn(rng, K * M, N)
        T = fold_to_tensor(F, K, M, N)
        for k, m, n in itertools.product(range(K), range(M), range(N)):
            assert T[k, m, n] == F[m * K + k, n]
        np.testing.assert_array_equal(unfold_tensor_to_matrix(T), F)

    def test_khatri_rao_column_is_outer_product(self, rng):
        M, K = 3, 2
        h, g = crandn(rng, M), crandn(rng, K)
        T = fold_to_tensor(khatri_rao(h[:, None], g[:, None]), K, M, 1)
        for k, m in itertools.product(range(K), range(M)):
            assert T[k, m, 0] == pytest.approx(h[m] * g[k], rel=1e-15)

    def test_mode3_unfold_recovers_layout(self, rng):
        K, M, N = 2, 3, 2
        F = crandn(rng, K * M, N)
        np.testing.assert_array_equal(unfold(fold_to_tensor(F, K, M, N), 3).T, F)

    def test_bad_dims(self, rng):
        with pytest.raises(ValueError):
            fold_to_tensor(crandn(rng, 5, 2), 2, 3, 2)

    def test_column_major_linearization(self, rng):
        F = crandn(rng, 6, 2)
        T = fold_to_tensor(F, 2, 3, 2)
        np.testing.assert_array_equal(T.ravel(order="F"), F.ravel(order="F"))


class TestUnfold:
    def test_rank_one_mode1(self, rng):
        a, b, c = crandn(rng, 2), crandn(rng, 3), crandn(rng, 4)
        T = np.einsum("i,j,k->ijk", a, b, c)
        np.testing.assert_allclose(unfold(T, 1), np.outer(a, np.kron(c, b)), rtol=1e-14)

    def test_elementwise_ordering(self, rng):
        T = crandn(rng, 2, 3, 4)
        I, J, K = T.shape
        U1, U2, U3 = unfold(T, 1), unfold(T, 2), unfold(T, 3)
        for i, j, k in itertools.product(range(I), range(J), range(K)):
            assert U1[i, k * J + j] == T[i, j, k]
            assert U2[j, k * I + i] == T[i, j, k]
            assert U3[k, j * I + i] == T[i, j, k]

    def test_singleton_mode(self, rng):
        T = crandn(rng, 2, 2, 1)
        U = unfold(T, 3)
        assert U.shape == (1, 4)
        np.testing.assert_array_equal(U[0], T.ravel(order="F"))

    @pytest.mark.parametrize("mode", [1, 2, 3])
    def test_norm_and_round_trip(self, rng, mode):
        T = crandn(rng, 3, 2, 4)
        U = unfold(T, mode)
        assert np.linalg.norm(U) == pytest.approx(np.linalg.norm(T), rel=1e-14)
        np.testing.assert_array_equal(fold(U, mode, T.shape), T)

    def test_invalid_mode(self, rng):
        with pytest.raises(ValueError, match="mode"):
            unfold(crandn(rng, 2, 2, 2), 4)


class TestNModeProduct:
    @pytest.mark.parametrize("mode", [1, 2, 3])
    def test_identity(self, rng, mode):
        T = crandn(rng, 2, 3, 4)
        np.testing.assert_array_equal(n_mode_product(T, np.eye(T.shape[mode - 1]), mode), T)

    def test_rank_one_linearity(self, rng):
        a, b, c = crandn(rng, 3), crandn(rng, 2), crandn(rng, 4)
        w = crandn(rng, 3)
        T = np.einsum("i,j,k->ijk", a, b, c)
        out = n_mode_product(T, w.conj(), 1)
        np.testing.assert_allclose(out[0], np.vdot(w, a) * np.outer(b, c), rtol=1e-13)

    @pytest.mark.parametrize("mode", [1, 2, 3])
    def test_against_einsum(self, rng, mode):
        T = crandn(rng, 2, 3, 4)
        A = crandn(rng, 5, T.shape[mode - 1])
        subscripts = {1: "ri,ijk->rjk", 2: "rj,ijk->irk", 3: "rk,ijk->ijr"}[mode]
        np.testing.assert_allclose(n_mode_product(T, A, mode), np.einsum(subscripts, A, T), rtol=1e-13)
        np.testing.assert_allclose(unfold(n_mode_product(T, A, mode), mode), A @ unfold(T, mode),
                                   rtol=1e-13)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError, match="columns"):
            n_mode_product(crandn(rng, 2, 3, 4), crandn(rng, 2, 2), 2)


class TestHOSVD:
    def test_rank_one_recovery(self, rng):
        a, b, c = unit(rng, 3), unit(rng, 4), unit(rng, 5)
        u1, u2, u3 = hosvd_rank_one(np.einsum("i,j,k->ijk", a, b, c))
        for u, f in ((u1, a), (u2, b), (u3, c)):
            assert abs(abs(np.vdot(u, f)) - 1) < 1e-10
            assert abs(np.linalg.norm(u) - 1) < 1e-12

    def test_beats_random_search(self):
        rng = np.random.default_rng(99)
        T = crandn(rng, 3, 3, 3)
        u1, u2, u3 = hosvd_rank_one(T)
        value = abs(multilinear_form(T, u1.conj(), u2.conj(), u3.conj()))
        X, Y, Z = (random_units(rng, 1000, 3) for _ in range(3))
        rand = np.abs(np.einsum("ijk,ri,rj,rk->r", T, X.conj(), Y.conj(), Z.conj()))
        assert value >= rand.max()

    def test_vector_case(self, rng):
        fiber = crandn(rng, 6)
        T = fiber.reshape(1, 1, 6)
        u1, u2, u3 = hosvd_rank_one(T)
        assert abs(abs(np.vdot(u3, fiber)) - np.linalg.norm(fiber)) < 1e-12
        value = abs(multilinear_form(T, u1.conj(), u2.conj(), u3.conj()))
        assert value == pytest.approx(np.linalg.norm(fiber), rel=1e-12)

    def test_zero_tensor(self):
        with pytest.raises(ValueError, match="zero"):
            hosvd_rank_one(np.zeros((2, 2, 2)))

    def test_deterministic(self, rng):
        T = crandn(rng, 3, 4, 2)
        first, second = hosvd_rank_one(T), hosvd_rank_one(T.copy())
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a, b)
