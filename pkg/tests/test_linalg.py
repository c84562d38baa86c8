import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewcoh.errors import BadAlpha, BadRank, DimMismatch, NotHermitian, NotPositive
from skewcoh.linalg import (
    RngSeed,
    check_density,
    eigh,
    haar_unitaries,
    haar_unitary,
    hs_inner,
    matrix_power,
    maximally_mixed,
    power_pair,
    pure_state,
    random_density,
    sqrt_density,
    trace_power,
)


def random_hermitian(d, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (a + a.conj().T) / 2


class TestEigh:
    def test_identity(self):
        dec = eigh(np.eye(3))
        np.testing.assert_array_equal(dec.eigenvalues, [1, 1, 1])
        np.testing.assert_allclose(dec.eigenvectors.conj().T @ dec.eigenvectors, np.eye(3), atol=1e-15)

    def test_diagonal_sorted_ascending(self):
        dec = eigh(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_array_equal(dec.eigenvalues, [1, 2, 3])

    def test_random_d8_reconstructs(self):
        a = random_hermitian(8, 0)
        dec = eigh(a)
        assert np.max(np.abs(dec.reconstruct() - a)) <= 1e-11 * max(1, np.abs(a).max())

    def test_matches_lapack(self):
        for seed in range(10):
            a = random_hermitian(6, seed)
            np.testing.assert_allclose(eigh(a).eigenvalues, np.linalg.eigvalsh(a), atol=1e-12)

    def test_degenerate_spectrum(self):
        u = haar_unitary(5, 3)
        a = u @ np.diag([1.0, 1.0, 1.0, -2.0, -2.0]) @ u.conj().T
        dec = eigh(a)
        np.testing.assert_allclose(dec.eigenvalues, [-2, -2, 1, 1, 1], atol=1e-13)
        assert np.max(np.abs(dec.reconstruct() - a)) < 1e-12

    def test_zero_matrix(self):
        dec = eigh(np.zeros((4, 4)))
        np.testing.assert_array_equal(dec.eigenvalues, np.zeros(4))

    def test_one_by_one(self):
        dec = eigh([[2.5]])
        assert dec.eigenvalues[0] == 2.5

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian):
            eigh([[1, 1], [0, 1]])

    def test_deterministic(self):
        a = random_hermitian(7, 4)
        d1, d2 = eigh(a), eigh(a)
        np.testing.assert_array_equal(d1.eigenvalues, d2.eigenvalues)
        np.testing.assert_array_equal(d1.eigenvectors, d2.eigenvectors)

    @settings(max_examples=60, deadline=None)
    @given(d=st.integers(1, 16), seed=st.integers(0, 2**32 - 1), scale=st.sampled_from([1e-3, 1.0, 1e3]))
    def test_reconstruction_property(self, d, seed, scale):
        a = random_hermitian(d, seed, scale)
        dec = eigh(a)
        v = dec.eigenvectors
        assert np.max(np.abs(dec.reconstruct() - a)) <= 1e-11 * max(1.0, np.abs(a).max())
        assert np.max(np.abs(v.conj().T @ v - np.eye(d))) <= 1e-11
        assert np.all(np.diff(dec.eigenvalues) >= 0)


class TestPowers:
    def test_maximally_mixed(self):
        for alpha in (0.2, 0.5, 1.0):
            np.testing.assert_allclose(matrix_power(maximally_mixed(4), alpha), 4**-alpha * np.eye(4), atol=1e-15)

    def test_pure_state_idempotent(self):
        rho = pure_state([1, 1j, -1])
        for alpha in (0.3, 0.5, 0.9):
            np.testing.assert_allclose(matrix_power(rho, alpha), rho, atol=1e-13)

    def test_diagonal_oracle(self):
        out = matrix_power(np.diag([0.75, 0.25]), 0.5)
        np.testing.assert_allclose(out, np.diag([np.sqrt(0.75), 0.5]), atol=1e-15)

    def test_sqrt_of_mixed(self):
        np.testing.assert_allclose(sqrt_density(np.eye(4) / 4), np.eye(4) / 2, atol=1e-15)
        assert np.trace(sqrt_density(np.eye(4) / 4)).real == pytest.approx(2.0, abs=1e-14)
        assert np.trace(sqrt_density(pure_state([0, 1, 0, 0]))).real == pytest.approx(1.0, abs=1e-14)

    def test_sqrt_squares_back(self):
        rho = random_density(5, 5, 11)
        s = sqrt_density(rho)
        assert np.max(np.abs(s @ s - rho)) <= 1e-10

    def test_rank_deficient_roundoff_is_zeroed(self):
        rho = random_density(4, 1, 3)
        assert np.trace(sqrt_density(rho)).real == pytest.approx(1.0, abs=1e-13)

    def test_bad_alpha(self):
        with pytest.raises(BadAlpha):
            matrix_power(maximally_mixed(2), 0.0)
        with pytest.raises(BadAlpha):
            matrix_power(maximally_mixed(2), 1.5)

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(NotPositive):
            matrix_power(np.diag([1.1, -0.1]), 0.5)

    def test_tiny_negative_clamped(self):
        out = matrix_power(np.diag([1.0, -1e-12]), 0.5)
        np.testing.assert_array_equal(out, np.diag([1.0, 0.0]))

    @settings(max_examples=40, deadline=None)
    @given(d=st.integers(2, 8), seed=st.integers(0, 2**32 - 1), alpha=st.floats(0.05, 0.95))
    def test_power_pair_multiplies_back(self, d, seed, alpha):
        rho = random_density(d, d, seed)
        ra, rb = power_pair(rho, alpha)
        assert np.max(np.abs(ra @ rb - rho)) <= 1e-10
        lam = np.clip(np.linalg.eigvalsh(rho), 0, None)
        assert trace_power(rho, alpha) == pytest.approx(np.sum(lam**alpha), abs=1e-11)


class TestInner:
    def test_identity(self):
        assert hs_inner(np.eye(3), np.eye(3)) == 3

    def test_traceless_orthogonal_to_identity(self):
        assert hs_inner(np.diag([1, -1]), np.eye(2)) == 0

    def test_conjugates_first_argument(self):
        a = np.array([[1j, 0], [0, 0]])
        assert hs_inner(a, a) == pytest.approx(1.0)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            hs_inner(np.eye(2), np.eye(3))


class TestRandomDensity:
    def test_rank_one_is_pure(self):
        rho = random_density(5, 1, 1)
        assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-10)

    def test_full_rank_valid(self):
        check_density(random_density(4, 4, 2))

    def test_same_seed_bit_identical(self):
        np.testing.assert_array_equal(random_density(4, 2, RngSeed(9, 3)), random_density(4, 2, RngSeed(9, 3)))

    def test_streams_differ(self):
        assert not np.array_equal(random_density(3, 3, RngSeed(9, 0)), random_density(3, 3, RngSeed(9, 1)))

    def test_bad_rank(self):
        with pytest.raises(BadRank):
            random_density(3, 4, 0)
        with pytest.raises(BadRank):
            random_density(3, 0, 0)

    def test_invariants_over_many_draws(self):
        for i in range(1000):
            d = 2 + i % 7
            rho = random_density(d, 1 + (i // 7) % d, RngSeed(123, i))
            assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
            assert abs(np.trace(rho) - 1) <= 1e-12
            assert np.linalg.eigvalsh(rho)[0] >= -1e-10


class TestHaar:
    def test_d1_unit_modulus(self):
        u = haar_unitary(1, 5)
        assert u.shape == (1, 1)
        assert abs(abs(u[0, 0]) - 1) < 1e-15

    @pytest.mark.parametrize("d", [2, 3, 7])
    def test_unitary(self, d):
        u = haar_unitary(d, 17)
        assert np.max(np.abs(u.conj().T @ u - np.eye(d))) <= 1e-11

    def test_first_moment(self):
        d, n = 3, 10_000
        u = haar_unitaries(d, n, RngSeed(2024))
        x = np.abs(u[:, 0, 0]) ** 2
        se = x.std(ddof=1) / np.sqrt(n)
        assert abs(x.mean() - 1 / d) <= 3 * se

    def test_all_entries_first_moment(self):
        d, n = 4, 10_000
        u = haar_unitaries(d, n, RngSeed(77))
        x = np.abs(u) ** 2
        se = x.std(axis=0, ddof=1) / np.sqrt(n)
        assert np.all(np.abs(x.mean(axis=0) - 1 / d) <= 3.5 * se)

    def test_deterministic(self):
        np.testing.assert_array_equal(haar_unitary(4, RngSeed(1, 2)), haar_unitary(4, RngSeed(1, 2)))
