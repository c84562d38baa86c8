import math

import numpy as np
import pytest

from skewcoh.bases import gell_mann_basis, partition_basis
from skewcoh.errors import NotPositive, NotPrime, Unsupported, ZeroT
from skewcoh.measurements import (
    GsmSet,
    MumSet,
    a_of,
    build_gsm,
    build_mub_prime,
    build_mum,
    builtin_sic,
    gsm_directions,
    kappa_of,
    max_positive_t,
    max_positive_t_gsm,
    mum_directions,
    verify_povm_family,
)

# largest positive t, from LAPACK eigenvalues of the traceless directions:
# t* = (1/d) / |min eig F_n^(b)|  (MUM)   and   (1/d^2) / |min eig D_k|  (GSM)
T_STAR_MUM = {2: 0.2928932188134525, 3: 0.1220084679281462, 4: 0.06581066204815532}
T_STAR_GSM = {2: 0.06804138174397716, 3: 0.012952932392824978, 4: 0.004338604410322884}


def part(d):
    return partition_basis(gell_mann_basis(d))


def test_t_star_fixtures_match_lapack_oracle():
    for d in (2, 3, 4):
        lam = min(np.linalg.eigvalsh(x)[0] for x in mum_directions(part(d)).reshape(-1, d, d))
        assert (1 / d) / -lam == pytest.approx(T_STAR_MUM[d], rel=1e-12)
        lam = min(np.linalg.eigvalsh(x)[0] for x in gsm_directions(gell_mann_basis(d)))
        assert (1 / d**2) / -lam == pytest.approx(T_STAR_GSM[d], rel=1e-12)


class TestKappa:
    def test_boundary(self):
        assert kappa_of(4, 0.0) == 0.25

    def test_qubit_max(self):
        assert kappa_of(2, 1 / (2 + math.sqrt(2))) == pytest.approx(1.0, abs=1e-12)

    def test_d3(self):
        # 1/3 + 0.05^2 (1 + sqrt 3)^2 * 2, evaluated in 30-digit arithmetic
        assert kappa_of(3, 0.05) == pytest.approx(0.370653841409022106, abs=1e-15)

    def test_increasing_in_abs_t(self):
        ts = np.linspace(0, 0.3, 50)
        ks = [kappa_of(3, t) for t in ts]
        assert np.all(np.diff(ks) > 0)
        assert kappa_of(3, -0.1) == kappa_of(3, 0.1)


class TestA:
    def test_boundary(self):
        assert a_of(3, 0.0) == pytest.approx(1 / 27, abs=1e-17)

    def test_d3(self):
        # 1/27 + 0.005^2 * 2 * 4^3
        assert a_of(3, 0.005) == pytest.approx(0.040237037037037037, abs=1e-16)


class TestMum:
    def test_qubit_max_t_recovers_mub(self):
        m = build_mum(part(2), 1 / (2 + math.sqrt(2)))
        assert m.kappa == pytest.approx(1.0, abs=1e-12)
        for p in m.elements.reshape(-1, 2, 2):
            # rank-one projector
            assert np.max(np.abs(p @ p - p)) < 1e-12

    def test_d3_small_t(self):
        m = build_mum(part(3), 0.05)
        assert m.kappa == pytest.approx(kappa_of(3, 0.05))
        rep = verify_povm_family(m)
        assert rep.passed
        assert rep.max_residual() < 1e-10

    def test_d3_large_t_not_positive(self):
        with pytest.raises(NotPositive) as info:
            build_mum(part(3), 10.0)
        b, n = info.value.where
        assert 1 <= b <= 4 and 1 <= n <= 3
        assert info.value.min_eig < 0

    def test_zero_t(self):
        with pytest.raises(ZeroT):
            build_mum(part(3), 0.0)

    def test_negative_t_valid(self):
        m = build_mum(part(3), -0.05)
        assert verify_povm_family(m).passed
        assert m.kappa == kappa_of(3, 0.05)

    def test_unit_trace(self):
        m = build_mum(part(4), 0.03)
        traces = np.einsum("bnii->bn", m.elements).real
        assert np.max(np.abs(traces - 1)) < 1e-14

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_max_positive_t(self, d):
        t = max_positive_t(part(d))
        assert t == pytest.approx(T_STAR_MUM[d], abs=1e-11)
        build_mum(part(d), t)
        with pytest.raises(NotPositive):
            build_mum(part(d), 1.01 * t)

    def test_d3_max_kappa_below_one(self):
        t = max_positive_t(part(3))
        assert kappa_of(3, t) < 1

    def test_qubit_max_t_matches_mub_projectors(self):
        m = build_mum(part(2), max_positive_t(part(2)))
        assert m.kappa == pytest.approx(1.0, abs=1e-9)
        mub = build_mub_prime(2).projectors().reshape(-1, 2, 2)
        for p in m.elements.reshape(-1, 2, 2):
            best = max(np.trace(p @ q).real for q in mub)
            assert best == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_conditions_across_t(self, d):
        tstar = max_positive_t(part(d))
        for f in (0.1, 0.5, 1.0):
            assert verify_povm_family(build_mum(part(d), f * tstar)).max_residual() <= 1e-10


class TestGsm:
    def test_qubit_at_t_star(self):
        g = build_gsm(gell_mann_basis(2), max_positive_t_gsm(gell_mann_basis(2)))
        assert verify_povm_family(g).passed

    def test_d3_overlap_matches_a(self):
        g = build_gsm(gell_mann_basis(3), 0.005)
        sq = np.einsum("kij,kji->k", g.elements, g.elements).real
        assert np.max(np.abs(sq - a_of(3, 0.005))) <= 1e-12
        assert verify_povm_family(g).passed

    def test_qubit_t1_not_positive(self):
        with pytest.raises(NotPositive) as info:
            build_gsm(gell_mann_basis(2), 1.0)
        assert 1 <= info.value.where <= 4

    def test_zero_t(self):
        with pytest.raises(ZeroT):
            build_gsm(gell_mann_basis(2), 0)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_max_positive_t(self, d):
        basis = gell_mann_basis(d)
        t = max_positive_t_gsm(basis)
        assert t == pytest.approx(T_STAR_GSM[d], abs=1e-11)
        build_gsm(basis, t)
        with pytest.raises(NotPositive):
            build_gsm(basis, 1.01 * t)
        assert a_of(d, t) <= 1 / d**2 + 1e-12


class TestMub:
    @pytest.mark.parametrize("d", [2, 3, 5, 7, 11])
    def test_unbiased(self, d):
        mub = build_mub_prime(d)
        assert mub.vectors.shape == (d + 1, d, d)
        rep = verify_povm_family(mub)
        assert rep.residuals["unbiasedness"] <= 1e-10
        assert rep.residuals["orthonormality"] <= 1e-11

    def test_qubit_is_pauli_eigenbases(self):
        mub = build_mub_prime(2)
        for vecs, pauli in zip(mub.vectors, (np.diag([1, -1]), [[0, 1], [1, 0]], [[0, -1j], [1j, 0]])):
            for v in vecs:
                w = np.asarray(pauli) @ v
                assert abs(abs(np.vdot(v, w)) - 1) < 1e-14

    def test_prime_power_unsupported(self):
        with pytest.raises(Unsupported):
            build_mub_prime(4)
        with pytest.raises(Unsupported):
            build_mub_prime(9)

    def test_composite(self):
        with pytest.raises(NotPrime):
            build_mub_prime(6)


class TestSic:
    def test_qubit(self):
        g = builtin_sic(2)
        gram = np.einsum("kij,lji->kl", g.elements, g.elements).real
        np.testing.assert_allclose(np.diag(gram), 0.25, atol=1e-15)
        np.testing.assert_allclose(gram[~np.eye(4, dtype=bool)], 1 / 12, atol=1e-15)
        assert verify_povm_family(g, 1e-12).passed

    def test_qutrit(self):
        g = builtin_sic(3)
        gram = np.einsum("kij,lji->kl", g.elements, g.elements).real
        np.testing.assert_allclose(np.diag(gram), 1 / 9, atol=1e-15)
        np.testing.assert_allclose(gram[~np.eye(9, dtype=bool)], 1 / 36, atol=1e-15)
        assert verify_povm_family(g, 1e-12).passed

    def test_unsupported(self):
        with pytest.raises(Unsupported):
            builtin_sic(5)


class TestVerify:
    def test_corrupted_element_fails_completeness(self):
        m = build_mum(part(3), 0.05)
        els = np.array(m.elements)
        els[0, 0, 0, 0] += 0.01
        rep = verify_povm_family(MumSet(m.dim, els, m.t, m.kappa))
        assert rep.residuals["completeness"] == pytest.approx(0.01, rel=1e-6)
        assert not rep.passed
        assert "completeness" in rep.failed

    def test_wrong_a_fails(self):
        g = builtin_sic(2)
        rep = verify_povm_family(GsmSet(2, g.elements, None, 0.2))
        assert "self_overlap" in rep.failed

    def test_never_raises_on_non_psd(self):
        els = np.array([np.diag([1.5, -0.5]), np.diag([-0.5, 1.5])], dtype=complex)
        rep = verify_povm_family(GsmSet(2, np.concatenate([els, np.zeros((2, 2, 2))]), 0.1, 0.2))
        assert "positivity" in rep.failed
