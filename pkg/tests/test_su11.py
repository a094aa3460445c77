import math

import numpy as np
import pytest
from scipy.linalg import expm

from ampbound import fock_oracle, su11
from ampbound.fock_oracle import TruncationError, TruncationSpec
from ampbound.su11 import (
    SqueezeParams,
    basis_index,
    bch_factors,
    build_joint_blocks,
    build_joint_density,
    evolve_basis_state,
    k_minus_matrix,
    k_plus_matrix,
    k_zero_matrix,
    rotation_phases,
    squeeze_generator,
)


def interior_mask(n: int, guard: int) -> np.ndarray:
    mask = np.zeros(n * n, dtype=bool)
    for ns in range(n - guard):
        for ne in range(n - guard):
            mask[basis_index(ns, ne, n)] = True
    return mask


class TestSqueezeParams:
    def test_phase_reduction(self):
        p = SqueezeParams(r=1.0, theta=2.5 * math.pi, delta_s=-0.5, delta_e=7.0)
        assert 0.0 <= p.theta < 2 * math.pi
        assert 0.0 <= p.delta_s < 2 * math.pi
        assert p.theta == pytest.approx(0.5 * math.pi, rel=1e-12)

    def test_alpha(self):
        p = SqueezeParams(r=0.3, theta=0.7, delta_s=0.2, delta_e=0.4)
        assert p.alpha == pytest.approx((0.7 + math.pi - 0.4 - 0.2) % (2 * math.pi),
                                        rel=1e-12)

    def test_negative_r_rejected(self):
        with pytest.raises(ValueError):
            SqueezeParams(r=-0.1)


class TestBchFactors:
    def test_identity_at_zero(self):
        f = bch_factors(SqueezeParams(r=0.0, theta=1.0))
        assert f.plus_coeff == 0.0
        assert f.zero_coeff == 0.0
        assert f.minus_coeff == 0.0

    def test_unit_squeeze(self):
        f = bch_factors(SqueezeParams(r=1.0, theta=0.0))
        assert f.plus_coeff == pytest.approx(-0.7615941559557649, rel=1e-12)
        assert f.zero_coeff == pytest.approx(-0.8675616609660542, rel=1e-12)
        assert f.minus_coeff == pytest.approx(0.7615941559557649, rel=1e-12)

    def test_quarter_phase(self):
        f = bch_factors(SqueezeParams(r=1.0, theta=math.pi / 2.0))
        assert f.plus_coeff == pytest.approx(-1j * 0.7615941559557649, rel=1e-12)
        assert abs(f.plus_coeff) == abs(f.minus_coeff)
        assert abs(f.plus_coeff) == pytest.approx(math.tanh(1.0), rel=1e-14)


class TestGeneratorAlgebra:
    def test_commutators_exact_on_interior(self):
        n = 14
        kp, km, k0 = k_plus_matrix(n, n), k_minus_matrix(n, n), k_zero_matrix(n, n)
        inner = interior_mask(n, 2)
        c1 = (k0 @ kp - kp @ k0 - kp)[:, inner]
        c2 = (k0 @ km - km @ k0 + km)[:, inner]
        c3 = (kp @ km - km @ kp + 2 * k0)[:, inner]
        assert np.abs(c1).max() < 1e-12
        assert np.abs(c2).max() < 1e-12
        assert np.abs(c3).max() < 1e-12

    def test_casimir_constant_per_charge_sector(self):
        n = 12
        kp, km, k0 = k_plus_matrix(n, n), k_minus_matrix(n, n), k_zero_matrix(n, n)
        casimir = k0 @ (k0 - np.eye(n * n)) - kp @ km
        for charge in (0, 1, 3):
            expected = (charge ** 2 - 1) / 4.0
            for ns in range(n - 2 - charge):
                col = casimir[:, basis_index(ns, ns + charge, n)]
                ref = np.zeros(n * n)
                ref[basis_index(ns, ns + charge, n)] = expected
                assert np.abs(col - ref).max() < 1e-12

    def test_bch_factorization_matches_exponential(self):
        # truncated-matrix identity; entries deep inside the cutoff converge
        # to the untruncated operator, so the comparison uses a wide guard
        n, guard = 30, 20
        for (r, theta) in [(0.5, 0.9), (0.3, 0.0)]:
            p = SqueezeParams(r=r, theta=theta)
            f = bch_factors(p)
            kp, km, k0 = k_plus_matrix(n, n), k_minus_matrix(n, n), k_zero_matrix(n, n)
            direct = expm(squeeze_generator(r * np.exp(1j * theta), n, n))
            mid = np.diag(np.exp(f.zero_coeff * np.diag(k0)))
            product = expm(f.plus_coeff * kp) @ mid @ expm(f.minus_coeff * km)
            inner = interior_mask(n, guard)
            diff = np.abs(direct - product)[np.ix_(inner, inner)]
            assert diff.max() < 1e-9


class TestEvolveBasisState:
    TRUNC = TruncationSpec(max_thermal=0, max_squeeze=24, tolerance=1e-6)

    def test_identity_at_zero_squeeze(self):
        ket = evolve_basis_state(0, 0, SqueezeParams(r=0.0), self.TRUNC)
        assert ket.amplitudes == {(0, 0): pytest.approx(1.0)}

    def test_vacuum_ladder_moduli_and_norm(self):
        # |0,0> evolves onto the pair ladder with moduli tanh^l / cosh and
        # truncated norm 1 - tanh^(2(L+1))
        r = 1.0
        ket = evolve_basis_state(0, 0, SqueezeParams(r=r), self.TRUNC, tail_tol=1.0)
        t, c = math.tanh(r), math.cosh(r)
        for (ns, ne), amp in ket.amplitudes.items():
            assert ns == ne
            assert abs(amp) == pytest.approx(t ** ns / c, rel=1e-12)
        L = self.TRUNC.max_squeeze
        assert ket.norm_sq() == pytest.approx(1.0 - t ** (2 * (L + 1)), rel=1e-12)

    def test_thermal_sector_reduces_to_single_ladder(self):
        # with the system starting in the vacuum the amplitudes collapse to
        # tanh^l e^{i(alpha l - delta_e m)} / cosh^(m+1) sqrt(C(m+l, l))
        p = SqueezeParams(r=0.8, theta=1.1, delta_s=0.4, delta_e=0.9)
        m_e = 3
        ket = evolve_basis_state(0, m_e, p, self.TRUNC, tail_tol=1.0)
        t, c = math.tanh(p.r), math.cosh(p.r)
        for (ns, ne), amp in ket.amplitudes.items():
            ell = ns
            assert ne == m_e + ell
            expected = (
                t ** ell
                * np.exp(1j * (p.alpha * ell - p.delta_e * m_e))
                / c ** (m_e + 1)
                * math.sqrt(math.comb(m_e + ell, ell))
            )
            assert amp == pytest.approx(expected, abs=1e-12)

    def test_charge_superselection_is_structural(self):
        for (ms, me) in [(0, 0), (0, 4), (2, 5), (3, 1)]:
            ket = evolve_basis_state(ms, me, SqueezeParams(r=0.9, theta=0.3),
                                     self.TRUNC, tail_tol=1.0)
            assert all(ne - ns == me - ms for (ns, ne) in ket.amplitudes)
            dense = ket.to_dense(40, 40)
            for ns in range(40):
                for ne in range(40):
                    if ne - ns != me - ms:
                        assert dense[ns * 40 + ne] == 0.0

    def test_matches_matrix_exponential_evolution(self):
        # amplitude-level check including the phases, against a direct
        # exponential of the generator followed by the rotation phases
        dim = 30
        p = SqueezeParams(r=0.5, theta=0.7, delta_s=0.3, delta_e=1.1)
        U = expm(squeeze_generator(p.r * np.exp(1j * p.theta), dim, dim))
        rot = rotation_phases(p.delta_s, p.delta_e, dim, dim)
        L = 18
        trunc = TruncationSpec(max_thermal=0, max_squeeze=L, tolerance=1e-6)
        for (ms, me) in [(0, 0), (0, 3), (2, 2), (3, 1), (1, 4), (4, 4)]:
            basis_vec = np.zeros(dim * dim)
            basis_vec[basis_index(ms, me, dim)] = 1.0
            reference = rot * (U @ basis_vec)
            ket = evolve_basis_state(ms, me, p, trunc, tail_tol=1.0)
            complete = ms + L - min(ms, me)  # rungs with every j-term summed
            for (ns, ne), amp in ket.amplitudes.items():
                if ns <= min(complete - 2, dim - 10) and ne <= dim - 10:
                    assert amp == pytest.approx(
                        reference[basis_index(ns, ne, dim)], abs=5e-11)

    def test_truncation_error_when_ladder_too_short(self):
        trunc = TruncationSpec(max_thermal=0, max_squeeze=2, tolerance=1e-10)
        with pytest.raises(TruncationError):
            evolve_basis_state(0, 0, SqueezeParams(r=1.5), trunc)

    def test_norm_at_least_one_minus_tail(self):
        trunc = TruncationSpec(max_thermal=0, max_squeeze=60, tolerance=1e-8)
        ket = evolve_basis_state(0, 2, SqueezeParams(r=1.0), trunc)
        assert ket.norm_sq() >= 1.0 - trunc.tolerance


class TestJointDensity:
    def test_no_squeeze_is_vacuum_times_thermal(self):
        trunc = fock_oracle.choose_truncation(1.0, 0.0, 1e-10)
        rho = build_joint_density(1.0, SqueezeParams(r=0.0), trunc)
        dim_e = trunc.max_thermal + trunc.max_squeeze + 1
        thermal = fock_oracle.thermal_density(1.0, dim_e)
        for (i, (ns, ne)) in enumerate(rho.basis):
            for (j, (ms, me)) in enumerate(rho.basis):
                expected = thermal.entries[ne, me] if (ns == 0 and ms == 0) else 0.0
                assert rho.entries[i, j] == pytest.approx(expected, abs=1e-14)

    def test_cold_environment_gives_rank_one(self):
        trunc = fock_oracle.choose_truncation(0.0, 0.9, 1e-12)
        rho = build_joint_density(0.0, SqueezeParams(r=0.9, theta=0.4), trunc)
        vals = np.linalg.eigvalsh(rho.entries)
        assert vals[-1] == pytest.approx(1.0, abs=1e-10)
        assert np.abs(vals[:-1]).max() < 1e-10

    def test_entry_matches_coefficient_formula(self):
        # <1,1| rho |1,1> for n_bar=1, r=0.8 equals the m=0, l=l'=1
        # coefficient: pbar_0/(n_q+1) * (n_q/(n_q+1))
        n_bar, r = 1.0, 0.8
        trunc = fock_oracle.choose_truncation(n_bar, r, 1e-8)
        p = SqueezeParams(r=r, theta=0.6, delta_s=0.2, delta_e=0.8)
        rho = build_joint_density(n_bar, p, trunc)
        n_q = math.sinh(r) ** 2
        expected = (1.0 / (n_bar + 1.0)) / (n_q + 1.0) * (n_q / (n_q + 1.0))
        dim_e = trunc.max_thermal + trunc.max_squeeze + 1
        got = rho.entries[basis_index(1, 1, dim_e), basis_index(1, 1, dim_e)]
        assert got == pytest.approx(expected, rel=1e-12)

    def test_general_coefficients_with_phases(self):
        # every stored entry equals pbar_m e^{i alpha (l-l')} tanh^(l+l')
        # cosh^{-2(m+1)} sqrt(C(m+l,m) C(m+l',m)) on |l, l+m><l', l'+m|
        n_bar, r = 0.7, 0.6
        p = SqueezeParams(r=r, theta=1.3, delta_s=0.5, delta_e=0.2)
        trunc = fock_oracle.choose_truncation(n_bar, r, 1e-10)
        blocks = build_joint_blocks(n_bar, p, trunc)
        t, c = math.tanh(r), math.cosh(r)
        for m in (0, 1, 3):
            pbar = n_bar ** m / (n_bar + 1.0) ** (m + 1)
            block = blocks.blocks[m]
            for ell in (0, 1, 2):
                for ellp in (0, 1, 3):
                    expected = (
                        pbar * np.exp(1j * p.alpha * (ell - ellp))
                        * t ** (ell + ellp) / c ** (2 * (m + 1))
                        * math.sqrt(math.comb(m + ell, m) * math.comb(m + ellp, m))
                    )
                    assert block[ell, ellp] == pytest.approx(expected, rel=1e-11)

    def test_dense_and_block_forms_agree(self):
        n_bar, r = 0.8, 0.7
        trunc = fock_oracle.choose_truncation(n_bar, r, 1e-10)
        p = SqueezeParams(r=r, theta=0.9)
        blocks = build_joint_blocks(n_bar, p, trunc)
        dense = blocks.to_dense()
        np.testing.assert_allclose(
            blocks.reduced_system().entries,
            fock_oracle.partial_trace(dense, "system").entries,
            atol=1e-14)
        np.testing.assert_allclose(
            blocks.reduced_environment().entries,
            fock_oracle.partial_trace(dense, "environment").entries,
            atol=1e-14)
        assert blocks.purity() == pytest.approx(fock_oracle.purity(dense), rel=1e-12)
        assert blocks.trace() == pytest.approx(dense.trace(), rel=1e-12)

    def test_rotation_never_changes_weights_or_entropy(self):
        n_bar, r = 0.6, 0.8
        trunc = fock_oracle.choose_truncation(n_bar, r, 1e-10)
        plain = build_joint_blocks(n_bar, SqueezeParams(r=r), trunc)
        rotated = build_joint_blocks(
            n_bar, SqueezeParams(r=r, theta=0.0, delta_s=1.2, delta_e=0.7), trunc)
        np.testing.assert_allclose(
            plain.reduced_system().entries.diagonal(),
            rotated.reduced_system().entries.diagonal(), rtol=1e-12)
        s_plain = fock_oracle.von_neumann_entropy(plain.reduced_system())
        s_rot = fock_oracle.von_neumann_entropy(rotated.reduced_system())
        assert s_plain == pytest.approx(s_rot, abs=1e-12)
        n_plain, _ = fock_oracle.expectations(plain.reduced_environment(), 1.0)
        n_rot, _ = fock_oracle.expectations(rotated.reduced_environment(), 1.0)
        assert n_plain == pytest.approx(n_rot, abs=1e-12)

    def test_thermal_tail_guard(self):
        trunc = TruncationSpec(max_thermal=2, max_squeeze=10, tolerance=1e-10)
        with pytest.raises(TruncationError):
            build_joint_blocks(1.0, SqueezeParams(r=0.1), trunc)
