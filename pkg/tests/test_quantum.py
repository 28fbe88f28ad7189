import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jointpurity import quantum as q
from jointpurity.quantum import DensityMatrix, Ket

MIXED = DensityMatrix.maximally_mixed()
# equal-weight average of |+><+|, |-><-|, |R><R|
PMR = DensityMatrix.mixture([q.PLUS, q.MINUS, q.R])

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def rand_rho(seed, dim=2):
    return q.random_density_matrix(dim, np.random.default_rng(seed))


class TestKet:
    def test_normalized_on_construction(self):
        k = Ket([3, 4j])
        assert np.linalg.norm(k.amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_named_states(self):
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(q.PLUS.amplitudes, [s, s])
        np.testing.assert_allclose(q.R.amplitudes, [s, -1j * s])
        np.testing.assert_allclose(q.PSI_MINUS.amplitudes, [0, s, -s, 0])

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            Ket([0, 0])


class TestDensityMatrix:
    def test_pmr_mixture_entries(self):
        np.testing.assert_allclose(PMR.entries, [[0.5, 1j / 6], [-1j / 6, 0.5]], atol=1e-15)

    @pytest.mark.parametrize("bad", [
        [[1, 0, 0]],                       # not square
        [[0.5, 0.1], [0.2, 0.5]],          # not Hermitian
        [[0.6, 0], [0, 0.6]],              # trace 1.2
        [[0.5, 0.6], [0.6, 0.5]],          # negative eigenvalue
        [[1.5, 0], [0, -0.5]],
    ])
    def test_unphysical_rejected(self, bad):
        with pytest.raises(ValueError):
            DensityMatrix(bad)

    def test_psd_check_for_larger_dims(self):
        m = np.diag([0.6, 0.6, -0.2, 0.0])
        assert not q.is_physical(m)
        assert q.is_physical(np.eye(4) / 4)

    def test_immutable(self):
        with pytest.raises(ValueError):
            MIXED.entries[0, 0] = 1


class TestPurity:
    def test_pure(self):
        assert q.purity(q.H.projector()) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        assert q.purity(MIXED) == pytest.approx(0.5, abs=1e-12)

    def test_three_state_mixture(self):
        assert q.purity(PMR) == pytest.approx(5 / 9, abs=1e-12)

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            q.purity(np.eye(2))

    @given(seeds)
    def test_range_for_qubits(self, seed):
        assert 0.5 - 1e-12 <= q.purity(rand_rho(seed)) <= 1 + 1e-12

    @given(seeds)
    def test_unitary_invariance(self, seed):
        rng = np.random.default_rng(seed)
        rho = q.random_density_matrix(2, rng)
        u = q.random_unitary(2, rng)
        assert abs(q.purity(q.conjugate(rho, u)) - q.purity(rho)) < 1e-12

    @given(seeds)
    def test_matches_trace_of_square(self, seed):
        rho = rand_rho(seed, 3)
        assert q.purity(rho) == pytest.approx(np.trace(rho.entries @ rho.entries).real, abs=1e-12)


class TestFidelity:
    def test_examples(self):
        h = q.H.projector()
        assert q.fidelity(h, q.H) == pytest.approx(1.0)
        assert q.fidelity(h, q.V) == pytest.approx(0.0)

    @pytest.mark.parametrize("phi", [q.H, q.V, q.PLUS, q.R, Ket([0.3, 0.2 + 0.9j])])
    def test_maximally_mixed_is_isotropic(self, phi):
        assert q.fidelity(MIXED, phi) == pytest.approx(0.5, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            q.fidelity(MIXED, q.PSI_MINUS)


class TestTensorAndSinglet:
    def test_mixed_tensor(self):
        np.testing.assert_allclose(q.tensor(MIXED, MIXED).entries, np.eye(4) / 4)

    def test_hv_tensor(self):
        out = q.tensor(q.H.projector(), q.V.projector()).entries
        np.testing.assert_allclose(np.diag(out), [0, 1, 0, 0])

    @given(seeds, seeds)
    def test_purity_multiplicative(self, s1, s2):
        a, b = rand_rho(s1), rand_rho(s2)
        assert q.purity(q.tensor(a, b)) == pytest.approx(q.purity(a) * q.purity(b), abs=1e-12)

    def test_singlet_examples(self):
        assert q.singlet_projection(q.tensor(MIXED, MIXED)) == pytest.approx(0.25, abs=1e-12)
        plus = q.PLUS.projector()
        assert q.singlet_projection(q.tensor(plus, plus)) == pytest.approx(0.0, abs=1e-12)
        assert q.singlet_projection(q.tensor(PMR, PMR)) == pytest.approx(2 / 9, abs=1e-12)

    def test_singlet_wrong_dimension(self):
        with pytest.raises(ValueError):
            q.singlet_projection(MIXED)

    @settings(max_examples=200)
    @given(seeds)
    def test_purity_from_singlet_identity(self, seed):
        rho = rand_rho(seed)
        joint = q.tensor(rho, rho)
        assert q.purity(rho) == pytest.approx(1 - 2 * q.singlet_projection(joint), abs=1e-12)

    @given(seeds, seeds)
    def test_singlet_of_product_is_half_one_minus_overlap(self, s1, s2):
        a, b = rand_rho(s1), rand_rho(s2)
        psi = q.PSI_MINUS.amplitudes
        direct = np.vdot(psi, np.kron(a.entries, b.entries) @ psi).real
        assert direct == pytest.approx((1 - q.overlap_trace(a, b)) / 2, abs=1e-12)

    @given(seeds)
    def test_outputs_physical(self, seed):
        rho = rand_rho(seed)
        out = q.tensor(rho, rho).entries
        assert q.is_physical(out)
        assert abs(np.trace(out) - 1) < 1e-12
