"""Self-tests of the Fock-space oracle (gates, measurements, covariance,
entropies, parity)."""
import numpy as np
import pytest

from fermisteer.fock import FockState

LOG2 = np.log(2.0)


def random_fock_circuit(L, rng, n_ops=10):
    st = FockState.from_occupations(rng.integers(0, 2, L))
    for _ in range(n_ops):
        i, j = (int(x) for x in rng.choice(L, 2, replace=False))
        kind = ["hopping", "pairing"][int(rng.integers(2))]
        st.apply_gate(kind, i, j, float(rng.uniform(0, np.pi)))
    return st


class TestGates:
    def test_hopping_quarter_angle_amplitudes(self):
        st = FockState.from_occupations([1, 0])
        st.apply_gate("hopping", 0, 1, np.pi / 4)
        probs = np.abs(st.amps) ** 2
        assert probs[0b01] == pytest.approx(0.5, abs=1e-12)  # |10>: site0 occupied
        assert probs[0b10] == pytest.approx(0.5, abs=1e-12)

    def test_pairing_annihilates_single_occupancy(self):
        st = FockState.from_occupations([1, 0])
        before = st.amps.copy()
        st.apply_gate("pairing", 0, 1, np.pi / 4)
        assert np.allclose(st.amps, before, atol=1e-12)

    def test_norm_preserved(self):
        st = random_fock_circuit(5, np.random.default_rng(0), n_ops=30)
        assert st.norm() == pytest.approx(1.0, abs=1e-12)

    def test_site_cap(self):
        with pytest.raises(ValueError):
            FockState.from_occupations(np.zeros(13, dtype=int))

    def test_rejects_equal_sites(self):
        with pytest.raises(ValueError):
            FockState.from_occupations([1, 0]).apply_gate("hopping", 1, 1, 0.3)


class TestMeasurement:
    def test_definite_site_certain(self):
        st = FockState.from_occupations([1, 0])
        assert st.measure_occupation(0, 0.99) == 1

    def test_bell_half_half(self):
        base = FockState.from_occupations([0, 0])
        base.apply_gate("pairing", 0, 1, np.pi / 4)
        assert base.born_probability(0) == pytest.approx(0.5, abs=1e-12)
        st = base.copy()
        assert st.measure_occupation(0, 0.3) == 1
        st = base.copy()
        assert st.measure_occupation(0, 0.7) == 0

    def test_post_state_definite(self):
        rng = np.random.default_rng(1)
        st = random_fock_circuit(5, rng)
        out = st.measure_occupation(2, rng.random())
        assert st.occupations()[2] == pytest.approx(out, abs=1e-12)


class TestCovariance:
    def test_product_diagonal(self):
        st = FockState.from_occupations([1, 0, 1, 0])
        c = st.covariance()
        assert np.allclose(np.diag(c)[4:], [1, 0, 1, 0], atol=1e-12)

    def test_bell_anomalous_block(self):
        st = FockState.from_occupations([0, 0])
        st.apply_gate("pairing", 0, 1, np.pi / 4)
        assert abs(c01 := st.covariance()[0, 3]) == pytest.approx(0.5, abs=1e-12)

    def test_gaussian_output_is_projector(self):
        st = random_fock_circuit(6, np.random.default_rng(2), n_ops=20)
        c = st.covariance()
        assert np.max(np.abs(c @ c - c)) < 1e-10


class TestParityAndEntropy:
    def test_parity_constant_along_trajectory(self):
        rng = np.random.default_rng(3)
        st = FockState.from_occupations([1, 0, 0, 1, 0])
        p0 = st.parity()
        assert p0 == pytest.approx(1.0, abs=1e-12)
        for _ in range(20):
            i, j = (int(x) for x in rng.choice(5, 2, replace=False))
            st.apply_gate(["hopping", "pairing"][int(rng.integers(2))], i, j, np.pi / 4)
            if rng.random() < 0.4:
                st.measure_occupation(int(rng.integers(5)), rng.random())
            assert st.parity() == pytest.approx(p0, abs=1e-10)

    def test_product_entropy_zero(self):
        st = FockState.from_occupations([1, 1, 0, 0])
        assert st.renyi_entropy(range(2), 2) == pytest.approx(0.0, abs=1e-12)

    def test_bell_entropy(self):
        st = FockState.from_occupations([0, 0])
        st.apply_gate("pairing", 0, 1, np.pi / 4)
        assert st.renyi_entropy([0], 2) == pytest.approx(LOG2, abs=1e-12)

    def test_complement_consistency(self):
        st = random_fock_circuit(6, np.random.default_rng(4))
        for m in (1, 2, 3):
            assert st.renyi_entropy(range(m), 2) == pytest.approx(
                st.renyi_entropy(range(m, 6), 2), abs=1e-10
            )

    def test_mode_swap_involution(self):
        st = random_fock_circuit(5, np.random.default_rng(5))
        before = st.amps.copy()
        st.apply_mode_swap(0, 3).apply_mode_swap(0, 3)
        assert np.allclose(st.amps, before, atol=1e-12)
