"""Tests for the classical stochastic twin, bit-flip noise, and the
branching-annihilating random walk."""
import numpy as np

from fermisteer.circuit import CircuitParams
from fermisteer.classical import (
    BarwParams,
    ClassicalState,
    apply_bitflip_noise,
    bond_particles,
    classical_measure_feedback,
    classical_step,
    classical_unitary_update,
    run_barw,
    run_classical,
)
from fermisteer.observables import ensemble_average
from fermisteer.protocol import target_pattern, trajectory_stream


def params(L=8, p=0.5, r=0.5, t_max=10, seed=1, initial="random_half_filling", probe=1):
    return CircuitParams(L=L, p=p, r=r, t_max=t_max, seed=seed,
                         initial_state=initial, probe_interval=probe)


class TestUnitaryUpdate:
    def test_hopping_resamples_unequal_pair(self):
        rng = np.random.default_rng(0)
        stays = 0
        n = 10_000
        for _ in range(n):
            st = ClassicalState.from_occupations([1, 0, 0, 0])
            classical_unitary_update(st, 0, rng)
            stays += int(st.bits[0])
        # pairing (prob 1/2) leaves (1,0); hopping resamples it 50/50,
        # matching the squared gate amplitudes: P(bits[0]=1) = 3/4
        sigma = np.sqrt(0.75 * 0.25 / n)
        assert abs(stays / n - 0.75) < 3 * sigma

    def test_hopping_leaves_equal_pair(self):
        # seeds whose first uniform selects the hopping branch
        hop_seeds = [s for s in range(200) if np.random.default_rng(s).random() < 0.5][:25]
        for s in hop_seeds:
            st = ClassicalState.from_occupations([0, 0, 1, 1])
            classical_unitary_update(st, 0, np.random.default_rng(s))
            assert st.bits[0] == st.bits[1] == 0
            assert st.flags[0] == st.flags[1] == 1

    def test_pair_parity_preserved(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            bits = rng.integers(0, 2, 6)
            st = ClassicalState.from_occupations(bits)
            i = int(rng.integers(5))
            before = (st.bits[i] + st.bits[i + 1]) % 2
            classical_unitary_update(st, i, rng)
            assert (st.bits[i] + st.bits[i + 1]) % 2 == before

    def test_requires_active_endpoint(self):
        rng = np.random.default_rng(3)
        st = ClassicalState.from_occupations([1, 0, 1, 0])
        st.flags[:] = 0
        classical_unitary_update(st, 0, rng)
        assert st.bits.tolist() == [1, 0, 1, 0]
        assert st.flags.sum() == 0


class TestMeasureFeedback:
    def test_correct_order_deactivates(self):
        rng = np.random.default_rng(4)
        st = ClassicalState.from_occupations([1, 0, 1, 1])
        classical_measure_feedback(st, 0, "odd", p=1.0, r=1.0, rng=rng)
        assert st.bits.tolist() == [1, 0, 1, 1]
        assert st.flags.tolist() == [0, 0, 1, 1]

    def test_wrong_order_swaps_with_feedback(self):
        rng = np.random.default_rng(5)
        st = ClassicalState.from_occupations([0, 1, 1, 1])
        classical_measure_feedback(st, 0, "odd", p=1.0, r=1.0, rng=rng)
        assert st.bits.tolist() == [1, 0, 1, 1]
        assert st.flags.tolist() == [0, 0, 1, 1]

    def test_even_link_orientation(self):
        rng = np.random.default_rng(6)
        st = ClassicalState.from_occupations([1, 0, 1, 1])
        classical_measure_feedback(st, 1, "even", p=1.0, r=1.0, rng=rng)
        assert st.bits.tolist() == [1, 0, 1, 1]
        assert st.flags.tolist() == [1, 0, 0, 1]

    def test_p_zero_is_identity(self):
        rng = np.random.default_rng(7)
        st = ClassicalState.from_occupations([0, 1, 1, 0])
        classical_measure_feedback(st, 0, "odd", p=0.0, r=1.0, rng=rng)
        assert st.bits.tolist() == [0, 1, 1, 0]
        assert st.flags.sum() == 4


class TestStep:
    def test_absorbing_state_invariant(self):
        rng = np.random.default_rng(8)
        st = ClassicalState.from_occupations(target_pattern(10))
        st.flags[:] = 0
        for _ in range(200):
            classical_step(st, 0.7, 0.6, rng)
        assert np.array_equal(st.bits, target_pattern(10))
        assert st.flags.sum() == 0

    def test_p_zero_keeps_everything_active(self):
        rng = np.random.default_rng(9)
        st = ClassicalState.from_occupations([1, 0, 0, 1, 1, 0])
        for _ in range(50):
            classical_step(st, 0.0, 1.0, rng)
        assert st.flags.sum() == 6

    def test_parity_and_hole_count_invariants(self):
        rng = np.random.default_rng(10)
        st = ClassicalState.from_occupations(rng.integers(0, 2, 12))
        parity = st.parity()
        for _ in range(100):
            classical_step(st, 0.6, 0.5, rng)
            assert st.parity() == parity
            holes = st.L - bond_particles(st.bits).sum()
            assert holes % 2 == 0

    def test_deep_absorbing_run_lands_on_target_translate(self):
        pars = params(L=64, p=0.9, r=1.0, t_max=2000, seed=12)
        rng = trajectory_stream(pars.seed, 0)
        st = ClassicalState.from_occupations(
            np.concatenate([np.ones(32, dtype=np.uint8), np.zeros(32, dtype=np.uint8)])
        )
        for _ in range(pars.t_max):
            classical_step(st, pars.p, pars.r, rng)
        assert np.array_equal(st.bits, target_pattern(64))
        assert st.flags.sum() == 0


class TestBondParticles:
    def test_target_pattern_is_empty(self):
        assert bond_particles(target_pattern(8)).sum() == 0

    def test_uniform_is_full(self):
        assert bond_particles(np.ones(6, dtype=np.uint8)).sum() == 6

    def test_domain_wall_pairs(self):
        cfg = bond_particles(np.array([1, 1, 0, 0], dtype=np.uint8))
        assert cfg.tolist() == [1, 0, 1, 0]
        assert (cfg.size - cfg.sum()) % 2 == 0


class TestBitflipNoise:
    def test_rate_zero_identity(self):
        st = ClassicalState.from_occupations([1, 0, 1, 0])
        apply_bitflip_noise(st, 0.0, np.random.default_rng(0))
        assert st.bits.tolist() == [1, 0, 1, 0]

    def test_rate_one_complements(self):
        st = ClassicalState.from_occupations([1, 0, 1, 0])
        apply_bitflip_noise(st, 1.0, np.random.default_rng(0))
        assert st.bits.tolist() == [0, 1, 0, 1]

    def test_noise_washes_out_absorbing_decay(self):
        # bit flips create bond particles out of the ordered state, so the
        # order parameter saturates at a noise-sustained floor instead of
        # decaying toward the absorbing value
        pars = params(L=400, p=0.8, r=1.0, t_max=1500, seed=13, probe=10)
        clean = ensemble_average([run_classical(pars, trajectory_index=k) for k in range(6)])
        noisy = ensemble_average(
            [run_classical(pars, noise=0.01, trajectory_index=k) for k in range(6)]
        )
        tail = slice(-20, None)
        clean_tail = clean.columns["bond_density"][tail].mean()
        noisy_tail = noisy.columns["bond_density"][tail].mean()
        assert noisy_tail > 0.05
        assert noisy_tail > 4 * clean_tail

    def test_all_inactive_flags_never_revive(self):
        # the flag sector's empty configuration is absorbing for any bit
        # content: measurements never set flags, gates need an active endpoint
        rng = np.random.default_rng(21)
        st = ClassicalState.from_occupations(rng.integers(0, 2, 20))
        st.flags[:] = 0
        for _ in range(100):
            classical_step(st, 0.8, 1.0, rng)
            apply_bitflip_noise(st, 0.05, rng)
            assert st.flags.sum() == 0


class TestRunClassical:
    def test_columns_and_delta_bond_duality(self):
        ts = run_classical(params(L=32, p=0.5, r=1.0, t_max=40, seed=14))
        assert set(ts.columns) == {"rho_active", "delta", "bond_density"}
        # with definite bits, 1 - delta equals the bond particle density
        assert np.allclose(1.0 - ts.columns["delta"], ts.columns["bond_density"], atol=1e-12)

    def test_active_phase_saturates(self):
        pars = params(L=200, p=0.4, r=1.0, t_max=600, seed=15, probe=5)
        avg = ensemble_average([run_classical(pars, trajectory_index=k) for k in range(10)])
        rho = avg.columns["rho_active"]
        assert rho[-20:].mean() > 0.05

    def test_odd_even_rule_exchange_is_translation(self):
        # swapped link rules started from the one-site-translated state should
        # reproduce the original ensemble statistics
        pars = params(L=12, p=0.7, r=0.8, t_max=30, seed=16, initial="neel", probe=1)
        n = 300
        base = ensemble_average(
            [run_classical(pars, trajectory_index=k) for k in range(n)]
        )
        pars_t = params(L=12, p=0.7, r=0.8, t_max=30, seed=17, initial="010101010101", probe=1)
        swapped = ensemble_average(
            [run_classical(pars_t, trajectory_index=k, target_phase=1) for k in range(n)]
        )
        diff = np.abs(base.columns["rho_active"] - swapped.columns["rho_active"])
        comb = np.sqrt(base.stderr["rho_active"] ** 2 + swapped.stderr["rho_active"] ** 2)
        mask = comb > 0
        assert np.all(diff[~mask] == 0)
        assert np.max(diff[mask] / comb[mask]) < 4.0


class TestBarw:
    def test_adjacent_pair_annihilates_quickly_without_branching(self):
        pars = BarwParams(L=16, q=1.0, t_max=300, seed=18, branch_prob=0.0)
        ts = run_barw(pars)
        dens = ts.columns["density"]
        assert dens[0] > 0
        assert dens[-1] == 0.0

    def test_parity_conserved_every_step(self):
        pars = BarwParams(L=64, q=0.7, t_max=200, seed=19, branch_prob=0.5)
        ts = run_barw(pars)
        counts = np.rint(ts.columns["density"] * pars.L).astype(int)
        assert np.all(counts % 2 == counts[0] % 2)

    def test_diffusive_decay_at_strong_annihilation(self):
        from fermisteer.scaling import powerlaw_exponent

        pars = [BarwParams(L=2000, q=1.0, t_max=2000, seed=20) for _ in range(8)]
        avg = ensemble_average([run_barw(p, trajectory_index=k) for k, p in enumerate(pars)])
        exp, _ = powerlaw_exponent(avg.times, avg.columns["density"], (50, 2000))
        assert 0.45 <= exp <= 0.55
