"""Tests for the diagnostics and ensemble reduction."""
import numpy as np
import pytest

from fermisteer.gaussian import build_gate_kernel, init_product_state
from fermisteer.observables import (
    TimeSeries,
    active_density,
    charge_imbalance,
    chord_coordinate,
    ensemble_average,
    entropy_profile,
    occupation_imbalance,
)


class TestActiveDensity:
    def test_extremes_and_half(self):
        assert active_density([1, 1, 1, 1]) == 1.0
        assert active_density([0, 0, 0, 0]) == 0.0
        assert active_density([1, 1, 0, 0]) == 0.5


class TestChargeImbalance:
    def test_neel_is_one(self):
        assert charge_imbalance(init_product_state([1, 0, 1, 0])) == pytest.approx(1.0)

    def test_uniform_half_is_zero(self):
        gs = init_product_state([1, 0])
        gs.apply_unitary(build_gate_kernel("hopping", 0, 1, np.pi / 4, 2))
        assert charge_imbalance(gs) == pytest.approx(0.0, abs=1e-12)

    def test_two_domain_walls(self):
        assert occupation_imbalance([1, 1, 0, 0]) == pytest.approx(0.5)

    def test_bounds_and_alternating_characterization(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            n = rng.random(8)
            d = occupation_imbalance(n)
            assert 0.0 <= d <= 1.0
        assert occupation_imbalance([0, 1, 0, 1, 0, 1]) == 1.0
        assert occupation_imbalance([1, 0, 1, 0, 0, 1]) < 1.0


class TestEntropyProfile:
    def test_product_state_all_zero(self):
        sizes, chords, ent = entropy_profile(init_product_state([1, 0, 1, 0, 1, 0]), 2, [1, 2, 3])
        assert np.allclose(ent, 0.0, atol=1e-10)
        assert sizes.tolist() == [1, 2, 3]

    def test_pure_state_complement_symmetry(self):
        rng = np.random.default_rng(1)
        gs = init_product_state(rng.integers(0, 2, 8))
        for _ in range(12):
            i, j = (int(x) for x in rng.choice(8, 2, replace=False))
            gs.apply_two_site(["hopping", "pairing"][int(rng.integers(2))], i, j, np.pi / 4)
        _, _, ent = entropy_profile(gs, 2, [2])
        assert ent[0] == pytest.approx(gs.renyi_entropy(range(2, 8), 2), abs=1e-8)

    def test_symmetric_state_profile_symmetry(self):
        # S(|A|) == S(L - |A|) for a state sharing the ring's translation symmetry
        gs = init_product_state([1, 0] * 4)
        for a in range(0, 8, 2):
            gs.apply_two_site("hopping", a, (a + 1) % 8, np.pi / 4)
        for a in range(1, 8, 2):
            gs.apply_two_site("hopping", a, (a + 1) % 8, np.pi / 4)
        _, _, ent = entropy_profile(gs, 2, [2, 6])
        assert ent[0] == pytest.approx(ent[1], abs=1e-8)

    def test_chord_coordinate_symmetric(self):
        c = chord_coordinate(16, [4, 8, 12])
        assert c[0] == pytest.approx(c[2], abs=1e-12)
        assert c[1] == pytest.approx(np.log(16 / np.pi))

    def test_rejects_out_of_range_cuts(self):
        with pytest.raises(ValueError):
            entropy_profile(init_product_state([1, 0, 1, 0]), 2, [0, 2])


def make_series(vals, times=None):
    times = np.arange(len(vals)) if times is None else times
    return TimeSeries(times=times, columns={"x": np.asarray(vals, dtype=float)})


class TestEnsembleAverage:
    def test_identical_copies(self):
        avg = ensemble_average([make_series([1.0, 2.0, 3.0]) for _ in range(4)])
        assert np.allclose(avg.columns["x"], [1, 2, 3])
        assert np.allclose(avg.stderr["x"], 0.0)

    def test_two_member_mean(self):
        avg = ensemble_average([make_series([1.0, 0.0]), make_series([3.0, 1.0])])
        assert np.allclose(avg.columns["x"], [2.0, 0.5])

    def test_single_member_zero_stderr(self):
        avg = ensemble_average([make_series([5.0, 5.0])])
        assert np.allclose(avg.stderr["x"], 0.0)

    def test_rejects_mismatched_schema(self):
        a = make_series([1.0, 2.0])
        b = TimeSeries(times=[0, 1], columns={"y": np.array([1.0, 2.0])})
        with pytest.raises(ValueError):
            ensemble_average([a, b])
        c = make_series([1.0, 2.0], times=[0, 2])
        with pytest.raises(ValueError):
            ensemble_average([a, c])

    def test_stderr_scales_inverse_sqrt(self):
        rng = np.random.default_rng(2)

        def batch(n):
            return [make_series(rng.normal(0, 1, 16)) for _ in range(n)]

        e50 = ensemble_average(batch(50)).stderr["x"].mean()
        e200 = ensemble_average(batch(200)).stderr["x"].mean()
        assert e50 / e200 == pytest.approx(2.0, rel=0.25)


class TestTimeSeriesCsv:
    def test_round_trip(self, tmp_path):
        ts = TimeSeries(
            times=np.array([0, 5, 10]),
            columns={"a": np.array([1.0, 0.25, 1e-17]), "b": np.array([0.1, 0.2, 0.3])},
            stderr={"a": np.zeros(3), "b": np.array([0.01, 0.02, 0.03])},
        )
        path = tmp_path / "series.csv"
        ts.to_csv(path)
        back = TimeSeries.from_csv(path)
        assert np.array_equal(back.times, ts.times)
        for name in ("a", "b"):
            assert np.array_equal(back.columns[name], ts.columns[name])
            assert np.array_equal(back.stderr[name], ts.stderr[name])

    def test_rejects_negative_stderr(self):
        with pytest.raises(ValueError):
            TimeSeries(times=[0], columns={"x": [1.0]}, stderr={"x": [-1.0]})
