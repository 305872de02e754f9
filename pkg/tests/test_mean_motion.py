import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanmotion import (
    OscillatorSum,
    TrajectoryError,
    UnwrapConfig,
    ValidationError,
    check_resonance,
    empirical_mean_motion,
    evaluate_z,
    mean_motion,
)
from meanmotion.mean_motion import ALMOST_RESONANCE_ONLY, NON_RESONANT, RESONANT

from conftest import EXAMPLE_FREQS, EXAMPLE_OMEGA, random_sum


class TestResonance:
    def test_example_frequencies(self):
        rep = check_resonance(EXAMPLE_FREQS, 10)
        assert rep.status == NON_RESONANT
        assert rep.witness is None

    def test_integer_ratio(self):
        rep = check_resonance([1.0, 2.0], 2)
        assert rep.witness == (2, -1)
        # 2 - 1 != 0, so only the strict condition fails
        assert rep.status == ALMOST_RESONANCE_ONLY

    def test_nearly_equal(self):
        rep = check_resonance([1.0, 1.0 + 1e-15], 10)
        assert rep.status == RESONANT
        assert rep.witness == (1, -1)

    def test_three_term_relation(self):
        rep = check_resonance([1.0, math.sqrt(2), 1.0 + math.sqrt(2)], 3)
        assert rep.witness is not None
        assert sum(l * f for l, f in zip(rep.witness, [1.0, math.sqrt(2), 1.0 + math.sqrt(2)])) == pytest.approx(0, abs=1e-9)

    def test_zero_frequency_is_resonant(self):
        assert check_resonance([0.0, 1.3], 5).witness is not None

    def test_bound_validated(self):
        with pytest.raises(ValidationError):
            check_resonance([1.0, 2.0], 0)


class TestMeanMotion:
    def test_worked_example(self, example_sum):
        res = mean_motion(example_sum)
        assert res.omega == pytest.approx(EXAMPLE_OMEGA, abs=5e-3)
        assert res.resonance.non_resonant
        by_freq = dict(zip(res.frequencies, res.weights))
        assert by_freq[3.0] == pytest.approx(0.28510, abs=1e-5)
        assert by_freq[math.sqrt(2)] == pytest.approx(0.10108, abs=1e-5)

    @pytest.mark.parametrize("a1,a2", [(2.0, 1.0), (1.0, 2.0)])
    def test_dominant_term_wins(self, a1, a2):
        osc = OscillatorSum([a1, a2], [3.0, math.sqrt(2)])
        res = mean_motion(osc)
        dominant = 3.0 if a1 > a2 else math.sqrt(2)
        assert res.omega == pytest.approx(dominant, abs=1e-14)
        np.testing.assert_allclose(sorted(res.weights), [0.0, 1.0], atol=1e-14)

    def test_single_merged_term(self):
        res = mean_motion(OscillatorSum.from_terms([(1.0 + 2.5 + 3.0, 1.7)]))
        assert res.omega == 1.7
        np.testing.assert_array_equal(res.weights, [1.0])

    def test_resonant_input_is_reported_not_rejected(self, caplog):
        res = mean_motion(OscillatorSum([1.0, 0.5], [1.0, 2.0]))
        assert res.resonance.witness == (2, -1)
        assert "witness" in caplog.text

    def test_phase_invariance(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            osc = random_sum(rng, 4, non_resonant=False)
            base = mean_motion(osc)
            turned = mean_motion(osc.rotated(rng.uniform(0, 2 * np.pi, size=4)))
            # rotation perturbs |a_k| by rounding only
            assert turned.omega == pytest.approx(base.omega, abs=1e-12)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=5))
    def test_simplex_and_convexity(self, seed, m):
        osc = random_sum(np.random.default_rng(seed), m, non_resonant=False)
        res = mean_motion(osc)
        eps = res.weight_tolerance
        assert np.all(res.weights >= -eps)
        assert abs(res.weight_sum - 1.0) <= eps
        lam_eps = float(np.abs(osc.frequencies) @ res.weight_errors) + 1e-12
        assert osc.frequencies.min() - lam_eps <= res.omega <= osc.frequencies.max() + lam_eps

    def test_empirical_agreement(self):
        rng = np.random.default_rng(32)
        for i in range(8):
            osc = random_sum(rng, 2 + i % 3)
            omega = mean_motion(osc).omega
            assert abs(empirical_mean_motion(osc, 2000.0).omega_hat - omega) <= 0.02 * osc.max_frequency


class TestEvaluateZ:
    def test_single_term_at_zero(self):
        assert evaluate_z(OscillatorSum([0.3 - 2j], [1.1]), 0.0) == 0.3 - 2j

    def test_cancellation(self):
        assert abs(evaluate_z(OscillatorSum([1.0, 1.0], [1.0, 2.0]), math.pi)) <= 1e-15

    def test_triangle_inequality(self):
        rng = np.random.default_rng(33)
        osc = random_sum(rng, 4, non_resonant=False)
        z = evaluate_z(osc, rng.uniform(-100, 100, size=1000))
        assert np.all(np.abs(z) <= osc.total_amplitude * (1 + 1e-14))


class TestEmpirical:
    def test_pure_rotation(self):
        assert empirical_mean_motion(OscillatorSum([1.0], [2.0]), 100.0).omega_hat == pytest.approx(2.0, abs=1e-9)

    def test_three_term_example(self, example_sum):
        assert abs(empirical_mean_motion(example_sum, 1000.0).omega_hat - EXAMPLE_OMEGA) <= 0.05

    @pytest.mark.parametrize("a1,a2,l1,l2", [(2.0, 1.0, 3.0, math.sqrt(2)), (1.5, 1.2, 0.7, 2.3)])
    def test_dominant_term_winding(self, a1, a2, l1, l2):
        osc = OscillatorSum([a1, a2], [l1, l2])
        T = 500.0
        assert abs(empirical_mean_motion(osc, T).omega_hat - l1) <= 2 * math.pi * (a2 / a1) / T + 0.01

    def test_unwrap_matches_fine_grid(self):
        rng = np.random.default_rng(34)
        for _ in range(10):
            osc = random_sum(rng, int(rng.integers(2, 5)), non_resonant=False)
            T = float(rng.uniform(20, 200))
            phi = empirical_mean_motion(osc, T).omega_hat * T
            h = 0.05 / osc.max_frequency / 10
            t = np.linspace(0, T, int(math.ceil(T / h)) + 1)
            ref = np.unwrap(np.angle(evaluate_z(osc, t)))
            assert abs(phi - (ref[-1] - ref[0])) <= 1e-6

    def test_origin_crossing_raises(self):
        with pytest.raises(TrajectoryError):
            empirical_mean_motion(OscillatorSum([1.0, 1.0], [1.0, 2.0]), 10.0)

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            UnwrapConfig(h_max=-1.0)
        with pytest.raises(ValidationError):
            empirical_mean_motion(OscillatorSum([1.0], [1.0]), 0.0)
