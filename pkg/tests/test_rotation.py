import math

import numpy as np
import pytest

from mzfisher.errors import SizeExceeded
from mzfisher.rotation import (
    DickeIndex,
    conditional_probabilities,
    full_outcome_distribution,
    probability_derivatives,
    wigner_d_block,
)
from mzfisher.states import (
    LightSource,
    NPhotonState,
    build_amplitude_table,
    generation_probability,
    postselect,
)

RNG = np.random.default_rng(20260810)

# spin-1 rotation at phi = pi/2, closed form, rows mu = +1, 0, -1
D1_HALF_PI = np.array(
    [
        [0.5, -0.707106781186547524, 0.5],
        [0.707106781186547524, 0.0, -0.707106781186547524],
        [0.5, 0.707106781186547524, 0.5],
    ]
)


def random_even_state(total_n: int) -> NPhotonState:
    coeffs = np.zeros(total_n + 1)
    coeffs[::2] = RNG.normal(size=coeffs[::2].shape)
    coeffs /= np.linalg.norm(coeffs)
    return NPhotonState(total_n=total_n, coeffs=coeffs, gen_prob=1.0)


def random_state(total_n: int) -> NPhotonState:
    coeffs = RNG.normal(size=total_n + 1)
    coeffs /= np.linalg.norm(coeffs)
    return NPhotonState(total_n=total_n, coeffs=coeffs, gen_prob=1.0)


class TestDickeIndex:
    def test_count_mapping(self):
        idx = DickeIndex(total_n=5, mu_twice=3)
        assert (idx.n_a, idx.n_b) == (4, 1)

    def test_parity_enforced(self):
        with pytest.raises(ValueError):
            DickeIndex(total_n=4, mu_twice=3)
        with pytest.raises(ValueError):
            DickeIndex(total_n=2, mu_twice=4)


class TestWignerDBlock:
    def test_identity_at_zero_exact(self):
        for n in (0, 1, 5, 40):
            d = wigner_d_block(n, 0.0).d
            assert np.array_equal(d, np.eye(n + 1))

    @pytest.mark.parametrize("phi", [0.3, 0.8, 2.0, -1.1])
    def test_two_level_closed_form(self, phi):
        d = wigner_d_block(1, phi).d
        half = phi / 2.0
        expected = np.array([[math.cos(half), -math.sin(half)], [math.sin(half), math.cos(half)]])
        np.testing.assert_allclose(d, expected, atol=1e-14)

    def test_spin_one_closed_form(self):
        d = wigner_d_block(2, math.pi / 2.0).d
        np.testing.assert_allclose(d, D1_HALF_PI, atol=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 10, 40, 100])
    def test_orthogonality(self, n):
        d = wigner_d_block(n, 0.9).d
        np.testing.assert_allclose(d @ d.T, np.eye(n + 1), atol=1e-10)

    def test_orthogonality_at_ceiling(self):
        d = wigner_d_block(512, 1.3).d
        assert np.max(np.abs(d @ d.T - np.eye(513))) < 1e-8

    @pytest.mark.parametrize("n", [1, 2, 10, 40])
    def test_composition(self, n):
        d1 = wigner_d_block(n, 0.37).d
        d2 = wigner_d_block(n, 0.85).d
        d12 = wigner_d_block(n, 1.22).d
        np.testing.assert_allclose(d1 @ d2, d12, atol=1e-9)

    def test_row_norms(self):
        d = wigner_d_block(60, 0.7).d
        np.testing.assert_allclose(np.sum(d**2, axis=1), np.ones(61), atol=1e-10)

    def test_ceiling_enforced(self):
        with pytest.raises(SizeExceeded):
            wigner_d_block(513, 0.5)

    def test_entry_accessor(self):
        block = wigner_d_block(2, 0.4)
        top = DickeIndex(total_n=2, mu_twice=2)
        bottom = DickeIndex(total_n=2, mu_twice=-2)
        assert block.entry(top, bottom) == block.d[0, 2]


class TestConditionalProbabilities:
    def test_zero_phase_returns_squared_coeffs(self):
        state = random_state(12)
        p = conditional_probabilities(state, 0.0)
        np.testing.assert_allclose(p, state.coeffs**2, atol=1e-15)

    @pytest.mark.parametrize("phi", [0.2, 0.9, 2.4])
    def test_single_photon(self, phi):
        state = NPhotonState(total_n=1, coeffs=np.array([1.0, 0.0]), gen_prob=1.0)
        p = conditional_probabilities(state, phi)
        np.testing.assert_allclose(p, [math.cos(phi / 2) ** 2, math.sin(phi / 2) ** 2], atol=1e-14)

    def test_normalized(self):
        for n in (3, 17, 44):
            p = conditional_probabilities(random_state(n), 1.1)
            assert math.fsum(p) == pytest.approx(1.0, abs=1e-10)
            assert np.all(p >= 0.0)


class TestProbabilityDerivatives:
    def test_single_photon_closed_form(self):
        state = NPhotonState(total_n=1, coeffs=np.array([1.0, 0.0]), gen_prob=1.0)
        for phi in (0.1, 0.6, 1.3):
            dp = probability_derivatives(state, phi)
            assert dp[0] == pytest.approx(-math.sin(phi) / 2.0, abs=1e-14)
            assert dp[1] == pytest.approx(+math.sin(phi) / 2.0, abs=1e-14)

    def test_sums_to_zero(self):
        for n in (2, 9, 40):
            dp = probability_derivatives(random_state(n), 0.8)
            assert math.fsum(dp) == pytest.approx(0.0, abs=1e-10)

    def test_matches_finite_differences(self):
        h = 1e-5
        for n in (1, 4, 13, 40):
            state = random_state(n)
            for phi in (0.3, 1.0):
                dp = probability_derivatives(state, phi)
                num = (
                    conditional_probabilities(state, phi + h)
                    - conditional_probabilities(state, phi - h)
                ) / (2.0 * h)
                np.testing.assert_allclose(dp, num, atol=1e-7)


class TestGlobalPhaseInvariance:
    def test_probabilities_ignore_matched_phases(self):
        # matched phases theta_a, theta_b = 2 theta_a only multiply the
        # component by a global phase, so outcome probabilities are unchanged
        src0 = LightSource.from_mean_photons(6.0, 3.5)
        amps = build_amplitude_table(src0)
        theta_a = 0.7
        for n in (2, 5, 8):
            base = postselect(amps, n)
            k = np.arange(n + 1)
            w = base.coeffs * np.exp(1j * ((n - k) * theta_a + k * (2.0 * theta_a) / 2.0))
            d = wigner_d_block(n, 0.9).d
            p_general = np.abs(d @ w) ** 2
            p_matched = conditional_probabilities(base, 0.9)
            np.testing.assert_allclose(p_general, p_matched, atol=1e-12)


@pytest.fixture(scope="module")
def setup():
    src = LightSource.from_mean_photons(8.0, 6.0)
    amps = build_amplitude_table(src)
    return src, amps


class TestFullOutcomeDistribution:

    def test_threshold_zero(self, setup):
        _, amps = setup
        dist = full_outcome_distribution(amps, 0, 0.4)
        assert dist.probs.shape == (1,)
        g0 = generation_probability(amps, 0)
        assert dist.probs[0] == pytest.approx(g0, rel=1e-12)
        assert dist.overflow_prob == pytest.approx(1.0 - g0, rel=1e-12)

    def test_completeness(self, setup):
        _, amps = setup
        dist = full_outcome_distribution(amps, 10, 0.7)
        assert math.fsum(dist.probs) + dist.overflow_prob == pytest.approx(1.0, abs=1e-12)

    def test_overflow_matches_generation_tail(self, setup):
        _, amps = setup
        dist = full_outcome_distribution(amps, 10, 0.7)
        expected = 1.0 - math.fsum(generation_probability(amps, n) for n in range(11))
        assert dist.overflow_prob == pytest.approx(expected, abs=1e-12)

    def test_overflow_phase_independent(self, setup):
        _, amps = setup
        a = full_outcome_distribution(amps, 10, 0.3).overflow_prob
        b = full_outcome_distribution(amps, 10, 1.1).overflow_prob
        assert abs(a - b) <= 1e-12

    def test_row_ordering(self, setup):
        _, amps = setup
        dist = full_outcome_distribution(amps, 3, 0.5)
        assert dist.totals.tolist() == [0, 1, 1, 2, 2, 2, 3, 3, 3, 3]
        assert dist.n_a.tolist() == [0, 0, 1, 0, 1, 2, 0, 1, 2, 3]
        assert np.all(dist.n_a + dist.n_b == dist.totals)

    def test_threshold_beyond_cutoff_rejected(self, setup):
        _, amps = setup
        with pytest.raises(ValueError):
            full_outcome_distribution(amps, amps.cutoff + 1, 0.5)
