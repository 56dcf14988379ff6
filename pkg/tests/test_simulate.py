import math

import numpy as np
import pytest
from scipy import stats

from mzfisher.errors import DegenerateLikelihood
from mzfisher.fisher import truncated_total_qfi
from mzfisher.rotation import full_outcome_distribution
from mzfisher.simulate import (
    ClickRecord,
    PhaseLikelihoodModel,
    crb_experiment,
    mle_estimate,
    sample_clicks,
)
from mzfisher.states import LightSource, build_amplitude_table, generation_probability

SEED = 20260810


@pytest.fixture(scope="module")
def counting_setup():
    src = LightSource.from_mean_photons(10.0, 5.0)
    amps = build_amplitude_table(src, cutoff=20)
    dist = full_outcome_distribution(amps, 20, 0.6)
    return src, amps, dist


class TestClickRecord:
    def test_overflow_marker(self):
        rec = ClickRecord.overflow()
        assert rec.is_overflow and rec.n_a is None and rec.n_b is None

    def test_partial_counts_rejected(self):
        with pytest.raises(ValueError):
            ClickRecord(n_a=1, n_b=None)


class TestSampleClicks:
    def test_seeded_determinism(self, counting_setup):
        _, _, dist = counting_setup
        a = sample_clicks(dist, 500, seed=SEED)
        b = sample_clicks(dist, 500, seed=SEED)
        assert a == b
        c = sample_clicks(dist, 500, seed=SEED + 1)
        assert a != c

    def test_vacuum_input_is_deterministic(self):
        amps = build_amplitude_table(LightSource(0.0, 0.0, 0.0, 0.0), cutoff=0)
        dist = full_outcome_distribution(amps, 0, 0.0)
        clicks = sample_clicks(dist, 200, seed=1)
        assert all(c == ClickRecord(0, 0) for c in clicks)

    def test_single_photon_frequencies_binomial(self):
        # coherent-only input: the one-photon block splits (cos^2, sin^2)
        phi = 0.8
        amps = build_amplitude_table(LightSource(math.sqrt(0.5), 0.0, 0.0, 0.0), cutoff=6)
        dist = full_outcome_distribution(amps, 6, phi)
        clicks = sample_clicks(dist, 50_000, seed=SEED)
        n10 = sum(1 for c in clicks if (c.n_a, c.n_b) == (1, 0))
        n01 = sum(1 for c in clicks if (c.n_a, c.n_b) == (0, 1))
        total = n10 + n01
        p_small = math.sin(phi / 2.0) ** 2  # k = 1 keeps the photon in port b
        # within the one-photon block, n_b = 1 occurs with probability sin^2(phi/2)
        sigma = math.sqrt(total * p_small * (1.0 - p_small))
        assert abs(n01 - total * p_small) <= 3.0 * sigma

    def test_overflow_frequency(self, counting_setup):
        _, amps, dist = counting_setup
        count = 50_000
        clicks = sample_clicks(dist, count, seed=SEED)
        n_over = sum(1 for c in clicks if c.is_overflow)
        p = dist.overflow_prob
        sigma = math.sqrt(count * p * (1.0 - p))
        assert abs(n_over - count * p) <= 3.0 * sigma

    def test_total_variation_converges(self):
        # moderate alphabet so the 4/sqrt(count) budget is meaningful
        src = LightSource.from_mean_photons(3.0, 1.5)
        amps = build_amplitude_table(src, cutoff=6)
        dist = full_outcome_distribution(amps, 6, 0.7)
        count = 100_000
        clicks = sample_clicks(dist, count, seed=SEED)
        freq = np.zeros(dist.probs.size + 1)
        index = {(int(a), int(b)): i for i, (a, b) in enumerate(zip(dist.n_a, dist.n_b))}
        for c in clicks:
            if c.is_overflow:
                freq[-1] += 1
            else:
                freq[index[(c.n_a, c.n_b)]] += 1
        freq /= count
        truth = np.append(dist.probs, dist.overflow_prob)
        tv = 0.5 * float(np.sum(np.abs(freq - truth)))
        assert tv <= 4.0 / math.sqrt(count)

    def test_marginal_chi_square(self, counting_setup):
        # empirical totals-by-N pass goodness of fit at the 1% level; the
        # fixed seed keeps the check deterministic (flaky-test budget: none)
        _, amps, dist = counting_setup
        count = 100_000
        clicks = sample_clicks(dist, count, seed=SEED)
        gen = np.array([generation_probability(amps, n) for n in range(21)])
        observed = np.zeros(22)
        for c in clicks:
            if c.is_overflow:
                observed[-1] += 1
            else:
                observed[c.n_a + c.n_b] += 1
        expected = np.append(gen, dist.overflow_prob) * count
        keep = expected >= 5.0
        obs, exp = observed[keep], expected[keep]
        if not keep.all():
            obs = np.append(obs, observed[~keep].sum())
            exp = np.append(exp, expected[~keep].sum())
        _, p_value = stats.chisquare(obs, exp * obs.sum() / exp.sum())
        assert p_value > 0.01


class TestMleEstimate:
    def test_recovers_phase(self, counting_setup):
        _, amps, dist = counting_setup
        clicks = sample_clicks(dist, 10_000, seed=SEED)
        est = mle_estimate(clicks, (amps, 20))
        fisher = truncated_total_qfi(amps, 20)
        assert abs(est - 0.6) <= 5.0 / math.sqrt(10_000 * fisher)

    def test_overflow_never_moves_argmax(self, counting_setup):
        _, amps, dist = counting_setup
        clicks = sample_clicks(dist, 2_000, seed=SEED)
        model = PhaseLikelihoodModel(amps, 20)
        base = mle_estimate(clicks, model)
        padded = mle_estimate(clicks + [ClickRecord.overflow()] * 117, model)
        assert padded == base

    def test_all_overflow_degenerate(self, counting_setup):
        _, amps, _ = counting_setup
        with pytest.raises(DegenerateLikelihood):
            mle_estimate([ClickRecord.overflow()] * 10, (amps, 20))

    def test_empty_rejected(self, counting_setup):
        _, amps, _ = counting_setup
        with pytest.raises(ValueError):
            mle_estimate([], (amps, 20))


class TestCrbExperiment:
    def test_seeded_determinism(self):
        src = LightSource.from_mean_photons(6.0, 3.0)
        kw = dict(n_res=12, true_phi=0.6, trials=2_000, repetitions=20, seed=SEED, phi_step=5e-4)
        a = crb_experiment(src, **kw)
        b = crb_experiment(src, **kw)
        assert a.estimates == b.estimates
        assert a.empirical_variance == b.empirical_variance

    def test_run_shape_and_crb_wiring(self):
        src = LightSource.from_mean_photons(6.0, 3.0)
        run = crb_experiment(src, 12, true_phi=0.6, trials=2_000, repetitions=30, seed=SEED, phi_step=5e-4)
        assert run.repetitions == 30
        amps = build_amplitude_table(src, cutoff=12)
        assert run.crb == pytest.approx(1.0 / (2_000 * truncated_total_qfi(amps, 12)), rel=1e-12)
        assert 0.5 <= run.ratio <= 2.0
        d = run.to_json_dict()
        assert set(d) == {"true_phi", "trials", "repetitions", "empirical_variance", "crb", "ratio"}

    def test_variance_tracks_fisher_information(self):
        # doubling the information should halve the variance; compare two
        # thresholds and check the variance ratio against the Fisher ratio
        src = LightSource.from_mean_photons(10.0, 5.0)
        runs = {}
        for n_res in (10, 50):
            runs[n_res] = crb_experiment(
                src, n_res, true_phi=0.6, trials=10_000, repetitions=200, seed=SEED, phi_step=5e-4
            )
        f10 = 1.0 / runs[10].crb
        f50 = 1.0 / runs[50].crb
        measured = runs[10].empirical_variance / runs[50].empirical_variance
        predicted = f50 / f10
        assert measured == pytest.approx(predicted, rel=0.2)

    def test_estimator_consistency(self):
        # matched substreams: the bias shrinks as the sample size grows
        src = LightSource.from_mean_photons(6.0, 3.0)
        small = crb_experiment(src, 12, true_phi=0.6, trials=1_000, repetitions=60, seed=SEED, phi_step=5e-4)
        large = crb_experiment(src, 12, true_phi=0.6, trials=100_000, repetitions=60, seed=SEED, phi_step=5e-4)
        bias_small = abs(np.mean(small.estimates) - 0.6)
        bias_large = abs(np.mean(large.estimates) - 0.6)
        assert bias_large < bias_small

    def test_preconditions(self):
        src = LightSource.from_mean_photons(6.0, 3.0)
        with pytest.raises(ValueError):
            crb_experiment(src, 12, true_phi=0.6, trials=10, repetitions=5, seed=1)
        with pytest.raises(ValueError):
            crb_experiment(src, 12, true_phi=2.0, trials=2_000, repetitions=5, seed=1)
