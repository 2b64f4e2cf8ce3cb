import math

import numpy as np
import pytest

from qbcsim import mcsim
from qbcsim.attacks import (
    DistanceScenario,
    MultiPhotonMode,
    beam_splitter_table,
    faked_table,
    ideal_multiphoton_table,
    multiphoton_success,
)
from qbcsim.protocol import Variant, build_test, honest_table, pass_probability
from qbcsim.strategy import FlipParams, cheat_success

TWO = Variant.TWO_STATE
FOUR = Variant.FOUR_STATE


def config(**overrides) -> mcsim.TrialConfig:
    base = dict(
        variant=TWO,
        claimed=0,
        r=0.1,
        n_per_state=50,
        sigma_factor=3.0,
        strategy=mcsim.Honest(),
        trials=100_000,
        seed=0,
    )
    base.update(overrides)
    return mcsim.TrialConfig(**base)


def assert_within_3se(report: mcsim.TrialReport, analytic: float) -> None:
    se = math.sqrt(max(analytic * (1.0 - analytic), 1e-12) / report.trials)
    assert abs(report.accept_rate - analytic) <= 3.0 * se, (
        report.accept_rate,
        analytic,
        se,
    )


class TestReproducibility:
    @pytest.mark.parametrize(
        "strategy",
        (
            mcsim.Honest(),
            mcsim.BreidbartFlips(FlipParams(0.1, 0.45)),
            mcsim.BeamSplitter(0.2),
            mcsim.IdealMultiPhoton(0.2, FlipParams(0.0, 0.49)),
        ),
    )
    def test_same_seed_bitwise_identical(self, strategy):
        a = mcsim.run(config(strategy=strategy, trials=20_000, seed=123))
        b = mcsim.run(config(strategy=strategy, trials=20_000, seed=123))
        assert a.accept_rate == b.accept_rate
        assert a.standard_error == b.standard_error
        for s in TWO.states:
            assert np.array_equal(
                a.per_state_count_histograms[s], b.per_state_count_histograms[s]
            )

    def test_different_seeds_differ(self):
        a = mcsim.run(config(trials=20_000, seed=1))
        b = mcsim.run(config(trials=20_000, seed=2))
        assert a.accept_rate != b.accept_rate


class TestReports:
    def test_histogram_totals_equal_trials(self):
        report = mcsim.run(config(variant=FOUR, n_per_state=25, trials=30_000))
        assert set(report.per_state_count_histograms) == set(FOUR.states)
        for s in FOUR.states:
            hist = report.per_state_count_histograms[s]
            assert hist.sum() == report.trials
            assert len(hist) == 26

    def test_standard_error_formula(self):
        report = mcsim.run(config(trials=30_000))
        p = report.accept_rate
        assert report.standard_error == math.sqrt(p * (1.0 - p) / report.trials)

    def test_full_windows_always_accept(self):
        report = mcsim.run(
            config(strategy=mcsim.BreidbartFlips(FlipParams(0.0, 0.0)), sigma_factor=1e9)
        )
        assert report.accept_rate == 1.0

    def test_trials_validated(self):
        with pytest.raises(ValueError):
            config(trials=0)


class TestOracleAgreement:
    def test_honest(self):
        cfg = config(r=0.0)
        analytic = pass_probability(
            build_test(TWO, 0, 0.0, 50, 3.0), honest_table(TWO, 0, 0.0)
        )
        assert_within_3se(mcsim.run(cfg), analytic)

    def test_breidbart_flips(self):
        flips = FlipParams(0.0, 0.4897)
        cfg = config(strategy=mcsim.BreidbartFlips(flips))
        assert_within_3se(mcsim.run(cfg), cheat_success(TWO, 0, 0.1, 50, 3.0, flips))

    def test_beam_splitter(self):
        cfg = config(strategy=mcsim.BeamSplitter(1.0))
        analytic = multiphoton_success(
            TWO, 0, 0.1, 50, 3.0, 1.0, FlipParams(0.0, 0.0), MultiPhotonMode.BEAM_SPLITTER
        )
        assert_within_3se(mcsim.run(cfg), analytic)

    def test_ideal_multiphoton(self):
        flips = FlipParams(0.0, 0.4926)
        cfg = config(strategy=mcsim.IdealMultiPhoton(0.2, flips))
        analytic = multiphoton_success(
            TWO, 0, 0.1, 50, 3.0, 0.2, flips, MultiPhotonMode.IDEAL
        )
        assert_within_3se(mcsim.run(cfg), analytic)

    def test_faked_distance(self):
        scenario = DistanceScenario(r_distant=0.1, r_near=0.0)
        strategy = mcsim.FakedDistance(scenario, 17.0, 0.2)
        cfg = config(strategy=strategy)
        table = faked_table(TWO, 0, scenario, 17.0, 0.2)
        analytic = pass_probability(build_test(TWO, 0, 0.1, 50, 3.0), table)
        assert_within_3se(mcsim.run(cfg), analytic)


class TestSamplePulseOutcome:
    def test_honest_noiseless_is_deterministic(self):
        rng = np.random.default_rng(0)
        outcomes = {
            mcsim.sample_pulse_outcome(mcsim.Honest(), TWO, 0, 0.0, "0", rng)
            for _ in range(200)
        }
        assert outcomes == {0}

    def test_direct_strategies_never_miss(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            out = mcsim.sample_pulse_outcome(
                mcsim.BreidbartFlips(FlipParams(0.2, 0.3)), TWO, 0, 0.2, "+", rng
            )
            assert out in (0, 1)

    def test_beam_splitter_matches_analytic_row(self):
        rng = np.random.default_rng(7)
        strategy = mcsim.BeamSplitter(0.2)
        zeros = detections = 0
        pulses = 1_000_000
        for _ in range(pulses):
            out = mcsim.sample_pulse_outcome(strategy, TWO, 0, 0.0, "0", rng)
            if out is None:
                continue
            detections += 1
            zeros += out == 0
        # empty-pulse rate matches the Poisson vacuum probability
        vacuum = math.exp(-0.2)
        miss_rate = 1.0 - detections / pulses
        assert abs(miss_rate - vacuum) <= 3.0 * math.sqrt(vacuum * (1 - vacuum) / pulses)
        p_zero = beam_splitter_table(TWO, 0, 0.0, 0.2).prob("0", 0)
        se = math.sqrt(p_zero * (1.0 - p_zero) / detections)
        assert abs(zeros / detections - p_zero) <= 3.0 * se

    def test_ideal_multiphoton_matches_analytic_row(self):
        rng = np.random.default_rng(9)
        flips = FlipParams(0.1, 0.45)
        strategy = mcsim.IdealMultiPhoton(0.2, flips)
        zeros = detections = 0
        for _ in range(1_000_000):
            out = mcsim.sample_pulse_outcome(strategy, TWO, 0, 0.1, "+", rng)
            if out is None:
                continue
            detections += 1
            zeros += out == 0
        p_zero = ideal_multiphoton_table(TWO, 0, 0.1, 0.2, flips).prob("+", 0)
        se = math.sqrt(p_zero * (1.0 - p_zero) / detections)
        assert abs(zeros / detections - p_zero) <= 3.0 * se
