"""Monte Carlo cross-check of the analytic acceptance probabilities.

Full protocol runs are sampled pulse by pulse for a configurable party
(honest, flipped mid-basis, beam-splitter, ideal multi-photon, or
faking-distance) and pushed through the verifier's windows, giving an
empirical acceptance rate to compare against the closed-form results.

Sampling uses the counter-based Philox generator with a fixed draw
order, so a given :class:`TrialConfig` always produces a bit-identical
:class:`TrialReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .attacks import DistanceScenario, faked_table
from .protocol import ConditionalTable, Variant, build_test, honest_table
from .strategy import FlipParams, apply_flips, breidbart_table


@dataclass(frozen=True)
class Honest:
    """Measure the claimed observable on every particle."""


@dataclass(frozen=True)
class BreidbartFlips:
    """Mid-basis measurement with outcome flipping."""

    flips: FlipParams


@dataclass(frozen=True)
class BeamSplitter:
    """Split every pulse between both observables; coin-flip the rest."""

    mu: float


@dataclass(frozen=True)
class IdealMultiPhoton:
    """Photon-number-resolved splitting with mid-basis fallback."""

    mu: float
    flips: FlipParams


@dataclass(frozen=True)
class FakedDistance:
    """Claim a remote location and reveal the favourable half."""

    scenario: DistanceScenario
    length_km: float
    alpha: float


Strategy = Honest | BreidbartFlips | BeamSplitter | IdealMultiPhoton | FakedDistance


@dataclass(frozen=True)
class TrialConfig:
    variant: Variant
    claimed: int
    r: float
    n_per_state: int
    sigma_factor: float
    strategy: Strategy
    trials: int = 100_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials!r}")


@dataclass(frozen=True)
class TrialReport:
    """Empirical acceptance estimate plus the raw tally histograms.

    ``per_state_count_histograms[s][c]`` counts the trials in which the
    tallied outcome for state ``s`` appeared exactly ``c`` times.
    """

    accept_rate: float
    standard_error: float
    trials: int
    per_state_count_histograms: dict[str, np.ndarray]


def _single_photon_weight(mu: float) -> float:
    """P(pulse carried one photon | it carried at least one)."""
    return mu * math.exp(-mu) / (1.0 - math.exp(-mu))


@lru_cache(maxsize=256)
def _strategy_table(
    strategy: Strategy, variant: Variant, claimed: int, r: float
) -> ConditionalTable:
    """Analytic conditional table of a direct-sampling strategy, or the
    honest fallback rows used by the pulse-splitting modes."""
    if isinstance(strategy, Honest):
        return honest_table(variant, claimed, r)
    if isinstance(strategy, BreidbartFlips):
        return apply_flips(breidbart_table(variant, r), strategy.flips)
    if isinstance(strategy, FakedDistance):
        return faked_table(
            variant, claimed, strategy.scenario, strategy.length_km, strategy.alpha
        )
    raise TypeError(f"no direct table for strategy {strategy!r}")


def run(config: TrialConfig) -> TrialReport:
    """Estimate the acceptance probability of ``config.strategy``.

    Each trial draws the tallied outcome count for every sent state
    (directly from the strategy's conditional table, or, for the photon
    source modes, by first drawing how many of the ``n_per_state``
    successful measurements came from single-photon pulses and branching
    the outcome distribution accordingly), then applies the verifier's
    windows.  Empty pulses never contribute: counts are per successful
    measurement, which is exactly the at-least-one-photon conditioning.
    """
    test = build_test(
        config.variant, config.claimed, config.r, config.n_per_state, config.sigma_factor
    )
    rng = np.random.Generator(np.random.Philox(config.seed))
    n = config.n_per_state
    strategy = config.strategy

    accept = np.ones(config.trials, dtype=bool)
    histograms: dict[str, np.ndarray] = {}
    for s in config.variant.states:
        counted = test.counted_outcome[s]
        if isinstance(strategy, (Honest, BreidbartFlips, FakedDistance)):
            p = _strategy_table(strategy, config.variant, config.claimed, config.r).prob(
                s, counted
            )
            counts = rng.binomial(n, p, size=config.trials)
        elif isinstance(strategy, IdealMultiPhoton):
            p_flip = _strategy_table(
                BreidbartFlips(strategy.flips), config.variant, config.claimed, config.r
            ).prob(s, counted)
            p_honest = _strategy_table(
                Honest(), config.variant, config.claimed, config.r
            ).prob(s, counted)
            n_single = rng.binomial(n, _single_photon_weight(strategy.mu), size=config.trials)
            counts = rng.binomial(n_single, p_flip) + rng.binomial(n - n_single, p_honest)
        elif isinstance(strategy, BeamSplitter):
            p_honest = _strategy_table(
                Honest(), config.variant, config.claimed, config.r
            ).prob(s, counted)
            n_single = rng.binomial(n, _single_photon_weight(strategy.mu), size=config.trials)
            n_wrong = rng.binomial(n_single, 0.5)
            counts = (
                rng.binomial(n - n_single, p_honest)
                + rng.binomial(n_single - n_wrong, p_honest)
                + rng.binomial(n_wrong, 0.5)
            )
        else:
            raise TypeError(f"unknown strategy {strategy!r}")
        lo, hi = test.windows[s]
        accept &= (counts >= lo) & (counts <= hi)
        histograms[s] = np.bincount(counts, minlength=n + 1)

    rate = float(accept.mean())
    se = math.sqrt(rate * (1.0 - rate) / config.trials)
    return TrialReport(
        accept_rate=rate,
        standard_error=se,
        trials=config.trials,
        per_state_count_histograms=histograms,
    )


def sample_pulse_outcome(
    strategy: Strategy,
    variant: Variant,
    claimed: int,
    r: float,
    state: str,
    rng: np.random.Generator,
) -> int | None:
    """Sample the revealed outcome of a single pulse of ``state``.

    Returns 0 or 1, or ``None`` for pulses that produce no detection
    (empty Poisson draws in the photon-source modes; the direct-table
    strategies always detect).
    """
    if isinstance(strategy, (Honest, BreidbartFlips, FakedDistance)):
        p0 = _strategy_table(strategy, variant, claimed, r).prob(state, 0)
        return 0 if rng.random() < p0 else 1
    if isinstance(strategy, (IdealMultiPhoton, BeamSplitter)):
        photons = rng.poisson(strategy.mu)
        if photons == 0:
            return None
        honest_p0 = _strategy_table(Honest(), variant, claimed, r).prob(state, 0)
        if photons >= 2:
            return 0 if rng.random() < honest_p0 else 1
        if isinstance(strategy, IdealMultiPhoton):
            p0 = _strategy_table(
                BreidbartFlips(strategy.flips), variant, claimed, r
            ).prob(state, 0)
            return 0 if rng.random() < p0 else 1
        # Beam splitter, one photon: half the time it hit the wrong set-up.
        if rng.random() < 0.5:
            return 0 if rng.random() < honest_p0 else 1
        return 0 if rng.random() < 0.5 else 1
    raise TypeError(f"unknown strategy {strategy!r}")
