"""Channel-loss and photon-source attacks on the commitment protocols.

Two families are modelled here.  The faking-distance attack exploits
expected fibre loss: a committer sitting next to the verifier while
claiming a remote location measures both observables on disjoint halves
of the pulses and later reveals whichever half suits her, padding with
random outcomes where needed.  The multi-photon attacks exploit a weak
Poisson source: pulses carrying two or more photons can be split and
measured in both observables at once, pinning down the sent state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .protocol import ConditionalTable, Variant, build_test, honest_table, pass_probability
from .strategy import FlipParams, apply_flips, breidbart_table


@dataclass(frozen=True)
class SourceModel:
    """Pulsed Poisson photon source feeding a lossy fibre and a detector.

    Attributes
    ----------
    mu : float
        Mean photons per pulse.
    alpha : float
        Fibre attenuation in dB/km.
    length_km : float
        Fibre length.
    eta : float
        Detector efficiency in ``(0, 1]``.
    pulses : int
        Number of pulses emitted.
    """

    mu: float
    alpha: float
    length_km: float
    eta: float
    pulses: int

    def __post_init__(self) -> None:
        if self.mu <= 0.0:
            raise ValueError(f"mu must be positive, got {self.mu!r}")
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if self.length_km < 0.0:
            raise ValueError(f"length_km must be non-negative, got {self.length_km!r}")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta!r}")
        if self.pulses < 0:
            raise ValueError(f"pulses must be non-negative, got {self.pulses!r}")

    @property
    def transmittance(self) -> float:
        """Fraction of photons surviving the fibre, ``10**(-alpha*L/10)``."""
        return 10.0 ** (-self.alpha * self.length_km / 10.0)

    @property
    def n_emitted(self) -> float:
        return self.mu * self.pulses

    @property
    def n_received(self) -> float:
        return self.transmittance * self.n_emitted

    @property
    def n_measured(self) -> float:
        """Expected measurement count of an honest party at ``length_km``."""
        return self.eta * self.n_received

    @property
    def n_cheat_measured(self) -> float:
        """Expected measurement count of a cheater intercepting at the
        source (no fibre loss, same detector)."""
        return self.eta * self.n_emitted


@dataclass(frozen=True)
class DistanceScenario:
    """Noise levels of the claimed remote location and the cheater's
    actual nearby one."""

    r_distant: float
    r_near: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r_near <= self.r_distant <= 1.0:
            raise ValueError(
                "need 0 <= r_near <= r_distant <= 1, got "
                f"r_near={self.r_near!r}, r_distant={self.r_distant!r}"
            )


def poisson_pmf(n: int, mu: float) -> float:
    """``P(N = n)`` for ``N ~ Poisson(mu)``."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n!r}")
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    return math.exp(n * math.log(mu) - mu - math.lgamma(n + 1))


def max_safe_distance(alpha: float) -> float:
    """Fibre length (km) beyond which an honest party detects at most
    half of what a source-side cheater would: ``(10/alpha) * log10(2)``.

    Past this distance the reveal-half-the-data attack succeeds outright.
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    return (10.0 / alpha) * math.log10(2.0)


def max_safe_distance_noisy(alpha: float, scenario: DistanceScenario) -> float | None:
    """Maximum safe fibre length when the cheater also enjoys a noise
    advantage (``r_near < r_distant``).

    Returns ``(10/alpha) * [log10(2) + log10(1 - (r_d - r_n)/(1 - r_d))]``,
    which reduces to :func:`max_safe_distance` at ``r_d == r_n``.  Returns
    ``None`` when ``r_d >= (r_n + 1)/2``: the noise gap is then so large
    that the cheater can always fake her statistics and no safe distance
    exists.
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    r_d, r_n = scenario.r_distant, scenario.r_near
    if r_d >= (r_n + 1.0) / 2.0:
        return None
    gap = (r_d - r_n) / (1.0 - r_d)
    return (10.0 / alpha) * (math.log10(2.0) + math.log10(1.0 - gap))


def faked_table(
    variant: Variant,
    claimed: int,
    scenario: DistanceScenario,
    length_km: float,
    alpha: float,
) -> ConditionalTable:
    """Revealed-outcome statistics of the faking-distance cheater.

    The cheater fills half of the expected tally with her own low-noise
    (``r_near``) measurements and pads the remaining fraction
    ``delta = 1/2 - 10**(-alpha*L/10)`` with fair coin flips, giving each
    row ``(p_near/2 + delta/2) / (1/2 + delta)``.

    Raises ``ValueError`` when ``delta < 0`` (claimed distance short of
    the 50%-loss length): the cheater cannot even fill the expected count
    and the attack degenerates to honest play.
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if length_km < 0.0:
        raise ValueError(f"length_km must be non-negative, got {length_km!r}")
    delta = 0.5 - 10.0 ** (-alpha * length_km / 10.0)
    if delta < -1e-12:
        raise ValueError(
            f"claimed length {length_km!r} km is below the 50%-loss distance "
            f"{max_safe_distance(alpha)!r} km; the attack does not apply"
        )
    delta = max(delta, 0.0)  # length exactly at the boundary rounds to zero padding
    near = honest_table(variant, claimed, scenario.r_near)
    entries: dict[tuple[str, int], float] = {}
    for s in variant.states:
        for outcome in (0, 1):
            good = 0.5 * near.prob(s, outcome)
            entries[(s, outcome)] = (good + delta * 0.5) / (0.5 + delta)
    return ConditionalTable(variant.states, entries)


def usd_success_rate() -> float:
    """Fraction of particles whose state unambiguous discrimination
    identifies with certainty in the noiseless two-state protocol:
    ``1 - 1/sqrt(2)``, around 29%.  Weaker than the measure-both-halves
    strategy, which resolves 50%."""
    return 1.0 - 1.0 / math.sqrt(2.0)


class MultiPhotonMode(Enum):
    """How the cheater exploits an imperfect single-photon source."""

    #: Split multi-photon pulses, measure single-photon pulses mid-basis.
    IDEAL = "ideal"
    #: Beam-split every pulse; add coin flips where the wrong observable fired.
    BEAM_SPLITTER = "beam-splitter"


def ideal_multiphoton_table(
    variant: Variant,
    claimed: int,
    r: float,
    mu: float,
    flips: FlipParams,
) -> ConditionalTable:
    """Revealed statistics of a cheater who detects the photon number of
    each non-empty pulse: multi-photon pulses yield honest-looking
    outcomes (she learns the state), single-photon pulses fall back to
    the flipped mid-basis strategy.

    Conditioned on a non-empty pulse, the single-photon weight is
    ``mu*exp(-mu) / (1 - exp(-mu))``.
    """
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    e = math.exp(-mu)
    w_single = mu * e
    w_multi = 1.0 - e - mu * e
    norm = 1.0 - e
    flipped = apply_flips(breidbart_table(variant, r), flips)
    honest = honest_table(variant, claimed, r)
    entries = {
        (s, o): (w_single * flipped.prob(s, o) + w_multi * honest.prob(s, o)) / norm
        for s in variant.states
        for o in (0, 1)
    }
    return ConditionalTable(variant.states, entries)


def beam_splitter_table(
    variant: Variant, claimed: int, r: float, mu: float
) -> ConditionalTable:
    """Revealed statistics of the beam-splitter cheater.

    Every pulse is split between the two measurement set-ups; a
    single-photon pulse lands on the wrong observable half the time, and
    those outcomes are replaced by coin flips.  Each row is the honest
    row mixed with weight ``w = mu*exp(-mu) / (2*(1 - exp(-mu)))`` of
    uniform noise.  The strategy has no free parameters.
    """
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    w = 0.5 * mu * math.exp(-mu) / (1.0 - math.exp(-mu))
    honest = honest_table(variant, claimed, r)
    entries = {
        (s, o): (1.0 - w) * honest.prob(s, o) + w * 0.5
        for s in variant.states
        for o in (0, 1)
    }
    return ConditionalTable(variant.states, entries)


def multiphoton_success(
    variant: Variant,
    claimed: int,
    r: float,
    n_per_state: int,
    sigma_factor: float,
    mu: float,
    flips: FlipParams,
    mode: MultiPhotonMode,
) -> float:
    """Pass probability of the selected photon-source attack against the
    honest acceptance test.  ``flips`` is ignored in beam-splitter mode,
    which has no tunable parameters."""
    if mode is MultiPhotonMode.IDEAL:
        table = ideal_multiphoton_table(variant, claimed, r, mu, flips)
    else:
        table = beam_splitter_table(variant, claimed, r, mu)
    test = build_test(variant, claimed, r, n_per_state, sigma_factor)
    return pass_probability(test, table)
