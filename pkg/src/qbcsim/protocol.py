"""Honest-party statistics and the verifier's binomial acceptance test.

The committer measures one of two observables on every particle the
verifier sends and later reveals the outcomes.  The verifier checks,
separately for each sent state, that the tallied outcome count falls
inside a ``mu +/- k*sigma`` window of the honest binomial distribution,
and accepts only if every window test passes.

Two protocol variants are supported: the two-state one (verifier sends
``|0>`` or ``|+>``) and the four-state one (``|0>``, ``|1>``, ``|+>``,
``|->``).  Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Mapping

import numpy as np

from .qcore import KET_0, KET_1, KET_MINUS, KET_PLUS, Basis, Qubit, born

_ATOL = 1e-12

#: State label -> prepared state.
STATE_VECTORS: Mapping[str, Qubit] = {
    "0": KET_0,
    "1": KET_1,
    "+": KET_PLUS,
    "-": KET_MINUS,
}


class Variant(Enum):
    """Which set of states the verifier prepares."""

    TWO_STATE = "two"
    FOUR_STATE = "four"

    @property
    def states(self) -> tuple[str, ...]:
        if self is Variant.TWO_STATE:
            return ("0", "+")
        return ("0", "1", "+", "-")

    @property
    def state_count(self) -> int:
        return len(self.states)


def check_commitment(claimed: int) -> int:
    """Validate a commitment bit."""
    if claimed not in (0, 1):
        raise ValueError(f"commitment bit must be 0 or 1, got {claimed!r}")
    return claimed


def commit_observable(claimed: int) -> Basis:
    """The measurement an honest committer uses for the given bit.

    Committing to 0 measures in the computational basis (outcome 0 on
    ``|0>``, outcome 1 on ``|1>``).  Committing to 1 measures in the
    Hadamard basis with outcome 0 on ``|->`` and outcome 1 on ``|+>``,
    so that each deterministic state maps to a fixed outcome at zero
    noise in both variants.
    """
    check_commitment(claimed)
    if claimed == 0:
        return Basis(KET_0, KET_1)
    return Basis(KET_MINUS, KET_PLUS)


@dataclass(frozen=True)
class ConditionalTable:
    """Outcome probabilities ``p(outcome | sent state)`` for one strategy.

    ``entries`` maps ``(state label, outcome)`` to a probability; the two
    entries of every state sum to one.
    """

    states: tuple[str, ...]
    entries: Mapping[tuple[str, int], float]

    def __post_init__(self) -> None:
        for s in self.states:
            if (s, 0) not in self.entries or (s, 1) not in self.entries:
                raise ValueError(f"missing entries for state {s!r}")
            p0, p1 = self.entries[(s, 0)], self.entries[(s, 1)]
            for p in (p0, p1):
                if not -_ATOL <= p <= 1.0 + _ATOL:
                    raise ValueError(f"probability out of range for state {s!r}: {p!r}")
            if abs(p0 + p1 - 1.0) > _ATOL:
                raise ValueError(f"row for state {s!r} does not sum to 1: {p0 + p1!r}")

    @classmethod
    def from_zero_probs(
        cls, states: tuple[str, ...], p_zero: Mapping[str, float]
    ) -> ConditionalTable:
        """Build a table from the outcome-0 probability of each state."""
        entries: dict[tuple[str, int], float] = {}
        for s in states:
            p0 = p_zero[s]
            entries[(s, 0)] = p0
            entries[(s, 1)] = 1.0 - p0
        return cls(tuple(states), entries)

    def prob(self, state: str, outcome: int) -> float:
        return self.entries[(state, outcome)]


def honest_table(variant: Variant, claimed: int, r: float) -> ConditionalTable:
    """Conditional outcome statistics of an honest committer.

    Parameters
    ----------
    variant : Variant
        Protocol variant (fixes the sent-state set).
    claimed : int
        Commitment bit; selects the measured observable.
    r : float
        Depolarizing-noise level in ``[0, 1]``.
    """
    obs = commit_observable(claimed)
    p_zero = {s: born(obs, STATE_VECTORS[s], r) for s in variant.states}
    return ConditionalTable.from_zero_probs(variant.states, p_zero)


def counted_outcomes(variant: Variant, claimed: int) -> dict[str, int]:
    """Which outcome the verifier tallies for each sent state.

    Wherever the claimed observable is deterministic at zero noise the
    deterministic outcome is tallied.  For states with coin-flip honest
    statistics the window is symmetric and the choice is inert; the fixed
    convention is: the two-state protocol tallies 1s for ``|+>`` under
    either claim (and 1s for ``|0>`` under a claim of 1), the four-state
    protocol tallies 0s for ``|0>``, 1s for ``|1>``, and 0s for ``|+->``
    under a claim of 0.
    """
    check_commitment(claimed)
    if variant is Variant.TWO_STATE:
        return {"0": 0, "+": 1} if claimed == 0 else {"0": 1, "+": 1}
    if claimed == 0:
        return {"0": 0, "1": 1, "+": 0, "-": 0}
    return {"0": 0, "1": 1, "+": 1, "-": 0}


@dataclass(frozen=True)
class AcceptanceTest:
    """Per-state integer count windows the verifier checks at reveal time.

    ``windows[s]`` is the inclusive ``[lo, hi]`` range the tally of
    ``counted_outcome[s]`` must fall in when state ``s`` was sent.
    """

    n_per_state: int
    windows: Mapping[str, tuple[int, int]]
    counted_outcome: Mapping[str, int]
    sigma_factor: float = 3.0

    def __post_init__(self) -> None:
        if self.n_per_state < 1:
            raise ValueError("n_per_state must be at least 1")
        if self.sigma_factor <= 0.0:
            raise ValueError("sigma_factor must be positive")
        for s, (lo, hi) in self.windows.items():
            if not 0 <= lo <= hi <= self.n_per_state:
                raise ValueError(f"invalid window for state {s!r}: [{lo}, {hi}]")
            if self.counted_outcome.get(s) not in (0, 1):
                raise ValueError(f"missing counted outcome for state {s!r}")


def build_test(
    variant: Variant,
    claimed: int,
    r: float,
    n_per_state: int,
    sigma_factor: float = 3.0,
) -> AcceptanceTest:
    """Acceptance windows derived from the honest statistics.

    For each sent state, with ``p`` the honest probability of the tallied
    outcome, the window is ``[ceil(mu - k*sigma), floor(mu + k*sigma)]``
    clamped to ``[0, N]``, where ``mu = N*p`` and
    ``sigma = sqrt(N*p*(1-p))``.
    """
    if n_per_state < 1:
        raise ValueError("n_per_state must be at least 1")
    if sigma_factor <= 0.0:
        raise ValueError("sigma_factor must be positive")
    honest = honest_table(variant, claimed, r)
    counted = counted_outcomes(variant, claimed)
    windows: dict[str, tuple[int, int]] = {}
    for s in variant.states:
        p = honest.prob(s, counted[s])
        mu = n_per_state * p
        sigma = math.sqrt(n_per_state * p * (1.0 - p))
        lo = max(0, math.ceil(mu - sigma_factor * sigma))
        hi = min(n_per_state, math.floor(mu + sigma_factor * sigma))
        windows[s] = (lo, hi)
    return AcceptanceTest(n_per_state, windows, counted, sigma_factor)


@lru_cache(maxsize=64)
def _log_binomial_coefficients(n: int) -> np.ndarray:
    """``log C(n, k)`` for ``k = 0..n``."""
    lg = math.lgamma
    lg_n1 = lg(n + 1)
    return np.array([lg_n1 - lg(k + 1) - lg(n - k + 1) for k in range(n + 1)])


def binomial_window_probability(n: int, p: float, lo: int, hi: int) -> float:
    """``P(lo <= X <= hi)`` for ``X ~ Binomial(n, p)``.

    Terms are formed in the log domain (log-gamma coefficients) and
    accumulated with compensated summation, so the sum stays accurate up
    to ``n ~ 1e5`` where naive factorials overflow.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p!r}")
    lo, hi = max(lo, 0), min(hi, n)
    if lo > hi:
        return 0.0
    if p == 0.0:
        return 1.0 if lo == 0 else 0.0
    if p == 1.0:
        return 1.0 if hi == n else 0.0
    k = np.arange(lo, hi + 1, dtype=np.float64)
    logs = (
        _log_binomial_coefficients(n)[lo : hi + 1]
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )
    return min(1.0, math.fsum(np.exp(logs).tolist()))


def pass_factors(test: AcceptanceTest, actual: ConditionalTable) -> dict[str, float]:
    """Per-state probability that the tallied count lands in its window,
    when the revealed outcomes are distributed per ``actual``."""
    factors: dict[str, float] = {}
    for s, (lo, hi) in test.windows.items():
        # tables admit an ulp of rounding slack around [0, 1]
        p = min(1.0, max(0.0, actual.prob(s, test.counted_outcome[s])))
        factors[s] = binomial_window_probability(test.n_per_state, p, lo, hi)
    return factors


def pass_probability(test: AcceptanceTest, actual: ConditionalTable) -> float:
    """Probability of passing every window test: the product of the
    per-state factors (counts for different sent states are independent).

    ``actual`` must cover every state the test windows refer to.
    """
    return math.prod(pass_factors(test, actual).values())


def binding_failure(
    variant: Variant, r: float, n_per_state: int, sigma_factor: float = 3.0
) -> float:
    """Probability that an honest committer to 1 passes the verifier's
    test for a commitment to 0: the statistical binding failure rate."""
    test = build_test(variant, 0, r, n_per_state, sigma_factor)
    return pass_probability(test, honest_table(variant, 1, r))
