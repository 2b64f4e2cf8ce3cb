"""Mid-basis cheating with probabilistic outcome flipping.

A committer who wants to defer her choice measures every particle in the
basis halfway between the two commitment observables, then post-processes
the raw outcomes: each 0 is flipped to 1 with probability ``p01`` and
each 1 to 0 with probability ``p10``.  The flip pair is tuned numerically
to maximise the probability of passing the verifier's acceptance test
for the claimed bit.

The optimiser is a deterministic coarse grid scan followed by a
shrinking-step local pattern search; evaluations are pure, the scan
order is fixed, and near-ties resolve to the lexicographically smallest
parameter pair, so results are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .protocol import (
    STATE_VECTORS,
    ConditionalTable,
    Variant,
    binomial_window_probability,
    build_test,
    honest_table,
    pass_probability,
)
from .qcore import born, breidbart

#: Relative tolerance under which two objective values count as tied.
_TIE_REL = 1e-12


@dataclass(frozen=True)
class FlipParams:
    """Post-processing pair: ``p01`` flips measured 0s, ``p10`` measured 1s."""

    p01: float
    p10: float

    def __post_init__(self) -> None:
        for name, p in (("p01", self.p01), ("p10", self.p10)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p!r}")


@dataclass(frozen=True)
class SinglePhoton:
    """Maximise the plain flipped mid-basis pass probability."""


@dataclass(frozen=True)
class MultiPhotonIdeal:
    """Maximise the pass probability of a cheater who also exploits
    multi-photon pulses of a Poisson source with mean ``mu``."""

    mu: float

    def __post_init__(self) -> None:
        if self.mu <= 0.0:
            raise ValueError(f"mu must be positive, got {self.mu!r}")


Objective = SinglePhoton | MultiPhotonIdeal


@dataclass(frozen=True)
class OptimizationResult:
    best: FlipParams
    value: float
    evaluations: int
    grid_step: float


def breidbart_table(variant: Variant, r: float) -> ConditionalTable:
    """Raw outcome statistics of the mid-basis measurement at noise ``r``."""
    basis = breidbart()
    p_zero = {s: born(basis, STATE_VECTORS[s], r) for s in variant.states}
    return ConditionalTable.from_zero_probs(variant.states, p_zero)


def _flip_row(p0: float, p1: float, p01: float, p10: float) -> tuple[float, float]:
    # 2x2 stochastic flip kernel applied to one row.
    return p0 * (1.0 - p01) + p1 * p10, p1 * (1.0 - p10) + p0 * p01


def apply_flips(table: ConditionalTable, flips: FlipParams) -> ConditionalTable:
    """Post-process a conditional table with the flip kernel; rows stay
    normalised."""
    entries: dict[tuple[str, int], float] = {}
    for s in table.states:
        q0, q1 = _flip_row(
            table.prob(s, 0), table.prob(s, 1), flips.p01, flips.p10
        )
        entries[(s, 0)] = q0
        entries[(s, 1)] = q1
    return ConditionalTable(table.states, entries)


def cheat_success(
    variant: Variant,
    claimed: int,
    r: float,
    n_per_state: int,
    sigma_factor: float,
    flips: FlipParams,
) -> float:
    """Probability that the flipped mid-basis strategy passes every
    acceptance window of the test for ``claimed``."""
    test = build_test(variant, claimed, r, n_per_state, sigma_factor)
    return pass_probability(test, apply_flips(breidbart_table(variant, r), flips))


class _FastObjective:
    """Pre-baked objective evaluator.

    Caches windows and per-state base rows once so the grid scan does not
    rebuild tables; the arithmetic mirrors the public table functions
    exactly, so the returned value is bit-identical to
    :func:`cheat_success` (or the multi-photon counterpart) at the same
    parameters.
    """

    def __init__(
        self,
        variant: Variant,
        claimed: int,
        r: float,
        n_per_state: int,
        sigma_factor: float,
        objective: Objective,
    ) -> None:
        test = build_test(variant, claimed, r, n_per_state, sigma_factor)
        raw = breidbart_table(variant, r)
        self.n = n_per_state
        self.mixture: tuple[float, float, float] | None = None
        if isinstance(objective, MultiPhotonIdeal):
            e = math.exp(-objective.mu)
            self.mixture = (objective.mu * e, 1.0 - e - objective.mu * e, 1.0 - e)
        honest = honest_table(variant, claimed, r)
        self.rows = []
        for s in variant.states:
            counted = test.counted_outcome[s]
            lo, hi = test.windows[s]
            self.rows.append(
                (
                    raw.prob(s, 0),
                    raw.prob(s, 1),
                    honest.prob(s, counted),
                    counted,
                    lo,
                    hi,
                )
            )

    def __call__(self, p01: float, p10: float) -> float:
        value = 1.0
        for p0, p1, hon, counted, lo, hi in self.rows:
            row = _flip_row(p0, p1, p01, p10)
            p = row[counted]
            if self.mixture is not None:
                w_single, w_multi, norm = self.mixture
                p = (w_single * p + w_multi * hon) / norm
            value *= binomial_window_probability(self.n, p, lo, hi)
        return value


def optimize(
    variant: Variant,
    claimed: int,
    r: float,
    n_per_state: int,
    sigma_factor: float = 3.0,
    objective: Objective = SinglePhoton(),
    grid_step: float = 0.01,
    resolution: float = 1e-4,
) -> OptimizationResult:
    """Maximise the cheating success over the flip pair ``(p01, p10)``.

    A full grid scan at ``grid_step`` over ``[0, 1]^2`` locates the basin;
    a 5x5 pattern search with step halving then refines the maximiser to
    a parameter resolution of at most ``resolution``.  Values within a
    relative ``1e-12`` of the running maximum count as ties and resolve
    to the lexicographically smallest pair, making the output
    deterministic.
    """
    if not 0.0 < grid_step <= 0.5:
        raise ValueError(f"grid_step must lie in (0, 0.5], got {grid_step!r}")
    if resolution <= 0.0:
        raise ValueError(f"resolution must be positive, got {resolution!r}")
    fn = _FastObjective(variant, claimed, r, n_per_state, sigma_factor, objective)

    best_v = -1.0
    best = (0.0, 0.0)
    evaluations = 0

    def consider(x: float, y: float) -> bool:
        nonlocal best_v, best, evaluations
        v = fn(x, y)
        evaluations += 1
        if v > best_v + _TIE_REL * abs(best_v):
            best_v, best = v, (x, y)
            return True
        if abs(v - best_v) <= _TIE_REL * max(abs(v), abs(best_v)) and (x, y) < best:
            best = (x, y)
        return False

    steps = round(1.0 / grid_step)
    for i in range(steps + 1):
        for j in range(steps + 1):
            consider(min(1.0, i * grid_step), min(1.0, j * grid_step))

    s = grid_step / 2.0
    while s >= resolution / 2.0:
        improved = True
        while improved:
            improved = False
            x0, y0 = best
            for dx in (-2, -1, 0, 1, 2):
                for dy in (-2, -1, 0, 1, 2):
                    if dx == 0 and dy == 0:
                        continue
                    x = min(1.0, max(0.0, x0 + dx * s))
                    y = min(1.0, max(0.0, y0 + dy * s))
                    if consider(x, y):
                        improved = True
        s /= 2.0

    flips = FlipParams(*best)
    return OptimizationResult(
        best=flips, value=fn(*best), evaluations=evaluations, grid_step=grid_step
    )
