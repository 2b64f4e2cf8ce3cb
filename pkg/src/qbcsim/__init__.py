"""Simulator for practical two- and four-state quantum bit-commitment
protocols under depolarizing noise: honest statistics, the verifier's
binomial acceptance test, and numerical optimisation of cheating
strategies (mid-basis measurement with outcome flipping, faked location,
and imperfect-photon-source attacks), with a Monte Carlo cross-check."""

from .attacks import (
    DistanceScenario,
    MultiPhotonMode,
    SourceModel,
    beam_splitter_table,
    faked_table,
    ideal_multiphoton_table,
    max_safe_distance,
    max_safe_distance_noisy,
    multiphoton_success,
    poisson_pmf,
    usd_success_rate,
)
from .mcsim import (
    BeamSplitter,
    BreidbartFlips,
    FakedDistance,
    Honest,
    IdealMultiPhoton,
    TrialConfig,
    TrialReport,
    run,
    sample_pulse_outcome,
)
from .protocol import (
    AcceptanceTest,
    ConditionalTable,
    Variant,
    binding_failure,
    binomial_window_probability,
    build_test,
    commit_observable,
    counted_outcomes,
    honest_table,
    pass_factors,
    pass_probability,
)
from .qcore import (
    COMPUTATIONAL,
    HADAMARD,
    KET_0,
    KET_1,
    KET_MINUS,
    KET_PLUS,
    Basis,
    Qubit,
    basis_at_angle,
    born,
    breidbart,
    helstrom_success,
)
from .strategy import (
    FlipParams,
    MultiPhotonIdeal,
    OptimizationResult,
    SinglePhoton,
    apply_flips,
    breidbart_table,
    cheat_success,
    optimize,
)

__version__ = "0.1.0"

__all__ = [
    "AcceptanceTest",
    "Basis",
    "BeamSplitter",
    "BreidbartFlips",
    "COMPUTATIONAL",
    "ConditionalTable",
    "DistanceScenario",
    "FakedDistance",
    "FlipParams",
    "HADAMARD",
    "Honest",
    "IdealMultiPhoton",
    "KET_0",
    "KET_1",
    "KET_MINUS",
    "KET_PLUS",
    "MultiPhotonIdeal",
    "MultiPhotonMode",
    "OptimizationResult",
    "Qubit",
    "SinglePhoton",
    "SourceModel",
    "TrialConfig",
    "TrialReport",
    "Variant",
    "apply_flips",
    "basis_at_angle",
    "beam_splitter_table",
    "binding_failure",
    "binomial_window_probability",
    "born",
    "breidbart",
    "breidbart_table",
    "build_test",
    "cheat_success",
    "commit_observable",
    "counted_outcomes",
    "faked_table",
    "helstrom_success",
    "honest_table",
    "ideal_multiphoton_table",
    "max_safe_distance",
    "max_safe_distance_noisy",
    "multiphoton_success",
    "optimize",
    "pass_factors",
    "pass_probability",
    "poisson_pmf",
    "run",
    "sample_pulse_outcome",
    "usd_success_rate",
]
