"""Two-mode micromaser pumped by ultracold cascade atoms.

Atoms in the upper state of a three-level cascade cross a bimodal cavity
slowly enough that their center-of-mass motion is quantized.  This package
computes the resulting scattering amplitudes and one/two-photon emission
probabilities, the timed-transit (classical-motion) limit for comparison,
and the steady-state photon statistics of both modes under cavity damping.
"""

__version__ = "0.1.0"

from .jc import JcInput, g1_tau_from_beam, jc_gain
from .master import (
    ConvergenceError,
    GainTable,
    JointDistribution,
    MazerConfig,
    SolverError,
    StabilityError,
    SteadyStateResult,
    TruncationError,
    apply_generator,
    build_gain_table,
    direct_steady_state,
    rk4_steady_state,
    twolevel_detailed_balance,
)
from .scattering import (
    BranchAmplitudes,
    CavityBeam,
    DressedCoefficients,
    GainProbabilities,
    ScatterChannels,
    ScatterInput,
    branch_amplitudes,
    branch_wavenumbers,
    dressed_coefficients,
    gain_probabilities,
    scatter_channels,
    ultracold_approx,
)
from .stats import MomentSummary, classify, marginals, moments

__all__ = [
    "__version__",
    "BranchAmplitudes",
    "CavityBeam",
    "ConvergenceError",
    "DressedCoefficients",
    "GainProbabilities",
    "GainTable",
    "JcInput",
    "JointDistribution",
    "MazerConfig",
    "MomentSummary",
    "ScatterChannels",
    "ScatterInput",
    "SolverError",
    "StabilityError",
    "SteadyStateResult",
    "TruncationError",
    "apply_generator",
    "branch_amplitudes",
    "branch_wavenumbers",
    "build_gain_table",
    "classify",
    "direct_steady_state",
    "dressed_coefficients",
    "g1_tau_from_beam",
    "gain_probabilities",
    "jc_gain",
    "marginals",
    "moments",
    "rk4_steady_state",
    "scatter_channels",
    "twolevel_detailed_balance",
    "ultracold_approx",
]
