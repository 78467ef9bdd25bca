"""Steady states, stability, dynamics and entanglement of a PT-symmetric
(gain-loss) coupled-cavity optomechanical system.

All rates are normalized to the passive-cavity loss ``gamma``.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    EigenFailure,
    IllConditioned,
    InputError,
    NoConvergence,
    NonPhysical,
    NotHurwitz,
    NumericalError,
    PtomechError,
    SingularDecoupling,
    SpecError,
    StepSizeUnderflow,
    TooShort,
    UnknownPreset,
)
from .params import (  # noqa: E402
    Regime,
    RegimeTag,
    SupermodePair,
    SystemParams,
    classify,
    conventional,
    j_ep,
    supermodes,
    thermal_occupation,
    validate,
)
from .steady import SteadyStateBranch, effective_couplings, solve_branches  # noqa: E402
from .stability import StabilityMap, StabilityVerdict, basin, is_stable, jacobian  # noqa: E402
from .dynamics import Trajectory, TrajectoryClass, classify_trajectory, integrate  # noqa: E402
from .covariance import (  # noqa: E402
    CovarianceMatrix,
    diffusion_matrix,
    drift_matrix,
    physicality_watchdog,
    solve_lyapunov,
)
from .entanglement import ModePair, NegativityResult, log_negativity, pairwise_all  # noqa: E402
from .grid import Axis  # noqa: E402
from .sweep import SweepSpec, figure_preset, run_sweep  # noqa: E402
