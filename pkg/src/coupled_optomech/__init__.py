"""Steady state, stability, Gaussian correlations and cooling of two coupled
optomechanical cavities linked by photon hopping and phonon tunneling."""

from .cooling import (
    EffectiveParams,
    MomentSystem,
    MomentVector,
    build_moment_system,
    effective_reduction,
    evolve_moments,
    steady_moments,
)
from .errors import (
    AsymmetricParams,
    ConfigError,
    NonConvergence,
    NumericalFailure,
    OptomechError,
    UnknownFigure,
    UnphysicalState,
    UnstableSystem,
)
from .gaussian import Bipartition, Mode, TwoModeCM, log_negativity, reduce, steering, symplectic_eigenvalues
from .linear_dynamics import linear_model, solve_lyapunov, stability, steady_covariance
from .params import CavityParams, SystemParams, angular, derive, single_photon_coupling, thermal_occupation
from .steady_state import coupling_fixed_point, pinned_fixed_point, solve_fixed_point

__version__ = "0.1.0"
