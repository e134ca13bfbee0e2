"""Secrecy rate regions for the two-user MIMO-NOMA channel with confidential messages."""
from .linalg import givens, is_psd, logdet_psd, rotation_from_angles, sym_eig
from .oracle import GridGuardError, GridSpec, grid_oracle_region, grid_oracle_wiretap, time_sharing_baseline
from .precoder import (
    PrecoderParams,
    SolveOptions,
    WiretapSolution,
    barrier_objective,
    bfgs_minimize,
    build_covariance,
    gradient_fd,
    optimize_wiretap,
)
from .rates import (
    ChannelPair,
    CovarianceMatrix,
    EffectiveChannels,
    Order,
    RatePoint,
    effective_channels,
    r2_direct,
    rate_pair,
    wiretap_rate,
)
from .region import RateRegion, SweepConfig, SweepResult, convex_hull_region, solve_order12, solve_order21, sweep

__version__ = "0.1.0"
