"""Joint AP beamforming and IRS phase-shift optimization for a MISO link."""

from ._jit import USE_NUMBA, backend_name
from .baselines import OracleResult, grid_oracle, no_irs_mrt_rate, random_phases
from .errors import (
    ContractViolation,
    DegenerateChannelError,
    EmptyIrsError,
    InvalidArgumentError,
    IrsError,
    OracleSizeError,
)
from .fixed_point import (
    FixedPointResult,
    extract_phase_config,
    fp_step,
    limit_point_residual,
    solve_fixed_point,
    unt,
)
from .initialization import EigenResult, initial_point, largest_eigenvector
from .manifold import (
    RcgResult,
    armijo_step,
    euclidean_grad,
    rcg_solve,
    retract,
    riemannian_grad,
    tangent_project,
    transport,
)
from .system import (
    ChannelRealization,
    QcqpData,
    SystemConfig,
    build_qcqp,
    combined_channel,
    load_channel,
    mrt_beamformer,
    mrt_rate,
    objective_p2,
    objective_qcqp,
    path_loss_linear,
    sample_channels,
    save_channel,
    spectral_efficiency,
)

__version__ = "0.1.0"
