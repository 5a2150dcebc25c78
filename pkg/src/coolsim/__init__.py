"""coolsim: universal cooling of quantum systems via randomized repeated
system-meter interactions.

The package simulates the protocol exactly at small sizes: one-iteration
CPTP maps from joint unitaries, their stochastic averages over coupling
axes and meter splittings, stroboscopic steady states, trajectory
ensembles, closed-form single-qubit benchmarks and a Lindblad steering
baseline.  See the README for the experiment runner.
"""

__version__ = "0.1.0"

from .operators import (
    DEFAULT_POLICY,
    BadSubsystemSpecError,
    DensityMatrix,
    DimMismatchError,
    NotHermitianError,
    NumericPolicy,
    Operator,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    Spectrum,
    eig_hermitian,
    expect,
    expm_hermitian_prop,
    identity,
    kron,
    operator,
    partial_trace,
    pauli_axis,
)
from .models import (
    CouplingForm,
    CouplingSample,
    DegenerateSystemError,
    EigenOperatorSet,
    FormMismatchError,
    HeisenbergChain,
    MeterSpec,
    QubitSystem,
    SystemSpec,
    build_joint,
    build_system,
    eigenoperator_decomp,
    meter_state,
)
from .protocol import (
    AveragingScheme,
    AxisMode,
    EmptySchemeError,
    FixedAxis,
    FormCoupling,
    MonteCarloScheme,
    ProtocolConfig,
    QuadratureScheme,
    RandomHaarAxis,
    default_omega_window,
)
from .channels import (
    Channel,
    ChannelDiagnostics,
    apply_superop,
    average_channel,
    averaged_superops,
    channel_from_joint,
    dyson_bath_channel,
    dyson_channel,
    kraus_to_choi,
    kraus_to_superop,
    superop_to_choi,
    unvec,
    validate_channel,
    vec,
)
from .steady import (
    GroundInvarianceReport,
    NoConvergenceError,
    SteadyStateResult,
    fidelity_ground,
    fixed_point,
    ground_invariance_check,
    ground_projector,
    trace_norm,
)
from .trajectories import EnsembleResult, TrajectoryRecord, run_ensemble, run_trajectory
from .qubit_theory import (
    QubitParams,
    SteadyEnergyUndefinedError,
    closed_form_energy,
    co_counter_ratio,
    effective_beta,
    energy_estimate,
    recursion_step,
    rwa_amplitude_ratio,
    steady_energy,
)
from .lindblad import LindbladSpec, StepTooLargeError, lindblad_evolve, sigma_minus_jumps
