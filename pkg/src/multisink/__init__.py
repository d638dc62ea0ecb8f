"""Multi-sink homogeneous profiles of the planar ideal-flow equations:
local solutions of the profile ODE, glued 2*pi-periodic states, their
stagnation structure, and small-pressure asymptotics."""

from .errors import (
    DomainError,
    KnotSingularityError,
    NoRootError,
    NoSignChangeError,
    NonConvergenceError,
    StepTooLargeError,
)
from .numerics import (
    BracketedRootSpec,
    QuadratureSpec,
    find_root,
    integrate_singular,
    log_gamma,
)
from .local_solutions import (
    Branch,
    LocalSolution,
    Parameters,
    amplitude,
    evaluate_profile,
    first_integral_residual,
    period,
    period_plus_deficit,
    reconstruct,
)
from .gluing import (
    CriticalPressureResult,
    GluingOutcome,
    GluingSpec,
    PeriodicProfile,
    SolveStatus,
    assemble,
    enumerate_gluings,
    period_sum,
    solve_critical_pressure,
)
from .asymptotics import (
    ExpansionResult,
    Regime,
    a_of_P,
    b_of_P,
    beta_tangent_identity_check,
    mellin_F,
    pstar_approx,
    t_minus_expansion,
    t_plus_expansion,
    t_sum_expansion,
)
from .flowfield import (
    FieldGrid,
    StagnationKind,
    StagnationPoint,
    eigenvalues_2x2,
    jacobian_fd,
    pseudo_velocity,
    sample_grid,
    sink_radius,
    stagnation_points,
    velocity,
    vorticity_angular,
)

__version__ = "0.1.0"
