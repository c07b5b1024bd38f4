"""Variational time integrators for mechanical systems.

Two families built on the same orthonormal shifted Legendre stage basis: a
variational integrator derived from a discrete extremality principle in
Lagrangian variables, and a Galerkin-in-time method implemented as a
continuous-stage partitioned Runge-Kutta scheme.  On systems with quadratic
kinetic energy and constant mass matrix the two coincide exactly at the
discrete level; the analysis tools quantify that, along with symplecticity,
time symmetry, convergence order 2s, and long-time energy behavior.
"""

from ._solvers import SolverOptions
from .analysis import (
    ConvergenceReport,
    StructureReport,
    convergence_order,
    energy_drift,
    energy_drift_halves,
    equivalence_defect,
    explicit_euler_step,
    structure_report,
    symmetry_defect,
    symplecticity_defect,
)
from .errors import (
    BasisIndexError,
    ConfigurationError,
    ConvergenceError,
    DimensionError,
    DivergenceError,
    InternalConsistencyError,
    SingularityError,
    TransformError,
    VarintError,
)
from .galerkin import (
    CSPRKCoefficients,
    GalerkinStages,
    PRKTableau,
    build_csprk,
    discretize,
    galerkin_step,
    weak_form_residual,
)
from .lagrangian import (
    LagrangianVIConfig,
    StageCoefficients,
    integrate,
    lagrangian_step,
    lagrangian_step_hamiltonian_form,
)
from .legendre import (
    LegendreBasis,
    shifted_legendre,
    shifted_legendre_antiderivative,
    shifted_legendre_derivative,
)
from .mechanics import (
    MechanicalSystem,
    PhaseState,
    Problem,
    available_problems,
    get_problem,
    make_free_particle,
    make_harmonic_oscillator,
    make_kepler,
    make_pendulum,
    make_position_dependent_mass,
    quadratic_kinetic_system,
)
from .quadrature import QuadratureRule, gauss_legendre_rule
from .steppers import INTEGRATORS, make_stepper
from .trajectory import Trajectory, run_trajectory

__version__ = "0.1.0"

__all__ = [
    "BasisIndexError",
    "CSPRKCoefficients",
    "ConfigurationError",
    "ConvergenceError",
    "ConvergenceReport",
    "DimensionError",
    "DivergenceError",
    "GalerkinStages",
    "INTEGRATORS",
    "InternalConsistencyError",
    "LagrangianVIConfig",
    "LegendreBasis",
    "MechanicalSystem",
    "PRKTableau",
    "PhaseState",
    "Problem",
    "QuadratureRule",
    "SingularityError",
    "SolverOptions",
    "StageCoefficients",
    "StructureReport",
    "Trajectory",
    "TransformError",
    "VarintError",
    "available_problems",
    "build_csprk",
    "convergence_order",
    "discretize",
    "energy_drift",
    "energy_drift_halves",
    "equivalence_defect",
    "explicit_euler_step",
    "galerkin_step",
    "gauss_legendre_rule",
    "get_problem",
    "integrate",
    "lagrangian_step",
    "lagrangian_step_hamiltonian_form",
    "make_free_particle",
    "make_harmonic_oscillator",
    "make_kepler",
    "make_pendulum",
    "make_position_dependent_mass",
    "make_stepper",
    "quadratic_kinetic_system",
    "run_trajectory",
    "shifted_legendre",
    "shifted_legendre_antiderivative",
    "shifted_legendre_derivative",
    "structure_report",
    "symmetry_defect",
    "symplecticity_defect",
    "weak_form_residual",
]
