"""Quantitative checks of the integrators' structural claims.

Everything here measures a defect that theory says should be at (or near)
zero: the symplecticity of the one-step Jacobian, the time symmetry of the
map, the boundedness of the energy error, the order of convergence, and the
gap between the two integrator families on quadratic-kinetic systems.  All
measurements are plain numerics over steppers of signature
``(state, h) -> state``, so test doubles and baselines (explicit Euler) plug
in the same way as the real methods.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._solvers import SolverOptions
from .errors import ConfigurationError, VarintError
from .mechanics import MechanicalSystem, PhaseState
from .quadrature import QuadratureRule
from .steppers import make_stepper
from .trajectory import run_trajectory

FD_STEP_MIN = 1e-7
FD_STEP_MAX = 1e-4


def explicit_euler_step(system: MechanicalSystem, state: PhaseState, h: float) -> PhaseState:
    """Non-symplectic control method used to validate the defect measurements."""
    q, p = state
    return PhaseState(q + h * system.f(q, p), p + h * system.g(q, p))


def step_map_jacobian(stepper, state: PhaseState, h: float, fd_step: float = 1e-5,
                      scheme: str = "central") -> np.ndarray:
    """Finite-difference Jacobian of the one-step map at a phase point."""
    if not FD_STEP_MIN <= fd_step <= FD_STEP_MAX:
        raise ConfigurationError(
            f"fd_step must be within [{FD_STEP_MIN:g}, {FD_STEP_MAX:g}], got {fd_step:g}"
        )
    z0 = state.as_vector()
    n = z0.size
    jac = np.empty((n, n))
    for i in range(n):
        delta = np.zeros(n)
        delta[i] = fd_step
        try:
            plus = stepper(PhaseState.from_vector(z0 + delta), h).as_vector()
            if scheme == "central":
                minus = stepper(PhaseState.from_vector(z0 - delta), h).as_vector()
                jac[:, i] = (plus - minus) / (2.0 * fd_step)
            else:
                jac[:, i] = (plus - stepper(state, h).as_vector()) / fd_step
        except VarintError as exc:
            if hasattr(exc, "add_note"):
                exc.add_note(f"while differencing the step map along coordinate {i}")
            raise
    return jac


def canonical_symplectic_matrix(d: int) -> np.ndarray:
    eye = np.eye(d)
    zero = np.zeros((d, d))
    return np.block([[zero, eye], [-eye, zero]])


def symplecticity_defect(stepper, system: MechanicalSystem, state: PhaseState,
                         h: float, fd_step: float = 1e-5) -> float:
    """Inf-norm of J' Omega J - Omega for the finite-difference step Jacobian.

    Zero (up to differencing noise, about 1e-7 with the default fd_step and a
    tightly solved stepper) exactly when the one-step map is symplectic.
    """
    jac = step_map_jacobian(stepper, state, h, fd_step)
    omega = canonical_symplectic_matrix(system.d)
    return float(np.linalg.norm(jac.T @ omega @ jac - omega, np.inf))


def symmetry_defect(stepper, state: PhaseState, h: float) -> float:
    """Max-norm of stepping forward then backward minus the identity."""
    forward = stepper(state, h)
    back = stepper(forward, -h)
    return float(np.max(np.abs(back.as_vector() - state.as_vector())))


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """Terminal errors against a reference over a ladder of step sizes."""

    h_values: np.ndarray
    errors: np.ndarray
    slope: float
    target_order: Optional[int] = None
    monotone: bool = True

    def within(self, tol: float) -> bool:
        """Whether the fitted slope is within tol of the target order."""
        if self.target_order is None:
            raise ConfigurationError("report carries no target order")
        return abs(self.slope - self.target_order) <= tol


def convergence_order(stepper, system: MechanicalSystem, initial: PhaseState,
                      h_values, t_end: float, reference,
                      target_order: Optional[int] = None) -> ConvergenceReport:
    """Measure the observed order of a stepper on a fixed time window.

    ``reference`` is the exact state at t_end (or a callable t -> PhaseState
    to be evaluated there) and must be far more accurate than the finest
    measurement; t_end must be an integer multiple of every step size.  A
    non-monotone error ladder (solver/rounding noise floor reached) is
    flagged on the report rather than treated as fatal.
    """
    h_values = np.asarray(h_values, dtype=float)
    if h_values.size < 3:
        raise ConfigurationError("need at least 3 step sizes for a slope fit")
    if initial.d != system.d:
        raise ConfigurationError("initial state dimension does not match the system")
    exact = reference(t_end) if callable(reference) else reference
    z_exact = exact.as_vector()
    errors = np.empty_like(h_values)
    for idx, h in enumerate(h_values):
        n_steps = round(t_end / h)
        if abs(n_steps * h - t_end) > 1e-12 * max(1.0, abs(t_end)):
            raise ConfigurationError(
                f"t_end = {t_end:g} is not an integer multiple of h = {h:g}"
            )
        final = run_trajectory(stepper, initial, h, n_steps).final
        errors[idx] = np.max(np.abs(final.as_vector() - z_exact))
    if np.any(errors <= 0.0):
        raise ConfigurationError(
            "zero terminal error: the stepper is exact here, no order to fit"
        )
    order = np.argsort(h_values)
    monotone = bool(np.all(np.diff(errors[order]) > 0.0))
    slope = float(np.polyfit(np.log(h_values), np.log(errors), 1)[0])
    return ConvergenceReport(h_values, errors, slope, target_order, monotone)


def equivalence_defect(system: MechanicalSystem, initial: PhaseState, h: float,
                       n_steps: int, s: int, quad: QuadratureRule,
                       solver: SolverOptions = SolverOptions()) -> float:
    """Largest componentwise gap between the two families' trajectories.

    Both integrators run with identical stage degree, quadrature rule and
    solver settings.  For quadratic-kinetic systems the gap is solver noise;
    for anything else it is a genuine method difference.
    """
    lagrangian = make_stepper(system, "lagrangian", s, quad, solver)
    galerkin = make_stepper(system, "galerkin", s, quad, solver)
    traj_l = run_trajectory(lagrangian, initial, h, n_steps)
    traj_g = run_trajectory(galerkin, initial, h, n_steps)
    return float(
        max(np.max(np.abs(traj_l.q - traj_g.q)), np.max(np.abs(traj_l.p - traj_g.p)))
    )


def _energy_deviation_halves(stepper, system, initial, h, n_steps):
    if system.energy is None:
        raise ConfigurationError(f"system '{system.name}' provides no energy function")
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ConfigurationError("energy drift needs at least one step")
    e0 = system.energy(initial.q, initial.p)
    split = n_steps // 2
    first = 0.0
    second = 0.0
    state = initial
    for k in range(n_steps):
        state = stepper(state, h)
        dev = abs(system.energy(state.q, state.p) - e0)
        if k < split:
            first = max(first, dev)
        else:
            second = max(second, dev)
    return first, second


def energy_drift(stepper, system: MechanicalSystem, initial: PhaseState,
                 h: float, n_steps: int) -> float:
    """Max |H(z_k) - H(z_0)| along the run."""
    first, second = _energy_deviation_halves(stepper, system, initial, h, n_steps)
    return max(first, second)


def energy_drift_halves(stepper, system: MechanicalSystem, initial: PhaseState,
                        h: float, n_steps: int):
    """Max energy deviations over the first and second halves of the run.

    A ratio near one says the energy error oscillates without secular growth,
    which is the long-time signature expected of these methods; a fitted
    slope would be fooled by the oscillation.
    """
    return _energy_deviation_halves(stepper, system, initial, h, n_steps)


@dataclass(frozen=True, eq=False)
class StructureReport:
    """The four structural defects for one integrator configuration."""

    symplecticity_defect: float
    symmetry_defect: float
    energy_drift: float
    equivalence_defect: float

    def as_dict(self) -> dict:
        return {
            "symplecticity_defect": self.symplecticity_defect,
            "symmetry_defect": self.symmetry_defect,
            "energy_drift": self.energy_drift,
            "equivalence_defect": self.equivalence_defect,
        }


def structure_report(system: MechanicalSystem, initial: PhaseState, *, integrator: str,
                     s: int, quad: QuadratureRule, h: float, n_steps: int,
                     solver: SolverOptions = SolverOptions()) -> StructureReport:
    """Run all four structural measurements for one configuration.

    The symplecticity measurement re-solves the perturbed steps at a
    tolerance of at least 1e-13 regardless of the trajectory solver settings,
    since differencing amplifies solver error by 1/fd_step.
    """
    tight = SolverOptions(min(solver.tol, 1e-13), max(solver.max_iter, 200), solver.kind)
    stepper_tight = make_stepper(system, integrator, s, quad, tight)
    stepper = make_stepper(system, integrator, s, quad, solver)
    return StructureReport(
        symplecticity_defect=symplecticity_defect(stepper_tight, system, initial, h),
        symmetry_defect=symmetry_defect(stepper_tight, initial, h),
        energy_drift=energy_drift(stepper, system, initial, h, n_steps),
        equivalence_defect=equivalence_defect(system, initial, h, n_steps, s, quad, solver),
    )
