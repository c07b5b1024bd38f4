"""Variational integrator built on a per-step extremality principle.

Each step expands the stage velocity over the orthonormal shifted Legendre
basis, Qdot(tau) = sum_j Qdot_j l_j(tau), so the stage position is the exact
running integral Q(tau) = q_n + h sum_j a_{tau,j} Qdot_j with Q(0) = q_n built
in.  Extremizing the quadrature-discretized action over the coefficients
Qdot_j (the multiplier that enforces the endpoint constraint drops out as
p_{n+1}) leaves the square residual system solved here: for i = 0..s-1,

    sum_k w_k P(c_k) l_i(c_k)
        = p_n delta_{i0} + h sum_k w_k [delta_{i0} - a_{c_k,i}] Pdot(c_k),

with P = dL/dqdot and Pdot = dL/dq evaluated along the stage polynomial, and
the update q_{n+1} = q_n + h sum_k w_k Qdot(c_k),
p_{n+1} = p_n + h sum_k w_k Pdot(c_k).

An equivalent Hamiltonian-form right-hand side replaces dL/dq by -dH/dq with
the node momenta recovered from Qdot(c_k) = dH/dp(Q(c_k), P(c_k)); for
quadratic kinetic energy that recovery is just P = M Qdot, otherwise it is a
small per-node solve (the form exists mainly as a cross-check, it is not the
convenient one).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._solvers import SolverOptions, fd_jacobian, newton_root, solve_stage_system
from .errors import ConfigurationError, TransformError
from .legendre import LegendreBasis
from .mechanics import MechanicalSystem, PhaseState
from .quadrature import QuadratureRule
from .trajectory import Trajectory, run_trajectory


@dataclass(frozen=True)
class LagrangianVIConfig:
    """Step configuration: stage degree, quadrature rule, solver knobs.

    The stage position polynomial has degree s.  The quadrature rule must be
    exact at least through degree 2s-1 so that the basis Gram matrix it
    induces is the identity to machine precision.
    """

    s: int
    quad: QuadratureRule
    solver_tol: float = 1e-12
    max_iter: int = 100
    solver_kind: str = "fixed-point"

    def __post_init__(self):
        object.__setattr__(self, "s", int(self.s))
        # basis size range is validated by LegendreBasis
        LegendreBasis(self.s)
        if self.quad.exactness_degree < 2 * self.s - 1:
            raise ConfigurationError(
                f"quadrature exactness degree {self.quad.exactness_degree} is below "
                f"the required 2s-1 = {2 * self.s - 1}"
            )
        # validate solver fields eagerly
        self.solver_options()

    def solver_options(self) -> SolverOptions:
        return SolverOptions(self.solver_tol, self.max_iter, self.solver_kind)


@dataclass(frozen=True, eq=False)
class StageCoefficients:
    """Converged Legendre coefficients of the stage velocity, shape (s, d)."""

    qdot: np.ndarray

    @property
    def s(self) -> int:
        return self.qdot.shape[0]

    @property
    def d(self) -> int:
        return self.qdot.shape[1]


@dataclass(frozen=True, eq=False)
class _StageTables:
    """Per-(s, quad) node data shared by every step."""

    basis: LegendreBasis
    nodes: np.ndarray     # (m,)
    weights: np.ndarray   # (m,)
    values: np.ndarray    # (m, s): l_i(c_k)
    integrals: np.ndarray  # (m, s): a_{c_k, i}
    w_values: np.ndarray  # weights[:, None] * values
    w_updates: np.ndarray  # weights[:, None] * (delta_{i0} - integrals)


@lru_cache(maxsize=128)
def _stage_tables(s: int, quad: QuadratureRule) -> _StageTables:
    basis = LegendreBasis(s)
    values = basis.eval_all(quad.nodes).T.copy()
    integrals = basis.antiderivative_all(quad.nodes).T.copy()
    first_only = np.zeros_like(integrals)
    first_only[:, 0] = 1.0
    w = quad.weights
    return _StageTables(
        basis=basis,
        nodes=quad.nodes,
        weights=w,
        values=values,
        integrals=integrals,
        w_values=w[:, None] * values,
        w_updates=w[:, None] * (first_only - integrals),
    )


def _velocity_from_momentum(system: MechanicalSystem, q, p, tol=1e-12):
    """Invert dL/dqdot(q, .) = p, i.e. evaluate the velocity dH/dp(q, p)."""
    if system.quadratic_kinetic:
        return system.mass_inverse @ p
    if system.hamiltonian_grad_p is not None:
        return np.asarray(system.hamiltonian_grad_p(q, p), dtype=float)
    v = newton_root(
        lambda v: np.asarray(system.lagrangian_grad_qdot(q, v), dtype=float) - p,
        p,
        tol,
    )
    if v is None:
        raise TransformError("could not invert the velocity-momentum relation")
    return v


def _mass_inverse_at(system: MechanicalSystem, q, v):
    """Inverse of the (symmetrized) velocity Hessian of L, the sweep preconditioner."""
    if system.quadratic_kinetic:
        return system.mass_inverse
    grad = lambda vv: np.asarray(system.lagrangian_grad_qdot(q, vv), dtype=float)
    jac = fd_jacobian(grad, np.asarray(v, dtype=float), grad(v))
    jac = 0.5 * (jac + jac.T)
    try:
        return np.linalg.inv(jac)
    except np.linalg.LinAlgError as exc:
        raise TransformError("velocity Hessian of the Lagrangian is singular") from exc


def _initial_stages(system, qn, pn, s, d):
    x0 = np.zeros((s, d))
    x0[0] = _velocity_from_momentum(system, qn, pn)
    return x0


def lagrangian_step(
    system: MechanicalSystem,
    state: PhaseState,
    h: float,
    config: LagrangianVIConfig,
):
    """One step of the variational integrator in Lagrangian form.

    Returns the new PhaseState and the converged StageCoefficients.  Negative
    h is allowed (and exercised by the symmetry tests).
    """
    if h == 0.0:
        raise ConfigurationError("step size must be nonzero")
    tables = _stage_tables(config.s, config.quad)
    s, d = config.s, system.d
    qn, pn = state.q, state.p
    m = tables.nodes.size

    def node_data(x_flat):
        stages = x_flat.reshape(s, d)
        vel = tables.values @ stages                 # (m, d) Qdot at nodes
        pos = qn + h * (tables.integrals @ stages)   # (m, d) Q at nodes
        mom = np.empty((m, d))
        force = np.empty((m, d))
        for k in range(m):
            mom[k] = system.lagrangian_grad_qdot(pos[k], vel[k])
            force[k] = system.lagrangian_grad_q(pos[k], vel[k])
        return vel, pos, mom, force

    def residual(x_flat):
        _, _, mom, force = node_data(x_flat)
        res = tables.w_values.T @ mom - h * (tables.w_updates.T @ force)
        res[0] -= pn
        return res.ravel()

    x0 = _initial_stages(system, qn, pn, s, d)
    mass_inv = _mass_inverse_at(system, qn, x0[0])
    precondition = lambda r_flat: (r_flat.reshape(s, d) @ mass_inv).ravel()

    x, _, _ = solve_stage_system(residual, x0.ravel(), config.solver_options(), precondition)
    vel, _, _, force = node_data(x)
    q_next = qn + h * (tables.weights @ vel)
    p_next = pn + h * (tables.weights @ force)
    return PhaseState(q_next, p_next), StageCoefficients(x.reshape(s, d).copy())


def lagrangian_step_hamiltonian_form(
    system: MechanicalSystem,
    state: PhaseState,
    h: float,
    config: LagrangianVIConfig,
):
    """One step using the Hamiltonian right-hand side.

    Algebraically identical to :func:`lagrangian_step` whenever the velocity-
    momentum change of variables exists; node momenta are recovered from the
    stage velocities instead of being evaluated from dL/dqdot.
    """
    if h == 0.0:
        raise ConfigurationError("step size must be nonzero")
    system.require_hamiltonian()
    tables = _stage_tables(config.s, config.quad)
    s, d = config.s, system.d
    qn, pn = state.q, state.p
    m = tables.nodes.size
    quadratic = system.quadratic_kinetic
    recovery_tol = max(1e-15, 0.01 * config.solver_tol)
    mom_guess = np.tile(pn, (m, 1))  # warm start for the per-node recovery

    def recover_momentum(pos_k, vel_k, k):
        if quadratic:
            return system.mass_matrix @ vel_k
        mom_k = newton_root(
            lambda p: np.asarray(system.hamiltonian_grad_p(pos_k, p), dtype=float) - vel_k,
            mom_guess[k],
            recovery_tol,
        )
        if mom_k is None:
            raise TransformError(
                f"momentum recovery failed at node {k}: the velocity-momentum "
                "relation could not be inverted"
            )
        mom_guess[k] = mom_k
        return mom_k

    def node_data(x_flat):
        stages = x_flat.reshape(s, d)
        vel = tables.values @ stages
        pos = qn + h * (tables.integrals @ stages)
        mom = np.empty((m, d))
        ham_q = np.empty((m, d))
        for k in range(m):
            mom[k] = recover_momentum(pos[k], vel[k], k)
            ham_q[k] = system.hamiltonian_grad_q(pos[k], mom[k])
        return vel, pos, mom, ham_q

    def residual(x_flat):
        _, _, mom, ham_q = node_data(x_flat)
        res = tables.w_values.T @ mom + h * (tables.w_updates.T @ ham_q)
        res[0] -= pn
        return res.ravel()

    x0 = _initial_stages(system, qn, pn, s, d)
    mass_inv = _mass_inverse_at(system, qn, x0[0])
    precondition = lambda r_flat: (r_flat.reshape(s, d) @ mass_inv).ravel()

    x, _, _ = solve_stage_system(residual, x0.ravel(), config.solver_options(), precondition)
    vel, _, _, ham_q = node_data(x)
    q_next = qn + h * (tables.weights @ vel)
    p_next = pn - h * (tables.weights @ ham_q)
    return PhaseState(q_next, p_next), StageCoefficients(x.reshape(s, d).copy())


def integrate(
    system: MechanicalSystem,
    initial: PhaseState,
    h: float,
    n_steps: int,
    config: LagrangianVIConfig,
    stepper=lagrangian_step,
) -> Trajectory:
    """Step the chosen one-step map n_steps times from the initial state."""
    return run_trajectory(
        lambda state, hh: stepper(system, state, hh, config)[0], initial, h, n_steps
    )
