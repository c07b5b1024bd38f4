"""Galerkin time integrator in continuous-stage partitioned Runge-Kutta form.

The underlying weak form seeks a degree-s position trajectory and a degree
s-1 momentum trajectory on each step window, with the position continuous at
the window ends and the momentum free to jump; eliminating the test functions
against the shifted Legendre basis turns that problem into a partitioned
Runge-Kutta method whose stages are indexed by a continuous parameter, with
coefficient functions

    A(tau, sigma)     = sum_i a_{tau,i} l_i(sigma),
    A_hat(tau, sigma) = 1 - sum_i a_{sigma,i} l_i(tau),
    B(tau) = B_hat(tau) = 1,

where a_{tau,i} is the running integral of l_i.  These satisfy the pointwise
identity A_hat(tau, sigma) + A(sigma, tau) = 1, which is exactly the
symplecticity condition for this class of methods, and discretizing every
stage integral with one symmetric quadrature rule yields a plain symplectic
PRK tableau: a_kl = w_l A(c_k, c_l), a_hat_kl = w_l A_hat(c_k, c_l),
b = b_hat = w.  A swapped variant exchanges the roles of the two coefficient
pairs (equivalently, of position and momentum) and enjoys the same
properties.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._solvers import SolverOptions, solve_stage_system
from .errors import ConfigurationError, InternalConsistencyError
from .legendre import LegendreBasis
from .mechanics import MechanicalSystem, PhaseState
from .quadrature import QuadratureRule

TABLEAU_SYMPLECTICITY_TOL = 1e-12


class CSPRKCoefficients:
    """Continuous-stage coefficient functions on the unit square."""

    def __init__(self, s: int, swapped: bool = False):
        self._basis = LegendreBasis(s)
        self._swapped = bool(swapped)

    @property
    def s(self) -> int:
        return self._basis.s

    @property
    def swapped(self) -> bool:
        return self._swapped

    @property
    def basis(self) -> LegendreBasis:
        return self._basis

    def _a_base(self, tau, sigma) -> float:
        return float(
            self._basis.antiderivative_all(tau) @ self._basis.eval_all(sigma)
        )

    def _a_hat_base(self, tau, sigma) -> float:
        return 1.0 - self._a_base(sigma, tau)

    def A(self, tau, sigma) -> float:
        return self._a_hat_base(tau, sigma) if self._swapped else self._a_base(tau, sigma)

    def A_hat(self, tau, sigma) -> float:
        return self._a_base(tau, sigma) if self._swapped else self._a_hat_base(tau, sigma)

    def B(self, tau) -> float:
        return 1.0

    def B_hat(self, tau) -> float:
        return 1.0

    def symplecticity_defect(self, n_grid: int = 20) -> float:
        """Max of |B A_hat(tau,sigma) + B_hat A(sigma,tau) - B B_hat| on a grid."""
        grid = np.linspace(0.0, 1.0, n_grid)
        integrals = self._basis.antiderivative_all(grid)  # (s, n)
        values = self._basis.eval_all(grid)               # (s, n)
        a = integrals.T @ values          # a[i, j] = A_base(grid_i, grid_j)
        a_hat = 1.0 - values.T @ integrals
        if self._swapped:
            a, a_hat = a_hat, a
        return float(np.max(np.abs(a_hat + a.T - 1.0)))

    def __repr__(self):
        return f"CSPRKCoefficients(s={self.s}, swapped={self._swapped})"


def build_csprk(s: int, swapped: bool = False) -> CSPRKCoefficients:
    """Coefficient functions for stage degree s (optionally the swapped variant)."""
    return CSPRKCoefficients(s, swapped)


@dataclass(frozen=True, eq=False)
class PRKTableau:
    """Discretized partitioned Runge-Kutta tableau (c, a, a_hat, b, b_hat).

    Construction verifies the discrete symplecticity identity
    b_k a_hat_kl + b_hat_l a_lk = b_k b_hat_l; a defect above 1e-12 means the
    coefficients were assembled wrongly and raises rather than producing a
    silently non-symplectic method.
    """

    c: np.ndarray
    a: np.ndarray
    a_hat: np.ndarray
    b: np.ndarray
    b_hat: np.ndarray
    s: int = 0
    swapped: bool = False

    def __post_init__(self):
        for name in ("c", "a", "a_hat", "b", "b_hat"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        m = self.c.size
        if self.a.shape != (m, m) or self.a_hat.shape != (m, m):
            raise ConfigurationError("stage matrices must be m-by-m")
        if self.b.shape != (m,) or self.b_hat.shape != (m,):
            raise ConfigurationError("weight vectors must have length m")
        defect = self.symplecticity_defect()
        if defect > TABLEAU_SYMPLECTICITY_TOL:
            raise InternalConsistencyError(
                f"tableau violates discrete symplecticity (defect {defect:.3e})"
            )

    @property
    def m(self) -> int:
        return self.c.size

    def symplecticity_defect(self) -> float:
        """Max of |b_k a_hat_kl + b_hat_l a_lk - b_k b_hat_l| over all k, l."""
        combo = (
            self.b[:, None] * self.a_hat
            + (self.b_hat[:, None] * self.a).T
            - np.outer(self.b, self.b_hat)
        )
        return float(np.max(np.abs(combo)))


def discretize(coeffs: CSPRKCoefficients, quad: QuadratureRule) -> PRKTableau:
    """Turn the continuous-stage coefficients into a concrete PRK tableau."""
    basis = coeffs.basis
    c, w = quad.nodes, quad.weights
    integrals = basis.antiderivative_all(c)  # (s, m)
    values = basis.eval_all(c)               # (s, m)
    a_nodes = integrals.T @ values            # A_base(c_k, c_l)
    a_hat_nodes = 1.0 - values.T @ integrals  # A_hat_base(c_k, c_l)
    if coeffs.swapped:
        a_nodes, a_hat_nodes = a_hat_nodes, a_nodes
    return PRKTableau(
        c=c,
        a=a_nodes * w[None, :],
        a_hat=a_hat_nodes * w[None, :],
        b=w,
        b_hat=w,
        s=coeffs.s,
        swapped=coeffs.swapped,
    )


@dataclass(frozen=True, eq=False)
class GalerkinStages:
    """Converged stage values at the quadrature nodes, each of shape (m, d)."""

    q_nodes: np.ndarray
    p_nodes: np.ndarray


def galerkin_step(
    system: MechanicalSystem,
    state: PhaseState,
    h: float,
    tableau: PRKTableau,
    solver: SolverOptions = SolverOptions(),
):
    """One partitioned Runge-Kutta step with the given tableau.

    Solves the stage system Q_k = q_n + h sum_l a_kl f(Q_l, P_l),
    P_k = p_n + h sum_l a_hat_kl g(Q_l, P_l) with f = dH/dp, g = -dH/dq, then
    advances with the b / b_hat weights.  Returns the new state and the
    converged stage values.
    """
    if h == 0.0:
        raise ConfigurationError("step size must be nonzero")
    system.require_hamiltonian()
    qn, pn = state.q, state.p
    d = system.d
    m = tableau.m

    def node_fields(q_nodes, p_nodes):
        f_nodes = np.empty((m, d))
        g_nodes = np.empty((m, d))
        for k in range(m):
            f_nodes[k] = system.hamiltonian_grad_p(q_nodes[k], p_nodes[k])
            g_nodes[k] = system.hamiltonian_grad_q(q_nodes[k], p_nodes[k])
        return f_nodes, -g_nodes

    def split(y_flat):
        return y_flat[: m * d].reshape(m, d), y_flat[m * d :].reshape(m, d)

    def residual(y_flat):
        q_nodes, p_nodes = split(y_flat)
        f_nodes, g_nodes = node_fields(q_nodes, p_nodes)
        res_q = q_nodes - qn - h * (tableau.a @ f_nodes)
        res_p = p_nodes - pn - h * (tableau.a_hat @ g_nodes)
        return np.concatenate((res_q.ravel(), res_p.ravel()))

    y0 = np.concatenate((np.tile(qn, m), np.tile(pn, m)))
    y, _, _ = solve_stage_system(residual, y0, solver)
    q_nodes, p_nodes = split(y)
    f_nodes, g_nodes = node_fields(q_nodes, p_nodes)
    q_next = qn + h * (tableau.b @ f_nodes)
    p_next = pn + h * (tableau.b_hat @ g_nodes)
    return PhaseState(q_next, p_next), GalerkinStages(q_nodes.copy(), p_nodes.copy())


def weak_form_residual(
    system: MechanicalSystem,
    stages: GalerkinStages,
    state: PhaseState,
    h: float,
    basis: LegendreBasis,
    quad: QuadratureRule,
    swapped: bool = False,
) -> float:
    """Audit a converged step against the underlying weak formulation.

    Evaluates, with the same quadrature rule the step used, the residuals of
    the weak-form equations tested against l_0..l_{s-1} (position equation)
    and against 1, a_{tau,0}, ..., a_{tau,s-1} (momentum equation), endpoint
    terms taken from the boundary values (q_n, p_n) and the recomputed
    (q_{n+1}, p_{n+1}).  A converged step should push this to solver-tolerance
    level; it is a diagnostic that the tableau really solves the weak problem,
    not a second solver.  ``swapped`` audits the variant with the roles of
    position and momentum interchanged.
    """
    q_nodes, p_nodes = stages.q_nodes, stages.p_nodes
    qn, pn = state.q, state.p
    c, w = quad.nodes, quad.weights
    m = c.size
    f_nodes = np.empty_like(q_nodes)
    g_nodes = np.empty_like(p_nodes)
    for k in range(m):
        f_nodes[k] = system.f(q_nodes[k], p_nodes[k])
        g_nodes[k] = system.g(q_nodes[k], p_nodes[k])
    q_next = qn + h * (w @ f_nodes)
    p_next = pn + h * (w @ g_nodes)

    if swapped:
        q_nodes, p_nodes = p_nodes, q_nodes
        f_nodes, g_nodes = g_nodes, f_nodes
        qn, pn = pn, qn
        q_next, p_next = p_next, q_next

    values = basis.eval_all(c)          # (s, m)
    derivs = basis.derivative_all(c)    # (s, m)
    integrals = basis.antiderivative_all(c)  # (s, m)
    val_at_0 = basis.eval_all(0.0)
    val_at_1 = basis.eval_all(1.0)

    # position equation against l_i: the endpoint (flux) terms use that the
    # trial position is continuous at both window ends
    res_pos = (
        (derivs * w) @ q_nodes
        + h * (values * w) @ f_nodes
        - (np.outer(val_at_1, q_next) - np.outer(val_at_0, qn))
    )
    # momentum equation against the constant test function: a_{tau,i} at
    # tau = 1 collapses to delta_{i0}, at tau = 0 to zero
    res_mom_const = h * (w @ g_nodes) - (p_next - pn)
    res_mom = (values * w) @ p_nodes + h * (integrals * w) @ g_nodes
    res_mom[0] -= p_next

    return float(
        max(
            np.max(np.abs(res_pos)),
            np.max(np.abs(res_mom_const)),
            np.max(np.abs(res_mom)),
        )
    )
