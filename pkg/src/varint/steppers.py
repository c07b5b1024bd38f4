"""Uniform one-step-map construction for every integrator family.

A "stepper" everywhere in this package is a callable (state, h) -> state.
This module builds them from family names so that analysis code and the CLI
do not care which stage machinery sits underneath.
"""

from __future__ import annotations

from ._solvers import SolverOptions
from .errors import ConfigurationError
from .galerkin import build_csprk, discretize, galerkin_step
from .lagrangian import (
    LagrangianVIConfig,
    lagrangian_step,
    lagrangian_step_hamiltonian_form,
)
from .mechanics import MechanicalSystem
from .quadrature import QuadratureRule

INTEGRATORS = ("lagrangian", "galerkin", "galerkin-swapped")


def make_stepper(
    system: MechanicalSystem,
    integrator: str,
    s: int,
    quad: QuadratureRule,
    solver: SolverOptions = SolverOptions(),
    hamiltonian_form: bool = False,
):
    """Build a (state, h) -> state callable for the named integrator family.

    ``hamiltonian_form`` selects the Hamiltonian right-hand side of the
    Lagrangian family (ignored by the Galerkin families, which are always
    driven by dH/dp and dH/dq).
    """
    if integrator == "lagrangian":
        config = LagrangianVIConfig(s, quad, solver.tol, solver.max_iter, solver.kind)
        step_fn = lagrangian_step_hamiltonian_form if hamiltonian_form else lagrangian_step
        return lambda state, h: step_fn(system, state, h, config)[0]
    if integrator in ("galerkin", "galerkin-swapped"):
        tableau = discretize(build_csprk(s, swapped=integrator.endswith("swapped")), quad)
        return lambda state, h: galerkin_step(system, state, h, tableau, solver)[0]
    raise ConfigurationError(
        f"unknown integrator '{integrator}'; valid integrators: {', '.join(INTEGRATORS)}"
    )
