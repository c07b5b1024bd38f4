"""Nonlinear solvers for the implicit stage equations.

Both integrator families reduce each step to a square nonlinear system
R(x) = 0 in the stage unknowns.  The default strategy is a (optionally
preconditioned) fixed-point sweep, which is cheap and contracts for the step
sizes the methods are meant for; when a sweep fails to cut the residual by at
least 10% the solver switches to a Newton iteration with a finite-difference
Jacobian and stays there.  Convergence always means: max-norm of the true
residual at or below the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ConvergenceError, DivergenceError

SOLVER_KINDS = ("fixed-point", "newton")

#: A fixed-point sweep must shrink the residual below this factor or the
#: solver falls back to Newton.
STALL_FACTOR = 0.9

_FD_REL_STEP = np.sqrt(np.finfo(float).eps)


@dataclass(frozen=True)
class SolverOptions:
    """Tolerance and iteration budget for a stage solve."""

    tol: float = 1e-12
    max_iter: int = 100
    kind: str = "fixed-point"

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ConfigurationError(f"solver tolerance must be positive, got {self.tol}")
        if int(self.max_iter) < 1:
            raise ConfigurationError(f"max_iter must be at least 1, got {self.max_iter}")
        object.__setattr__(self, "max_iter", int(self.max_iter))
        if self.kind not in SOLVER_KINDS:
            raise ConfigurationError(
                f"unknown solver kind '{self.kind}'; valid kinds: {', '.join(SOLVER_KINDS)}"
            )


def fd_jacobian(fun, x, f0, rel_step=_FD_REL_STEP):
    """Forward-difference Jacobian of fun at x, given f0 = fun(x)."""
    n = x.size
    jac = np.empty((f0.size, n))
    for j in range(n):
        dx = rel_step * max(1.0, abs(x[j]))
        xj = x.copy()
        xj[j] += dx
        jac[:, j] = (fun(xj) - f0) / dx
    return jac


def _residual_norm(r):
    """Max-norm; non-finite entries surface as a non-finite norm."""
    return float(np.abs(r).max())


def solve_stage_system(residual, x0, options: SolverOptions, precondition=None):
    """Drive residual(x) to zero starting from x0.

    Parameters
    ----------
    residual : callable
        Maps a flat ndarray to the flat residual; a root is a converged
        stage vector.
    x0 : ndarray
        Initial guess (flattened stage unknowns).
    options : SolverOptions
        Tolerance (max-norm of the residual), iteration budget, and whether
        to start with fixed-point sweeps or go straight to Newton.
    precondition : callable, optional
        Maps a residual to the fixed-point update increment (for example a
        mass-matrix solve).  Identity when omitted; ignored by Newton.

    Returns
    -------
    x, iterations, residual_norm

    Raises
    ------
    ConvergenceError
        If the budget is exhausted; carries the last residual norm.
    DivergenceError
        If iterates or residuals stop being finite.
    """
    x = np.asarray(x0, dtype=float).ravel().copy()
    newton = options.kind == "newton"
    r = residual(x)
    norm = _residual_norm(r)
    prev_norm = np.inf
    iterations = 0
    while True:
        if not math.isfinite(norm):
            raise DivergenceError("stage iteration produced non-finite values")
        if norm <= options.tol:
            return x, iterations, norm
        if iterations >= options.max_iter:
            raise ConvergenceError(
                f"stage solve stopped after {iterations} iterations with "
                f"residual {norm:.3e} (tol {options.tol:.3e})",
                residual_norm=norm,
                iterations=iterations,
            )
        if not newton and norm > STALL_FACTOR * prev_norm:
            newton = True
        if newton:
            jac = fd_jacobian(residual, x, r)
            try:
                delta = np.linalg.solve(jac, r)
            except np.linalg.LinAlgError as exc:
                raise ConvergenceError(
                    f"singular stage Jacobian at residual {norm:.3e}",
                    residual_norm=norm,
                    iterations=iterations,
                ) from exc
            x = x - delta
        else:
            x = x - (precondition(r) if precondition is not None else r)
        prev_norm = norm
        r = residual(x)
        norm = _residual_norm(r)
        iterations += 1


def newton_root(fun, x0, tol, max_iter=50):
    """Small dense Newton solve used for per-node momentum recovery.

    Returns None on failure (singular Jacobian, divergence, or exhausted
    budget); callers decide which error that maps to.
    """
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(max_iter):
        f = fun(x)
        norm = _residual_norm(f)
        if not math.isfinite(norm):
            return None
        if norm <= tol:
            return x
        jac = fd_jacobian(fun, x, f)
        try:
            x = x - np.linalg.solve(jac, f)
        except np.linalg.LinAlgError:
            return None
    f = fun(x)
    if _residual_norm(f) <= tol:
        return x
    return None
