"""Mechanical systems in Lagrangian and Hamiltonian form.

A system is described by the gradients of its Lagrangian L(q, qdot) and,
when available, of its Hamiltonian H(q, p).  The quadratic-kinetic case
L = qdot' M qdot / 2 - U(q) (constant symmetric invertible mass matrix) gets
a dedicated constructor because both integrator families coincide exactly on
it; the position-dependent-mass benchmark exists precisely to leave that
regime.  All derivative callables map d-vectors to d-vectors; systems are
immutable and their evaluations pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DimensionError, SingularityError

MASS_SYMMETRY_TOL = 1e-14
MASS_INVERSE_TOL = 1e-10
KEPLER_GUARD_RADIUS = 1e-12


@dataclass(frozen=True, eq=False)
class PhaseState:
    """A point (q, p) in phase space.

    Also the role played by the per-step boundary values that the Galerkin
    integrator propagates; both families map PhaseState to PhaseState.
    """

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float)).copy()
        p = np.atleast_1d(np.asarray(self.p, dtype=float)).copy()
        if q.ndim != 1 or p.ndim != 1 or q.shape != p.shape:
            raise DimensionError("q and p must be 1-D arrays of the same length")
        if q.size < 1:
            raise DimensionError("phase space dimension must be at least 1")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("phase state entries must be finite")
        q.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def d(self) -> int:
        return self.q.size

    def as_vector(self) -> np.ndarray:
        """Flat vector (q, p), handy for Jacobian work."""
        return np.concatenate((self.q, self.p))

    @classmethod
    def from_vector(cls, z) -> "PhaseState":
        z = np.asarray(z, dtype=float)
        if z.ndim != 1 or z.size % 2 != 0:
            raise DimensionError("phase vector must be 1-D of even length")
        d = z.size // 2
        return cls(z[:d], z[d:])

    def __iter__(self):
        yield self.q
        yield self.p

    def __repr__(self):
        return f"PhaseState(q={self.q!r}, p={self.p!r})"


@dataclass(frozen=True, eq=False)
class MechanicalSystem:
    """Derivative bundle for a d-dimensional mechanical system.

    Lagrangian gradients are mandatory; Hamiltonian gradients and the energy
    are optional (present for every built-in benchmark).  ``mass_matrix`` and
    ``mass_inverse`` are set only when ``quadratic_kinetic`` is true.
    """

    name: str
    d: int
    lagrangian_grad_q: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lagrangian_grad_qdot: Callable[[np.ndarray, np.ndarray], np.ndarray]
    quadratic_kinetic: bool = False
    mass_matrix: Optional[np.ndarray] = None
    mass_inverse: Optional[np.ndarray] = None
    hamiltonian_grad_q: Optional[Callable] = None
    hamiltonian_grad_p: Optional[Callable] = None
    energy: Optional[Callable[[np.ndarray, np.ndarray], float]] = None

    def __post_init__(self):
        if self.d < 1:
            raise ConfigurationError("system dimension must be at least 1")
        if self.quadratic_kinetic and (self.mass_matrix is None or self.mass_inverse is None):
            raise ConfigurationError(
                "quadratic-kinetic systems must carry mass_matrix and mass_inverse"
            )

    @property
    def has_hamiltonian(self) -> bool:
        return self.hamiltonian_grad_q is not None and self.hamiltonian_grad_p is not None

    def require_hamiltonian(self):
        if not self.has_hamiltonian:
            raise ConfigurationError(
                f"system '{self.name}' does not provide Hamiltonian derivatives"
            )

    def f(self, q, p) -> np.ndarray:
        """Velocity field dH/dp."""
        self.require_hamiltonian()
        return np.asarray(self.hamiltonian_grad_p(q, p), dtype=float)

    def g(self, q, p) -> np.ndarray:
        """Force field -dH/dq."""
        self.require_hamiltonian()
        return -np.asarray(self.hamiltonian_grad_q(q, p), dtype=float)

    def __repr__(self):
        return f"MechanicalSystem(name={self.name!r}, d={self.d})"


def quadratic_kinetic_system(
    mass_matrix,
    potential: Callable[[np.ndarray], float],
    potential_grad: Callable[[np.ndarray], np.ndarray],
    name: str = "quadratic-kinetic",
) -> MechanicalSystem:
    """Build the system with L = qdot' M qdot / 2 - U(q).

    The mass matrix must be symmetric to 1e-14 and invertible (checked by
    solving against the identity).  Hamiltonian derivatives and the energy
    H = p' M^-1 p / 2 + U(q) are wired automatically, so the Legendre
    duality between the two forms holds by construction.
    """
    M = np.atleast_2d(np.asarray(mass_matrix, dtype=float)).copy()
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ConfigurationError("mass matrix must be square")
    d = M.shape[0]
    if np.max(np.abs(M - M.T)) > MASS_SYMMETRY_TOL:
        raise ConfigurationError("mass matrix must be symmetric")
    try:
        M_inv = np.linalg.solve(M, np.eye(d))
    except np.linalg.LinAlgError as exc:
        raise ConfigurationError("mass matrix is singular") from exc
    if np.max(np.abs(M @ M_inv - np.eye(d))) > MASS_INVERSE_TOL:
        raise ConfigurationError("mass matrix is numerically singular")
    M.flags.writeable = False
    M_inv.flags.writeable = False

    def grad_q(q, qdot):
        return -np.asarray(potential_grad(q), dtype=float)

    def grad_qdot(q, qdot):
        return M @ np.asarray(qdot, dtype=float)

    def ham_grad_q(q, p):
        return np.asarray(potential_grad(q), dtype=float)

    def ham_grad_p(q, p):
        return M_inv @ np.asarray(p, dtype=float)

    def energy(q, p):
        p = np.asarray(p, dtype=float)
        return float(0.5 * p @ (M_inv @ p) + potential(q))

    return MechanicalSystem(
        name=name,
        d=d,
        lagrangian_grad_q=grad_q,
        lagrangian_grad_qdot=grad_qdot,
        quadratic_kinetic=True,
        mass_matrix=M,
        mass_inverse=M_inv,
        hamiltonian_grad_q=ham_grad_q,
        hamiltonian_grad_p=ham_grad_p,
        energy=energy,
    )


def make_harmonic_oscillator(omega: float = 1.0) -> MechanicalSystem:
    """Unit-mass oscillator with U(q) = omega^2 q^2 / 2."""
    omega = float(omega)
    if omega <= 0.0:
        raise ConfigurationError(f"omega must be positive, got {omega}")
    w2 = omega * omega
    return quadratic_kinetic_system(
        np.eye(1),
        potential=lambda q: float(0.5 * w2 * q[0] * q[0]),
        potential_grad=lambda q: w2 * np.asarray(q, dtype=float),
        name=f"harmonic(omega={omega:g})",
    )


def make_pendulum() -> MechanicalSystem:
    """Planar pendulum, U(q) = 1 - cos q."""
    return quadratic_kinetic_system(
        np.eye(1),
        potential=lambda q: float(1.0 - np.cos(q[0])),
        potential_grad=lambda q: np.sin(np.asarray(q, dtype=float)),
        name="pendulum",
    )


def make_kepler() -> MechanicalSystem:
    """Planar two-body problem, U(q) = -1/|q|, unit masses.

    Evaluation within 1e-12 of the origin raises SingularityError instead of
    returning non-finite values.
    """

    def _radius(q):
        q = np.asarray(q, dtype=float)
        r = float(np.linalg.norm(q))
        if r < KEPLER_GUARD_RADIUS:
            raise SingularityError("Kepler potential evaluated at |q| < 1e-12")
        return q, r

    def potential(q):
        _, r = _radius(q)
        return -1.0 / r

    def potential_grad(q):
        q, r = _radius(q)
        return q / r**3

    return quadratic_kinetic_system(
        np.eye(2), potential=potential, potential_grad=potential_grad, name="kepler"
    )


def make_free_particle(d: int = 1) -> MechanicalSystem:
    """Unit-mass free particle: U identically zero; both families are exact."""
    return quadratic_kinetic_system(
        np.eye(d),
        potential=lambda q: 0.0,
        potential_grad=lambda q: np.zeros_like(np.asarray(q, dtype=float)),
        name=f"free(d={d})",
    )


def make_position_dependent_mass(epsilon: float) -> MechanicalSystem:
    """One-dimensional system with L = (1 + eps sin q) qdot^2 / 2 - q^2 / 2.

    The kinetic energy is not quadratic with a constant mass, which is what
    separates the two integrator families.  |epsilon| < 1 keeps the mass
    factor positive everywhere.
    """
    eps = float(epsilon)
    if abs(eps) >= 1.0:
        raise ConfigurationError(f"|epsilon| must be below 1, got {eps}")

    def mass_factor(q):
        mu = 1.0 + eps * np.sin(q[0])
        if mu <= 0.0:
            raise ConfigurationError(f"mass factor {mu:g} not positive at q={q[0]:g}")
        return mu

    def grad_q(q, qdot):
        return np.array([0.5 * eps * np.cos(q[0]) * qdot[0] ** 2 - q[0]])

    def grad_qdot(q, qdot):
        return np.array([mass_factor(q) * qdot[0]])

    def ham_grad_q(q, p):
        mu = mass_factor(q)
        return np.array([-0.5 * eps * np.cos(q[0]) * p[0] ** 2 / mu**2 + q[0]])

    def ham_grad_p(q, p):
        return np.array([p[0] / mass_factor(q)])

    def energy(q, p):
        return float(0.5 * p[0] ** 2 / mass_factor(q) + 0.5 * q[0] ** 2)

    return MechanicalSystem(
        name=f"pdm(eps={eps:g})",
        d=1,
        lagrangian_grad_q=grad_q,
        lagrangian_grad_qdot=grad_qdot,
        quadratic_kinetic=False,
        hamiltonian_grad_q=ham_grad_q,
        hamiltonian_grad_p=ham_grad_p,
        energy=energy,
    )


@dataclass(frozen=True, eq=False)
class Problem:
    """A benchmark system with its canonical initial state.

    ``reference``, when present, is the exact flow started from ``initial``
    (a callable t -> PhaseState), used as the oracle in convergence studies.
    """

    name: str
    system: MechanicalSystem
    initial: PhaseState
    reference: Optional[Callable[[float], PhaseState]] = None


def _harmonic_problem() -> Problem:
    omega = 1.0
    system = make_harmonic_oscillator(omega)
    initial = PhaseState([1.0], [0.0])
    q0, p0 = initial.q[0], initial.p[0]

    def reference(t: float) -> PhaseState:
        c, s = np.cos(omega * t), np.sin(omega * t)
        return PhaseState([q0 * c + p0 / omega * s], [p0 * c - q0 * omega * s])

    return Problem("harmonic", system, initial, reference)


def _pendulum_problem() -> Problem:
    return Problem("pendulum", make_pendulum(), PhaseState([1.0], [0.5]))


def _kepler_problem() -> Problem:
    # unit circular orbit: the one Kepler configuration with a closed form
    initial = PhaseState([1.0, 0.0], [0.0, 1.0])

    def reference(t: float) -> PhaseState:
        c, s = np.cos(t), np.sin(t)
        return PhaseState([c, s], [-s, c])

    return Problem("kepler", make_kepler(), initial, reference)


def _pdm_problem() -> Problem:
    return Problem("pdm", make_position_dependent_mass(0.5), PhaseState([1.5], [0.5]))


_PROBLEM_BUILDERS = {
    "harmonic": _harmonic_problem,
    "pendulum": _pendulum_problem,
    "kepler": _kepler_problem,
    "pdm": _pdm_problem,
}


def available_problems() -> tuple:
    """Names accepted by get_problem, in stable order."""
    return tuple(sorted(_PROBLEM_BUILDERS))


def get_problem(name: str) -> Problem:
    """Look up a benchmark problem by name."""
    try:
        builder = _PROBLEM_BUILDERS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown problem '{name}'; valid problems: {', '.join(available_problems())}"
        ) from None
    return builder()
