"""Lagrangian-family stepper tests.

Oracles: the s=1/one-node configuration must reproduce the implicit midpoint
rule, whose closed form on the harmonic oscillator is the Cayley transform of
the rotation generator; the free particle is exact; everything else is
checked through structural identities (constraint consistency, symmetry,
symplecticity, order) rather than trusted numbers.
"""

import numpy as np
import pytest

from varint import (
    ConfigurationError,
    ConvergenceError,
    DivergenceError,
    LagrangianVIConfig,
    LegendreBasis,
    MechanicalSystem,
    PhaseState,
    TransformError,
    convergence_order,
    gauss_legendre_rule,
    get_problem,
    integrate,
    lagrangian_step,
    lagrangian_step_hamiltonian_form,
    make_free_particle,
    quadratic_kinetic_system,
    symmetry_defect,
    symplecticity_defect,
)

TOL = 1e-13


def config(s, m=None, tol=TOL, **kw):
    return LagrangianVIConfig(s, gauss_legendre_rule(m or s), solver_tol=tol, **kw)


def midpoint_oracle(state, h):
    """Cayley map (I - h/2 S)^-1 (I + h/2 S) for the unit harmonic oscillator."""
    generator = np.array([[0.0, 1.0], [-1.0, 0.0]])
    eye = np.eye(2)
    z = np.linalg.solve(eye - 0.5 * h * generator, (eye + 0.5 * h * generator) @ state)
    return z


def test_midpoint_reduction():
    problem = get_problem("harmonic")
    expected = midpoint_oracle(np.array([1.0, 0.0]), 0.1)
    state, _ = lagrangian_step(problem.system, problem.initial, 0.1, config(1))
    assert state.as_vector() == pytest.approx(expected, abs=1e-12)


def test_hamiltonian_form_matches_lagrangian_form():
    problem = get_problem("harmonic")
    cfg = config(1)
    a, _ = lagrangian_step(problem.system, problem.initial, 0.1, cfg)
    b, _ = lagrangian_step_hamiltonian_form(problem.system, problem.initial, 0.1, cfg)
    assert a.as_vector() == pytest.approx(b.as_vector(), abs=1e-13)


def test_free_particle_is_exact():
    free = make_free_particle(2)
    state = PhaseState([1.0, -2.0], [0.5, 0.25])
    for stepper in (lagrangian_step, lagrangian_step_hamiltonian_form):
        new, _ = stepper(free, state, 0.3, config(2))
        assert new.q == pytest.approx(state.q + 0.3 * state.p, abs=1e-15)
        assert new.p == pytest.approx(state.p, abs=1e-15)


def test_kepler_energy_after_one_tiny_step():
    problem = get_problem("kepler")
    state, _ = lagrangian_step_hamiltonian_form(
        problem.system, problem.initial, 0.01, config(3)
    )
    assert abs(problem.system.energy(state.q, state.p) - (-0.5)) < 1e-12


def test_constraint_consistency_and_stage_reconstruction():
    problem = get_problem("pendulum")
    cfg = config(2)
    h = 0.05
    state, stages = lagrangian_step(problem.system, problem.initial, h, cfg)
    basis = LegendreBasis(2)
    quad = cfg.quad
    node_velocity = basis.eval_all(quad.nodes).T @ stages.qdot
    gap = state.q - problem.initial.q - h * (quad.weights @ node_velocity)
    assert np.max(np.abs(gap)) < 1e-14
    # reconstructed stage position at tau = 0 is the left endpoint exactly
    assert np.all(basis.antiderivative_all(0.0) == 0.0)
    # quadratic kinetic energy: node momenta are mass times node velocities
    _, stages_h = lagrangian_step_hamiltonian_form(problem.system, problem.initial, h, cfg)
    node_pos = problem.initial.q + h * (
        basis.antiderivative_all(quad.nodes).T @ stages_h.qdot
    )
    node_vel = basis.eval_all(quad.nodes).T @ stages_h.qdot
    for k in range(quad.m):
        momentum = problem.system.lagrangian_grad_qdot(node_pos[k], node_vel[k])
        assert momentum == pytest.approx(
            problem.system.mass_matrix @ node_vel[k], abs=cfg.solver_tol
        )


def test_integrate_zero_steps_returns_initial():
    problem = get_problem("harmonic")
    traj = integrate(problem.system, problem.initial, 0.1, 0, config(1))
    assert len(traj) == 1
    assert traj.final.q == pytest.approx(problem.initial.q)


def test_forward_backward_reversibility():
    problem = get_problem("harmonic")
    cfg = config(2)
    forward = integrate(problem.system, problem.initial, 0.1, 10, cfg)
    back = integrate(problem.system, forward.final, -0.1, 10, cfg)
    assert back.final.as_vector() == pytest.approx(
        problem.initial.as_vector(), abs=1e-10
    )


def test_pendulum_energy_bounded_over_100_steps():
    problem = get_problem("pendulum")
    traj = integrate(problem.system, PhaseState([1.0], [0.5]), 0.1, 100, config(2))
    energies = [problem.system.energy(traj.q[k], traj.p[k]) for k in range(len(traj))]
    assert max(abs(e - energies[0]) for e in energies) < 1e-6


@pytest.mark.parametrize("name", ["harmonic", "pendulum", "kepler", "pdm"])
@pytest.mark.parametrize("s", [1, 2, 3])
def test_step_symmetry(name, s):
    problem = get_problem(name)
    cfg = config(s)
    stepper = lambda state, h: lagrangian_step(problem.system, state, h, cfg)[0]
    assert symmetry_defect(stepper, problem.initial, 0.1) < 10 * cfg.solver_tol


@pytest.mark.parametrize("name", ["harmonic", "pendulum", "kepler", "pdm"])
@pytest.mark.parametrize("s", [1, 2, 3])
def test_step_symplecticity(name, s):
    problem = get_problem(name)
    cfg = config(s)
    stepper = lambda state, h: lagrangian_step(problem.system, state, h, cfg)[0]
    defect = symplecticity_defect(stepper, problem.system, problem.initial, 0.1)
    assert defect < 1e-6


@pytest.mark.parametrize("s,h_values", [
    (1, (0.2, 0.1, 0.05, 0.025)),
    (2, (0.2, 0.1, 0.05, 0.025)),
    (3, (0.5, 1.0 / 3.0, 0.25, 0.2)),
])
def test_order_is_2s_on_harmonic(s, h_values):
    problem = get_problem("harmonic")
    cfg = config(s, tol=1e-14)
    stepper = lambda state, h: lagrangian_step(problem.system, state, h, cfg)[0]
    report = convergence_order(
        stepper, problem.system, problem.initial, h_values, 1.0,
        problem.reference, target_order=2 * s,
    )
    assert report.within(0.2), f"slope {report.slope} for s={s}"


def test_negative_step_size_works():
    problem = get_problem("pendulum")
    state, _ = lagrangian_step(problem.system, problem.initial, -0.1, config(2))
    assert np.all(np.isfinite(state.as_vector()))


def test_newton_solver_agrees_with_fixed_point():
    problem = get_problem("kepler")
    fp, _ = lagrangian_step(problem.system, problem.initial, 0.1, config(2))
    nw, _ = lagrangian_step(
        problem.system, problem.initial, 0.1, config(2, solver_kind="newton")
    )
    assert fp.as_vector() == pytest.approx(nw.as_vector(), abs=1e-12)


def test_convergence_error_carries_residual():
    problem = get_problem("pendulum")
    cfg = config(2, tol=1e-14, max_iter=2)
    with pytest.raises(ConvergenceError) as excinfo:
        lagrangian_step(problem.system, problem.initial, 0.1, cfg)
    assert excinfo.value.residual_norm is not None
    assert excinfo.value.residual_norm > 0


def test_integrate_annotates_step_index():
    problem = get_problem("pendulum")
    cfg = config(2, tol=1e-14, max_iter=2)
    with pytest.raises(ConvergenceError) as excinfo:
        integrate(problem.system, problem.initial, 0.1, 5, cfg)
    assert excinfo.value.step_index == 0


def _blowup_system():
    def potential(q):
        return 0.5 * q[0] ** 2 if abs(q[0]) <= 10.0 else float("nan")

    def potential_grad(q):
        return np.array([q[0] if abs(q[0]) <= 10.0 else float("nan")])

    return quadratic_kinetic_system(np.eye(1), potential, potential_grad, name="blowup")


def test_non_finite_stages_raise_divergence_error():
    system = _blowup_system()
    with pytest.raises(DivergenceError):
        lagrangian_step(system, PhaseState([1.0], [1.0]), 1e5, config(1))


def test_degenerate_lagrangian_raises_transform_error():
    system = MechanicalSystem(
        name="degenerate",
        d=1,
        lagrangian_grad_q=lambda q, v: np.zeros(1),
        lagrangian_grad_qdot=lambda q, v: np.zeros(1),
    )
    with pytest.raises(TransformError):
        lagrangian_step(system, PhaseState([1.0], [1.0]), 0.1, config(1))


def test_config_validation():
    with pytest.raises(ConfigurationError):
        # 1-node rule (exactness 1) cannot support s=2
        LagrangianVIConfig(2, gauss_legendre_rule(1))
    with pytest.raises(ConfigurationError):
        LagrangianVIConfig(1, gauss_legendre_rule(1), solver_tol=-1.0)
    with pytest.raises(ConfigurationError):
        LagrangianVIConfig(1, gauss_legendre_rule(1), solver_kind="bisection")
    with pytest.raises(ConfigurationError):
        lagrangian_step(
            get_problem("harmonic").system,
            PhaseState([1.0], [0.0]),
            0.0,
            config(1),
        )


def test_hamiltonian_form_requires_hamiltonian():
    system = MechanicalSystem(
        name="lagrangian-only",
        d=1,
        lagrangian_grad_q=lambda q, v: -q,
        lagrangian_grad_qdot=lambda q, v: v,
    )
    with pytest.raises(ConfigurationError):
        lagrangian_step_hamiltonian_form(system, PhaseState([1.0], [0.0]), 0.1, config(1))
