"""Acceptance suite: the package's exit criteria, one test per criterion.

Each test prints a single PASS/FAIL line (visible with pytest -s) and then
asserts.  Tolerances are fixed here, not tuned at runtime; the long-time
energy criterion is the only slow one (about a minute).
"""

import numpy as np
import pytest

from varint import (
    LegendreBasis,
    SolverOptions,
    build_csprk,
    convergence_order,
    discretize,
    energy_drift_halves,
    equivalence_defect,
    explicit_euler_step,
    galerkin_step,
    gauss_legendre_rule,
    get_problem,
    make_stepper,
    symmetry_defect,
    symplecticity_defect,
    weak_form_residual,
)

SOLVER = SolverOptions(tol=1e-13, max_iter=300)
FAMILIES = ("lagrangian", "galerkin")

HARMONIC_LADDERS = {
    1: (0.2, 0.1, 0.05, 0.025),
    2: (0.2, 0.1, 0.05, 0.025),
    3: (0.5, 1.0 / 3.0, 0.25, 0.2),
}
KEPLER_LADDERS = {
    1: (0.2, 0.1, 0.05, 0.025),
    2: (0.2, 0.1, 0.05, 0.025),
    3: (0.5, 1.0 / 3.0, 0.25, 0.2),
}


def criterion(number, description, passed, detail=""):
    suffix = f"  [{detail}]" if detail else ""
    print(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {description}{suffix}")
    assert passed, f"criterion {number} failed: {description}{suffix}"


def test_criterion_01_basis_correctness():
    worst_gram = 0.0
    worst_integral = 0.0
    for s in range(1, 7):
        basis = LegendreBasis(s)
        worst_gram = max(worst_gram, basis.orthonormality_defect(gauss_legendre_rule(s)))
        full = basis.antiderivative_all(1.0)
        full[0] -= 1.0
        worst_integral = max(worst_integral, float(np.max(np.abs(full))))
    criterion(
        1, "basis orthonormality and unit-interval integrals",
        worst_gram < 1e-12 and worst_integral < 1e-14,
        f"gram defect {worst_gram:.2e}, integral defect {worst_integral:.2e}",
    )


def test_criterion_02_tableau_symplecticity():
    worst = 0.0
    for s in (1, 2, 3):
        for extra in (0, 1, 2):
            for swapped in (False, True):
                tableau = discretize(build_csprk(s, swapped), gauss_legendre_rule(s + extra))
                worst = max(worst, tableau.symplecticity_defect())
    criterion(2, "discrete tableau symplecticity identity", worst < 1e-14,
              f"worst defect {worst:.2e}")


def test_criterion_03_midpoint_reduction():
    problem = get_problem("harmonic")
    h = 0.1
    generator = np.array([[0.0, 1.0], [-1.0, 0.0]])
    eye = np.eye(2)
    oracle = np.linalg.solve(
        eye - 0.5 * h * generator, (eye + 0.5 * h * generator) @ np.array([1.0, 0.0])
    )
    worst = 0.0
    for family in FAMILIES:
        stepper = make_stepper(problem.system, family, 1, gauss_legendre_rule(1), SOLVER)
        state = stepper(problem.initial, h)
        worst = max(worst, float(np.max(np.abs(state.as_vector() - oracle))))
    criterion(3, "s=1, one-node reduction to the implicit midpoint rule",
              worst < 1e-12, f"worst gap {worst:.2e}")


def test_criterion_04_order_2s():
    results = []
    harmonic = get_problem("harmonic")
    for s in (1, 2, 3):
        quad = gauss_legendre_rule(s)
        for family in FAMILIES:
            stepper = make_stepper(harmonic.system, family, s, quad, SOLVER)
            report = convergence_order(
                stepper, harmonic.system, harmonic.initial, HARMONIC_LADDERS[s],
                1.0, harmonic.reference, 2 * s,
            )
            results.append(("harmonic", family, s, report.slope, 0.2))
    kepler = get_problem("kepler")
    # at m = s nodes the two families produce identical trajectories, so the
    # Kepler slopes are measured once, on the Galerkin form
    for s in (1, 2, 3):
        stepper = make_stepper(kepler.system, "galerkin", s, gauss_legendre_rule(s), SOLVER)
        report = convergence_order(
            stepper, kepler.system, kepler.initial, KEPLER_LADDERS[s],
            1.0, kepler.reference, 2 * s,
        )
        results.append(("kepler", "galerkin", s, report.slope, 0.3))
    bad = [r for r in results if abs(r[3] - 2 * r[2]) > r[4]]
    detail = "; ".join(f"{p}/{f} s={s}: {sl:.2f}" for p, f, s, sl, _ in results)
    criterion(4, "observed convergence order 2s", not bad, detail)


def test_criterion_05_numerical_symplecticity():
    worst = 0.0
    for name in ("harmonic", "pendulum", "kepler"):
        problem = get_problem(name)
        for s in (1, 2, 3):
            quad = gauss_legendre_rule(s)
            for family in FAMILIES:
                stepper = make_stepper(problem.system, family, s, quad, SOLVER)
                defect = symplecticity_defect(stepper, problem.system, problem.initial, 0.1)
                worst = max(worst, defect)
    harmonic = get_problem("harmonic")
    euler = lambda state, h: explicit_euler_step(harmonic.system, state, h)
    control = symplecticity_defect(euler, harmonic.system, harmonic.initial, 0.1)
    criterion(
        5, "one-step maps are numerically symplectic (explicit Euler control is not)",
        worst < 1e-6 and control > 1e-3,
        f"worst defect {worst:.2e}, control {control:.2e}",
    )


def test_criterion_06_symmetry():
    worst = 0.0
    for name in ("harmonic", "pendulum", "kepler", "pdm"):
        problem = get_problem(name)
        for s in (1, 2, 3):
            quad = gauss_legendre_rule(s)
            for family in FAMILIES:
                stepper = make_stepper(problem.system, family, s, quad, SOLVER)
                worst = max(worst, symmetry_defect(stepper, problem.initial, 0.1))
    criterion(6, "forward-backward symmetry of every one-step map",
              worst < 1e-11, f"worst defect {worst:.2e}")


def test_criterion_07_equivalence_on_quadratic_kinetic_systems():
    worst = 0.0
    for name in ("pendulum", "kepler"):
        problem = get_problem(name)
        for s in (1, 2, 3):
            defect = equivalence_defect(
                problem.system, problem.initial, 0.1, 100, s,
                gauss_legendre_rule(s), SOLVER,
            )
            worst = max(worst, defect)
    criterion(7, "the two families coincide on quadratic kinetic energy",
              worst < 1e-10, f"worst gap {worst:.2e}")


def test_criterion_08_non_equivalence_control():
    problem = get_problem("pdm")
    s = 2
    # one node beyond the stage degree: with matched node count the two
    # discretizations coincide identically, so the genuine method difference
    # only shows once the quadrature resolves the non-polynomial momentum
    quad = gauss_legendre_rule(s + 1)
    gap = equivalence_defect(problem.system, problem.initial, 0.1, 50, s, quad, SOLVER)
    structure_ok = True
    for family in FAMILIES:
        stepper = make_stepper(problem.system, family, s, quad, SOLVER)
        structure_ok &= symmetry_defect(stepper, problem.initial, 0.1) < 1e-11
        structure_ok &= (
            symplecticity_defect(stepper, problem.system, problem.initial, 0.1) < 1e-6
        )
    criterion(
        8, "families genuinely differ off the quadratic-kinetic regime",
        gap > 1e-6 and structure_ok,
        f"gap {gap:.2e}, per-family structure intact: {structure_ok}",
    )


@pytest.mark.slow
def test_criterion_09_long_time_energy():
    tight = SolverOptions(tol=2e-15, max_iter=400)
    pendulum = get_problem("pendulum")
    stepper = make_stepper(pendulum.system, "galerkin", 2, gauss_legendre_rule(2), tight)
    first, second = energy_drift_halves(
        stepper, pendulum.system, pendulum.initial, 0.1, 100_000
    )
    pendulum_ok = max(first, second) < 1e-5 and second <= 2.0 * first
    harmonic = get_problem("harmonic")
    midpoint = make_stepper(harmonic.system, "galerkin", 1, gauss_legendre_rule(1), tight)
    f2, s2 = energy_drift_halves(midpoint, harmonic.system, harmonic.initial, 0.1, 100_000)
    harmonic_drift = max(f2, s2)
    criterion(
        9, "bounded long-time energy error",
        pendulum_ok and harmonic_drift < 1e-12,
        f"pendulum halves ({first:.2e}, {second:.2e}), harmonic drift {harmonic_drift:.2e}",
    )


def test_criterion_10_weak_form_audit():
    worst = 0.0
    for name in ("harmonic", "pendulum", "kepler", "pdm"):
        problem = get_problem(name)
        for s in (1, 2, 3):
            quad = gauss_legendre_rule(s)
            tableau = discretize(build_csprk(s), quad)
            _, stages = galerkin_step(problem.system, problem.initial, 0.1, tableau, SOLVER)
            residual = weak_form_residual(
                problem.system, stages, problem.initial, 0.1, LegendreBasis(s), quad
            )
            worst = max(worst, residual)
    criterion(10, "converged steps satisfy the weak formulation",
              worst < 10 * SOLVER.tol, f"worst residual {worst:.2e}")
