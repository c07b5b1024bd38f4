"""Command-line front end.

Subcommands: run, compare, converge, structure, tableau.  Flags override the
optional flat key = value config file pointed to by the VARINT_CONFIG
environment variable, which in turn overrides built-in defaults.  All numeric
output is written with 17 significant digits so files round-trip to the exact
in-memory doubles; identical configurations produce byte-identical output.

Exit codes: 0 success (including comparisons that report an expected FAIL),
1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from ._solvers import SolverOptions
from .analysis import convergence_order, structure_report
from .errors import VarintError
from .galerkin import build_csprk, discretize
from .mechanics import available_problems, get_problem
from .quadrature import gauss_legendre_rule
from .steppers import INTEGRATORS, make_stepper
from .trajectory import run_trajectory

USAGE_ERROR = 2
RUNTIME_ERROR = 1

#: Step-size ladders for the convergence study, chosen per stage degree so
#: every measured error sits well above the solver/rounding noise floor.
CONVERGENCE_LADDERS = {
    1: (0.2, 0.1, 0.05, 0.025),
    2: (0.2, 0.1, 0.05, 0.025),
    3: (0.5, 1.0 / 3.0, 0.25, 0.2),
}


def fmt(x: float) -> str:
    """17 significant digits: parses back to the identical double."""
    return format(float(x), ".17g")


def _read_config_file() -> dict:
    path = os.environ.get("VARINT_CONFIG")
    if not path:
        return {}
    config = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for line_no, raw in enumerate(handle, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"line {line_no}: expected 'key = value'")
                key, value = line.split("=", 1)
                config[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    return config


def _resolve(args, config, key, default, convert):
    """Flag > config file > built-in default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return convert(config[key])
    return default


def _add_common_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--problem", help="benchmark problem name")
    parser.add_argument("--integrator", help="|".join(INTEGRATORS))
    parser.add_argument("--s", type=int, help="stage polynomial degree")
    parser.add_argument("--quad-nodes", dest="quad_nodes", type=int,
                        help="quadrature node count (default: s)")
    parser.add_argument("--h", type=float, help="step size")
    parser.add_argument("--steps", type=int, help="number of steps")
    parser.add_argument("--tol", type=float, help="stage solver tolerance")
    parser.add_argument("--max-iter", dest="max_iter", type=int,
                        help="stage solver iteration budget")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format")
    parser.add_argument("--threshold", type=float, help="pass/fail threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varint",
        description="Variational integrators and their structure checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, description in (
        ("run", "integrate one problem and write the trajectory"),
        ("compare", "run both integrator families and report their gap"),
        ("converge", "measure the observed convergence order"),
        ("structure", "measure symplecticity/symmetry/energy/equivalence defects"),
        ("tableau", "print the discretized partitioned Runge-Kutta tableau"),
    ):
        _add_common_flags(sub.add_parser(name, help=description, description=description))
    return parser


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


class _Settings:
    """Resolved common settings for one invocation."""

    def __init__(self, args, config):
        self.problem_name = _resolve(args, config, "problem", "harmonic", str)
        self.integrator = _resolve(args, config, "integrator", "galerkin", str)
        self.s = _resolve(args, config, "s", 2, int)
        self.quad_nodes = _resolve(args, config, "quad_nodes", None, int)
        self.h = _resolve(args, config, "h", 0.1, float)
        self.steps = _resolve(args, config, "steps", 100, int)
        self.tol = _resolve(args, config, "tol", None, float)
        self.max_iter = _resolve(args, config, "max_iter", 100, int)
        self.out = _resolve(args, config, "out", None, str)
        self.format = _resolve(args, config, "format", "csv", str)
        self.threshold = _resolve(args, config, "threshold", None, float)

    def quad(self):
        return gauss_legendre_rule(self.quad_nodes if self.quad_nodes else self.s)

    def solver(self, default_tol=1e-12):
        tol = self.tol if self.tol is not None else default_tol
        return SolverOptions(tol, self.max_iter)


def _check_usage(settings, parser, need_integrator=True, need_problem=True):
    if need_problem and settings.problem_name not in available_problems():
        parser.exit(USAGE_ERROR,
                    f"error: unknown problem '{settings.problem_name}'; "
                    f"valid problems: {', '.join(available_problems())}\n")
    if need_integrator and settings.integrator not in INTEGRATORS:
        parser.exit(USAGE_ERROR,
                    f"error: unknown integrator '{settings.integrator}'; "
                    f"valid integrators: {', '.join(INTEGRATORS)}\n")
    if settings.format not in ("csv", "json"):
        parser.exit(USAGE_ERROR,
                    f"error: unknown format '{settings.format}'; valid formats: csv, json\n")


def _trajectory_text(problem, traj, fmt_kind):
    d = traj.d
    energies = None
    if problem.system.energy is not None:
        energies = [problem.system.energy(traj.q[k], traj.p[k]) for k in range(len(traj))]
    if fmt_kind == "json":
        rows = []
        for k in range(len(traj)):
            row = {
                "step": k,
                "t": traj.t[k],
                "q": list(traj.q[k]),
                "p": list(traj.p[k]),
            }
            if energies is not None:
                row["energy"] = energies[k]
            rows.append(row)
        return json.dumps({"problem": problem.name, "rows": rows}, indent=2) + "\n"
    header = ["step", "t"]
    header += [f"q{i}" for i in range(d)] + [f"p{i}" for i in range(d)]
    if energies is not None:
        header.append("energy")
    lines = [",".join(header)]
    for k in range(len(traj)):
        cells = [str(k), fmt(traj.t[k])]
        cells += [fmt(v) for v in traj.q[k]] + [fmt(v) for v in traj.p[k]]
        if energies is not None:
            cells.append(fmt(energies[k]))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_run(settings: _Settings) -> int:
    problem = get_problem(settings.problem_name)
    stepper = make_stepper(problem.system, settings.integrator, settings.s,
                           settings.quad(), settings.solver())
    traj = run_trajectory(stepper, problem.initial, settings.h, settings.steps)
    _emit(_trajectory_text(problem, traj, settings.format), settings.out)
    return 0


def cmd_compare(settings: _Settings) -> int:
    problem = get_problem(settings.problem_name)
    system = problem.system
    # default to one node more than the stage degree: with matched node
    # count the two discretized families coincide identically for any
    # regular Lagrangian, so the comparison would be vacuous
    nodes = settings.quad_nodes if settings.quad_nodes else settings.s + 1
    quad = gauss_legendre_rule(nodes)
    solver = settings.solver(default_tol=1e-13)
    threshold = settings.threshold if settings.threshold is not None else 1e-10
    steppers = {
        name: make_stepper(system, name, settings.s, quad, solver)
        for name in ("lagrangian", "galerkin")
    }
    trajs = {
        name: run_trajectory(stepper, problem.initial, settings.h, settings.steps)
        for name, stepper in steppers.items()
    }
    gaps = np.maximum(
        np.max(np.abs(trajs["lagrangian"].q - trajs["galerkin"].q), axis=1),
        np.max(np.abs(trajs["lagrangian"].p - trajs["galerkin"].p), axis=1),
    )
    defect = float(np.max(gaps))
    passed = defect < threshold
    note = ""
    if not passed and not system.quadratic_kinetic:
        note = "not equivalent (expected for non-quadratic kinetic energy)"
    if settings.format == "json":
        payload = {
            "problem": problem.name,
            "max_defect": defect,
            "threshold": threshold,
            "result": "PASS" if passed else "FAIL",
            "note": note,
            "rows": [
                {"step": k, "t": trajs["lagrangian"].t[k], "gap": float(gaps[k])}
                for k in range(gaps.size)
            ],
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = ["step,t,gap"]
        lines += [
            f"{k},{fmt(trajs['lagrangian'].t[k])},{fmt(gaps[k])}"
            for k in range(gaps.size)
        ]
        text = "\n".join(lines) + "\n"
    _emit(text, settings.out)
    verdict = "PASS" if passed else "FAIL"
    summary = f"max defect = {fmt(defect)} threshold = {fmt(threshold)} -> {verdict}"
    if note:
        summary += f" [{note}]"
    print(summary)
    return 0


def _reference_for(problem, finest_h, s, quad, solver):
    if problem.reference is not None:
        return problem.reference
    # no closed form: tiny-step high-degree run of the Galerkin family
    fine = make_stepper(problem.system, "galerkin", 3, gauss_legendre_rule(3), solver)

    def reference(t: float):
        h_fine = finest_h / 100.0
        n = round(t / h_fine)
        return run_trajectory(fine, problem.initial, t / n, n).final

    return reference


def cmd_converge(settings: _Settings) -> int:
    problem = get_problem(settings.problem_name)
    quad = settings.quad()
    solver = settings.solver(default_tol=1e-13)
    if getattr(settings, "_h_given", False):
        ladder = tuple(settings.h / 2.0**k for k in range(4))
    else:
        ladder = CONVERGENCE_LADDERS.get(settings.s)
        if ladder is None:
            raise VarintError(
                f"no default step ladder for s={settings.s}; pass --h explicitly"
            )
    t_end = max(1.0, ladder[0])
    # make t_end an exact integer multiple of the coarsest step
    t_end = round(t_end / ladder[0]) * ladder[0]
    stepper = make_stepper(problem.system, settings.integrator, settings.s, quad, solver)
    reference = _reference_for(problem, min(ladder), settings.s, quad, solver)
    report = convergence_order(stepper, problem.system, problem.initial, ladder,
                               t_end, reference, target_order=2 * settings.s)
    if settings.format == "json":
        payload = {
            "problem": problem.name,
            "integrator": settings.integrator,
            "s": settings.s,
            "target_order": report.target_order,
            "slope": report.slope,
            "monotone": report.monotone,
            "rows": [
                {"h": float(h), "error": float(e)}
                for h, e in zip(report.h_values, report.errors)
            ],
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = ["h,error"]
        lines += [f"{fmt(h)},{fmt(e)}" for h, e in zip(report.h_values, report.errors)]
        text = "\n".join(lines) + "\n"
    _emit(text, settings.out)
    flag = "" if report.monotone else " [non-monotone: noise floor reached]"
    print(f"slope = {fmt(report.slope)} target = {report.target_order}{flag}")
    return 0


def cmd_structure(settings: _Settings) -> int:
    problem = get_problem(settings.problem_name)
    report = structure_report(
        problem.system,
        problem.initial,
        integrator=settings.integrator,
        s=settings.s,
        quad=settings.quad(),
        h=settings.h,
        n_steps=settings.steps,
        solver=settings.solver(default_tol=1e-13),
    )
    data = report.as_dict()
    if settings.format == "json":
        text = json.dumps({"problem": problem.name, **data}, indent=2) + "\n"
    else:
        lines = ["metric,value"]
        lines += [f"{key},{fmt(value)}" for key, value in data.items()]
        text = "\n".join(lines) + "\n"
    _emit(text, settings.out)
    for key, value in data.items():
        print(f"{key} = {fmt(value)}")
    return 0


def cmd_tableau(settings: _Settings) -> int:
    quad = settings.quad()
    swapped = settings.integrator == "galerkin-swapped"
    tableau = discretize(build_csprk(settings.s, swapped), quad)
    lines = [f"s = {tableau.s}  nodes = {tableau.m}  swapped = {str(swapped).lower()}"]
    lines.append("c: " + " ".join(fmt(v) for v in tableau.c))
    lines.append("b: " + " ".join(fmt(v) for v in tableau.b))
    lines.append("b_hat: " + " ".join(fmt(v) for v in tableau.b_hat))
    lines.append("a:")
    lines += [" ".join(fmt(v) for v in row) for row in tableau.a]
    lines.append("a_hat:")
    lines += [" ".join(fmt(v) for v in row) for row in tableau.a_hat]
    _emit("\n".join(lines) + "\n", settings.out)
    return 0


_COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "converge": cmd_converge,
    "structure": cmd_structure,
    "tableau": cmd_tableau,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _read_config_file()
    except ValueError as exc:
        parser.exit(USAGE_ERROR, f"error: {exc}\n")
    settings = _Settings(args, config)
    settings._h_given = args.h is not None or "h" in config
    need_problem = args.command != "tableau"
    need_integrator = args.command != "compare"
    _check_usage(settings, parser, need_integrator=need_integrator, need_problem=need_problem)
    try:
        return _COMMANDS[args.command](settings)
    except VarintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


def entry():  # console-script shim
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
