"""Command-line front end: solve, heuristic, sweep, and simulate.

Everything the commands emit is machine-readable (JSON or CSV) with fixed,
documented schemas; plotting is left to external tooling.  Exit codes:
0 success, 1 numerical non-convergence, 2 invalid input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .admm import AdmmConfig, solve
from .baselines import BaselineConfig, projected_gradient_solve
from .errors import NumericalError
from .heuristic import echr_csl, heuristic_solve
from .model import Placement, Scenario
from .objective import echr, overall_adt
from .queuesim import SimConfig, simulate_cluster

__all__ = [
    "SweepSpec",
    "cmd_solve",
    "cmd_heuristic",
    "cmd_sweep",
    "cmd_simulate",
    "main",
]

TRACE_HEADER = ("k", "objective", "primal_residual", "dual_residual")
SWEEP_HEADER = ("value", "solver", "echr", "adt", "iterations", "wall_time", "status")
SIMULATE_HEADER = (
    "station",
    "echr",
    "mean_sojourn_e",
    "mean_sojourn_b",
    "mean_adt",
    "ci_halfwidth",
    "analytic_adt",
    "relative_error",
)

SWEEP_PARAMETERS = ("lambda", "mu_b", "mu_e", "F")
SWEEP_SOLVERS = ("admm", "pgd", "heuristic", "csl-only")


def _fmt(value):
    """Fixed numeric formatting so identical runs give identical bytes."""
    if value is None:
        return ""
    return format(float(value), ".12g")


@dataclass(frozen=True)
class SweepSpec:
    """One experiment axis: vary ``parameter`` over ``values`` on top of the
    base scenario file.

    ``lambda``/``mu_b``/``mu_e`` replace the corresponding traffic rate at
    every base station; ``F`` regenerates a Zipf library of that many
    contents (the base library must carry an exponent and uniform sizes).
    """

    parameter: str
    values: tuple
    base: str

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(
                f"unknown sweep parameter {self.parameter!r}; expected one of {SWEEP_PARAMETERS}"
            )
        if len(self.values) == 0:
            raise ValueError("sweep values must be nonempty")
        if self.parameter == "F" and any(v != int(v) for v in self.values):
            raise ValueError("an F sweep takes integer values")

    @classmethod
    def load(cls, path):
        """Read a sweep file; ``base`` is resolved relative to it."""
        path = Path(path)
        with open(path) as handle:
            data = json.load(handle)
        if not isinstance(data, dict):
            raise ValueError(f"{path}: expected a JSON object")
        try:
            parameter = data["parameter"]
            values = tuple(float(v) for v in data["values"])
            base = data["base"]
        except KeyError as exc:
            raise ValueError(f"{path}: missing sweep key {exc}") from None
        base_path = Path(base)
        if not base_path.is_absolute():
            base_path = path.parent / base_path
        return cls(parameter=parameter, values=values, base=str(base_path))


def _scenario_at(spec, base_data, value):
    """Build the scenario for one sweep point from the base file's dict."""
    data = json.loads(json.dumps(base_data))
    if spec.parameter == "F":
        library = data.get("library")
        if not isinstance(library, dict) or "alpha" not in library:
            raise ValueError(
                "an F sweep needs a base library specified by 'alpha' so the "
                "popularity profile can be regenerated per point"
            )
        sizes = library.get("sizes")
        if sizes is not None and len(set(sizes)) > 1:
            raise ValueError("an F sweep needs uniform content sizes in the base library")
        library["F"] = int(value)
        if sizes is not None:
            library["sizes"] = [float(sizes[0])] * int(value)
    else:
        data.setdefault("traffic", {})[spec.parameter] = value
    return Scenario.from_dict(data)


def _load_placement(path):
    with open(path) as handle:
        data = json.load(handle)
    if not isinstance(data, dict) or "matrix" not in data:
        raise ValueError(f"{path}: expected a JSON object with a 'matrix' key")
    return Placement(np.asarray(data["matrix"], dtype=float))


def _dump_placement(placement, path):
    with open(path, "w") as handle:
        json.dump({"matrix": placement.matrix.tolist()}, handle, indent=2)
        handle.write("\n")


def _dump_json(data, path):
    with open(path, "w") as handle:
        json.dump(data, handle, indent=2)
        handle.write("\n")


def _report_dict(placement, scenario):
    report = overall_adt(placement, scenario)
    return {
        "h_e": report.h_e,
        "h_b": report.h_b,
        "t_e": report.t_e.tolist(),
        "t_b": report.t_b.tolist(),
        "per_station": report.per_station.tolist(),
        "overall": report.overall,
    }


def _write_rows(rows, out_path):
    """Write CSV-style rows to a file or stdout, one comma-joined line each."""
    text = "".join(",".join(row) + "\n" for row in rows)
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as handle:
            handle.write(text)


def cmd_solve(
    scenario_file,
    solver="admm",
    rho=1.0,
    eps_abs=1e-6,
    eps_rel=1e-4,
    max_iter=1000,
    out_dir=".",
):
    """Solve one scenario; write placement.json, report.json, trace.csv."""
    if solver not in ("admm", "pgd"):
        raise ValueError(f"unknown solver {solver!r}; expected 'admm' or 'pgd'")
    scenario = Scenario.load(scenario_file)
    start = time.perf_counter()
    if solver == "admm":
        config = AdmmConfig(rho=rho, eps_abs=eps_abs, eps_rel=eps_rel, max_iter=max_iter)
        result = solve(scenario, config)
    else:
        config = BaselineConfig(tol=eps_abs, max_iter=max_iter)
        result = projected_gradient_solve(scenario, config)
    wall_time = time.perf_counter() - start

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _dump_placement(result.placement, out / "placement.json")
    _dump_json(
        {
            "solver": solver,
            "echr": result.echr,
            "adt": result.adt,
            "iterations": result.iterations,
            "converged": result.converged,
            "wall_time": wall_time,
            "adt_report": _report_dict(result.placement, scenario),
        },
        out / "report.json",
    )
    rows = [TRACE_HEADER]
    rows += [
        (str(record.k), _fmt(record.objective), _fmt(record.primal_residual), _fmt(record.dual_residual))
        for record in result.trace
    ]
    _write_rows(rows, out / "trace.csv")
    print(
        f"solver={solver} echr={result.echr:.6f} adt={result.adt:.6f} "
        f"iterations={result.iterations} converged={result.converged} out={out}"
    )
    return 0 if result.converged else 1


def cmd_heuristic(scenario_file, out_dir=None):
    """Run the two-regime heuristic; print its summary as JSON."""
    scenario = Scenario.load(scenario_file)
    result = heuristic_solve(scenario)
    adt = overall_adt(result.placement, scenario).overall
    summary = {
        "h_csl": result.h_csl,
        "h_cpl": result.h_cpl,
        "h_star": result.h_star,
        "lambda_star": result.lambda_star,
        "regime": result.regime,
        "echr": min(max(echr(result.placement, scenario.library), 0.0), 1.0),
        "adt": adt,
    }
    print(json.dumps(summary, indent=2))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _dump_placement(result.placement, out / "placement.json")
        _dump_json(
            dict(summary, adt_report=_report_dict(result.placement, scenario)),
            out / "report.json",
        )
    return 0


def _sweep_point(solver, scenario, admm_config, baseline_config):
    """Run one solver on one scenario: (echr, adt, iterations, status, wall)."""
    start = time.perf_counter()
    if solver == "admm":
        result = solve(scenario, admm_config)
        values = (result.echr, result.adt, result.iterations)
        status = "ok" if result.converged else "unconverged"
    elif solver == "pgd":
        result = projected_gradient_solve(scenario, baseline_config)
        values = (result.echr, result.adt, result.iterations)
        status = "ok" if result.converged else "unconverged"
    elif solver == "heuristic":
        result = heuristic_solve(scenario)
        adt = overall_adt(result.placement, scenario).overall
        realized = min(max(echr(result.placement, scenario.library), 0.0), 1.0)
        values = (realized, adt, 0)
        status = "ok"
    else:  # csl-only
        h_csl, placement = echr_csl(scenario.library, scenario.cluster)
        adt = overall_adt(placement, scenario).overall
        values = (h_csl, adt, 0)
        status = "ok"
    wall = time.perf_counter() - start
    return values, status, wall


def cmd_sweep(
    sweep_file,
    solvers=None,
    rho=1.0,
    eps_abs=1e-6,
    eps_rel=1e-4,
    max_iter=1000,
    out_path=None,
):
    """Run every (value, solver) pair of a sweep and emit one CSV row each.

    A point whose scenario fails validation produces rows with empty metric
    fields and status ``invalid``; the sweep continues.  A solver hitting its
    iteration cap is marked ``unconverged``, a numerical failure ``error``.
    """
    spec = SweepSpec.load(sweep_file)
    if solvers is None:
        solvers = ["admm", "heuristic", "csl-only"]
    for name in solvers:
        if name not in SWEEP_SOLVERS:
            raise ValueError(f"unknown solver {name!r}; expected a subset of {SWEEP_SOLVERS}")
    with open(spec.base) as handle:
        base_data = json.load(handle)
    if spec.parameter == "F":
        # An unusable base is a usage error for every point: fail upfront
        # rather than emitting a sheet of invalid rows.
        _scenario_at(spec, base_data, spec.values[0])
    admm_config = AdmmConfig(rho=rho, eps_abs=eps_abs, eps_rel=eps_rel, max_iter=max_iter)
    baseline_config = BaselineConfig(tol=eps_abs, max_iter=max_iter)

    rows = [SWEEP_HEADER]
    for value in spec.values:
        try:
            scenario = _scenario_at(spec, base_data, value)
        except ValueError:
            rows += [(_fmt(value), name, "", "", "", "", "invalid") for name in solvers]
            continue
        for name in solvers:
            try:
                (echr_value, adt, iterations), status, wall = _sweep_point(
                    name, scenario, admm_config, baseline_config
                )
            except NumericalError:
                rows.append((_fmt(value), name, "", "", "", "", "error"))
                continue
            rows.append(
                (
                    _fmt(value),
                    name,
                    _fmt(echr_value),
                    _fmt(adt),
                    str(iterations),
                    _fmt(wall),
                    status,
                )
            )
    _write_rows(rows, out_path)
    return 0


def cmd_simulate(scenario_file, placement_file, seed=0, n_arrivals=1_000_000, out_path=None):
    """Simulate every station under a placement; emit measured vs analytic CSV.

    Station numbering in the output is 1-based, matching the ``BS i`` naming
    used in validation messages.  With a fixed seed the CSV is bit-identical
    across runs.
    """
    scenario = Scenario.load(scenario_file)
    placement = _load_placement(placement_file)
    analytic = overall_adt(placement, scenario)
    config = SimConfig(seed=seed, n_arrivals=n_arrivals)
    results = simulate_cluster(placement, scenario, config)

    rows = [SIMULATE_HEADER]
    for station, sim in enumerate(results):
        reference = float(analytic.per_station[station])
        rows.append(
            (
                str(station + 1),
                _fmt(analytic.h_e),
                _fmt(sim.mean_sojourn_e),
                _fmt(sim.mean_sojourn_b),
                _fmt(sim.mean_adt),
                _fmt(sim.ci_halfwidth),
                _fmt(reference),
                _fmt(abs(sim.mean_adt - reference) / reference),
            )
        )
    _write_rows(rows, out_path)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fogcache",
        description="Download-time-optimal cache placement for fog clusters.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve_parser = commands.add_parser("solve", help="solve one scenario to a placement")
    solve_parser.add_argument("--scenario", required=True, help="scenario JSON file")
    solve_parser.add_argument("--solver", default="admm", choices=("admm", "pgd"))
    solve_parser.add_argument("--rho", type=float, default=1.0, help="consensus penalty")
    solve_parser.add_argument(
        "--eps-abs", type=float, default=1e-6, help="absolute tolerance (pgd: mapping tolerance)"
    )
    solve_parser.add_argument("--eps-rel", type=float, default=1e-4, help="relative tolerance")
    solve_parser.add_argument("--max-iter", type=int, default=1000)
    solve_parser.add_argument("--out", default=".", help="output directory")

    heuristic_parser = commands.add_parser("heuristic", help="run the two-regime heuristic")
    heuristic_parser.add_argument("--scenario", required=True, help="scenario JSON file")
    heuristic_parser.add_argument("--out", default=None, help="optional output directory")

    sweep_parser = commands.add_parser("sweep", help="run a parameter sweep to CSV")
    sweep_parser.add_argument("--scenario", required=True, help="sweep JSON file")
    sweep_parser.add_argument(
        "--solver",
        action="append",
        default=None,
        help="solver name (repeatable or comma-separated); default admm,heuristic,csl-only",
    )
    sweep_parser.add_argument("--rho", type=float, default=1.0)
    sweep_parser.add_argument("--eps-abs", type=float, default=1e-6)
    sweep_parser.add_argument("--eps-rel", type=float, default=1e-4)
    sweep_parser.add_argument("--max-iter", type=int, default=1000)
    sweep_parser.add_argument("--out", default=None, help="output CSV path (default stdout)")

    simulate_parser = commands.add_parser("simulate", help="validate a placement by simulation")
    simulate_parser.add_argument("--scenario", required=True, help="scenario JSON file")
    simulate_parser.add_argument("--placement", required=True, help="placement JSON file")
    simulate_parser.add_argument("--seed", type=int, default=0)
    simulate_parser.add_argument("--arrivals", type=int, default=1_000_000)
    simulate_parser.add_argument("--out", default=None, help="output CSV path (default stdout)")
    return parser


def _dispatch(args):
    if args.command == "solve":
        return cmd_solve(
            args.scenario,
            solver=args.solver,
            rho=args.rho,
            eps_abs=args.eps_abs,
            eps_rel=args.eps_rel,
            max_iter=args.max_iter,
            out_dir=args.out,
        )
    if args.command == "heuristic":
        return cmd_heuristic(args.scenario, out_dir=args.out)
    if args.command == "sweep":
        solvers = None
        if args.solver is not None:
            solvers = [name for chunk in args.solver for name in chunk.split(",") if name]
        return cmd_sweep(
            args.scenario,
            solvers=solvers,
            rho=args.rho,
            eps_abs=args.eps_abs,
            eps_rel=args.eps_rel,
            max_iter=args.max_iter,
            out_path=args.out,
        )
    return cmd_simulate(
        args.scenario,
        args.placement,
        seed=args.seed,
        n_arrivals=args.arrivals,
        out_path=args.out,
    )


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
