"""Command-line harness around the solvers and instance tooling.

Exit codes: 0 success, 2 infeasible, 3 time limit hit with a gap left,
4 validation failure (including failed oracle cross-checks).

Wall-clock columns (AT) in report CSVs are measurements and vary between
reruns; everything else a command emits, solution files above all, is
deterministic given the same inputs and seed.
"""

import inspect
import math
import os
import sys
import time

import click

from prpso.bp.solver import BpLimits, solve_bp
from prpso.enumerate_oracle import enumerate_optimal
from prpso.instances.canonical import load_instance, save_instance
from prpso.instances.scaling import flatten_for_planning, scale_instance
from prpso.instances.solomon import adapt_solomon
from prpso.instances.synth import synth_hilly, synth_solomon_text
from prpso.solution_io import (CSV_HEADER, ResultRow, read_solution,
                               solution_from_routes, validate_solution,
                               write_result_rows, write_solution)
from prpso.speed_opt import evaluate_solution
from prpso.tabu import SearchParams, run_tabu

EXIT_INFEASIBLE = 2
EXIT_TIME_LIMIT = 3
EXIT_INVALID = 4


def _parse_params(text):
    out = {}
    for pair in (text or "").split(","):
        pair = pair.strip()
        if not pair:
            continue
        if "=" not in pair:
            raise click.BadParameter("expected k=v, got %r" % pair)
        key, val = pair.split("=", 1)
        try:
            out[key] = int(val)
        except ValueError:
            try:
                out[key] = float(val)
            except ValueError:
                out[key] = val
    return out


def _build(cls, kwargs):
    sig = inspect.signature(cls)
    unknown = sorted(k for k in kwargs if k not in sig.parameters)
    if unknown:
        raise click.BadParameter(
            "unknown parameter(s) for %s: %s"
            % (cls.__name__, ", ".join(unknown)))
    return cls(**kwargs)


def _parse_grid(text, flag):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter("bad %s value in %r" % (flag, text))
    if not values:
        raise click.BadParameter("%s is empty" % flag)
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise click.BadParameter("%s values must lie in [0, 1]" % flag)
    return values


def _emit(inst, routes, status, gap, wall, out_dir, stem=None):
    """Write solution file + one-row CSV, self-validate, print the row."""
    sol, report = solution_from_routes(inst, routes, status, gap)
    ok, violations, _ = validate_solution(sol, inst)
    if not ok:
        for v in violations:
            click.echo("self-check violation: " + v, err=True)
        sys.exit(EXIT_INVALID)
    os.makedirs(out_dir, exist_ok=True)
    stem = stem or inst.name
    sol_path = os.path.join(out_dir, stem + ".sol")
    write_solution(sol_path, sol)
    row = ResultRow.from_report(inst.name, report, wall, gap)
    write_result_rows(os.path.join(out_dir, stem + ".csv"), [row])
    click.echo(CSV_HEADER)
    click.echo(row.csv())
    click.echo("solution written to %s" % sol_path)
    return report


def _oracle_check(inst, cost, exact):
    """Cross-check a solver cost against exhaustive enumeration."""
    if inst.n_customers > 8:
        click.echo("oracle: skipped (instance too large to enumerate)")
        return
    ref = enumerate_optimal(inst)
    if not ref.feasible:
        click.echo("oracle: enumeration reports infeasible", err=True)
        sys.exit(EXIT_INVALID)
    rel = abs(cost - ref.cost) / max(1.0, abs(ref.cost))
    if exact and rel > 1e-6:
        click.echo("oracle: MISMATCH solver %.9f vs enumerate %.9f"
                   % (cost, ref.cost), err=True)
        sys.exit(EXIT_INVALID)
    if not exact and cost < ref.cost - 1e-6 * max(1.0, abs(ref.cost)):
        click.echo("oracle: heuristic cost %.9f below exact optimum %.9f"
                   % (cost, ref.cost), err=True)
        sys.exit(EXIT_INVALID)
    gap = 100.0 * (cost - ref.cost) / ref.cost if ref.cost else 0.0
    click.echo("oracle: enumerate optimum %.6f (gap %.4f%%)"
               % (ref.cost, gap))


@click.group()
def main():
    """Pollution-routing toolkit: exact and heuristic solvers over
    terrain-aware fuel costs, plus instance tooling and validation."""


@main.command("solve-bp")
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", default=0, show_default=True, type=int,
              help="Seed for the warm-start search.")
@click.option("--time-limit", default=1800.0, show_default=True, type=float)
@click.option("--params", default="", help="Solver limit overrides, k=v,...")
@click.option("--out", "out_dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--oracle", is_flag=True,
              help="Enable labeling self-checks and cross-check the result "
                   "against exhaustive enumeration on small instances.")
def solve_bp_cmd(instance_path, seed, time_limit, params, out_dir, oracle):
    """Solve an instance exactly by branch and price."""
    inst = load_instance(instance_path)
    kwargs = {"time_limit": time_limit, "debug": oracle}
    kwargs.update(_parse_params(params))
    limits = _build(BpLimits, kwargs)
    t0 = time.perf_counter()
    res = solve_bp(inst, limits, seed=seed)
    wall = time.perf_counter() - t0
    click.echo("status %s nodes %d columns %d bound %.6f"
               % (res.status, res.nodes, res.columns, res.lower_bound))
    if res.status == "infeasible":
        click.echo("no assignment serves every customer", err=True)
        sys.exit(EXIT_INFEASIBLE)
    if res.status == "unknown" or not res.routes:
        click.echo("time limit hit before any incumbent", err=True)
        sys.exit(EXIT_TIME_LIMIT)
    if oracle:
        _oracle_check(inst, res.cost, exact=(res.status == "optimal"))
    _emit(inst, res.routes, res.status, res.gap, wall, out_dir)
    if res.status != "optimal":
        sys.exit(EXIT_TIME_LIMIT)


@main.command("solve-ts")
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--time-limit", default=None, type=float,
              help="Search wall-clock budget in seconds "
                   "[default: the tuned preset].")
@click.option("--params", default="",
              help="Search parameter overrides, k=v,... (i1, i2, lam, h, "
                   "delta, restarts).")
@click.option("--out", "out_dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--oracle", is_flag=True,
              help="Cross-check against exhaustive enumeration on small "
                   "instances.")
def solve_ts_cmd(instance_path, seed, time_limit, params, out_dir, oracle):
    """Solve an instance heuristically by tabu search."""
    inst = load_instance(instance_path)
    kwargs = {"seed": seed}
    if time_limit is not None:
        kwargs["time_limit"] = time_limit
    kwargs.update(_parse_params(params))
    sp = _build(SearchParams, kwargs)
    t0 = time.perf_counter()
    res = run_tabu(inst, sp)
    wall = time.perf_counter() - t0
    click.echo("feasible %s iterations %d" % (res.feasible, res.iterations))
    if not res.feasible:
        click.echo("search found no feasible assignment", err=True)
        sys.exit(EXIT_INFEASIBLE)
    if oracle:
        _oracle_check(inst, res.cost, exact=False)
    _emit(inst, res.routes, "feasible", 0.0, wall, out_dir)


@main.command()
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Benchmark file in the classic plain-text layout.")
@click.option("--seed", required=True, type=int,
              help="Seed for the synthetic elevations.")
@click.option("--n", "n_customers", default=None, type=int,
              help="Keep only the first N customers.")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Output instance file [default: <stem>-s<seed>.prp].")
def adapt(instance_path, seed, n_customers, out_path):
    """Adapt a benchmark file to physical units with seeded elevations."""
    with open(instance_path) as fh:
        text = fh.read()
    inst = adapt_solomon(text, seed=seed, n_customers=n_customers)
    if out_path is None:
        stem = os.path.splitext(os.path.basename(instance_path))[0]
        out_path = "%s-s%d.prp" % (stem, seed)
    save_instance(inst, out_path)
    click.echo("wrote %s (%d customers, %d vehicle classes)"
               % (out_path, inst.n_customers, len(inst.vehicles)))


@main.command()
@click.option("--style", default="c1", show_default=True,
              type=click.Choice(["c1", "r1", "rc1", "hilly"]))
@click.option("--n", "n_customers", default=25, show_default=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--survey-noise", default=0.0, show_default=True, type=float,
              help="Hilly style only: per-arc residual (m) between the "
                   "digitized road profile and the endpoint elevations.")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Output instance file [default: <name>.prp].")
def synth(style, n_customers, seed, survey_noise, out_path):
    """Generate a synthetic instance (benchmark-like layouts or hilly
    terrain with surveyed-style segmented arcs)."""
    if style == "hilly":
        inst = synth_hilly(n_customers, seed, survey_noise=survey_noise)
    elif survey_noise:
        raise click.BadParameter("--survey-noise applies to --style hilly")
    else:
        raw = synth_solomon_text(style, n_customers, seed)
        inst = adapt_solomon(raw, seed=seed)
    if out_path is None:
        out_path = inst.name + ".prp"
    save_instance(inst, out_path)
    click.echo("wrote %s (%d customers)" % (out_path, inst.n_customers))


@main.command("enumerate")
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--max-customers", default=8, show_default=True, type=int)
@click.option("--out", "out_dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
def enumerate_cmd(instance_path, max_customers, out_dir):
    """Brute-force exact optimum for small instances (the test oracle)."""
    inst = load_instance(instance_path)
    if inst.n_customers > max_customers:
        raise click.ClickException(
            "instance has %d customers; enumeration is capped at %d"
            % (inst.n_customers, max_customers))
    t0 = time.perf_counter()
    res = enumerate_optimal(inst)
    wall = time.perf_counter() - t0
    if not res.feasible:
        click.echo("no feasible assignment exists", err=True)
        sys.exit(EXIT_INFEASIBLE)
    _emit(inst, res.routes, "optimal", 0.0, wall, out_dir,
          stem=inst.name + "-enum")


@main.command()
@click.argument("solution_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def validate(solution_file, instance_path):
    """Re-derive feasibility and cost of a solution file from scratch."""
    inst = load_instance(instance_path)
    try:
        sol = read_solution(solution_file)
    except ValueError as exc:
        click.echo("parse: %s" % exc, err=True)
        sys.exit(EXIT_INVALID)
    violations = []
    if sol.instance != inst.name:
        violations.append("instance: file is for %r but instance is %r"
                          % (sol.instance, inst.name))
    ok, more, total = validate_solution(sol, inst)
    violations.extend(more)
    for idx, (route, speed, cost) in enumerate(
            zip(sol.routes, sol.speeds, sol.route_costs)):
        click.echo("route %d: class %d, %d customers, %.2f km at "
                   "%.2f km/h, cost %.6f"
                   % (idx, route.k, len(route.customers()),
                      sum(inst.dist[a][b] for a, b in
                          zip(route.nodes, route.nodes[1:])) / 1000.0,
                      speed * 3.6, cost))
    if violations:
        for v in violations:
            click.echo("violation: " + v, err=True)
        sys.exit(EXIT_INVALID)
    click.echo("valid: %d routes, re-derived cost %.6f" % (len(sol.routes),
                                                           total))


@main.command("flat-compare")
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--time-limit", default=None, type=float)
@click.option("--params", default="")
@click.option("--out", "out_dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
def flat_compare(instance_path, seed, time_limit, params, out_dir):
    """Plan routes with elevations zeroed and with true terrain, then
    evaluate both plans on the true terrain and report the deltas."""
    inst = load_instance(instance_path)
    kwargs = {"seed": seed}
    if time_limit is not None:
        kwargs["time_limit"] = time_limit
    kwargs.update(_parse_params(params))
    sp = _build(SearchParams, kwargs)

    reports, walls = [], []
    for planning in (flatten_for_planning(inst), inst):
        t0 = time.perf_counter()
        res = run_tabu(planning, sp)
        walls.append(time.perf_counter() - t0)
        if not res.feasible:
            click.echo("search found no feasible assignment on %s"
                       % planning.name, err=True)
            sys.exit(EXIT_INFEASIBLE)
        reports.append(evaluate_solution(res.routes, inst))
    flat_rep, true_rep = reports

    os.makedirs(out_dir, exist_ok=True)
    rows = [
        ResultRow.from_report(inst.name + "-flat-planned", flat_rep,
                              walls[0], 0.0),
        ResultRow.from_report(inst.name + "-slope-aware", true_rep,
                              walls[1], 0.0),
    ]
    csv_path = os.path.join(out_dir, inst.name + "-flatcompare.csv")
    write_result_rows(csv_path, rows)
    for sol_stem, rep in (("-flat-planned", flat_rep),
                          ("-slope-aware", true_rep)):
        sol, _ = solution_from_routes(inst, list(rep.routes), "feasible", 0.0)
        write_solution(os.path.join(out_dir, inst.name + sol_stem + ".sol"),
                       sol)

    click.echo(CSV_HEADER)
    for row in rows:
        click.echo(row.csv())
    fuel_pct = (100.0 * (flat_rep.fuel_cost - true_rep.fuel_cost)
                / flat_rep.fuel_cost) if flat_rep.fuel_cost else 0.0
    dist_pct = (100.0 * (true_rep.total_distance - flat_rep.total_distance)
                / flat_rep.total_distance) if flat_rep.total_distance else 0.0
    click.echo("fuel cost saved by terrain-aware planning: %.2f%%"
               % fuel_pct)
    click.echo("distance change: %+.2f%%" % dist_pct)
    click.echo("mean speed change: %+.2f km/h"
               % ((true_rep.mean_speed - flat_rep.mean_speed) * 3.6))
    click.echo("elevation gain change: %+.1f m"
               % (true_rep.elevation_gain - flat_rep.elevation_gain))
    click.echo("report written to %s" % csv_path)


@main.command("scale-sweep")
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--time-limit", default=300.0, show_default=True, type=float)
@click.option("--params", default="")
@click.option("--r1-grid", default="0,0.5,1", show_default=True,
              help="Payload scale factors, comma-separated, within [0, 1].")
@click.option("--r2-grid", default="0,0.5,1", show_default=True,
              help="Road angle scale factors, comma-separated, within "
                   "[0, 1].")
@click.option("--out", "out_dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
def scale_sweep(instance_path, seed, time_limit, params, r1_grid, r2_grid,
                out_dir):
    """Tabu-solve every (payload, angle) scaling of an instance and emit
    the cost matrix with row and column averages."""
    inst = load_instance(instance_path)
    r1s = _parse_grid(r1_grid, "--r1-grid")
    r2s = _parse_grid(r2_grid, "--r2-grid")
    kwargs = {"seed": seed, "time_limit": time_limit}
    kwargs.update(_parse_params(params))
    sp = _build(SearchParams, kwargs)

    matrix = []
    for r1 in r1s:
        row = []
        for r2 in r2s:
            res = run_tabu(scale_instance(inst, r1, r2), sp)
            row.append(res.cost if res.feasible else math.nan)
        matrix.append(row)

    lines = ["r1/r2," + ",".join("%g" % v for v in r2s) + ",row_avg"]
    for r1, row in zip(r1s, matrix):
        avg = sum(row) / len(row)
        lines.append("%g," % r1 + ",".join("%.6f" % c for c in row)
                     + ",%.6f" % avg)
    col_avgs = [sum(col) / len(col) for col in zip(*matrix)]
    overall = sum(col_avgs) / len(col_avgs)
    lines.append("col_avg," + ",".join("%.6f" % c for c in col_avgs)
                 + ",%.6f" % overall)

    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, inst.name + "-sweep.csv")
    with open(csv_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    for ln in lines:
        click.echo(ln)
    click.echo("matrix written to %s" % csv_path)
    if all(math.isnan(c) for row in matrix for c in row):
        sys.exit(EXIT_INFEASIBLE)


if __name__ == "__main__":
    main()
