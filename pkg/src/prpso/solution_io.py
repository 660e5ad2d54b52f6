"""Solution files, result CSV rows, and from-scratch validation.

The solution format is line-oriented text with a versioned header, one
`route` line per vehicle (class, driving speed, cost, node sequence), and
explicit totals, so a solution is checkable without the solver that made
it.  validate_solution re-derives everything it asserts: the customer
partition, per-route capacity, time windows simulated at the declared
speed, and costs recomputed from the fuel model.  It is the referee for
every solver output, which is why it never calls into the solvers.
"""

import io
import math

from prpso.speed_opt import (Route, evaluate_solution, min_feasible_speed,
                             route_cost_at_speed, simulate_route)

HEADER = "PRPSO-SOLUTION v1"

CSV_HEADER = ("instance,NV,TD,AT,AG,distance_km,mean_speed_kmh,"
              "fixed_cost,fuel_cost,elevation_gain_m")


class Solution:
    """Routes plus declared per-route speeds/costs and declared totals."""

    __slots__ = ("instance", "status", "cost", "gap", "routes", "speeds",
                 "route_costs")

    def __init__(self, instance, status, cost, gap, routes, speeds,
                 route_costs):
        self.instance = instance
        self.status = status
        self.cost = cost
        self.gap = gap
        self.routes = routes          # list of Route
        self.speeds = speeds          # m/s, one per route
        self.route_costs = route_costs

    @classmethod
    def from_report(cls, instance_name, status, gap, report):
        return cls(instance_name, status, report.total_cost, gap,
                   list(report.routes),
                   [r.optimal_speed for r in report.results],
                   [r.route_cost for r in report.results])


def dumps_solution(sol):
    out = io.StringIO()
    out.write(HEADER + "\n")
    out.write("instance %s\n" % sol.instance)
    out.write("status %s\n" % sol.status)
    out.write("cost %.12g\n" % sol.cost)
    out.write("gap %.12g\n" % sol.gap)
    out.write("routes %d\n" % len(sol.routes))
    for route, speed, cost in zip(sol.routes, sol.speeds, sol.route_costs):
        out.write("route %d %.12g %.12g %s\n"
                  % (route.k, speed, cost,
                     " ".join(str(v) for v in route.nodes)))
    out.write("end\n")
    return out.getvalue()


def loads_solution(text):
    lines = [ln.rstrip("\n") for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != HEADER:
        raise ValueError("not a %s file" % HEADER)
    fields = {}
    routes, speeds, costs = [], [], []
    for ln in lines[1:]:
        if ln == "end":
            break
        key, rest = ln.split(" ", 1)
        if key == "route":
            parts = rest.split()
            k, speed, cost = int(parts[0]), float(parts[1]), float(parts[2])
            nodes = tuple(int(x) for x in parts[3:])
            routes.append(Route(k, nodes))
            speeds.append(speed)
            costs.append(cost)
        else:
            fields[key] = rest
    declared = int(fields.get("routes", len(routes)))
    if declared != len(routes):
        raise ValueError("file declares %d routes but carries %d"
                         % (declared, len(routes)))
    return Solution(fields.get("instance", "unnamed"),
                    fields.get("status", "unknown"),
                    float(fields.get("cost", "nan")),
                    float(fields.get("gap", "0")),
                    routes, speeds, costs)


def write_solution(path, sol):
    with open(path, "w") as fh:
        fh.write(dumps_solution(sol))


def read_solution(path):
    with open(path) as fh:
        return loads_solution(fh.read())


def validate_solution(sol, inst, tol=1e-6):
    """From-scratch verdict: (ok, violations, recomputed total cost)."""
    violations = []
    seen = {}
    for idx, route in enumerate(sol.routes):
        for c in route.customers():
            if c in seen:
                violations.append(
                    "partition: customer %d appears in routes %d and %d"
                    % (c, seen[c], idx))
            seen[c] = idx
            if c < 1 or c > inst.n_customers:
                violations.append("partition: unknown customer id %d" % c)
    for c in range(1, inst.n_customers + 1):
        if c not in seen:
            violations.append("partition: customer %d not served" % c)

    used = {}
    for route in sol.routes:
        used[route.k] = used.get(route.k, 0) + 1
    for k, cnt in used.items():
        if k < 0 or k >= len(inst.vehicles):
            violations.append("fleet: unknown vehicle class %d" % k)
        elif cnt > inst.vehicles[k].count:
            violations.append("fleet: %d routes of class %d but only %d "
                              "vehicles" % (cnt, k, inst.vehicles[k].count))

    total = 0.0
    for idx, (route, speed, cost) in enumerate(
            zip(sol.routes, sol.speeds, sol.route_costs)):
        if route.k < 0 or route.k >= len(inst.vehicles):
            continue
        vc = inst.vehicles[route.k].vc
        load = sum(inst.demand[c] for c in route.customers())
        if load > vc.capacity + 1e-9:
            violations.append("capacity: route %d carries %.3f kg over "
                              "%.3f kg" % (idx, load, vc.capacity))
        sigma = min_feasible_speed(route, inst)
        if speed > vc.speed_max + 1e-9 or speed < vc.speed_min - 1e-9:
            violations.append("speed: route %d speed %.3f outside [%g, %g]"
                              % (idx, speed, vc.speed_min, vc.speed_max))
        if not simulate_route(route, inst, speed):
            detail = (" (below minimum feasible %.6f m/s)" % sigma
                      if speed < sigma else "")
            violations.append("window: route %d misses a time window at "
                              "%.6f m/s%s" % (idx, speed, detail))
        true_cost = route_cost_at_speed(route, inst, speed)
        total += true_cost
        if abs(true_cost - cost) > tol * max(1.0, abs(true_cost)):
            violations.append("cost: route %d declares %.9g but re-derives "
                              "to %.9g" % (idx, cost, true_cost))
    if math.isfinite(sol.cost) and \
            abs(total - sol.cost) > tol * max(1.0, abs(total)):
        violations.append("cost: total declares %.9g but routes re-derive "
                          "to %.9g" % (sol.cost, total))
    return (not violations, violations, total)


class ResultRow:
    """One experiment-report line; the CSV schema mirrors the run tables."""

    __slots__ = ("instance", "nv", "td", "at", "ag", "distance_km",
                 "mean_speed_kmh", "fixed_cost", "fuel_cost",
                 "elevation_gain_m")

    def __init__(self, instance, nv, td, at, ag, distance_km,
                 mean_speed_kmh, fixed_cost, fuel_cost, elevation_gain_m):
        if ag < 0:
            raise ValueError("gap must be nonnegative")
        self.instance = instance
        self.nv = int(nv)
        self.td = td
        self.at = at
        self.ag = ag
        self.distance_km = distance_km
        self.mean_speed_kmh = mean_speed_kmh
        self.fixed_cost = fixed_cost
        self.fuel_cost = fuel_cost
        self.elevation_gain_m = elevation_gain_m

    @classmethod
    def from_report(cls, instance_name, report, wall_s, gap_pct):
        return cls(instance_name, len(report.routes), report.total_cost,
                   wall_s, gap_pct, report.total_distance / 1000.0,
                   report.mean_speed * 3.6, report.fixed_cost,
                   report.fuel_cost, report.elevation_gain)

    def csv(self):
        return ("%s,%d,%.6f,%.3f,%.4f,%.6f,%.6f,%.6f,%.6f,%.6f"
                % (self.instance, self.nv, self.td, self.at, self.ag,
                   self.distance_km, self.mean_speed_kmh, self.fixed_cost,
                   self.fuel_cost, self.elevation_gain_m))


def write_result_rows(path, rows):
    rows = sorted(rows, key=lambda r: r.instance)
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.csv() + "\n")


def solution_from_routes(inst, routes, status, gap):
    report = evaluate_solution(routes, inst)
    return Solution.from_report(inst.name, status, gap, report), report
