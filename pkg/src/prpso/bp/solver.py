"""Branch and price over the set-partitioning route formulation.

Best-first search on a node heap.  Each node runs column generation to
convergence (restricted master, then per-class label pricing), fathoms on
bound or integrality, and otherwise branches on a fractional arc flow.
While a node is not yet converged, the classic column-generation dual
bound (master value plus fleet-size multiples of the most negative
reduced costs) keeps the node bound valid, so time-limited runs still
report a true optimality gap.
"""

import heapq
import math
import time

from prpso.bp import branching as br
from prpso.bp.master import Column, solve_rmp
from prpso.bp.pricing import PricingOptions, price
from prpso.speed_opt import Route, optimal_route_speed
from prpso.tabu import SearchParams, run_tabu

_FATHOM_TOL = 1e-6
_INT_TOL = 1e-6


class BpLimits:
    def __init__(self, time_limit=1800.0, max_nodes=1_000_000,
                 node_columns=40, use_bounds=True, debug=False,
                 ts_time=None, max_cg_rounds=400, max_wave_rows=250_000,
                 log=None):
        self.time_limit = time_limit
        self.max_nodes = max_nodes
        self.node_columns = node_columns
        self.use_bounds = use_bounds
        self.debug = debug
        self.ts_time = ts_time       # None: pick from instance size
        self.max_cg_rounds = max_cg_rounds
        self.max_wave_rows = max_wave_rows
        self.log = log               # callable(str) for node trace lines


class BpResult:
    __slots__ = ("status", "cost", "routes", "lower_bound", "gap", "nodes",
                 "columns", "wall_time", "trace", "stats")

    def __init__(self, status, cost, routes, lower_bound, gap, nodes,
                 columns, wall_time, trace, stats):
        self.status = status  # "optimal" | "feasible" | "infeasible" |
        #   "unknown" (limit hit before any incumbent or a proof)
        self.cost = cost
        self.routes = routes         # list of Route, or None
        self.lower_bound = lower_bound
        self.gap = gap               # percent, 0.0 when optimal
        self.nodes = nodes
        self.columns = columns
        self.wall_time = wall_time
        self.trace = trace
        self.stats = stats


class _Node:
    __slots__ = ("decisions", "bound", "depth")

    def __init__(self, decisions, bound, depth):
        self.decisions = decisions
        self.bound = bound
        self.depth = depth


def _single_column(inst, k, i):
    res = optimal_route_speed(Route(k, (0, i, 0)), inst)
    if not res.feasible or inst.demand[i] > inst.vehicles[k].vc.capacity:
        return None
    return Column(inst, k, (i,), res.route_cost)


def solve_bp(inst, limits=None, seed=0, warm_routes=None):
    limits = limits or BpLimits()
    t0 = time.perf_counter()
    deadline = t0 + limits.time_limit
    n = inst.n_customers
    n_k = len(inst.vehicles)
    trace = []
    stats = {"cg_rounds": 0, "labels": 0, "lp_solves": 0,
             "stalled_nodes": 0, "truncated_waves": 0}

    def emit(line):
        trace.append(line)
        if limits.log:
            limits.log(line)

    if n == 0:
        return BpResult("optimal", 0.0, [], 0.0, 0.0, 0, 0,
                        time.perf_counter() - t0, trace, stats)

    # seed pool: one column per servable (class, customer) pair; a customer
    # no class can serve alone can never be served at all, since dropping
    # other stops from a route never raises its minimum feasible speed
    pool = []
    key_index = {}

    def add_column(col):
        idx = key_index.get(col.key())
        if idx is not None:
            return idx, False
        idx = len(pool)
        pool.append(col)
        key_index[col.key()] = idx
        return idx, True

    for i in range(1, n + 1):
        served = False
        for k in range(n_k):
            col = _single_column(inst, k, i)
            if col is not None:
                add_column(col)
                served = True
        if not served:
            return BpResult("infeasible", math.inf, None, math.inf,
                            math.inf, 0, len(pool),
                            time.perf_counter() - t0, trace, stats)

    # warm start: tabu incumbent supplies the initial upper bound and a
    # set of high-quality columns that keep early duals sensible
    ub = math.inf
    best_routes = None
    ts_time = limits.ts_time
    if ts_time is None:
        ts_time = 0.0 if n <= 10 else min(20.0, limits.time_limit * 0.1)
    if ts_time > 0:
        ts = run_tabu(inst, SearchParams(
            i2=min(100000, 2000 * n), time_limit=ts_time, seed=seed))
        if ts.feasible:
            ub = ts.cost
            best_routes = ts.routes
            for r in ts.routes:
                add_column(Column(inst, r.k, r.customers(),
                                  optimal_route_speed(r, inst).route_cost))
    if warm_routes:
        total = 0.0
        cols = []
        for r in warm_routes:
            c = optimal_route_speed(r, inst).route_cost
            cols.append(Column(inst, r.k, r.customers(), c))
            total += c
        for col in cols:
            add_column(col)

    opts = PricingOptions(max_columns=limits.node_columns,
                          use_bounds=limits.use_bounds,
                          use_rcsp=limits.use_bounds,
                          use_knapsack=limits.use_bounds,
                          debug=limits.debug,
                          max_wave_rows=limits.max_wave_rows)

    heap = []
    seq = 0
    heapq.heappush(heap, (0.0, seq, _Node((), 0.0, 0)))
    node_id = 0
    processed = 0
    timed_out = False

    while heap:
        if processed >= limits.max_nodes:
            timed_out = True
            break
        bound0, _, node = heapq.heappop(heap)
        if bound0 >= ub - _FATHOM_TOL:
            continue  # fathomed by an incumbent found after it was pushed
        node_id += 1
        processed += 1

        graphs = [br.graph_for(inst, node.decisions, k) for k in range(n_k)]
        node_idx = [i for i, col in enumerate(pool)
                    if br.column_complies(col, node.decisions)]
        node_keys = {pool[i].key() for i in node_idx}

        node_lb = node.bound
        rmp = None
        converged = False
        aborted = False
        for _ in range(limits.max_cg_rounds):
            rmp = solve_rmp(inst, [pool[i] for i in node_idx])
            stats["lp_solves"] += 1
            if rmp.status != "optimal":
                break
            added = 0
            min_rc_sum = 0.0
            worst_rc = 0.0
            for k in range(n_k):
                pr = price(inst, k, rmp.pi, float(rmp.mu[k]), graphs[k],
                           opts)
                stats["cg_rounds"] += 1
                stats["labels"] += pr.stats["labels"]
                if pr.stats["truncated"]:
                    stats["truncated_waves"] += 1
                worst_rc = min(worst_rc, pr.min_rc)
                min_rc_sum += inst.vehicles[k].count * min(0.0, pr.min_rc)
                for route, cost, rc in pr.columns:
                    key = (k, route)
                    if key in node_keys:
                        continue
                    node_keys.add(key)
                    gi = key_index.get(key)
                    if gi is None:
                        gi, _new = add_column(Column(inst, k, route, cost))
                    node_idx.append(gi)
                    added += 1
            node_lb = max(node_lb, rmp.value + min_rc_sum)
            if worst_rc >= -1e-6:
                converged = True
                node_lb = max(node_lb, rmp.value)
                break
            if added == 0:
                stats["stalled_nodes"] += 1
                break
            if time.perf_counter() > deadline:
                aborted = True
                break

        if aborted or time.perf_counter() > deadline:
            heapq.heappush(heap, (node_lb, seq, node))
            seq += 1
            timed_out = True
            break

        emit("node %d depth %d bound %.6f incumbent %s columns %d"
             % (node_id, node.depth, node_lb,
                ("%.6f" % ub) if math.isfinite(ub) else "inf", len(pool)))
        stats.setdefault("node_log", []).append(
            (node_id, node.depth, node.bound, node_lb))

        if rmp is None or rmp.status != "optimal":
            continue
        if node_lb >= ub - _FATHOM_TOL:
            continue
        if converged and rmp.artificial > 1e-6:
            continue  # no feasible cover exists under these decisions

        lam = rmp.lam
        frac = [abs(v - round(v)) > _INT_TOL for v in lam]
        if not any(frac) and rmp.artificial <= 1e-6:
            chosen = [pool[gi] for j, gi in enumerate(node_idx)
                      if lam[j] > 0.5]
            cost = sum(col.cost for col in chosen)
            if cost < ub - 1e-9:
                ub = cost
                best_routes = [Route(col.k, (0,) + col.route + (0,))
                               for col in chosen]
            continue

        pick = br.choose_branch(inst, [pool[i] for i in node_idx], lam)
        if pick is None:
            stats["stalled_nodes"] += 1
            continue
        scope, arc = pick
        for side in (0, 1):
            child = _Node(node.decisions + ((scope, arc, side),),
                          node_lb, node.depth + 1)
            heapq.heappush(heap, (node_lb, seq, child))
            seq += 1

    wall = time.perf_counter() - t0
    if heap or timed_out:
        lb = min((e[0] for e in heap), default=ub)
        lb = min(lb, ub)
        # a truncated search that never found an incumbent proves nothing,
        # so it must not masquerade as an infeasibility certificate
        status = "feasible" if math.isfinite(ub) else "unknown"
    else:
        lb = ub
        status = "optimal" if math.isfinite(ub) else "infeasible"
    gap = 0.0
    if math.isfinite(ub) and ub > 0:
        gap = max(0.0, 100.0 * (ub - lb) / ub)
    elif not math.isfinite(ub):
        gap = math.inf
    return BpResult(status, ub, best_routes, lb, gap, processed, len(pool),
                    wall, trace, stats)
