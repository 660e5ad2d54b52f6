"""Label-setting pricing: negative-reduced-cost route search per class.

Waves of labels (all paths of equal customer count) are closed, pruned,
and extended until no label survives.  Pruning uses the completion bounds
at an adaptive threshold: the base column-acceptance cutoff to begin with,
then the R-th best reduced cost found so far once R candidate columns
exist, since a label whose bound is worse can never place a column in the
returned top R.  Bounds are admissible, so the minimum reduced cost found
is identical with pruning on or off; tests hold this invariant.
"""

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from prpso.bp import labels as lb
from prpso.bp.bounds import CompletionBounds
from prpso.speed_opt import Route, min_feasible_speed, optimal_route_speed

RC_CUTOFF = -1e-6  # columns with reduced cost above this are discarded


class PricingGraph:
    """Arc availability plus the fastest legal return time to the depot."""

    def __init__(self, allowed, min_return):
        self.allowed = allowed
        self.min_return = min_return


def build_graph(inst, k, removed_arcs=()):
    n = inst.n_customers
    allowed = np.ones((n + 1, n + 1), dtype=bool)
    np.fill_diagonal(allowed, False)
    for (i, j) in removed_arcs:
        allowed[i, j] = False
    b = inst.vehicles[k].vc.speed_max
    w = np.where(allowed, inst.dist / b + inst.service[None, :], np.inf)
    w[:, 0] = np.where(allowed[:, 0], inst.dist[:, 0] / b, np.inf)
    # shortest time from every node to the depot = dijkstra from the depot
    # on the reversed graph; waiting time is ignored, keeping it a bound
    finite = np.isfinite(w)
    graph = csr_matrix((w[finite], np.nonzero(finite)), shape=w.shape)
    times = dijkstra(graph.T, directed=True, indices=0)
    return PricingGraph(allowed, times)


class PricingOptions:
    def __init__(self, max_columns=40, use_rcsp=True, use_knapsack=True,
                 use_bounds=True, debug=False, max_wave_rows=250_000):
        self.max_columns = max_columns
        self.use_rcsp = use_rcsp
        self.use_knapsack = use_knapsack
        self.use_bounds = use_bounds
        self.debug = debug
        self.max_wave_rows = max_wave_rows


class PricingResult:
    __slots__ = ("columns", "min_rc", "stats")

    def __init__(self, columns, min_rc, stats):
        self.columns = columns  # list of (route, cost, reduced_cost)
        self.min_rc = min_rc
        self.stats = stats


def price(inst, k, pi, mu, graph, opts=None):
    """Up to opts.max_columns best negative-reduced-cost routes for class k.

    pi: dual array indexed by node id (depot entry ignored); mu: the
    class-multiplicity dual.  Deterministic for fixed inputs.
    """
    opts = opts or PricingOptions()
    ctx = lb.PricingContext(inst, k, graph.allowed, graph.min_return)
    bounds = CompletionBounds(ctx, pi, opts.use_rcsp, opts.use_knapsack) \
        if opts.use_bounds else None
    stats = {"labels": 0, "waves": 0, "truncated": False}

    found = []  # (reduced cost, route, cost)
    threshold = RC_CUTOFF
    waves = [lb.seed_wave(ctx, pi)]
    while waves[-1].rows:
        wave = waves[-1]
        order = np.argsort(wave.D, kind="stable")
        wave = wave.select(order)
        waves[-1] = wave
        stats["labels"] += wave.rows
        stats["waves"] += 1
        if opts.debug:
            lb.verify_wave(ctx, waves, len(waves) - 1)

        closable, sig, speed, cost, rc = lb.close_wave(ctx, wave, mu)
        hits = np.flatnonzero(closable & (rc <= RC_CUTOFF))
        for row in hits:
            route = lb.route_of(waves, len(waves) - 1, int(row))
            found.append((float(rc[row]), route, float(cost[row])))
            if opts.debug:
                _check_column(inst, k, route, float(sig[row]),
                              float(cost[row]))
        if len(found) >= opts.max_columns:
            found.sort(key=lambda t: (t[0], t[1]))
            threshold = found[opts.max_columns - 1][0]

        if bounds is not None:
            keep = bounds.keep_mask(wave, mu, threshold, stats)
            wave = wave.select(np.flatnonzero(keep))
        if wave.rows > opts.max_wave_rows:
            # emergency valve for degenerate duals; never triggers on the
            # exactness tests, and is reported honestly when it does
            phi = None
            if bounds is not None and bounds.rcsp_ok:
                from prpso.bp.bounds import partial_cost_bound
                phi = bounds.rcsp_bound(wave, partial_cost_bound(ctx, wave))
            else:
                phi = wave.D
            keep = np.argsort(phi, kind="stable")[:opts.max_wave_rows]
            wave = wave.select(np.sort(keep))
            stats["truncated"] = True
        # the stored wave must be the pruned one: the next wave's parent
        # indices point into it, and route_of follows that chain
        waves[-1] = wave
        waves.append(lb.extend_wave(ctx, wave, pi))

    found.sort(key=lambda t: (t[0], t[1]))
    found = found[:opts.max_columns]
    columns = [(route, cost, rc) for rc, route, cost in found]
    min_rc = found[0][0] if found else math.inf
    return PricingResult(columns, min_rc, stats)


def _check_column(inst, k, route, sigma, cost):
    r = Route(k, (0,) + route + (0,))
    sig_ref = min_feasible_speed(r, inst)
    if sig_ref != sigma:
        raise AssertionError("closed-label sigma %r != route sigma %r for %s"
                             % (sigma, sig_ref, route))
    ref = optimal_route_speed(r, inst).route_cost
    if abs(ref - cost) > 1e-9 * max(1.0, abs(ref)):
        raise AssertionError("column cost %r != speed-opt cost %r for %s"
                             % (cost, ref, route))
