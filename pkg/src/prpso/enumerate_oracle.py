"""Exhaustive exact solver for small instances.

Every vehicle class and customer subset gets its best feasible route by
scoring all permutations in vectorized batches, then a subset-partition DP
assembles the cheapest fleet assignment.  Intended as the independent
optimum oracle for instances of up to about eight customers; beyond that
the permutation count makes it pointless.
"""

import itertools
import math

import numpy as np

from prpso.speed_opt import Route, batch_route_metrics


class EnumerateResult:
    __slots__ = ("cost", "routes", "feasible")

    def __init__(self, cost, routes, feasible):
        self.cost = cost
        self.routes = routes
        self.feasible = feasible


def best_route_by_subset(inst, k):
    """mask -> (cost, node tuple) of the best feasible class-k route."""
    n = inst.n_customers
    cap = inst.vehicles[k].vc.capacity
    demand = inst.demand
    best = {}
    for size in range(1, n + 1):
        perms, owners = [], []
        for subset in itertools.combinations(range(1, n + 1), size):
            if sum(demand[c] for c in subset) > cap + 1e-9:
                continue
            mask = 0
            for c in subset:
                mask |= 1 << (c - 1)
            for perm in itertools.permutations(subset):
                perms.append((0,) + perm + (0,))
                owners.append(mask)
        if not perms:
            continue
        seqs = np.array(perms)
        _, _, cost, feas = batch_route_metrics(inst, k, seqs)
        cost = np.where(feas, cost, np.inf)
        for idx in range(len(perms)):
            c = cost[idx]
            if c < best.get(owners[idx], (math.inf,))[0]:
                best[owners[idx]] = (float(c), perms[idx])
    return best


def enumerate_optimal(inst) -> EnumerateResult:
    n = inst.n_customers
    if n > 10:
        raise ValueError("enumeration over %d customers is not sensible" % n)
    if n == 0:
        return EnumerateResult(0.0, [], True)

    per_class = [best_route_by_subset(inst, k)
                 for k in range(len(inst.vehicles))]
    counts = tuple(spec.count for spec in inst.vehicles)
    full = (1 << n) - 1

    # dp over (served mask, remaining fleet), expanded in order of how many
    # customers are served so every state is final before it is extended;
    # the lowest unserved customer must be in the next route, which kills
    # symmetric route orderings
    start = (0, counts)
    dp = {start: (0.0, None)}
    levels = [[] for _ in range(n + 1)]
    levels[0].append(start)
    for p in range(n):
        for state in levels[p]:
            mask, rem = state
            cost_here = dp[state][0]
            low = (~mask & full) & -(~mask & full)  # lowest unserved bit
            rest = full & ~mask
            sub = rest
            while sub:
                if sub & low:
                    for k in range(len(per_class)):
                        if rem[k] == 0:
                            continue
                        entry = per_class[k].get(sub)
                        if entry is None:
                            continue
                        nstate = (mask | sub,
                                  rem[:k] + (rem[k] - 1,) + rem[k + 1:])
                        ncost = cost_here + entry[0]
                        old = dp.get(nstate)
                        if old is None or ncost < old[0]:
                            if old is None:
                                levels[bin(nstate[0]).count("1")].append(nstate)
                            dp[nstate] = (ncost, (state, k, sub))
                sub = (sub - 1) & rest

    finals = [(c, st) for st, (c, _) in dp.items() if st[0] == full]
    if not finals:
        return EnumerateResult(math.inf, None, False)
    best_cost, best_state = min(finals)

    routes = []
    state = best_state
    while dp[state][1] is not None:
        prev, k, sub = dp[state][1]
        routes.append(Route(k, per_class[k][sub][1]))
        state = prev
    routes.reverse()
    return EnumerateResult(best_cost, routes, True)
