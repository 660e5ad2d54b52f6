"""Fixed-sequence speed optimization.

For a route driven at one cruise speed with waiting allowed at early
arrivals, the smallest time-window-feasible speed is

    sigma(R) = max over positions i<j of (D_j - D_i) / ((l_j - e_i) - (S_j - S_i))

with D the cumulative distance and S the cumulative service time before a
position.  A pair with (l_j - e_i) - (S_j - S_i) < 0, or = 0 while some
distance separates the nodes, is a window conflict and the route cannot be
driven at any speed.  The cost-minimizing speed is then the larger of
sigma(R) and the vehicle's efficient cruise speed.

The exact arithmetic grouping in the sigma formula above is deliberate:
the incremental path evaluation used by pricing reproduces it term by term,
and tests assert bitwise equality between the two, so any regrouping here
must be mirrored there.
"""

import math

import numpy as np

from prpso.cmem import efficient_speed


class Route:
    """Fixed node sequence for one vehicle class (index into inst.vehicles)."""

    __slots__ = ("k", "nodes", "_cache")

    def __init__(self, k, nodes):
        nodes = tuple(nodes)
        if len(nodes) < 3 or nodes[0] != 0 or nodes[-1] != 0:
            raise ValueError("route must be depot, >=1 customer, depot")
        inner = nodes[1:-1]
        if 0 in inner:
            raise ValueError("depot inside the route")
        if len(set(inner)) != len(inner):
            raise ValueError("repeated customer in route")
        self.k = k
        self.nodes = nodes
        self._cache = None

    def customers(self):
        return self.nodes[1:-1]

    def prefixes(self, inst):
        """(cumdist D, cumservice-before S, ready E, due L) along the route."""
        if self._cache is None:
            seq = np.array(self.nodes)
            legs = inst.dist[seq[:-1], seq[1:]]
            D = np.concatenate(([0.0], np.cumsum(legs)))
            S = np.concatenate(([0.0], np.cumsum(inst.service[seq[:-1]])))
            self._cache = (D, S, inst.ready[seq], inst.due[seq])
        return self._cache

    def __repr__(self):
        return "Route(k=%d, %s)" % (self.k, "-".join(map(str, self.nodes)))


class SpeedResult:
    __slots__ = ("sigma", "optimal_speed", "route_cost", "feasible",
                 "degenerate", "fuel_liters", "drive_time", "distance")

    def __init__(self, sigma, optimal_speed, route_cost, feasible,
                 degenerate, fuel_liters, drive_time, distance):
        self.sigma = sigma
        self.optimal_speed = optimal_speed
        self.route_cost = route_cost
        self.feasible = feasible
        self.degenerate = degenerate
        self.fuel_liters = fuel_liters
        self.drive_time = drive_time
        self.distance = distance


def sigma_of_sequence(inst, seq) -> float:
    """sigma over any node sequence (need not return to the depot).

    math.inf on window conflict, 0.0 on the all-co-located case.  This is
    the reference arithmetic the incremental label evaluation must match
    bitwise, so keep the grouping exactly as written.
    """
    seq = np.asarray(seq)
    legs = inst.dist[seq[:-1], seq[1:]]
    D = np.concatenate(([0.0], np.cumsum(legs)))
    S = np.concatenate(([0.0], np.cumsum(inst.service[seq[:-1]])))
    E = inst.ready[seq]
    L = inst.due[seq]
    m = len(D)
    best = 0.0
    for i in range(m - 1):
        di, si, ei = D[i], S[i], E[i]
        for j in range(i + 1, m):
            num = D[j] - di
            den = (L[j] - ei) - (S[j] - si)
            if den < 0.0 or (den == 0.0 and num > 0.0):
                return math.inf
            if num > 0.0:
                r = num / den
                if r > best:
                    best = r
    return best


def min_feasible_speed(route: Route, inst) -> float:
    """sigma(R); math.inf on window conflict, 0.0 on the all-co-located case."""
    return sigma_of_sequence(inst, route.nodes)


def optimal_route_speed(route: Route, inst) -> SpeedResult:
    sigma = min_feasible_speed(route, inst)
    vc = inst.vehicles[route.k].vc
    vstar = efficient_speed(vc)
    if sigma == math.inf:
        speed = vc.speed_max
        feasible = False
    else:
        speed = max(vstar, sigma)
        feasible = sigma <= vc.speed_max
        if not feasible:
            speed = vc.speed_max  # best effort for penalized evaluation
    fuel = _route_fuel(route, inst, speed)
    cost = vc.fixed_cost + vc.fuel_price * fuel
    D = route.prefixes(inst)[0]
    return SpeedResult(sigma, speed, cost, feasible,
                       sigma == 0.0, fuel, D[-1] / speed, D[-1])


def route_cost_at_speed(route: Route, inst, speed) -> float:
    """Fixed cost plus fuel cost when the whole route is driven at speed."""
    vc = inst.vehicles[route.k].vc
    return vc.fixed_cost + vc.fuel_price * _route_fuel(route, inst, speed)


def _route_fuel(route: Route, inst, speed) -> float:
    seq = np.array(route.nodes)
    k = route.k
    a = inst.alpha[k][seq[:-1], seq[1:]]
    b = inst.beta[k][seq[:-1], seq[1:]]
    g = inst.gamma[k][seq[:-1], seq[1:]]
    # payload on the leg into position t+1: everything still to deliver there
    carried = np.cumsum(inst.cost_demand[seq][::-1])[::-1][1:]
    w = inst.vehicles[k].vc.curb_weight
    return (a.sum() / speed + b.sum() * w + float(b @ carried)
            + g.sum() * speed * speed)


def route_elevation_gain(route: Route, inst) -> float:
    total = 0.0
    for u, v in zip(route.nodes[:-1], route.nodes[1:]):
        geom = inst.geometry.get((u, v))
        if geom is None:
            continue
        for s in geom.segments:
            rise = s.distance * math.sin(s.angle)
            if rise > 0.0:
                total += rise
    return total


class SolutionReport:
    __slots__ = ("routes", "results", "total_cost", "feasible",
                 "total_distance", "drive_time", "mean_speed",
                 "fixed_cost", "fuel_cost", "elevation_gain")

    def __init__(self, routes, results, fixed_cost, fuel_cost, gain):
        self.routes = routes
        self.results = results
        self.total_cost = fixed_cost + fuel_cost
        self.feasible = all(r.feasible for r in results)
        self.total_distance = sum(r.distance for r in results)
        self.drive_time = sum(r.drive_time for r in results)
        self.mean_speed = (self.total_distance / self.drive_time
                           if self.drive_time > 0 else 0.0)
        self.fixed_cost = fixed_cost
        self.fuel_cost = fuel_cost
        self.elevation_gain = gain


def evaluate_solution(routes, inst) -> SolutionReport:
    """Total cost at per-route optimal speeds, plus the report columns."""
    seen = {}
    for r in routes:
        for c in r.customers():
            if c in seen:
                raise ValueError("customer %d appears in two routes" % c)
            seen[c] = True
    missing = [nd.id for nd in inst.nodes[1:] if nd.id not in seen]
    if missing:
        raise ValueError("customers not served: %s" % missing)
    used = {}
    for r in routes:
        used[r.k] = used.get(r.k, 0) + 1
        if used[r.k] > inst.vehicles[r.k].count:
            raise ValueError("more class-%d routes than vehicles" % r.k)

    results = [optimal_route_speed(r, inst) for r in routes]
    fixed = sum(inst.vehicles[r.k].vc.fixed_cost for r in routes)
    fuel = sum(inst.vehicles[r.k].vc.fuel_price * res.fuel_liters
               for r, res in zip(routes, results))
    gain = sum(route_elevation_gain(r, inst) for r in routes)
    return SolutionReport(list(routes), results, fixed, fuel, gain)


_PAIR_INDEX_CACHE = {}


def _pair_indices(L):
    got = _PAIR_INDEX_CACHE.get(L)
    if got is None:
        got = _PAIR_INDEX_CACHE[L] = np.triu_indices(L, k=1)
    return got


def batch_route_metrics(inst, k, seqs, chunk=8192):
    """Vectorized sigma/speed/cost over many equal-length sequences.

    seqs: int array (B, L), column 0 and column L-1 must be the depot.
    Returns (sigma, speed, cost, feasible); window conflicts get sigma=inf
    and cost evaluated at the speed limit.
    """
    seqs = np.asarray(seqs)
    B, L = seqs.shape
    vc = inst.vehicles[k].vc
    vstar = efficient_speed(vc)
    out_sigma = np.empty(B)
    out_speed = np.empty(B)
    out_cost = np.empty(B)
    iu, ju = _pair_indices(L)
    for lo in range(0, B, chunk):
        s = seqs[lo:lo + chunk]
        legs = inst.dist[s[:, :-1], s[:, 1:]]
        D = np.concatenate([np.zeros((len(s), 1)), np.cumsum(legs, axis=1)],
                           axis=1)
        S = np.concatenate([np.zeros((len(s), 1)),
                            np.cumsum(inst.service[s[:, :-1]], axis=1)],
                           axis=1)
        E = inst.ready[s]
        Lw = inst.due[s]
        num = D[:, ju] - D[:, iu]
        den = (Lw[:, ju] - E[:, iu]) - (S[:, ju] - S[:, iu])
        conflict = ((den < 0.0) | ((den == 0.0) & (num > 0.0))).any(axis=1)
        ratio = np.where((den > 0.0) & (num > 0.0),
                         num / np.where(den > 0.0, den, 1.0), 0.0)
        sigma = ratio.max(axis=1)
        sigma[conflict] = np.inf
        speed = np.maximum(vstar, sigma)
        speed[sigma > vc.speed_max] = vc.speed_max

        a = inst.alpha[k][s[:, :-1], s[:, 1:]].sum(axis=1)
        b = inst.beta[k][s[:, :-1], s[:, 1:]]
        g = inst.gamma[k][s[:, :-1], s[:, 1:]].sum(axis=1)
        cd = inst.cost_demand[s]
        carried = np.cumsum(cd[:, ::-1], axis=1)[:, ::-1][:, 1:]
        fuel = (a / speed + b.sum(axis=1) * vc.curb_weight
                + (b * carried).sum(axis=1) + g * speed * speed)
        out_sigma[lo:lo + chunk] = sigma
        out_speed[lo:lo + chunk] = speed
        out_cost[lo:lo + chunk] = vc.fixed_cost + vc.fuel_price * fuel
    return out_sigma, out_speed, out_cost, out_sigma <= vc.speed_max


def simulate_route(route: Route, inst, speed) -> bool:
    """Drive the route at one speed, waiting at early arrivals; feasible?"""
    if speed <= 0.0:
        return False
    t = inst.ready[0]
    nodes = route.nodes
    for u, v in zip(nodes[:-1], nodes[1:]):
        t += inst.dist[u, v] / speed
        if v != 0:
            t = max(t, inst.ready[v])
        if t > inst.due[v] + 0.0:
            return False
        t += inst.service[v]
    return True
