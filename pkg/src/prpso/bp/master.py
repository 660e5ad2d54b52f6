"""Restricted master problem: set-partitioning LP over priced routes.

Rows: one equality per customer (visit exactly once) and one inequality
per vehicle class (at most its multiplicity).  Artificial slack columns
with a large cost keep every restricted master feasible, so dual values
always exist; a positive artificial in the optimum means the current
column pool cannot cover some customer.
"""

import numpy as np

from prpso.lp import solve_lp
from prpso.speed_opt import Route, optimal_route_speed

ARTIFICIAL_COST = 1e5


class Column:
    """One priced route for one vehicle class, cost-checked at creation."""

    __slots__ = ("k", "route", "cost", "visits")

    def __init__(self, inst, k, route, cost):
        ref = optimal_route_speed(Route(k, (0,) + tuple(route) + (0,)),
                                  inst).route_cost
        if abs(ref - cost) > 1e-9 * max(1.0, abs(ref)):
            raise ValueError(
                "column cost %.12g disagrees with route evaluation %.12g "
                "for class %d route %s" % (cost, ref, k, tuple(route)))
        self.k = k
        self.route = tuple(route)
        self.cost = cost
        self.visits = frozenset(route)

    def key(self):
        return (self.k, self.route)


class RmpSolution:
    __slots__ = ("value", "lam", "pi", "mu", "artificial", "status")

    def __init__(self, value, lam, pi, mu, artificial, status):
        self.value = value
        self.lam = lam              # weight per pool column
        self.pi = pi                # dual per node id, pi[0] == 0
        self.mu = mu                # dual per vehicle class, <= 0
        self.artificial = artificial  # total artificial usage
        self.status = status


def solve_rmp(inst, pool, cost_override=None):
    """LP-relax the set-partitioning master over the given column pool.

    cost_override optionally maps pool index -> objective coefficient,
    used when probing branching candidates with penalised columns.
    """
    n = inst.n_customers
    n_k = len(inst.vehicles)
    n_cols = len(pool)
    width = n_cols + n
    c = np.empty(width)
    for idx, col in enumerate(pool):
        c[idx] = col.cost
    if cost_override:
        for idx, val in cost_override.items():
            c[idx] = val
    c[n_cols:] = ARTIFICIAL_COST

    a_eq = np.zeros((n, width))
    for idx, col in enumerate(pool):
        for v in col.visits:
            a_eq[v - 1, idx] = 1.0
    a_eq[:, n_cols:] = np.eye(n)
    b_eq = np.ones(n)

    a_ub = np.zeros((n_k, width))
    for idx, col in enumerate(pool):
        a_ub[col.k, idx] = 1.0
    b_ub = np.array([float(vs.count) for vs in inst.vehicles])

    res = solve_lp(c, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq)
    if res.status != "optimal":
        return RmpSolution(np.inf, np.zeros(n_cols), np.zeros(n + 1),
                           np.zeros(n_k), np.inf, res.status)
    lam = res.x[:n_cols]
    art = float(res.x[n_cols:].sum())
    pi = np.zeros(n + 1)
    pi[1:] = res.dual_eq
    mu = np.minimum(res.dual_ub, 0.0)
    return RmpSolution(float(res.objective), lam, pi, mu, art, "optimal")
