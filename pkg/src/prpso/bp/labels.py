"""Partial-path labels for the route pricing problem.

Labels live in waves: wave w holds every surviving elementary path that
visits w+1 customers, as parallel numpy arrays (one row per label).  A
label tracks, incrementally:

  - the visited-customer bitset, last node, demand taken (kg, cost-scaled
    kg, and integer capacity units)
  - distance, earliest departure time at the speed limit, and service time
    accumulated before the last node
  - the triple history (D_v, S_v, e_v) of every node on the path, which is
    what lets the minimum feasible speed be updated in O(path) per
    extension while agreeing bitwise with the quadratic route formula
  - fuel coefficient sums (alpha, beta, gamma), the payload term delta,
    the dual prefix sum, and the three accumulators behind the partial-cost
    lower bound (positive/negative beta mass and the delivered-weight
    correction)

Extensions are generated for a whole wave at once against all customers,
masked by elementarity, arc availability, capacity, time windows, the
speed limit, and the minimum-time return to the depot.
"""

import math

import numpy as np

from prpso.cmem import efficient_speed
from prpso.speed_opt import sigma_of_sequence

_MAX_CUSTOMERS = 62  # visited set is an int64 bitset


class PricingContext:
    """Per-(instance, class, pricing graph) constants for label math."""

    def __init__(self, inst, k, allowed, min_return):
        n = inst.n_customers
        if n > _MAX_CUSTOMERS:
            raise ValueError("pricing supports at most %d customers"
                             % _MAX_CUSTOMERS)
        self.inst = inst
        self.k = k
        self.n = n
        vc = inst.vehicles[k].vc
        self.vc = vc
        self.vstar = efficient_speed(vc)
        self.b = vc.speed_max
        self.cap = vc.capacity
        self.cap_cost = inst.cost_capacity(k)
        self.cap_units = inst.capacity_units(k)
        self.fk = vc.fixed_cost
        self.ck = vc.fuel_price
        self.w = vc.curb_weight
        self.horizon = inst.due[0]
        self.dist = inst.dist
        self.A = inst.alpha[k]
        self.B = inst.beta[k]
        self.G = inst.gamma[k]
        self.ready = inst.ready
        self.due = inst.due
        self.service = inst.service
        self.demand = inst.demand
        self.cdemand = inst.cost_demand
        self.units = inst.demand_units
        self.allowed = allowed  # (n+1, n+1) bool, arc availability
        self.min_return = min_return  # (n+1,) fastest time back to depot
        self.ids = np.arange(1, n + 1)
        self.bit = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))


class Wave:
    """One row per label; all labels visit the same number of customers."""

    FIELDS = ("last", "mask", "q_kg", "q_units", "q_cost", "D", "tau", "S",
              "sigma", "alpha", "beta", "gamma", "delta", "bplus", "bminus",
              "epay", "pi_sum", "parent")
    __slots__ = FIELDS + ("TD", "TS", "TE")

    def __init__(self, **arrays):
        for f in self.FIELDS + ("TD", "TS", "TE"):
            setattr(self, f, arrays[f])

    @property
    def rows(self):
        return len(self.last)

    def select(self, keep):
        """Filtered copy; parent indices still refer to the previous wave."""
        vals = {f: getattr(self, f)[keep] for f in self.FIELDS}
        for f in ("TD", "TS", "TE"):
            vals[f] = getattr(self, f)[keep]
        return Wave(**vals)


def seed_wave(ctx, pi):
    """Depot -> customer labels for every reachable first customer."""
    n = ctx.n
    j = ctx.ids
    d0 = ctx.dist[0, j]
    arr = d0 / ctx.b
    num = d0
    den = ctx.due[j] - ctx.ready[0]
    conflict = (den < 0.0) | ((den == 0.0) & (num > 0.0))
    sigma = np.where((den > 0.0) & (num > 0.0),
                     num / np.where(den > 0.0, den, 1.0), 0.0)
    tau = np.maximum(ctx.ready[j], arr) + ctx.service[j]
    ok = (ctx.allowed[0, j]
          & (ctx.demand[j] <= ctx.cap)
          & (arr <= ctx.due[j])
          & ~conflict
          & (sigma <= ctx.b)
          & (tau + ctx.min_return[j] <= ctx.horizon))
    j = j[ok]
    beta = ctx.B[0, j]
    return Wave(
        last=j.astype(np.int64),
        mask=ctx.bit[j - 1],
        q_kg=ctx.demand[j],
        q_units=ctx.units[j].astype(np.int64),
        q_cost=ctx.cdemand[j],
        D=d0[ok],
        tau=tau[ok],
        S=np.zeros(len(j)),
        sigma=sigma[ok],
        alpha=ctx.A[0, j],
        beta=beta,
        gamma=ctx.G[0, j],
        delta=beta * ctx.cdemand[j],
        bplus=np.maximum(beta, 0.0),
        bminus=np.minimum(beta, 0.0),
        epay=np.zeros(len(j)),
        pi_sum=pi[j],
        parent=np.full(len(j), -1, dtype=np.int64),
        TD=np.stack([np.zeros(len(j)), d0[ok]], axis=1),
        TS=np.zeros((len(j), 2)),
        TE=np.stack([np.full(len(j), ctx.ready[0]), ctx.ready[j]], axis=1),
    )


def extend_wave(ctx, wave, pi):
    """Every feasible one-customer extension of every label in the wave."""
    j = ctx.ids
    last = wave.last
    legs = ctx.dist[last][:, j]
    arr = wave.tau[:, None] + legs / ctx.b
    D_new = wave.D[:, None] + legs
    S_new = wave.S + ctx.service[last]  # before the new node; same for all j

    sig_run = np.broadcast_to(wave.sigma[:, None], arr.shape).copy()
    conflict = np.zeros(arr.shape, dtype=bool)
    due_j = ctx.due[j][None, :]
    for v in range(wave.TD.shape[1]):
        num = D_new - wave.TD[:, v][:, None]
        den = (due_j - wave.TE[:, v][:, None]) \
            - (S_new[:, None] - wave.TS[:, v][:, None])
        conflict |= (den < 0.0) | ((den == 0.0) & (num > 0.0))
        ratio = np.where((den > 0.0) & (num > 0.0),
                         num / np.where(den > 0.0, den, 1.0), 0.0)
        np.maximum(sig_run, ratio, out=sig_run)

    tau_new = np.maximum(ctx.ready[j][None, :], arr) + ctx.service[j][None, :]
    visited = (wave.mask[:, None] & ctx.bit[None, :]) != 0
    ok = (~visited
          & ctx.allowed[last][:, j]
          & (wave.q_kg[:, None] + ctx.demand[j][None, :] <= ctx.cap)
          & (arr <= due_j)
          & ~conflict
          & (sig_run <= ctx.b)
          & (tau_new + ctx.min_return[j][None, :] <= ctx.horizon))

    r, cj = np.nonzero(ok)
    cust = ctx.ids[cj].astype(np.int64)
    beta_arc = ctx.B[last[r], cust]
    beta = wave.beta[r] + beta_arc
    return Wave(
        last=cust,
        mask=wave.mask[r] | ctx.bit[cj],
        q_kg=wave.q_kg[r] + ctx.demand[cust],
        q_units=wave.q_units[r] + ctx.units[cust].astype(np.int64),
        q_cost=wave.q_cost[r] + ctx.cdemand[cust],
        D=D_new[r, cj],
        tau=tau_new[r, cj],
        S=S_new[r],
        sigma=sig_run[r, cj],
        alpha=wave.alpha[r] + ctx.A[last[r], cust],
        beta=beta,
        gamma=wave.gamma[r] + ctx.G[last[r], cust],
        delta=wave.delta[r] + beta * ctx.cdemand[cust],
        bplus=wave.bplus[r] + np.maximum(beta_arc, 0.0),
        bminus=wave.bminus[r] + np.minimum(beta_arc, 0.0),
        epay=wave.epay[r] + beta_arc * wave.q_cost[r],
        pi_sum=wave.pi_sum[r] + pi[cust],
        parent=r.astype(np.int64),
        TD=np.concatenate([wave.TD[r], D_new[r, cj][:, None]], axis=1),
        TS=np.concatenate([wave.TS[r], S_new[r][:, None]], axis=1),
        TE=np.concatenate([wave.TE[r], ctx.ready[cust][:, None]], axis=1),
    )


def close_wave(ctx, wave, mu):
    """Return-to-depot evaluation of every label in the wave.

    Returns (closable, sigma_close, speed, cost, reduced_cost); rows that
    cannot legally return get closable=False and infinite reduced cost.
    """
    last = wave.last
    d_ret = ctx.dist[last, 0]
    D_cl = wave.D + d_ret
    S_cl = wave.S + ctx.service[last]
    tau_cl = wave.tau + d_ret / ctx.b

    sig = wave.sigma.copy()
    conflict = np.zeros(wave.rows, dtype=bool)
    for v in range(wave.TD.shape[1]):
        num = D_cl - wave.TD[:, v]
        den = (ctx.due[0] - wave.TE[:, v]) - (S_cl - wave.TS[:, v])
        conflict |= (den < 0.0) | ((den == 0.0) & (num > 0.0))
        ratio = np.where((den > 0.0) & (num > 0.0),
                         num / np.where(den > 0.0, den, 1.0), 0.0)
        np.maximum(sig, ratio, out=sig)

    closable = (ctx.allowed[last, 0]
                & (tau_cl <= ctx.due[0])
                & ~conflict
                & (sig <= ctx.b))
    speed = np.maximum(ctx.vstar, sig)
    alpha = wave.alpha + ctx.A[last, 0]
    beta = wave.beta + ctx.B[last, 0]
    gamma = wave.gamma + ctx.G[last, 0]
    # the return arc carries no payload, so delta is unchanged
    cost = ctx.fk + ctx.ck * (alpha / speed + wave.delta + beta * ctx.w
                              + gamma * speed * speed)
    rc = np.where(closable, cost - wave.pi_sum - mu, np.inf)
    return closable, sig, speed, cost, rc


def route_of(waves, w, row):
    """Reconstruct the customer sequence of label (wave w, row) via parents."""
    seq = []
    while w >= 0:
        seq.append(int(waves[w].last[row]))
        row = int(waves[w].parent[row])
        w -= 1
    seq.reverse()
    return tuple(seq)


def verify_wave(ctx, waves, w):
    """Debug mode: recompute every label in wave w from scratch.

    sigma must match the quadratic route formula bitwise; accumulated
    quantities must match fresh summation to 1e-9 relative.
    """
    wave = waves[w]
    inst = ctx.inst
    for row in range(wave.rows):
        custs = route_of(waves, w, row)
        seq = (0,) + custs
        sig = sigma_of_sequence(inst, seq)
        if not (sig == wave.sigma[row]
                or (math.isinf(sig) and math.isinf(wave.sigma[row]))):
            raise AssertionError(
                "sigma drift on %s: incremental %r vs recomputed %r"
                % (seq, float(wave.sigma[row]), sig))
        legs = list(zip(seq[:-1], seq[1:]))
        checks = {
            "D": (wave.D[row], math.fsum(inst.dist[u, v] for u, v in legs)),
            "S": (wave.S[row],
                  math.fsum(inst.service[c] for c in custs[:-1])),
            "alpha": (wave.alpha[row],
                      math.fsum(ctx.A[u, v] for u, v in legs)),
            "beta": (wave.beta[row],
                     math.fsum(ctx.B[u, v] for u, v in legs)),
            "gamma": (wave.gamma[row],
                      math.fsum(ctx.G[u, v] for u, v in legs)),
            "q_kg": (wave.q_kg[row],
                     math.fsum(inst.demand[c] for c in custs)),
            "q_cost": (wave.q_cost[row],
                       math.fsum(inst.cost_demand[c] for c in custs)),
        }
        beta_run = 0.0
        delta = 0.0
        for u, v in legs:
            beta_run += ctx.B[u, v]
            delta += beta_run * inst.cost_demand[v]
        checks["delta"] = (wave.delta[row], delta)
        tau = 0.0
        for u, v in legs:
            tau = max(inst.ready[v], tau + inst.dist[u, v] / ctx.b) \
                + inst.service[v]
        checks["tau"] = (wave.tau[row], tau)
        for name, (got, want) in checks.items():
            if abs(got - want) > 1e-9 * max(1.0, abs(want)):
                raise AssertionError(
                    "%s drift on %s: incremental %r vs recomputed %r"
                    % (name, seq, float(got), want))
    return wave.rows
