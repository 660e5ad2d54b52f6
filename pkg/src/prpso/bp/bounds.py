"""Completion bounds that prune pricing labels without losing columns.

Every bound here is a true lower bound on the reduced cost of the best
closed route extending a label, so pruning at the incumbent threshold can
never remove a column that pricing would otherwise return.

Three layers, cheapest first:
  1. partial-cost bound: the label's own arcs at its current speed with
     per-arc best-case payloads (positive-beta arcs as light as possible,
     negative-beta arcs as heavy as possible);
  2. a capacity-indexed shortest-path table over relaxed (non-elementary)
     completions priced at the efficient cruise speed;
  3. a knapsack over the remaining driving-time budget, first as a shared
     all-customer table on a one-second grid, then per label on a sixty
     second grid with the label's true item set when the shared table
     fails to prune.
"""

import math

import numpy as np


def partial_cost_bound(ctx, wave):
    """Vector of partial-path cost lower bounds (includes the fixed cost).

    Speed-dependent terms are priced at the label's current optimal speed;
    extensions can only raise the minimum feasible speed, and the fuel
    curve increases beyond the efficient cruise speed, so this never
    overestimates.  Payload terms take the per-arc best case: the lightest
    load consistent with the visited demand when the arc burns fuel per
    kilogram, the heaviest the vehicle could carry when it gains.
    """
    speed = np.maximum(ctx.vstar, wave.sigma)
    payload = (wave.q_cost * wave.bplus + ctx.cap_cost * wave.bminus
               - wave.epay)
    return ctx.fk + ctx.ck * (wave.alpha / speed + wave.beta * ctx.w
                              + payload + wave.gamma * speed * speed)


def lower_bound_partial_cost(ctx, wave, row):
    """Scalar view of partial_cost_bound for one label."""
    return float(partial_cost_bound(ctx, wave)[row])


def arc_reduced_bounds(ctx, pi):
    """phibar[h, i]: lower bound on any route's reduced-cost share of arc
    (h, i), priced at the efficient cruise speed with best-case payload,
    minus the dual of the entered customer.  Unusable arcs get +inf."""
    x = np.where(ctx.B >= 0.0, 0.0, ctx.cap_cost)
    phibar = ctx.ck * (ctx.A / ctx.vstar + ctx.B * (ctx.w + x)
                       + ctx.G * ctx.vstar * ctx.vstar) - pi[None, :]
    phibar = np.where(ctx.allowed, phibar, np.inf)
    np.fill_diagonal(phibar, np.inf)
    phibar[:, 0] = np.where(ctx.allowed[:, 0], phibar[:, 0] + pi[0], np.inf)
    return phibar


class CompletionBounds:
    """Per-pricing-round tables shared by every label of one vehicle class."""

    def __init__(self, ctx, pi, use_rcsp=True, use_knapsack=True):
        self.ctx = ctx
        self.pi = pi
        self.use_rcsp = use_rcsp
        self.use_knapsack = use_knapsack
        self.phibar = arc_reduced_bounds(ctx, pi)
        n = ctx.n
        units = ctx.units[1:].astype(np.int64)

        # depot-return correction: any completion ends on some return arc,
        # which may have negative reduced share on downhill runs
        ret = self.phibar[1:, 0]
        finite = ret[np.isfinite(ret)]
        self.return_correction = min(0.0, float(finite.min())) \
            if len(finite) else 0.0

        self.rcsp_ok = use_rcsp and bool((units >= 1).all())
        if self.rcsp_ok:
            QU = ctx.cap_units
            S = np.full((n + 1, QU + 1), np.inf)
            direct = self.phibar[:, 0]
            arc = self.phibar[:, 1:]  # (n+1, n) into customers
            for Q in range(QU + 1):
                best = direct.copy()
                take = units <= Q
                if take.any():
                    gather = np.full(n, np.inf)
                    idx = Q - units[take]
                    gather[take] = S[1:, :][take, idx]
                    cand = arc + gather[None, :]
                    best = np.minimum(best, cand.min(axis=1))
                S[:, Q] = best
            self.S = S

        if use_knapsack:
            # shared table: every customer is an item, weights at the
            # cheapest incoming travel time floored to a one-second grid
            v = np.where(np.isfinite(self.phibar[:, 1:]),
                         -self.phibar[:, 1:], -np.inf).max(axis=0)
            t_in = np.where(ctx.allowed[:, 1:], ctx.dist[:, 1:] / ctx.b,
                            np.inf)
            np.fill_diagonal(t_in[1:, :], np.inf)
            w = t_in.min(axis=0)
            cap = int(math.ceil(ctx.horizon)) + 1
            V = np.zeros(cap)
            for vi, wi in zip(v, w):
                if vi <= 0.0 or not math.isfinite(wi):
                    continue
                wi = int(wi)  # floor: weights shrink, value function grows
                if wi == 0:
                    V += vi
                elif wi < cap:
                    np.maximum(V[wi:], V[:-wi] + vi, out=V[wi:])
            self.V = V
            self.item_v = v
            self.item_w_sec = w

    # ---- per-wave bounds ---------------------------------------------------

    def rcsp_bound(self, wave, phi):
        """Phi_P - sum(pi over visited) + S*(last, remaining units)."""
        rem = self.ctx.cap_units - wave.q_units
        return phi - wave.pi_sum + self.S[wave.last, rem]

    def relaxed_knapsack_bound(self, wave, phi):
        slack = np.maximum(0.0, self.ctx.horizon - wave.tau)
        idx = np.ceil(slack).astype(np.int64)  # capacity rounds up
        return (phi - wave.pi_sum - self.V[idx] + self.return_correction)

    def exact_knapsack_bound(self, wave, phi, row):
        """Label-specific item set on a sixty-second grid."""
        ctx = self.ctx
        visited = wave.mask[row]
        last = int(wave.last[row])
        slack = ctx.horizon - float(wave.tau[row])
        if slack < 0.0:
            slack = 0.0
        cap = int(math.ceil(slack / 60.0)) + 1
        rem_units = ctx.cap_units - int(wave.q_units[row])
        pred = [last] + [i for i in range(1, ctx.n + 1)
                         if not (visited >> (i - 1)) & 1]
        kstar = 0.0
        V = np.zeros(cap)
        for i in range(1, ctx.n + 1):
            if (visited >> (i - 1)) & 1 or i == last:
                continue
            if ctx.units[i] > rem_units:
                continue
            ins = [h for h in pred if h != i and ctx.allowed[h, i]]
            if not ins:
                continue
            t_in = min(ctx.dist[h, i] for h in ins) / ctx.b
            if wave.tau[row] + t_in > ctx.due[i]:
                continue  # window already closed at the speed limit
            vi = max(-self.phibar[h, i] for h in ins)
            if vi <= 0.0 or not math.isfinite(vi):
                continue
            wi = int(t_in / 60.0)
            if wi == 0:
                V += vi
            elif wi < cap:
                np.maximum(V[wi:], V[:-wi] + vi, out=V[wi:])
        kstar = float(V[-1]) if len(V) else 0.0
        return float(phi[row] - wave.pi_sum[row]) - kstar \
            + self.return_correction

    def keep_mask(self, wave, mu, threshold, stats=None):
        """True where the label may still lead to a column at or below
        threshold; bounds are applied cheapest first."""
        phi = partial_cost_bound(self.ctx, wave)
        keep = np.ones(wave.rows, dtype=bool)
        if self.rcsp_ok:
            pruned = self.rcsp_bound(wave, phi) - mu > threshold
            keep &= ~pruned
            if stats is not None:
                stats["rcsp_pruned"] = stats.get("rcsp_pruned", 0) \
                    + int(pruned.sum())
        if self.use_knapsack and keep.any():
            alive = np.flatnonzero(keep)
            slack = np.maximum(0.0, self.ctx.horizon - wave.tau[alive])
            idx = np.ceil(slack).astype(np.int64)
            relaxed = (phi[alive] - wave.pi_sum[alive] - self.V[idx]
                       + self.return_correction) - mu > threshold
            hit = alive[relaxed]
            keep[hit] = False
            if stats is not None:
                stats["knap_pruned"] = stats.get("knap_pruned", 0) \
                    + len(hit)
            for row in np.flatnonzero(keep):
                if self.exact_knapsack_bound(wave, phi, int(row)) - mu \
                        > threshold:
                    keep[row] = False
                    if stats is not None:
                        stats["knap_exact_pruned"] = \
                            stats.get("knap_exact_pruned", 0) + 1
        return keep


def rcsp_completion_bound(bounds, wave, row):
    """Scalar relaxed-shortest-path completion bound for one label."""
    phi = partial_cost_bound(bounds.ctx, wave)
    return float(bounds.rcsp_bound(wave, phi)[row])


def knapsack_completion_bound(bounds, wave, row):
    """Scalar per-label knapsack completion bound (exact item set)."""
    phi = partial_cost_bound(bounds.ctx, wave)
    return bounds.exact_knapsack_bound(wave, phi, row)
