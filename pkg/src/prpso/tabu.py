"""Tabu search over the relocate neighborhood.

Search space: partitions of the customers into at most one route per
available vehicle.  Capacity overloads are allowed and penalized by a
self-adjusting weight rho; time-window violations are never admitted
(a candidate position is admissible only if the route stays drivable
within the speed limit, or at least gets no harder to drive when the
route was already broken by a hopeless construction seed).

Move scores factor into a removal delta (depends only on the customer's
current route) and an insertion delta (depends only on the target route),
so after a move only the two touched routes need re-batching.  All route
evaluations go through the vectorized fixed-sequence speed optimizer.
"""

import math
import random
import time
import zlib

import numpy as np

from prpso.speed_opt import Route, batch_route_metrics, evaluate_solution


class SearchParams:
    """Tuning knobs; defaults are the tuned values for 25-customer runs."""

    def __init__(self, i1=1.0, i2=100000, lam=1e-6, h=4, delta=20,
                 time_limit=58.0, seed=0, restarts=10):
        self.i1 = i1
        self.i2 = i2
        self.lam = lam
        self.h = h
        self.delta = delta
        self.time_limit = time_limit
        self.seed = seed
        self.restarts = restarts


class TabuResult:
    __slots__ = ("routes", "cost", "feasible", "iterations", "trace_hash",
                 "wall_time", "report")

    def __init__(self, routes, cost, feasible, iterations, trace_hash,
                 wall_time, report):
        self.routes = routes
        self.cost = cost
        self.feasible = feasible
        self.iterations = iterations
        self.trace_hash = trace_hash
        self.wall_time = wall_time
        self.report = report


_TOL = 1e-9


class _Search:
    """Mutable state for one restart (and, for the winner, phase two)."""

    def __init__(self, inst, params, rng, deadline, callback=None):
        self.inst = inst
        self.params = params
        self.rng = rng
        self.deadline = deadline
        self.callback = callback
        self.n = inst.n_customers

        slot_class = []
        for k, spec in enumerate(inst.vehicles):
            slot_class += [k] * spec.count
        self.slot_class = np.array(slot_class)
        self.S = len(slot_class)
        self.cap = np.array([inst.vehicles[k].vc.capacity
                             for k in slot_class])
        self.speed_max = [spec.vc.speed_max for spec in inst.vehicles]
        self.q = inst.demand  # capacity-side demands, indexed by customer id

        self.sqrtn = math.sqrt(self.n)
        self.theta = math.ceil(params.h * math.log10(self.n)) \
            if self.n > 1 else 0

        # single-customer round trips are route-independent; one batch/class
        self.single_cost = {}
        self.single_excess = {}
        ids = np.arange(1, self.n + 1)
        seqs = np.stack([np.zeros(self.n, dtype=np.int64), ids,
                         np.zeros(self.n, dtype=np.int64)], axis=1)
        for k in range(len(inst.vehicles)):
            sig, _, cost, _ = batch_route_metrics(inst, k, seqs)
            b = self.speed_max[k]
            exc = np.where(np.isfinite(sig), np.maximum(0.0, sig - b), np.inf)
            self.single_cost[k] = np.concatenate(([np.inf], cost))
            self.single_excess[k] = np.concatenate(([np.inf], exc))

        self.tabu_until = np.zeros((self.n + 1, self.S), dtype=np.int64)
        self.vartheta = np.zeros((self.n + 1, self.S))
        self.it = 0
        self.rho = 1.0
        self.best_cost = math.inf
        self.best_routes = None
        self.trace = 0

    # ---- state (re)construction ------------------------------------------

    def set_routes(self, routes):
        """Install a partition given as {slot: [customers]} and rebuild."""
        self.routes = [list(routes.get(s, [])) for s in range(self.S)]
        self.slot_of = np.full(self.n + 1, -1, dtype=np.int64)
        for s, r in enumerate(self.routes):
            for c in r:
                self.slot_of[c] = s
        self.load = np.zeros(self.S)
        self.cost = np.zeros(self.S)
        self.excess = np.zeros(self.S)
        self.ins_cost = np.full((self.n + 1, self.S), np.inf)
        self.ins_excess = np.full((self.n + 1, self.S), np.inf)
        self.ins_pos = np.zeros((self.n + 1, self.S), dtype=np.int64)
        self.ins_ok = np.zeros((self.n + 1, self.S), dtype=bool)
        self.rem_cost = np.zeros(self.n + 1)
        self.rem_excess = np.zeros(self.n + 1)
        for s in range(self.S):
            self._refresh_metrics(s)
        for s in range(self.S):
            self._refresh_ins_column(s)
            self._refresh_rem_entries(s)
        self._refresh_totals()
        self._note_incumbent()

    def _note_incumbent(self):
        if self.n_winf == 0 and self.total_ov <= _TOL and \
                self.total_cost < self.best_cost - 1e-12:
            self.best_cost = self.total_cost
            self.best_routes = {s: list(r) for s, r in enumerate(self.routes)
                                if r}

    def _metrics(self, k, custs):
        if not custs:
            return 0.0, 0.0
        seq = np.array([[0] + custs + [0]])
        sig, _, cost, _ = batch_route_metrics(self.inst, k, seq)
        b = self.speed_max[k]
        exc = max(0.0, sig[0] - b) if math.isfinite(sig[0]) else math.inf
        return float(cost[0]), exc

    def _refresh_metrics(self, s):
        custs = self.routes[s]
        self.load[s] = self.q[custs].sum() if custs else 0.0
        self.cost[s], self.excess[s] = self._metrics(self.slot_class[s],
                                                     custs)

    def _refresh_totals(self):
        self.total_cost = float(self.cost.sum())
        self.total_ov = float(np.maximum(0.0, self.load - self.cap).sum())
        self.n_winf = int((self.excess > 0.0).sum())

    def _insertion_rows(self, custs, c):
        """All sequences placing c at each gap of custs, depot-wrapped."""
        L = len(custs)
        rows = np.empty((L + 1, L + 3), dtype=np.int64)
        base = [0] + custs + [0]
        for p in range(L + 1):
            rows[p, :p + 1] = base[:p + 1]
            rows[p, p + 1] = c
            rows[p, p + 2:] = base[p + 1:]
        return rows

    def _refresh_ins_column(self, s):
        """Best admissible insertion of every outside customer into slot s."""
        custs = self.routes[s]
        k = self.slot_class[s]
        if not custs:
            self.ins_cost[:, s] = self.single_cost[k]
            self.ins_excess[:, s] = self.single_excess[k]
            self.ins_pos[:, s] = 0
            self.ins_ok[:, s] = self.single_excess[k] <= 0.0
            self.ins_ok[0, s] = False
            return
        self.ins_cost[:, s] = np.inf
        self.ins_excess[:, s] = np.inf
        self.ins_pos[:, s] = 0
        self.ins_ok[:, s] = False
        member = np.zeros(self.n + 1, dtype=bool)
        member[custs] = True
        cands = np.flatnonzero(~member)[1:]  # drop the depot row
        if len(cands) == 0:
            return
        L = len(custs)
        tmpl = self._insertion_rows(custs, -1)
        rows = np.repeat(tmpl[None, :, :], len(cands), axis=0)
        rows = rows.reshape(-1, L + 3)
        rows[rows == -1] = np.repeat(cands, L + 1)
        sig, _, cost, _ = batch_route_metrics(self.inst, k, rows)
        b = self.speed_max[k]
        sig = sig.reshape(len(cands), L + 1)
        cost = cost.reshape(len(cands), L + 1)
        exc = np.where(np.isfinite(sig), np.maximum(0.0, sig - b), np.inf)

        cur_exc = self.excess[s]
        if cur_exc > 0.0:
            admissible = exc <= cur_exc + 1e-12
        else:
            admissible = exc <= 0.0
        masked = np.where(admissible, cost, np.inf)
        pos = masked.argmin(axis=1)
        rowsel = np.arange(len(cands))
        ok = admissible[rowsel, pos]
        self.ins_cost[cands, s] = masked[rowsel, pos] - self.cost[s]
        self.ins_excess[cands, s] = exc[rowsel, pos]
        self.ins_pos[cands, s] = pos
        self.ins_ok[cands, s] = ok

    def _refresh_rem_entries(self, s):
        custs = self.routes[s]
        if not custs:
            return
        if len(custs) == 1:
            c = custs[0]
            self.rem_cost[c] = -self.cost[s]
            self.rem_excess[c] = 0.0
            return
        k = self.slot_class[s]
        L = len(custs)
        rows = np.empty((L, L + 1), dtype=np.int64)
        for i in range(L):
            rows[i] = [0] + custs[:i] + custs[i + 1:] + [0]
        sig, _, cost, _ = batch_route_metrics(self.inst, k, rows)
        b = self.speed_max[k]
        exc = np.where(np.isfinite(sig), np.maximum(0.0, sig - b), np.inf)
        for i, c in enumerate(custs):
            self.rem_cost[c] = cost[i] - self.cost[s]
            self.rem_excess[c] = exc[i]

    # ---- construction ------------------------------------------------------

    def construct(self):
        """Stochastic seeded insertion; never drops a customer."""
        rng = self.rng
        order = list(range(1, self.n + 1))
        rng.shuffle(order)
        l = min(rng.randint(1, self.S), self.n)
        seed_slots = sorted(rng.sample(range(self.S), l))
        routes = {s: [order[i]] for i, s in enumerate(seed_slots)}
        loads = {}
        costs = {}
        excs = {}
        for s in seed_slots:
            loads[s] = float(self.q[routes[s][0]])
            costs[s], excs[s] = self._metrics(self.slot_class[s], routes[s])

        for c in order[l:]:
            best = None
            for s in seed_slots:
                k = self.slot_class[s]
                rows = self._insertion_rows(routes[s], c)
                sig, _, cost, _ = batch_route_metrics(self.inst, k, rows)
                b = self.speed_max[k]
                exc = np.where(np.isfinite(sig), np.maximum(0.0, sig - b),
                               np.inf)
                dov = (max(0.0, loads[s] + self.q[c] - self.cap[s])
                       - max(0.0, loads[s] - self.cap[s]))
                dz = cost - costs[s] + self.rho * dov
                soft = (exc <= 0.0) | (exc <= excs[s] + 1e-12)
                if soft.any():
                    p = int(np.where(soft, dz, np.inf).argmin())
                    key = (0, float(dz[p]), s, p)
                else:
                    p = int(np.lexsort((dz, exc))[0])
                    key = (1, float(exc[p]), float(dz[p]), s, p)
                if best is None or key < best[0]:
                    best = (key, s, p, float(cost[p]), float(exc[p]))
            key, s, p, ncost, nexc = best
            routes[s] = routes[s][:p] + [c] + routes[s][p:]
            loads[s] += float(self.q[c])
            costs[s] = ncost
            excs[s] = nexc
        self.set_routes(routes)

    # ---- neighborhood ------------------------------------------------------

    def _allowed_targets(self):
        allowed = np.zeros(self.S, dtype=bool)
        first_empty = set()
        for s in range(self.S):
            if self.routes[s]:
                allowed[s] = True
            elif self.slot_class[s] not in first_empty:
                allowed[s] = True
                first_empty.add(self.slot_class[s])
        return allowed

    def step(self):
        """One TS iteration; returns False on stall or deadline."""
        if time.perf_counter() > self.deadline:
            return False
        self.it += 1
        it = self.it

        slot_of = self.slot_of
        qcol = self.q[:, None]
        ins_ov = (np.maximum(0.0, self.load[None, :] + qcol - self.cap)
                  - np.maximum(0.0, self.load[None, :] - self.cap))
        load_s = self.load[slot_of]
        cap_s = self.cap[slot_of]
        rem_ov = (np.maximum(0.0, load_s - self.q - cap_s)
                  - np.maximum(0.0, load_s - cap_s))

        ins_c = np.where(self.ins_ok, self.ins_cost, 0.0)
        d_cost = self.rem_cost[:, None] + ins_c
        d_ov = rem_ov[:, None] + ins_ov
        score = (d_cost + self.rho * d_ov
                 + self.params.lam * self.sqrtn
                 * (self.total_cost + d_cost) * self.vartheta)

        valid = self.ins_ok.copy()
        valid[0, :] = False
        valid &= np.arange(self.S)[None, :] != slot_of[:, None]
        valid &= self._allowed_targets()[None, :]

        winf = self.excess > 0.0
        winf_after = (self.n_winf
                      - winf[slot_of][:, None].astype(np.int64)
                      - winf[None, :].astype(np.int64)
                      + (self.rem_excess > 0.0)[:, None].astype(np.int64)
                      + (self.ins_excess > 0.0).astype(np.int64))
        feasible_after = (winf_after == 0) & (self.total_ov + d_ov <= _TOL)
        aspirate = feasible_after & \
            (self.total_cost + d_cost < self.best_cost - 1e-12)
        valid &= ~((self.tabu_until >= it) & ~aspirate)

        score = np.where(valid, score, np.inf)
        flat = int(score.argmin())
        c, t = divmod(flat, self.S)
        if not np.isfinite(score[c, t]):
            return False  # stall: every move inadmissible or tabu

        s = int(slot_of[c])
        p = int(self.ins_pos[c, t])
        self.routes[s].remove(c)
        self.routes[t].insert(p, c)
        self.slot_of[c] = t
        self.tabu_until[c, s] = it + self.theta
        self.vartheta[c, t] += 1.0

        self._refresh_metrics(s)
        self._refresh_metrics(t)
        self._intra(s)
        self._intra(t)
        for u in (s, t):
            self._refresh_ins_column(u)
            self._refresh_rem_entries(u)
        self._refresh_totals()

        self._note_incumbent()

        if self.params.delta > 0 and it % self.params.delta == 0:
            self.rho *= 0.5 if self.total_ov <= _TOL else 2.0

        self.trace = zlib.crc32(
            b"%d,%d,%d,%d,%d" % (it, c, s, t, round(self.total_cost * 1e6)),
            self.trace)
        if self.callback is not None:
            self.callback(it, self.best_cost, self.rho)
        return True

    def _intra_pass_batch(self, s, pending):
        """One batch holding every reposition of each pending customer."""
        custs = self.routes[s]
        k = self.slot_class[s]
        b = self.speed_max[k]
        L = len(custs)
        rows = np.empty((len(pending) * L, L + 2), dtype=np.int64)
        for i, c in enumerate(pending):
            rest = [x for x in custs if x != c]
            rows[i * L:(i + 1) * L] = self._insertion_rows(rest, c)
        sig, _, cost, _ = batch_route_metrics(self.inst, k, rows)
        exc = np.where(np.isfinite(sig), np.maximum(0.0, sig - b), np.inf)
        return cost.reshape(len(pending), L), exc.reshape(len(pending), L)

    def _intra(self, s):
        """Random-pick best-reposition passes until a full pass stalls."""
        if len(self.routes[s]) < 2:
            return
        improved = True
        while improved:
            improved = False
            order = list(self.routes[s])
            self.rng.shuffle(order)
            idx = 0
            cost, exc = self._intra_pass_batch(s, order)
            while idx < len(order):
                c = order[idx]
                crow, erow = cost[idx], exc[idx]
                idx += 1
                if self.excess[s] > 0.0:
                    admissible = erow <= self.excess[s] + 1e-12
                else:
                    admissible = erow <= 0.0
                masked = np.where(admissible, crow, np.inf)
                p = int(masked.argmin())
                if masked[p] < self.cost[s] - 1e-12:
                    rest = [x for x in self.routes[s] if x != c]
                    self.routes[s] = rest[:p] + [c] + rest[p:]
                    self.cost[s] = float(masked[p])
                    self.excess[s] = float(erow[p])
                    improved = True
                    if idx < len(order):
                        order = order[idx:]
                        idx = 0
                        cost, exc = self._intra_pass_batch(s, order)

    def run(self, iters):
        for _ in range(iters):
            if not self.step():
                break


def _as_routes(routes_by_slot, slot_class):
    return [Route(int(slot_class[s]), (0,) + tuple(routes_by_slot[s]) + (0,))
            for s in sorted(routes_by_slot)]


def run_tabu(inst, params: SearchParams, callback=None) -> TabuResult:
    """Two-phase search: short random restarts, then a long improving run."""
    t0 = time.perf_counter()
    deadline = t0 + params.time_limit
    rng = random.Random(params.seed)
    n = inst.n_customers
    if n == 0:
        return TabuResult([], 0.0, True, 0, 0, 0.0, None)

    phase1_iters = math.ceil(params.i1 * n)
    winner = None
    winner_key = None
    trace = 0
    total_iters = 0

    for _ in range(params.restarts):
        if winner is not None and time.perf_counter() > deadline:
            break
        search = _Search(inst, params, rng, deadline, callback)
        search.construct()
        search.run(phase1_iters)
        total_iters += search.it
        trace = zlib.crc32(b"restart%d" % search.it, trace ^ search.trace)
        key = ((0, search.best_cost) if search.best_routes is not None
               else (1, search.total_cost + search.rho * search.total_ov
                     + 1e9 * search.n_winf))
        if winner is None or key < winner_key:
            winner, winner_key = search, key

    if winner.best_routes is not None:
        winner.set_routes(winner.best_routes)
    winner.rho = 1.0
    phase1_count = winner.it
    winner.run(params.i2)
    total_iters += winner.it - phase1_count
    trace = zlib.crc32(b"final%d" % winner.it, trace ^ winner.trace)

    wall = time.perf_counter() - t0
    if winner.best_routes is None:
        return TabuResult(None, math.inf, False, total_iters, trace, wall,
                          None)
    routes = _as_routes(winner.best_routes, winner.slot_class)
    report = evaluate_solution(routes, inst)
    if not report.feasible or \
            abs(report.total_cost - winner.best_cost) > 1e-6 * max(
                1.0, winner.best_cost):
        raise RuntimeError("incumbent drifted from its re-evaluation: "
                           "%r vs %r" % (winner.best_cost, report.total_cost))
    return TabuResult(routes, report.total_cost, True, total_iters, trace,
                      wall, report)
