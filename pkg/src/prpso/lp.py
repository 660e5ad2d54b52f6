"""Linear programming backend behind one small contract.

solve_lp(c, a_eq, b_eq, a_ub, b_ub) minimizes c'x subject to a_eq x = b_eq,
a_ub x <= b_ub, x >= 0, and returns primal values, the two dual vectors, and
a status flag.  The default backend delegates to scipy's HiGHS interface;
a dense two-phase revised simplex ships alongside it so nothing here
depends on scipy being importable, and the contract tests run against both.

Dual sign convention: for a minimization, equality duals are free and
inequality duals are <= 0, matching scipy's `eqlin`/`ineqlin` marginals.
"""

import numpy as np

try:
    from scipy.optimize import linprog as _scipy_linprog
except ImportError:  # pragma: no cover - exercised only without scipy
    _scipy_linprog = None


class LpResult:
    __slots__ = ("status", "objective", "x", "dual_eq", "dual_ub")

    def __init__(self, status, objective, x, dual_eq, dual_ub):
        self.status = status        # "optimal" | "infeasible" | "unbounded"
        self.objective = objective
        self.x = x
        self.dual_eq = dual_eq
        self.dual_ub = dual_ub


def solve_lp(c, a_eq=None, b_eq=None, a_ub=None, b_ub=None, backend="highs"):
    if backend == "highs" and _scipy_linprog is not None:
        return _solve_highs(c, a_eq, b_eq, a_ub, b_ub)
    return _solve_simplex(c, a_eq, b_eq, a_ub, b_ub)


def _solve_highs(c, a_eq, b_eq, a_ub, b_ub):
    res = _scipy_linprog(c, A_eq=a_eq, b_eq=b_eq, A_ub=a_ub, b_ub=b_ub,
                         bounds=(0, None), method="highs")
    if res.status == 2:
        return LpResult("infeasible", None, None, None, None)
    if res.status == 3:
        return LpResult("unbounded", None, None, None, None)
    if res.status != 0:
        raise RuntimeError("LP solve failed: %s" % res.message)
    dual_eq = res.eqlin.marginals if a_eq is not None else np.zeros(0)
    dual_ub = res.ineqlin.marginals if a_ub is not None else np.zeros(0)
    return LpResult("optimal", float(res.fun), np.asarray(res.x),
                    np.asarray(dual_eq), np.asarray(dual_ub))


def _solve_simplex(c, a_eq, b_eq, a_ub, b_ub):
    """Dense two-phase tableau simplex, Bland's rule (no cycling)."""
    c = np.asarray(c, dtype=float)
    n = len(c)
    blocks, rhs, kinds = [], [], []
    if a_eq is not None and len(a_eq):
        blocks.append(np.asarray(a_eq, dtype=float))
        rhs.append(np.asarray(b_eq, dtype=float))
        kinds += ["eq"] * len(b_eq)
    if a_ub is not None and len(a_ub):
        blocks.append(np.asarray(a_ub, dtype=float))
        rhs.append(np.asarray(b_ub, dtype=float))
        kinds += ["ub"] * len(b_ub)
    if not blocks:
        # x = 0 is optimal iff no negative cost coefficient (else unbounded)
        if (c < 0).any():
            return LpResult("unbounded", None, None, None, None)
        return LpResult("optimal", 0.0, np.zeros(n), np.zeros(0), np.zeros(0))

    A = np.vstack(blocks)
    b = np.concatenate(rhs).astype(float)
    m = len(b)
    n_slack = sum(1 for k in kinds if k == "ub")

    # columns: n structural | n_slack slacks (one per ub row) | m artificials
    ncols = n + n_slack + m
    T = np.zeros((m, ncols))
    T[:, :n] = A
    si = 0
    for r, k in enumerate(kinds):
        if k == "ub":
            T[r, n + si] = 1.0
            si += 1
    flipped = b < 0
    T[flipped] *= -1.0
    b = np.abs(b)
    for r in range(m):
        T[r, n + n_slack + r] = 1.0

    basis = [n + n_slack + r for r in range(m)]
    tol = 1e-9

    def run(cost, allow):
        """Pivot until optimal (True) or an unbounded ray is found (False)."""
        while True:
            y = cost[basis] @ T
            enter = -1
            for j in range(ncols):
                if allow[j] and cost[j] - y[j] < -tol:
                    enter = j
                    break
            if enter < 0:
                return True
            col = T[:, enter]
            leave, best = -1, np.inf
            for r in range(m):
                if col[r] > tol:
                    ratio = b[r] / col[r]
                    if (ratio < best - 1e-12 or
                            (ratio <= best + 1e-12 and
                             (leave < 0 or basis[r] < basis[leave]))):
                        best, leave = ratio, r
            if leave < 0:
                return False
            piv = col[leave]
            T[leave] /= piv
            b[leave] /= piv
            for r in range(m):
                if r != leave and T[r, enter] != 0.0:
                    f = T[r, enter]
                    T[r] -= f * T[leave]
                    b[r] -= f * b[leave]
            b[b < 0] = 0.0  # clamp pivot round-off
            basis[leave] = enter

    allow_all = np.ones(ncols, dtype=bool)
    phase1 = np.zeros(ncols)
    phase1[n + n_slack:] = 1.0
    if not run(phase1, allow_all):
        raise RuntimeError("phase-1 unbounded; inconsistent tableau")
    if phase1[basis] @ b > 1e-7:
        return LpResult("infeasible", None, None, None, None)

    # kick leftover zero-value artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= n + n_slack:
            for j in range(n + n_slack):
                if abs(T[r, j]) > 1e-7:
                    piv = T[r, j]
                    T[r] /= piv
                    b[r] /= piv
                    for r2 in range(m):
                        if r2 != r and T[r2, j] != 0.0:
                            f = T[r2, j]
                            T[r2] -= f * T[r]
                            b[r2] -= f * b[r]
                    basis[r] = j
                    break

    cost = np.zeros(ncols)
    cost[:n] = c
    allow = allow_all.copy()
    allow[n + n_slack:] = False  # artificials may never re-enter
    if not run(cost, allow):
        return LpResult("unbounded", None, None, None, None)

    x = np.zeros(n)
    for r, j in enumerate(basis):
        if j < n:
            x[j] = b[r]
    # The multiplier of row r is the phase-2 price of its artificial column
    # (cost zero there, so it is minus the reduced cost); rows that were
    # sign-flipped get their dual flipped back.
    y = cost[basis] @ T
    duals = np.array([y[n + n_slack + r] for r in range(m)])
    duals[flipped] *= -1.0
    for r in range(m):
        if kinds[r] == "ub" and duals[r] > 0:
            duals[r] = 0.0  # numerical guard; ub duals are nonpositive
    n_eq = kinds.count("eq")
    return LpResult("optimal", float(c @ x), x, duals[:n_eq], duals[n_eq:])
