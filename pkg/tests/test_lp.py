"""Contract tests for the LP backends (scipy HiGHS and bundled simplex)."""

import numpy as np
import pytest

from prpso.lp import solve_lp

BACKENDS = ["highs", "simplex"]


@pytest.mark.parametrize("backend", BACKENDS)
def test_equality_lp_with_known_duals(backend):
    # min x0 + 2 x1  s.t.  x0 + x1 = 4, x0 - x1 = 0  ->  x = (2, 2)
    res = solve_lp([1.0, 2.0], a_eq=[[1, 1], [1, -1]], b_eq=[4, 0],
                   backend=backend)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(6.0)
    assert res.x == pytest.approx([2.0, 2.0])
    # dual system: y1 + y2 = 1, y1 - y2 = 2 -> y = (1.5, -0.5)
    assert res.dual_eq == pytest.approx([1.5, -0.5])


@pytest.mark.parametrize("backend", BACKENDS)
def test_inequality_lp_with_known_duals(backend):
    # min -x0 - x1  s.t.  x0 + 2 x1 <= 4, 3 x0 + x1 <= 6
    # optimum x = (1.6, 1.2), duals (-0.4, -0.2)
    res = solve_lp([-1.0, -1.0], a_ub=[[1, 2], [3, 1]], b_ub=[4, 6],
                   backend=backend)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(-2.8)
    assert res.x == pytest.approx([1.6, 1.2])
    assert res.dual_ub == pytest.approx([-0.4, -0.2])
    assert (res.dual_ub <= 1e-12).all()


@pytest.mark.parametrize("backend", BACKENDS)
def test_mixed_rows(backend):
    # min x0 + x1 + 4 x2  s.t.  x0 + x1 + x2 = 3,  x1 <= 1
    res = solve_lp([1.0, 1.0, 4.0], a_eq=[[1, 1, 1]], b_eq=[3],
                   a_ub=[[0, 1, 0]], b_ub=[1], backend=backend)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(3.0)
    assert res.x @ np.array([1, 1, 1]) == pytest.approx(3.0)
    assert res.dual_eq == pytest.approx([1.0])
    assert res.dual_ub == pytest.approx([0.0])


@pytest.mark.parametrize("backend", BACKENDS)
def test_infeasible_detected(backend):
    res = solve_lp([1.0], a_eq=[[1.0]], b_eq=[-2.0], backend=backend)
    assert res.status == "infeasible"


@pytest.mark.parametrize("backend", BACKENDS)
def test_unbounded_detected(backend):
    res = solve_lp([-1.0, 0.0], a_ub=[[0.0, 1.0]], b_ub=[1.0],
                   backend=backend)
    assert res.status == "unbounded"


@pytest.mark.parametrize("backend", BACKENDS)
def test_negative_rhs_row(backend):
    # -x0 <= -2 means x0 >= 2
    res = solve_lp([1.0], a_ub=[[-1.0]], b_ub=[-2.0], backend=backend)
    assert res.status == "optimal"
    assert res.x == pytest.approx([2.0])
    assert res.dual_ub == pytest.approx([-1.0])


@pytest.mark.parametrize("backend", BACKENDS)
def test_set_partitioning_shape(backend):
    # three customers, four route columns plus unit slack columns,
    # one <= row for the vehicle budget: the RMP layout in miniature
    cols = np.array([
        [1, 0, 0, 1, 1, 0, 0],
        [0, 1, 0, 1, 0, 1, 0],
        [0, 0, 1, 1, 0, 0, 1],
    ], dtype=float)
    cost = np.array([5.0, 5.0, 5.0, 16.0, 1e5, 1e5, 1e5])
    budget = np.array([[1, 1, 1, 1, 0, 0, 0]], dtype=float)
    res = solve_lp(cost, a_eq=cols, b_eq=[1, 1, 1], a_ub=budget, b_ub=[2],
                   backend=backend)
    assert res.status == "optimal"
    # with lambda_i = 1 - lambda_4 the budget forces lambda_4 >= 1/2,
    # objective 15 + lambda_4 -> optimum 15.5, budget dual -1/2
    assert res.objective == pytest.approx(15.5)
    assert res.dual_ub[0] == pytest.approx(-0.5)


def test_backends_agree_on_random_lps():
    rng = np.random.default_rng(7)
    agree = 0
    for _ in range(40):
        m_eq, m_ub, n = rng.integers(1, 4), rng.integers(1, 4), rng.integers(2, 7)
        a_eq = rng.uniform(-1, 2, (m_eq, n))
        a_ub = rng.uniform(-1, 2, (m_ub, n))
        x_feas = rng.uniform(0, 2, n)
        b_eq = a_eq @ x_feas          # guarantees feasibility
        b_ub = a_ub @ x_feas + rng.uniform(0, 1, m_ub)
        c = rng.uniform(0.1, 3, n)    # positive costs keep it bounded
        r1 = solve_lp(c, a_eq, b_eq, a_ub, b_ub, backend="highs")
        r2 = solve_lp(c, a_eq, b_eq, a_ub, b_ub, backend="simplex")
        assert r1.status == r2.status == "optimal"
        assert r1.objective == pytest.approx(r2.objective, abs=1e-7)
        for r in (r1, r2):
            # strong duality and dual feasibility certify the dual vectors
            assert r.dual_eq @ b_eq + r.dual_ub @ b_ub == \
                pytest.approx(r.objective, abs=1e-7)
            assert (a_eq.T @ r.dual_eq + a_ub.T @ r.dual_ub
                    <= c + 1e-7).all()
            assert (r.dual_ub <= 1e-9).all()
        agree += 1
    assert agree == 40
