import numpy as np
import pytest

from vmlab import (
    CapacityExceeded,
    INFEASIBLE,
    LinearProgram,
    OPTIMAL,
    UNBOUNDED,
    enumerate_signs,
    hill_climb,
    sign_patterns,
    solve_lp,
)


def test_lp_trivial_examples():
    sol = solve_lp(LinearProgram(np.array([1.0]), [([1.0], "<=", 3.0)]))
    assert sol.status == OPTIMAL
    assert sol.value == pytest.approx(3.0, abs=1e-9)

    sol = solve_lp(LinearProgram(np.array([1.0, 1.0]), [([1.0, 1.0], "<=", 1.0)]))
    assert sol.status == OPTIMAL
    assert sol.value == pytest.approx(1.0, abs=1e-9)


def test_lp_equality_and_free_variables():
    # max x - y  s.t.  x + y = 2,  x <= 3,  y free
    lp = LinearProgram(
        np.array([1.0, -1.0]),
        [([1.0, 1.0], "=", 2.0), ([1.0, 0.0], "<=", 3.0)],
        bounds=[(0.0, None), (None, None)],
    )
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.value == pytest.approx(4.0, abs=1e-9)
    assert sol.point == pytest.approx([3.0, -1.0], abs=1e-9)


def test_lp_statuses():
    lp = LinearProgram(np.array([1.0]), [([1.0], "<=", -1.0)])  # x >= 0 and x <= -1
    assert solve_lp(lp).status == INFEASIBLE
    lp = LinearProgram(np.array([1.0]), [([-1.0], "<=", 1.0)])
    assert solve_lp(lp).status == UNBOUNDED


def test_lp_two_sided_bounds():
    lp = LinearProgram(
        np.array([-1.0, 2.0]),
        [([1.0, 1.0], "<=", 10.0)],
        bounds=[(-2.0, 5.0), (1.0, 4.0)],
    )
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.value == pytest.approx(10.0, abs=1e-9)
    assert sol.point == pytest.approx([-2.0, 4.0], abs=1e-9)


def _random_lp(rng, nvars=10, nrows=8):
    c = rng.normal(size=nvars)
    rows = []
    for _ in range(nrows):
        rows.append((rng.normal(size=nvars), "<=", float(rng.uniform(0.5, 3.0))))
    bounds = [(0.0, float(rng.uniform(0.5, 4.0))) for _ in range(nvars)]
    return LinearProgram(c, rows, bounds)


def test_lp_against_scipy():
    from scipy.optimize import linprog

    rng = np.random.default_rng(7)
    for _ in range(60):
        lp = _random_lp(rng)
        sol = solve_lp(lp)
        res = linprog(
            -lp.objective,
            A_ub=np.array([a for a, _, _ in lp.constraints]),
            b_ub=np.array([b for _, _, b in lp.constraints]),
            bounds=lp.bounds,
            method="highs",
        )
        assert sol.status == OPTIMAL and res.status == 0
        assert sol.value == pytest.approx(-res.fun, abs=1e-8)
        # the reported point satisfies the constraints and matches the value
        for a, _, b in lp.constraints:
            assert np.asarray(a) @ sol.point <= b + 1e-9
        assert lp.objective @ sol.point == pytest.approx(sol.value, abs=1e-9)


def test_lp_invariant_under_row_and_variable_reordering():
    rng = np.random.default_rng(8)
    for _ in range(20):
        lp = _random_lp(rng)
        base = solve_lp(lp).value
        perm = rng.permutation(len(lp.constraints))
        shuffled = LinearProgram(
            lp.objective, [lp.constraints[i] for i in perm], lp.bounds
        )
        assert solve_lp(shuffled).value == pytest.approx(base, abs=1e-8)
        vperm = rng.permutation(lp.objective.size)
        reordered = LinearProgram(
            lp.objective[vperm],
            [(np.asarray(a)[vperm], r, b) for a, r, b in lp.constraints],
            [lp.bounds[i] for i in vperm],
        )
        assert solve_lp(reordered).value == pytest.approx(base, abs=1e-8)


def test_sign_patterns_counts_and_pinning():
    assert [p.copy() for p, _ in sign_patterns(1)] == [pytest.approx([1.0])]
    patterns = [tuple(p) for p, _ in sign_patterns(3)]
    assert len(patterns) == 4
    assert len(set(patterns)) == 4
    assert all(p[0] == 1.0 for p in patterns)
    seen = set()
    previous = None
    for eps, flipped in sign_patterns(5):
        seen.add(tuple(eps))
        if previous is not None:
            assert int(np.sum(np.asarray(previous) != eps)) == 1  # Gray property
            assert eps[flipped] != previous[flipped]
        previous = tuple(eps)
    assert len(seen) == 16
    with pytest.raises(CapacityExceeded):
        list(sign_patterns(25))


def test_enumerate_signs_incremental_consistency():
    rng = np.random.default_rng(9)
    a = rng.normal(size=(10, 3))
    state = {"sum": a.sum(axis=0)}

    def visit(eps, flipped):
        if flipped is not None:
            state["sum"] = state["sum"] + 2.0 * eps[flipped] * a[flipped]
        recomputed = eps @ a
        assert np.max(np.abs(state["sum"] - recomputed)) < 1e-12

    enumerate_signs(10, visit)


def test_hill_climb_constant_objective():
    pattern, value = hill_climb(6, lambda eps: 2.5, restarts=3, seed=1)
    assert value == 2.5
    assert pattern.shape == (6,)


def test_hill_climb_is_lower_bound_of_enumeration():
    rng = np.random.default_rng(10)
    for _ in range(25):
        k = int(rng.integers(2, 9))
        a = rng.normal(size=(k, 3))

        def objective(eps):
            return float(np.abs(eps @ a).sum())

        best = max(objective(eps) for eps, _ in sign_patterns(k))
        _, value = hill_climb(k, objective, restarts=4, seed=int(rng.integers(1 << 30)))
        assert value <= best + 1e-12


def test_hill_climb_deterministic():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(8, 2))

    def objective(eps):
        return float(np.abs(eps @ a).sum())

    first = hill_climb(8, objective, restarts=8, seed=42)
    second = hill_climb(8, objective, restarts=8, seed=42)
    assert first[1] == second[1]
    assert np.array_equal(first[0], second[0])


def test_lp_with_equalities_against_scipy():
    from scipy.optimize import linprog

    rng = np.random.default_rng(12)
    for _ in range(40):
        nvars = 6
        x0 = rng.uniform(0.2, 1.5, nvars)  # known feasible point
        c = rng.normal(size=nvars)
        a_eq = [rng.normal(size=nvars) for _ in range(2)]
        rows = [(a, "=", float(a @ x0)) for a in a_eq]
        a_ub = [rng.normal(size=nvars) for _ in range(5)]
        rows += [(a, "<=", float(a @ x0 + rng.uniform(0.1, 2.0))) for a in a_ub]
        bounds = [(0.0, 3.0)] * (nvars - 1) + [(None, 3.0)]
        sol = solve_lp(LinearProgram(c, rows, bounds))
        res = linprog(
            -c,
            A_ub=np.array(a_ub),
            b_ub=np.array([b for _, r, b in rows if r == "<="]),
            A_eq=np.array(a_eq),
            b_eq=np.array([b for _, r, b in rows if r == "="]),
            bounds=bounds,
            method="highs",
        )
        assert sol.status == OPTIMAL and res.status == 0
        assert sol.value == pytest.approx(-res.fun, abs=1e-7)
        for a, rel, b in rows:
            resid = float(np.asarray(a) @ sol.point) - b
            assert resid <= 1e-8 if rel == "<=" else abs(resid) <= 1e-8
